#include "nols/swap_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>

namespace nols {

namespace {

std::size_t U(int i) { return static_cast<std::size_t>(i); }

}  // namespace

AnalysisContext make_context(const MetricInstance& base, const std::vector<int>& F, const std::vector<int>& Fstar) {
  if (F.empty() || Fstar.empty()) throw std::invalid_argument("analysis needs nonempty local and optimal sets");
  const int nf = static_cast<int>(base.num_facilities());
  std::vector<int> locs;
  for (const auto* set : {&F, &Fstar})
    for (int f : *set) {
      if (f < 0 || f >= nf) throw std::invalid_argument("facility id out of range");
      locs.push_back(base.facility_location(f));
    }
  AnalysisContext ctx;
  ctx.inst = base.with_facilities(std::move(locs));
  ctx.local_ids = F;
  ctx.opt_ids = Fstar;
  ctx.nl = static_cast<int>(F.size());
  ctx.no = static_cast<int>(Fstar.size());
  return ctx;
}

MappingSample base_mapping(const AnalysisContext& ctx) {
  if (ctx.nl < 2) throw std::invalid_argument("need at least two local facilities");
  std::vector<int> locals(U(ctx.nl)), opts(U(ctx.no));
  std::iota(locals.begin(), locals.end(), 0);
  std::iota(opts.begin(), opts.end(), ctx.nl);
  MappingSample m;
  m.eta1.resize(U(ctx.no));
  m.eta2.resize(U(ctx.no));
  m.rho.resize(U(ctx.no));
  for (int j = 0; j < ctx.no; ++j) {
    const auto near = nearest_from_location(ctx.inst, ctx.inst.facility_location(ctx.nl + j), locals, 2);
    m.eta1[U(j)] = near[0].first;
    m.eta2[U(j)] = near[1].first;
    const double a = near[0].second, b = near[1].second;
    m.rho[U(j)] = b > 0 ? std::clamp(a / b, 0.0, 1.0) : 1.0;
  }
  m.pi.resize(U(ctx.nl));
  for (int i = 0; i < ctx.nl; ++i)
    m.pi[U(i)] = nearest_from_location(ctx.inst, ctx.inst.facility_location(i), opts, 1)[0].first - ctx.nl;
  return m;
}

std::string to_string(SwapKind k) { return k == SwapKind::Simple ? "simple" : "tree"; }

std::string to_string(TauEvent e) {
  switch (e) {
    case TauEvent::S1: return "S1";
    case TauEvent::S2: return "S2";
    case TauEvent::T1: return "T1";
    case TauEvent::T2: return "T2";
  }
  return "?";
}

std::string to_string(BalanceMode m) { return m == BalanceMode::Strict ? "strict" : "desk"; }

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho <= 1.0)) throw std::invalid_argument("rho must lie in [0,1]");
}

}  // namespace

EventProbabilities event_probabilities(double rho) {
  check_rho(rho);
  if (rho <= 2.0 / 3.0) return {0.5, 0.0, 0.5, 0.0};
  if (rho <= 0.75) return {0.5, 0.0, 0.25, 0.25};
  return {1.25 - rho, rho - 0.75, 0.25, 0.25};
}

TauChoice sample_tau(double rho, SwapKind kind, Rng& rng) {
  check_rho(rho);
  if (kind == SwapKind::Simple) {
    if (rho <= 0.75) return TauChoice::Eta1;
    return rng.bernoulli(2.5 - 2.0 * rho) ? TauChoice::Eta1 : TauChoice::Eta2;
  }
  if (rho <= 2.0 / 3.0) return TauChoice::Eta1;
  return rng.bernoulli(0.5) ? TauChoice::Eta1 : TauChoice::Eta2;
}

TauEvent sample_event(double rho, Rng& rng) {
  check_rho(rho);
  const bool simple = rng.bernoulli(0.5);
  const TauChoice c = sample_tau(rho, simple ? SwapKind::Simple : SwapKind::Tree, rng);
  if (simple) return c == TauChoice::Eta1 ? TauEvent::S1 : TauEvent::S2;
  return c == TauChoice::Eta1 ? TauEvent::T1 : TauEvent::T2;
}

std::vector<int> neighbor_set(const MappingSample& m, int j) {
  if (m.rho[U(j)] <= 2.0 / 3.0) return {m.eta1[U(j)]};
  return {m.eta1[U(j)], m.eta2[U(j)]};
}

std::vector<int> heavy_local_facilities(const MappingSample& m, int nl, int t_d) {
  if (t_d < 1) throw std::invalid_argument("t_d must be >= 1");
  std::vector<int> count(U(nl), 0);
  for (std::size_t j = 0; j < m.eta1.size(); ++j)
    for (int f : neighbor_set(m, static_cast<int>(j))) ++count[U(f)];
  std::vector<int> out;
  for (int i = 0; i < nl; ++i)
    if (count[U(i)] > t_d + 1) out.push_back(i);
  return out;
}

std::vector<int> local_candidates(const MappingSample& m, int nl, const std::vector<int>& heavy) {
  std::vector<char> is_heavy(U(nl), 0), ok(U(nl), 1);
  for (int h : heavy) is_heavy[U(h)] = 1;
  for (std::size_t j = 0; j < m.tau.size(); ++j) {
    bool has = false;
    for (int f : neighbor_set(m, static_cast<int>(j))) has = has || is_heavy[U(f)];
    if (!has) ok[U(m.tau[j])] = 0;
  }
  std::vector<int> out;
  for (int i = 0; i < nl; ++i)
    if (!is_heavy[U(i)] && ok[U(i)]) out.push_back(i);
  return out;
}

int degree_threshold(double eps) {
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0,1]");
  return static_cast<int>(std::ceil(1.0 / eps - 1e-12));
}

std::vector<int> height_thresholds(double eps) {
  const int c = degree_threshold(eps);
  std::vector<int> out;
  long long v = 2;
  for (int i = 1; i <= c; ++i) {
    v = (i == 1) ? 2LL * c : v * c;
    if (v > (1LL << 30)) throw std::invalid_argument("height threshold overflows; eps too small");
    out.push_back(static_cast<int>(v));
  }
  return out;
}

// ---------------------------------------------------------------------------
// Balancing

double strict_surplus_requirement(int x, int theta, double eps) {
  const double t = std::max(theta, 1);
  return 16.0 * std::pow(x, 5) * t * t * (t + 1) / eps;
}

namespace {

struct ConflictIndex {
  std::vector<std::set<int>> adj;
  explicit ConflictIndex(const std::vector<std::vector<int>>& c) : adj(c.size()) {
    for (std::size_t a = 0; a < c.size(); ++a)
      for (int b : c[a]) {
        adj[a].insert(b);
        adj[U(b)].insert(static_cast<int>(a));
      }
  }
  bool clash(int a, int b) const { return adj[U(a)].count(b) > 0; }
  bool clash_any(int a, const std::vector<int>& group) const {
    for (int b : group)
      if (clash(a, b)) return true;
    return false;
  }
};

// Pick `want` distinct entries of `pool` at random with no pairwise conflict
// and none conflicting with `fixed`. Returns positions into pool.
bool pick_independent(const std::vector<int>& pool, int want, const std::vector<int>& fixed, const ConflictIndex& ci,
                      Rng& rng, std::vector<std::size_t>& pos) {
  pos.clear();
  if (static_cast<int>(pool.size()) < want) return false;
  std::vector<int> chosen = fixed;
  std::set<std::size_t> seen;
  std::size_t attempts = 0;
  const std::size_t limit = 8 * pool.size() + 64;
  while (static_cast<int>(pos.size()) < want && attempts < limit) {
    ++attempts;
    const std::size_t k = static_cast<std::size_t>(rng.below(pool.size()));
    if (seen.count(k)) continue;
    seen.insert(k);
    if (ci.clash_any(pool[k], chosen)) continue;
    pos.push_back(k);
    chosen.push_back(pool[k]);
  }
  if (static_cast<int>(pos.size()) == want) return true;
  // Deterministic sweep over what remains.
  for (std::size_t k = 0; k < pool.size() && static_cast<int>(pos.size()) < want; ++k) {
    if (seen.count(k)) continue;
    if (ci.clash_any(pool[k], chosen)) continue;
    pos.push_back(k);
    chosen.push_back(pool[k]);
  }
  return static_cast<int>(pos.size()) == want;
}

void erase_positions(std::vector<int>& v, std::vector<std::size_t> pos) {
  std::sort(pos.rbegin(), pos.rend());
  for (std::size_t p : pos) {
    v[p] = v.back();
    v.pop_back();
  }
}

}  // namespace

BalanceResult balance(const std::vector<int>& green, const std::vector<int>& red,
                      const std::vector<std::vector<int>>& conflicts, double eps, BalanceMode mode, Rng& rng) {
  const int n = static_cast<int>(green.size());
  if (red.size() != green.size() || conflicts.size() != green.size())
    throw std::invalid_argument("balance: green, red and conflicts must have one entry per set");
  if (!(eps > 0.0 && eps <= 1.0)) throw std::invalid_argument("eps must lie in (0,1]");
  const ConflictIndex ci(conflicts);
  BalanceResult res;
  for (int s = 0; s < n; ++s) {
    res.x = std::max(res.x, green[U(s)] + red[U(s)]);
    res.theta = std::max(res.theta, static_cast<int>(ci.adj[U(s)].size()));
    res.surplus += green[U(s)] - red[U(s)];
  }
  res.x = std::max(res.x, 1);
  res.required_r = strict_surplus_requirement(res.x, res.theta, eps);
  if (res.surplus < 0)
    throw InfeasibleError("balance: reds exceed greens by " + std::to_string(-res.surplus), 0.0);
  auto disc = [&](int s) { return green[U(s)] - red[U(s)]; };
  std::vector<char> done(U(n), 0);
  auto emit = [&](std::vector<int> g) {
    for (int s : g) done[U(s)] = 1;
    res.groups.push_back(std::move(g));
  };

  if (mode == BalanceMode::Strict) {
    if (res.surplus < res.required_r)
      throw InfeasibleError("balance: surplus r = " + std::to_string(res.surplus) + " below the required " +
                                std::to_string(static_cast<long long>(std::ceil(res.required_r))),
                            res.required_r);
    const int x = res.x, t = std::max(res.theta, 1);
    std::map<int, std::vector<int>> D;
    for (int s = 0; s < n; ++s) D[disc(s)].push_back(s);
    for (auto& [k, v] : D) rng.shuffle(v);
    for (int s : D[0]) emit({s});
    D[0].clear();

    const double thr = 8.0 * x * x * t / eps;
    std::vector<std::size_t> pa, pb;
    for (int i = 1; i <= x; ++i)
      for (int j = 1; j <= x; ++j) {
        auto& Di = D[i];
        auto& Dj = D[-j];
        while (static_cast<double>(Di.size()) >= thr && static_cast<double>(Dj.size()) >= thr) {
          // j sets of discrepancy i against i sets of discrepancy -j.
          bool ok = false;
          for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
            if (!pick_independent(Di, j, {}, ci, rng, pa)) continue;
            std::vector<int> chosen;
            for (auto p : pa) chosen.push_back(Di[p]);
            ok = pick_independent(Dj, i, chosen, ci, rng, pb);
          }
          if (!ok) throw InfeasibleError("balance: no conflict-free pairing between discrepancy classes", res.required_r);
          std::vector<int> g;
          for (auto p : pa) g.push_back(Di[p]);
          for (auto p : pb) g.push_back(Dj[p]);
          erase_positions(Di, pa);
          erase_positions(Dj, pb);
          emit(std::move(g));
        }
      }

    std::vector<int> negatives;
    for (int s = -x; s < 0; ++s)
      for (int v : D[s]) negatives.push_back(v);
    if (!negatives.empty()) {
      int jpos = 0;
      std::size_t best = 0;
      for (int s = 1; s <= x; ++s)
        if (D[s].size() > best) {
          best = D[s].size();
          jpos = s;
        }
      if (jpos == 0) throw InfeasibleError("balance: no positive sets to absorb negatives", res.required_r);
      auto& Dp = D[jpos];
      const std::size_t part = static_cast<std::size_t>(x) * static_cast<std::size_t>(t + 1);
      std::vector<std::vector<int>> positive;
      for (std::size_t off = 0; off + part <= Dp.size(); off += part) {
        std::vector<int> g;
        for (std::size_t k = off; k < off + part && static_cast<int>(g.size()) < x; ++k)
          if (!ci.clash_any(Dp[k], g)) g.push_back(Dp[k]);
        positive.push_back(std::move(g));
      }
      for (auto& g : positive)
        for (int s : g) done[U(s)] = 1;
      rng.shuffle(negatives);
      std::vector<char> taken(positive.size(), 0);
      for (int s : negatives) {
        std::vector<std::size_t> open;
        for (std::size_t k = 0; k < positive.size(); ++k) {
          if (taken[k]) continue;
          bool clash = false;
          for (int m : positive[k]) clash = clash || ci.clash(s, m);
          if (!clash) open.push_back(k);
        }
        if (open.empty()) throw InfeasibleError("balance: no positive group left for a negative set", res.required_r);
        const std::size_t k = open[static_cast<std::size_t>(rng.below(open.size()))];
        taken[k] = 1;
        positive[k].push_back(s);
      }
      for (auto& g : positive) emit(std::move(g));
    }
    for (int s = 0; s < n; ++s)
      if (!done[U(s)]) emit({s});
    return res;
  }

  // Desk mode: random absorption with restarts.
  std::vector<int> negatives, pool;
  for (int s = 0; s < n; ++s) {
    if (disc(s) < 0)
      negatives.push_back(s);
    else if (disc(s) > 0)
      pool.push_back(s);
  }
  constexpr int kAttempts = 64;
  for (int attempt = 0; attempt < kAttempts; ++attempt) {
    std::vector<std::vector<int>> groups;
    std::vector<char> used(U(n), 0);
    std::vector<int> order_neg = negatives;
    rng.shuffle(order_neg);
    // Deepest deficits first.
    std::stable_sort(order_neg.begin(), order_neg.end(), [&](int a, int b) { return disc(a) < disc(b); });
    const int cap = 2 * res.x * res.x;
    std::vector<int> slack, weight;
    bool ok = true;
    for (int s : order_neg) {
      const int need0 = -disc(s);
      const int w = green[U(s)] + red[U(s)];
      // Reuse the surplus of an earlier group when one can take this set.
      std::vector<std::size_t> fits;
      for (std::size_t k = 0; k < groups.size(); ++k)
        if (slack[k] >= need0 && weight[k] + w <= cap && !ci.clash_any(s, groups[k])) fits.push_back(k);
      if (!fits.empty()) {
        const std::size_t k = fits[static_cast<std::size_t>(rng.below(fits.size()))];
        groups[k].push_back(s);
        slack[k] -= need0;
        weight[k] += w;
        continue;
      }
      std::vector<int> g{s};
      int need = need0, wt = w;
      std::vector<int> order;
      for (int v : pool)
        if (!used[U(v)]) order.push_back(v);
      rng.shuffle(order);
      for (int v : order) {
        if (need <= 0) break;
        const int wv = green[U(v)] + red[U(v)];
        if (wt + wv > cap || ci.clash_any(v, g)) continue;
        g.push_back(v);
        used[U(v)] = 1;
        need -= disc(v);
        wt += wv;
      }
      if (need > 0) {
        ok = false;
        break;
      }
      groups.push_back(std::move(g));
      slack.push_back(-need);
      weight.push_back(wt);
    }
    if (!ok) continue;
    for (auto& g : groups) emit(std::move(g));
    for (int s = 0; s < n; ++s)
      if (!done[U(s)]) emit({s});
    return res;
  }
  int deficit = 0, supply = 0;
  for (int v : negatives) deficit -= disc(v);
  for (int v : pool) supply += disc(v);
  throw InfeasibleError("balance: no conflict-free covering of the negative sets found (deficit " +
                            std::to_string(deficit) + ", supply " + std::to_string(supply) + ", " +
                            std::to_string(negatives.size()) + " negative and " + std::to_string(pool.size()) +
                            " positive sets)",
                        0.0);
}

std::vector<BalanceViolation> check_balance(const std::vector<int>& green, const std::vector<int>& red,
                                            const std::vector<std::vector<int>>& conflicts,
                                            const BalanceResult& res) {
  std::vector<BalanceViolation> out;
  const ConflictIndex ci(conflicts);
  std::vector<int> seen(green.size(), 0);
  const long long cap = 2LL * res.x * res.x;
  for (std::size_t g = 0; g < res.groups.size(); ++g) {
    long long gr = 0, rd = 0;
    const auto& grp = res.groups[g];
    for (std::size_t a = 0; a < grp.size(); ++a) {
      const int s = grp[a];
      if (s < 0 || U(s) >= green.size()) {
        out.push_back({"partition", static_cast<int>(g), "set index out of range"});
        continue;
      }
      ++seen[U(s)];
      gr += green[U(s)];
      rd += red[U(s)];
      for (std::size_t b = a + 1; b < grp.size(); ++b)
        if (ci.clash(s, grp[b]))
          out.push_back({"conflict", static_cast<int>(g),
                         "sets " + std::to_string(s) + " and " + std::to_string(grp[b])});
    }
    if (gr + rd > cap)
      out.push_back({"size", static_cast<int>(g), std::to_string(gr + rd) + " > " + std::to_string(cap)});
    if (rd > gr)
      out.push_back({"balance", static_cast<int>(g), std::to_string(rd) + " reds > " + std::to_string(gr) + " greens"});
  }
  for (std::size_t s = 0; s < seen.size(); ++s)
    if (seen[s] != 1)
      out.push_back({"partition", -1, "set " + std::to_string(s) + " used " + std::to_string(seen[s]) + " times"});
  return out;
}

// ---------------------------------------------------------------------------
// Generation

bool is_green(VertexKind k) {
  return k == VertexKind::Local || k == VertexKind::LocalSurrogate || k == VertexKind::OptSurrogate;
}
bool is_red(VertexKind k) { return k == VertexKind::Opt || k == VertexKind::OptCopy; }

void SwapGenConfig::validate() const {
  degree_threshold(eps);
  if (t_d < 0) throw std::invalid_argument("t_d must be >= 0");
  if (t_h != 0 && t_h < 2) throw std::invalid_argument("t_h must be >= 2");
  if (p_bound < 0) throw std::invalid_argument("p bound must be >= 0");
}

int SwapGenConfig::degree() const { return t_d > 0 ? t_d : degree_threshold(eps); }

std::vector<int> SwapSet::swaps_closing(int local) const {
  std::vector<int> out;
  for (std::size_t s = 0; s < swaps.size(); ++s)
    if (std::binary_search(swaps[s].P.begin(), swaps[s].P.end(), local)) out.push_back(static_cast<int>(s));
  return out;
}

int SwapSet::vertex_of_local(int local) const {
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].kind == VertexKind::Local && vertices[v].facility == local) return static_cast<int>(v);
  return -1;
}

int SwapSet::vertex_of_opt(int j) const {
  for (std::size_t v = 0; v < vertices.size(); ++v)
    if (vertices[v].kind == VertexKind::Opt && vertices[v].facility == j) return static_cast<int>(v);
  return -1;
}

int SwapSet::component_of_local(int local) const {
  const int v = vertex_of_local(local);
  return v < 0 ? -1 : vertices[U(v)].component;
}

int SwapSet::component_of_opt(int j) const {
  const int v = vertex_of_opt(j);
  return v < 0 ? -1 : vertices[U(v)].component;
}

namespace {

struct DisjointSets {
  std::vector<int> p;
  explicit DisjointSets(std::size_t n) : p(n) { std::iota(p.begin(), p.end(), 0); }
  int find(int a) {
    while (p[U(a)] != a) a = p[U(a)] = p[U(p[U(a)])];
    return a;
  }
  void unite(int a, int b) {
    a = find(a);
    b = find(b);
    if (a != b) p[U(std::max(a, b))] = std::min(a, b);
  }
};

int add_vertex(SwapSet& s, VertexKind kind, int facility) {
  Vertex v;
  v.kind = kind;
  v.facility = facility;
  s.vertices.push_back(v);
  return static_cast<int>(s.vertices.size()) - 1;
}

// Shared prefix: tau draw, heavy set, candidates, local surrogates, base vertices.
// Returns the vertex id of each non-heavy local original (-1 when heavy).
std::vector<int> common_prefix(SwapSet& s, const AnalysisContext& ctx, const MappingSample& base, Rng& rng) {
  const int nl = ctx.nl, no = ctx.no;
  MappingSample m = base;
  m.tau.assign(U(no), -1);
  s.tau_choice.assign(U(no), TauChoice::Eta1);
  for (int j = 0; j < no; ++j) {
    s.tau_choice[U(j)] = sample_tau(m.rho[U(j)], s.kind, rng);
    m.tau[U(j)] = s.tau_choice[U(j)] == TauChoice::Eta1 ? m.eta1[U(j)] : m.eta2[U(j)];
  }
  s.tau = m.tau;
  s.heavy = heavy_local_facilities(m, nl, s.t_d);
  s.candidates = local_candidates(m, nl, s.heavy);
  if (s.candidates.size() < s.heavy.size())
    throw InfeasibleError("swap generation: " + std::to_string(s.candidates.size()) + " local candidates for " +
                              std::to_string(s.heavy.size()) + " heavy local facilities",
                          0.0);
  std::vector<int> pick = s.candidates;
  // Uniform without replacement, assigned to heavy facilities in index order.
  for (std::size_t h = 0; h < s.heavy.size(); ++h) {
    const std::size_t k = h + static_cast<std::size_t>(rng.below(pick.size() - h));
    std::swap(pick[h], pick[k]);
    s.local_surrogates.emplace_back(s.heavy[h], pick[h]);
  }
  std::vector<char> heavy(U(nl), 0);
  for (int h : s.heavy) heavy[U(h)] = 1;
  for (int j = 0; j < no; ++j) add_vertex(s, VertexKind::Opt, j);
  std::vector<int> vloc(U(nl), -1);
  for (int i = 0; i < nl; ++i)
    if (!heavy[U(i)]) vloc[U(i)] = add_vertex(s, VertexKind::Local, i);
  for (auto [h, c] : s.local_surrogates) add_vertex(s, VertexKind::LocalSurrogate, c);
  for (int j = 0; j < no; ++j) s.vertices[U(j)].out = vloc[U(m.tau[U(j)])];  // -1 when tau is heavy
  return vloc;
}

void assign_components(SwapSet& s, DisjointSets& ds) {
  std::map<int, int> id;
  for (std::size_t v = 0; v < s.vertices.size(); ++v) {
    if (s.vertices[v].kind == VertexKind::Dummy) continue;
    const int r = ds.find(static_cast<int>(v));
    auto it = id.find(r);
    if (it == id.end()) {
      it = id.emplace(r, static_cast<int>(s.components.size())).first;
      s.components.emplace_back();
    }
    s.vertices[v].component = it->second;
    s.components[U(it->second)].push_back(static_cast<int>(v));
  }
}

void add_conflict(SwapSet& s, int a, int b) {
  if (a == b || a < 0 || b < 0) return;
  auto& x = s.conflicts[U(a)];
  if (std::find(x.begin(), x.end(), b) != x.end()) return;
  x.push_back(b);
  s.conflicts[U(b)].push_back(a);
}

// Balancing and swap assembly.
void finish(SwapSet& s, const AnalysisContext& ctx, const SwapGenConfig& cfg, Rng& rng) {
  const std::size_t nc = s.components.size();
  std::vector<int> green(nc, 0), red(nc, 0);
  for (std::size_t c = 0; c < nc; ++c)
    for (int v : s.components[c]) {
      if (is_green(s.vertices[U(v)].kind)) ++green[c];
      if (is_red(s.vertices[U(v)].kind)) ++red[c];
    }
  for (auto& adj : s.conflicts) std::sort(adj.begin(), adj.end());
  s.balance = balance(green, red, s.conflicts, cfg.eps, cfg.balance, rng);
  s.groups = s.balance.groups;
  s.group_of_component.assign(nc, -1);
  s.move_of_opt.assign(U(ctx.no), -1);
  for (std::size_t g = 0; g < s.groups.size(); ++g) {
    Swap sw;
    for (int c : s.groups[g]) {
      s.group_of_component[U(c)] = static_cast<int>(g);
      for (int v : s.components[U(c)]) {
        const Vertex& vx = s.vertices[U(v)];
        if (is_green(vx.kind)) sw.P.push_back(vx.facility);
        if (is_red(vx.kind)) sw.Q.push_back(vx.facility);
        if (vx.kind == VertexKind::Opt) s.move_of_opt[U(vx.facility)] = static_cast<int>(s.swaps.size());
      }
    }
    for (auto* v : {&sw.P, &sw.Q}) {
      std::sort(v->begin(), v->end());
      v->erase(std::unique(v->begin(), v->end()), v->end());
    }
    if (cfg.p_bound > 0 && static_cast<int>(sw.P.size()) > cfg.p_bound)
      throw InfeasibleError("swap generation: a swap closes " + std::to_string(sw.P.size()) +
                                " facilities, above the p bound " + std::to_string(cfg.p_bound),
                            0.0);
    s.swap_of_group.push_back(static_cast<int>(s.swaps.size()));
    s.swaps.push_back(std::move(sw));
  }
}

}  // namespace

SwapSet generate_simple(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng) {
  cfg.validate();
  SwapSet s;
  s.kind = SwapKind::Simple;
  s.t_d = cfg.degree();
  const std::vector<int> vloc = common_prefix(s, ctx, base, rng);
  DisjointSets ds(s.vertices.size());
  for (int j = 0; j < ctx.no; ++j)
    if (s.vertices[U(j)].out >= 0) ds.unite(j, s.vertices[U(j)].out);
  assign_components(s, ds);
  s.conflicts.assign(s.components.size(), {});
  for (const Vertex& v : s.vertices)
    if (v.kind == VertexKind::LocalSurrogate) add_conflict(s, v.component, s.vertices[U(vloc[U(v.facility)])].component);
  finish(s, ctx, cfg, rng);
  return s;
}

SwapSet generate_tree(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng) {
  cfg.validate();
  SwapSet s;
  s.kind = SwapKind::Tree;
  s.t_d = cfg.degree();
  const int nl = ctx.nl, no = ctx.no;
  const std::vector<int> vloc = common_prefix(s, ctx, base, rng);
  for (int i = 0; i < nl; ++i)
    if (vloc[U(i)] >= 0) s.vertices[U(vloc[U(i)])].out = base.pi[U(i)];

  // Split optimal facilities with more than t_d children.
  for (int j = 0; j < no; ++j) {
    std::vector<int> kids;
    for (int i = 0; i < nl; ++i)
      if (vloc[U(i)] >= 0 && base.pi[U(i)] == j) kids.push_back(i);
    if (static_cast<int>(kids.size()) <= s.t_d) continue;
    s.heavy_opts.push_back(j);
    std::stable_sort(kids.begin(), kids.end(), [&](int a, int b) {
      const double da = ctx.local_opt(a, j), db = ctx.local_opt(b, j);
      if (std::fabs(da - db) > kDistTol) return da < db;
      return a < b;
    });
    const int t = s.t_d;
    const int ngroups = (static_cast<int>(kids.size()) + t - 1) / t;
    for (int g = 1; g < ngroups; ++g) {
      const int copy = add_vertex(s, VertexKind::OptCopy, j);
      const int lo = g * t, hi = std::min(static_cast<int>(kids.size()), lo + t);
      for (int k = lo; k < hi; ++k) s.vertices[U(vloc[U(kids[U(k)])])].out = copy;
      const int prev_lo = (g - 1) * t;
      const int chosen = kids[U(prev_lo + static_cast<int>(rng.below(static_cast<std::uint64_t>(t))))];
      const int sur = add_vertex(s, VertexKind::OptSurrogate, chosen);
      s.vertices[U(copy)].out = sur;
      s.vertices[U(sur)].out = copy;
      s.opt_surrogates.emplace_back(copy, chosen);
    }
  }
  for (std::size_t v = 0; v < s.vertices.size(); ++v)
    if (s.vertices[v].out < 0) s.vertices[v].out = static_cast<int>(v);

  // Cycles of the functional graph, each listed from its smallest vertex.
  const std::vector<int> ths = height_thresholds(cfg.eps);
  s.t_h = cfg.t_h > 0 ? cfg.t_h : ths[U(static_cast<int>(rng.below(ths.size())))];
  const int nreal = static_cast<int>(s.vertices.size());
  std::vector<int> state(U(nreal), 0);  // 0 new, 1 on stack, 2 done
  for (int v0 = 0; v0 < nreal; ++v0) {
    if (state[U(v0)]) continue;
    std::vector<int> path;
    int v = v0;
    while (state[U(v)] == 0) {
      state[U(v)] = 1;
      path.push_back(v);
      v = s.vertices[U(v)].out;
    }
    if (state[U(v)] == 1) {
      auto it = std::find(path.begin(), path.end(), v);
      std::vector<int> cyc(it, path.end());
      std::rotate(cyc.begin(), std::min_element(cyc.begin(), cyc.end()), cyc.end());
      CycleCut cut;
      cut.cycle = cyc;
      s.cuts.push_back(cut);
    }
    for (int u : path) state[U(u)] = 2;
  }
  std::sort(s.cuts.begin(), s.cuts.end(), [](const CycleCut& a, const CycleCut& b) { return a.cycle[0] < b.cycle[0]; });

  for (std::size_t c = 0; c < s.cuts.size(); ++c) {
    CycleCut& cut = s.cuts[c];
    const int len = static_cast<int>(cut.cycle.size());
    cut.padded_length = std::max(len, s.t_h);
    std::vector<int> padded = cut.cycle;
    for (int k = len; k < cut.padded_length; ++k) padded.push_back(add_vertex(s, VertexKind::Dummy, -1));
    for (int k = len; k < cut.padded_length; ++k)
      s.vertices[U(padded[U(k)])].out = padded[U((k + 1) % cut.padded_length)];
    cut.root_position = static_cast<int>(rng.below(static_cast<std::uint64_t>(cut.padded_length)));
    cut.root_vertex = padded[U(cut.root_position)];
    for (int k = 0; k < len; ++k) {
      Vertex& vx = s.vertices[U(cut.cycle[U(k)])];
      vx.on_cycle = true;
      vx.cycle_id = static_cast<int>(c);
      vx.cycle_length = len;
      vx.depth = 0;
      vx.root_distance = ((cut.root_position - k) % cut.padded_length + cut.padded_length) % cut.padded_length;
    }
  }
  // Off-cycle vertices inherit from their successor.
  std::vector<char> known(U(nreal), 0);
  for (int v = 0; v < nreal; ++v) known[U(v)] = s.vertices[U(v)].on_cycle;
  for (int v0 = 0; v0 < nreal; ++v0) {
    std::vector<int> path;
    int v = v0;
    while (!known[U(v)]) {
      path.push_back(v);
      v = s.vertices[U(v)].out;
    }
    for (auto it = path.rbegin(); it != path.rend(); ++it) {
      Vertex& vx = s.vertices[U(*it)];
      const Vertex& nx = s.vertices[U(vx.out)];
      vx.cycle_id = nx.cycle_id;
      vx.cycle_length = nx.cycle_length;
      vx.depth = nx.depth + 1;
      vx.root_distance = nx.root_distance + 1;
      known[U(*it)] = 1;
    }
  }
  for (int v = 0; v < nreal; ++v) {
    Vertex& vx = s.vertices[U(v)];
    const bool long_cycle = vx.cycle_length > s.t_h;
    if (vx.on_cycle && !long_cycle) continue;  // kept by convention
    if (vx.root_distance % s.t_h == 0) {
      vx.out_deleted = true;
      s.deleted.push_back(v);
    }
  }

  DisjointSets ds(s.vertices.size());
  for (int v = 0; v < nreal; ++v) {
    const Vertex& vx = s.vertices[U(v)];
    if (!vx.out_deleted && vx.out != v) ds.unite(v, vx.out);
  }
  assign_components(s, ds);
  s.conflicts.assign(s.components.size(), {});
  std::vector<std::vector<int>> homes(U(nl));
  for (const Vertex& v : s.vertices)
    if (is_green(v.kind)) homes[U(v.facility)].push_back(v.component);
  for (const auto& h : homes)
    for (std::size_t a = 0; a < h.size(); ++a)
      for (std::size_t b = a + 1; b < h.size(); ++b) add_conflict(s, h[a], h[b]);
  finish(s, ctx, cfg, rng);
  return s;
}

SwapSet generate_swaps(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng) {
  return rng.bernoulli(0.5) ? generate_simple(ctx, base, cfg, rng) : generate_tree(ctx, base, cfg, rng);
}

std::vector<SwapSetIssue> validate_swap_set(const SwapSet& s, int nl, int no, int p_bound) {
  std::vector<SwapSetIssue> out;
  auto fail = [&](std::string w) { out.push_back({std::move(w)}); };
  const int cap = s.kind == SwapKind::Simple ? 2 : 3;
  std::vector<int> copies(U(nl), 0), closes(U(nl), 0), opens(U(no), 0);
  for (const Vertex& v : s.vertices)
    if (is_green(v.kind)) ++copies[U(v.facility)];
  for (std::size_t k = 0; k < s.swaps.size(); ++k) {
    const Swap& sw = s.swaps[k];
    if (sw.Q.size() > sw.P.size()) fail("swap " + std::to_string(k) + " opens more than it closes");
    if (p_bound > 0 && static_cast<int>(sw.P.size()) > p_bound) fail("swap " + std::to_string(k) + " exceeds the p bound");
    for (int f : sw.P) ++closes[U(f)];
  }
  for (int i = 0; i < nl; ++i) {
    if (closes[U(i)] > copies[U(i)] || closes[U(i)] > cap)
      fail("local " + std::to_string(i) + " closed " + std::to_string(closes[U(i)]) + " times with " +
           std::to_string(copies[U(i)]) + " copies");
  }
  for (const Vertex& v : s.vertices)
    if (v.kind == VertexKind::Opt) ++opens[U(v.facility)];
  for (int j = 0; j < no; ++j) {
    if (opens[U(j)] != 1) fail("optimal " + std::to_string(j) + " has " + std::to_string(opens[U(j)]) + " original copies");
    if (U(j) >= s.move_of_opt.size() || s.move_of_opt[U(j)] < 0) fail("optimal " + std::to_string(j) + " has no move");
  }
  for (std::size_t c = 0; c < s.components.size(); ++c) {
    int greens = 0;
    std::vector<int> fac;
    for (int v : s.components[c])
      if (is_green(s.vertices[U(v)].kind)) {
        ++greens;
        fac.push_back(s.vertices[U(v)].facility);
      }
    std::sort(fac.begin(), fac.end());
    if (std::adjacent_find(fac.begin(), fac.end()) != fac.end())
      fail("component " + std::to_string(c) + " holds two copies of one local facility");
    if (s.kind == SwapKind::Simple) {
      if (greens > 1) fail("simple component " + std::to_string(c) + " holds " + std::to_string(greens) + " locals");
      if (static_cast<int>(s.components[c].size()) > s.t_d + 2)
        fail("simple component " + std::to_string(c) + " exceeds t_d + 2 vertices");
    } else {
      const double lim = std::pow(s.t_d + 1.0, s.t_h);
      if (static_cast<double>(s.components[c].size()) > lim) fail("tree component " + std::to_string(c) + " too large");
    }
  }
  if (s.kind == SwapKind::Tree) {
    for (std::size_t v = 0; v < s.vertices.size(); ++v) {
      const Vertex& vx = s.vertices[v];
      if (vx.kind == VertexKind::Dummy) continue;
      if (vx.out < 0) fail("vertex " + std::to_string(v) + " has no out-edge");
    }
    // Height: steps until a cut edge, the cut root, or the padding.
    for (std::size_t v = 0; v < s.vertices.size(); ++v) {
      if (s.vertices[v].kind == VertexKind::Dummy) continue;
      int u = static_cast<int>(v), steps = 0;
      while (steps <= static_cast<int>(s.vertices.size())) {
        const Vertex& ux = s.vertices[U(u)];
        if (ux.out_deleted || ux.out == u) break;
        if (ux.on_cycle && ux.cycle_length <= s.t_h) {
          const CycleCut& cut = s.cuts[U(ux.cycle_id)];
          if (cut.root_vertex == u) break;
          if (ux.cycle_length < cut.padded_length && cut.cycle.back() == u) break;  // next is padding
        }
        u = ux.out;
        ++steps;
      }
      if (steps > s.t_h - 1) fail("vertex " + std::to_string(v) + " sits at height " + std::to_string(steps));
    }
  }
  std::vector<int> green(s.components.size(), 0), red(s.components.size(), 0);
  for (std::size_t c = 0; c < s.components.size(); ++c)
    for (int v : s.components[c]) {
      green[c] += is_green(s.vertices[U(v)].kind);
      red[c] += is_red(s.vertices[U(v)].kind);
    }
  for (const auto& b : check_balance(green, red, s.conflicts, s.balance))
    fail("balance " + b.property + ": " + b.detail);
  return out;
}

}  // namespace nols
