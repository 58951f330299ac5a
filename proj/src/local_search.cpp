#include "nols/local_search.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <stdexcept>

#include "nols/rng.hpp"

namespace nols {

void SearchConfig::validate() const {
  if (k < 1) throw std::invalid_argument("k must be >= 1");
  if (p < 1) throw std::invalid_argument("p must be >= 1");
  if (!(delta >= 0.0 && delta < 1.0)) throw std::invalid_argument("delta must lie in [0,1)");
  if (max_iterations < 0) throw std::invalid_argument("max_iterations must be >= 0");
  params.validate();
}

double effective_threshold(double delta, std::size_t n, int p) {
  return delta * std::pow(static_cast<double>(std::max<std::size_t>(n, 1)), -static_cast<double>(p));
}

std::uint64_t binomial(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) return UINT64_MAX;
  }
  return static_cast<std::uint64_t>(r);
}

std::uint64_t swap_count(std::size_t n_open, std::size_t n_closed, int p) {
  std::uint64_t total = 0;
  for (int s = 1; s <= p; ++s) {
    const unsigned __int128 t =
        static_cast<unsigned __int128>(binomial(n_open, static_cast<std::uint64_t>(s))) * binomial(n_closed, static_cast<std::uint64_t>(s));
    if (t > UINT64_MAX - total) return UINT64_MAX;
    total += static_cast<std::uint64_t>(t);
  }
  return total;
}

namespace {

// Advance idx (strictly increasing positions into [0,n)) to the next combination.
bool next_combination(std::vector<int>& idx, int n) {
  const int s = static_cast<int>(idx.size());
  int i = s - 1;
  while (i >= 0 && idx[static_cast<std::size_t>(i)] == n - s + i) --i;
  if (i < 0) return false;
  ++idx[static_cast<std::size_t>(i)];
  for (int j = i + 1; j < s; ++j) idx[static_cast<std::size_t>(j)] = idx[static_cast<std::size_t>(j - 1)] + 1;
  return true;
}

}  // namespace

void enumerate_swaps(const std::vector<int>& open, const std::vector<int>& closed, int p, const SwapVisitor& visit) {
  const int no = static_cast<int>(open.size()), nc = static_cast<int>(closed.size());
  std::vector<int> P, Q;
  for (int s = 1; s <= p && s <= no && s <= nc; ++s) {
    std::vector<int> pi(static_cast<std::size_t>(s));
    for (int i = 0; i < s; ++i) pi[static_cast<std::size_t>(i)] = i;
    do {
      P.resize(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) P[static_cast<std::size_t>(i)] = open[static_cast<std::size_t>(pi[static_cast<std::size_t>(i)])];
      std::vector<int> qi(static_cast<std::size_t>(s));
      for (int i = 0; i < s; ++i) qi[static_cast<std::size_t>(i)] = i;
      do {
        Q.resize(static_cast<std::size_t>(s));
        for (int i = 0; i < s; ++i) Q[static_cast<std::size_t>(i)] = closed[static_cast<std::size_t>(qi[static_cast<std::size_t>(i)])];
        if (!visit(P, Q)) return;
      } while (next_combination(qi, nc));
    } while (next_combination(pi, no));
  }
}

std::vector<int> farthest_point_seed(const MetricInstance& inst, int k, std::uint64_t seed) {
  const int nf = static_cast<int>(inst.num_facilities());
  if (k < 1 || k > nf) throw std::invalid_argument("k must lie in [1, |facilities|]");
  Rng rng(seed);
  std::vector<int> chosen{static_cast<int>(rng.below(static_cast<std::uint64_t>(nf)))};
  std::vector<double> gap(static_cast<std::size_t>(nf), kInf);
  std::vector<char> used(static_cast<std::size_t>(nf), 0);
  used[static_cast<std::size_t>(chosen[0])] = 1;
  while (static_cast<int>(chosen.size()) < k) {
    const int last = chosen.back();
    int best = -1;
    for (int f = 0; f < nf; ++f) {
      gap[static_cast<std::size_t>(f)] = std::min(gap[static_cast<std::size_t>(f)], inst.ff(f, last));
      if (used[static_cast<std::size_t>(f)]) continue;
      if (best < 0 || gap[static_cast<std::size_t>(f)] > gap[static_cast<std::size_t>(best)] + kDistTol) best = f;
    }
    used[static_cast<std::size_t>(best)] = 1;
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

namespace {

std::vector<int> complement(const std::vector<int>& open, std::size_t nf) {
  std::vector<char> is(nf, 0);
  for (int f : open) is[static_cast<std::size_t>(f)] = 1;
  std::vector<int> out;
  for (std::size_t f = 0; f < nf; ++f)
    if (!is[f]) out.push_back(static_cast<int>(f));
  return out;
}

// Closed facilities no farther from some client than its current assignment.
std::vector<int> pruned_candidates(const Solution& sol, const std::vector<int>& closed) {
  const MetricInstance& inst = sol.instance();
  std::vector<int> out;
  const int nc = static_cast<int>(inst.num_clients());
  for (int f : closed) {
    for (int c = 0; c < nc; ++c) {
      if (inst.cf(c, f) <= sol.nearest_dist(c, 0) + kDistTol) {
        out.push_back(f);
        break;
      }
    }
  }
  return out;
}

}  // namespace

RunResult run(const MetricInstance& inst, const SearchConfig& config, const std::optional<std::vector<int>>& initial) {
  config.validate();
  const std::size_t nf = inst.num_facilities();
  if (static_cast<std::size_t>(config.k) > nf) throw std::invalid_argument("k exceeds the number of facilities");
  std::vector<int> start = initial ? *initial : farthest_point_seed(inst, config.k, config.seed);
  std::sort(start.begin(), start.end());
  if (std::adjacent_find(start.begin(), start.end()) != start.end() || static_cast<int>(start.size()) != config.k)
    throw std::invalid_argument("initial solution must hold k distinct facilities");

  const PotentialParams& params = config.params;
  const Objective obj = config.objective;
  auto order = std::make_shared<const FacilityOrder>(inst);
  Solution sol(order, start, params.q + 1);
  RunResult res;
  RunTrace& trace = res.trace;
  trace.threshold = effective_threshold(config.delta, inst.num_locations(), config.p);
  trace.initial_value = sol.value(obj, params);

  Rng rng = Rng(config.seed).split("enumeration");
  const auto t0 = std::chrono::steady_clock::now();
  long iter = 0;
  trace.termination = "local-optimum";
  while (true) {
    if (iter >= config.max_iterations) {
      trace.termination = "iteration-cap";
      break;
    }
    const double cur = sol.value(obj, params);
    const double need = -trace.threshold * cur;  // accept iff new < (1 - delta') * old
    std::vector<int> openv = sol.open();
    std::vector<int> closed = complement(openv, nf);
    if (config.prune) closed = pruned_candidates(sol, closed);
    if (config.shuffle) {
      rng.shuffle(openv);
      rng.shuffle(closed);
    }
    std::vector<int> bestP, bestQ;
    double best = need;
    bool found = false;
    enumerate_swaps(openv, closed, config.p, [&](const std::vector<int>& P, const std::vector<int>& Q) {
      const double d = sol.delta_total(P, Q, obj, params);
      if (d < best) {
        best = d;
        bestP = P;
        bestQ = Q;
        found = true;
        if (config.pivot == Pivot::FirstImprovement) return false;
      }
      return true;
    });
    if (!found) break;
    IterationRecord rec;
    rec.P = bestP;
    rec.Q = bestQ;
    std::sort(rec.P.begin(), rec.P.end());
    std::sort(rec.Q.begin(), rec.Q.end());
    rec.phi_before = sol.value(Objective::Potential, params);
    rec.cost_before = sol.value(Objective::Cost, params);
    sol.apply(rec.P, rec.Q);
    rec.phi_after = sol.value(Objective::Potential, params);
    rec.cost_after = sol.value(Objective::Cost, params);
    rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    trace.iterations.push_back(std::move(rec));
    ++iter;
  }
  res.open = sol.open();
  res.cost = sol.value(Objective::Cost, params);
  res.potential = sol.value(Objective::Potential, params);
  trace.final_value = sol.value(obj, params);
  if (config.post_check) trace.post = verify_local_optimality(inst, res.open, config.p, obj, params);
  return res;
}

BruteForceResult brute_force_opt(const MetricInstance& inst, int k, std::uint64_t guard) {
  const int nf = static_cast<int>(inst.num_facilities());
  const int nc = static_cast<int>(inst.num_clients());
  if (k < 1 || k > nf) throw std::invalid_argument("k must lie in [1, |facilities|]");
  const std::uint64_t total = binomial(static_cast<std::uint64_t>(nf), static_cast<std::uint64_t>(k));
  if (total > guard)
    throw SizeError("brute force needs C(" + std::to_string(nf) + "," + std::to_string(k) + ") = " +
                    std::to_string(total) + " subsets, above the guard " + std::to_string(guard));

  // Depth-first over combinations with per-depth client minima.
  std::vector<std::vector<double>> best_at(static_cast<std::size_t>(k + 1),
                                           std::vector<double>(static_cast<std::size_t>(nc), kInf));
  std::vector<double> dist(static_cast<std::size_t>(nf) * static_cast<std::size_t>(nc));
  for (int f = 0; f < nf; ++f)
    for (int c = 0; c < nc; ++c) dist[static_cast<std::size_t>(f) * static_cast<std::size_t>(nc) + static_cast<std::size_t>(c)] = inst.cf(c, f);

  BruteForceResult res;
  res.cost = kInf;
  std::vector<int> cur;
  auto rec = [&](auto&& self, int start, int depth) -> void {
    if (depth == k) {
      ++res.subsets;
      KahanSum s;
      for (double v : best_at[static_cast<std::size_t>(depth)]) s.add(v);
      if (s.value() < res.cost - kDistTol) {
        res.cost = s.value();
        res.open = cur;
      }
      return;
    }
    const auto& prev = best_at[static_cast<std::size_t>(depth)];
    auto& next = best_at[static_cast<std::size_t>(depth + 1)];
    for (int f = start; f <= nf - (k - depth); ++f) {
      const double* row = &dist[static_cast<std::size_t>(f) * static_cast<std::size_t>(nc)];
      for (int c = 0; c < nc; ++c) next[static_cast<std::size_t>(c)] = std::min(prev[static_cast<std::size_t>(c)], row[c]);
      cur.push_back(f);
      self(self, f + 1, depth + 1);
      cur.pop_back();
    }
  };
  rec(rec, 0, 0);
  return res;
}

LocalOptReport verify_local_optimality(const MetricInstance& inst, const std::vector<int>& F, int p,
                                       Objective objective, const PotentialParams& params) {
  std::vector<int> open = F;
  std::sort(open.begin(), open.end());
  Solution sol(inst, open, params.q + 1);
  const std::vector<int> closed = complement(sol.open(), inst.num_facilities());
  LocalOptReport rep;
  enumerate_swaps(sol.open(), closed, p, [&](const std::vector<int>& P, const std::vector<int>& Q) {
    const double d = sol.delta_total(P, Q, objective, params);
    ++rep.swaps_checked;
    if (d < rep.min_delta) {
      rep.min_delta = d;
      rep.argmin_P = P;
      rep.argmin_Q = Q;
    }
    return true;
  });
  return rep;
}

}  // namespace nols
