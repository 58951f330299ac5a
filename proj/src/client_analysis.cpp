#include "nols/client_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>
#include <stdexcept>

namespace nols {

namespace {

std::size_t U(int i) { return static_cast<std::size_t>(i); }

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

}  // namespace

ClientProfile make_profile(const AnalysisContext& ctx, const MappingSample& base, int client,
                           const PotentialParams& params) {
  std::vector<int> locals(U(ctx.nl)), opts(U(ctx.no));
  std::iota(locals.begin(), locals.end(), 0);
  std::iota(opts.begin(), opts.end(), ctx.nl);
  ClientProfile p;
  p.client = client;
  const auto near = nearest_facilities(ctx.inst, client, locals, 2);
  p.f1 = near[0].first;
  p.d1 = near[0].second;
  p.f2 = near[1].first;
  p.d2 = near[1].second;
  const auto o = nearest_facilities(ctx.inst, client, opts, 1);
  p.fstar = o[0].first - ctx.nl;
  p.dstar = o[0].second;
  p.eta1 = base.eta1[U(p.fstar)];
  p.eta2 = base.eta2[U(p.fstar)];
  p.rho = base.rho[U(p.fstar)];
  p.gstar = base.pi[U(p.f1)];
  std::vector<int> rest;
  for (int i : locals)
    if (i != p.f1 && i != p.f2) rest.push_back(i);
  if (!rest.empty()) p.g = nearest_from_location(ctx.inst, ctx.inst.facility_location(ctx.nl + p.gstar), rest, 1)[0].first;
  p.far = p.d2 >= params.alpha2 * p.d1;
  return p;
}

std::string to_string(Letter l) {
  static const char* names[] = {"A", "B", "C", "D", "E"};
  return names[static_cast<int>(l)];
}

std::string to_string(const ClientType& t) { return std::string(t.far ? "far-" : "close-") + to_string(t.letter); }

ClientType classify(const ClientProfile& p, const PotentialParams& params) {
  ClientType t;
  t.far = p.d2 >= params.alpha2 * p.d1;
  if (t.far) {
    t.letter = p.eta1 == p.f1 ? Letter::A : p.eta2 == p.f1 ? Letter::B : Letter::E;
    return t;
  }
  if (p.eta1 == p.f1)
    t.letter = p.eta2 == p.f2 ? Letter::C : Letter::A;
  else if (p.eta2 == p.f1)
    t.letter = p.eta1 == p.f2 ? Letter::D : Letter::B;
  else
    t.letter = Letter::E;
  return t;
}

std::string to_string(SubEvent s) {
  switch (s) {
    case SubEvent::None: return "";
    case SubEvent::T11: return "T11";
    case SubEvent::T12: return "T12";
    case SubEvent::T21: return "T21";
    case SubEvent::T22: return "T22";
  }
  return "";
}

std::string EventTag::label() const { return refined == SubEvent::None ? to_string(event) : to_string(refined); }

namespace {

// Facility-level lookups for one swap set.
struct SwapIndex {
  std::vector<std::set<int>> comps_of_local;  // every copy
  std::vector<int> orig_local_vertex, opt_vertex;
  std::set<int> surrogates;  // locals chosen as local or optimal surrogate
  std::vector<std::vector<int>> closing;

  SwapIndex(const SwapSet& s, int nl, int no)
      : comps_of_local(U(nl)), orig_local_vertex(U(nl), -1), opt_vertex(U(no), -1), closing(U(nl)) {
    for (std::size_t v = 0; v < s.vertices.size(); ++v) {
      const Vertex& x = s.vertices[v];
      if (is_green(x.kind)) comps_of_local[U(x.facility)].insert(x.component);
      if (x.kind == VertexKind::Local) orig_local_vertex[U(x.facility)] = static_cast<int>(v);
      if (x.kind == VertexKind::Opt) opt_vertex[U(x.facility)] = static_cast<int>(v);
    }
    for (auto [h, c] : s.local_surrogates) surrogates.insert(c);
    for (auto [v, l] : s.opt_surrogates) surrogates.insert(l);
    for (std::size_t k = 0; k < s.swaps.size(); ++k)
      for (int f : s.swaps[k].P) closing[U(f)].push_back(static_cast<int>(k));
  }
};

bool grouped_together(const SwapSet& s, const std::set<int>& comps) {
  std::set<int> groups;
  for (int c : comps)
    if (!groups.insert(s.group_of_component[U(c)]).second) return true;
  return false;
}

bool edge_cut(const SwapSet& s, int vertex) { return vertex >= 0 && s.vertices[U(vertex)].out_deleted; }

}  // namespace

EventTag detect_event(const SwapSet& s, const ClientProfile& p, const ClientType& type, const MappingSample& base) {
  const int nl = static_cast<int>(base.pi.size()), no = static_cast<int>(base.eta1.size());
  const SwapIndex ix(s, nl, no);
  EventTag tag;
  const bool second = s.tau_choice[U(p.fstar)] == TauChoice::Eta2;
  if (s.kind == SwapKind::Simple)
    tag.event = second ? TauEvent::S2 : TauEvent::S1;
  else
    tag.event = second ? TauEvent::T2 : TauEvent::T1;
  const int tau_f = s.tau[U(p.fstar)];
  auto cause = [&](const char* c) { tag.causes.emplace_back(c); };

  if (ix.surrogates.count(p.f1) || ix.surrogates.count(p.f2) || ix.surrogates.count(tau_f)) cause("i");
  if (s.kind == SwapKind::Tree) {
    if (edge_cut(s, ix.opt_vertex[U(p.fstar)]) || edge_cut(s, ix.orig_local_vertex[U(p.f1)]) ||
        edge_cut(s, ix.orig_local_vertex[U(p.f2)]))
      cause("ii");
  } else {
    std::set<int> comps{s.vertices[U(ix.opt_vertex[U(p.fstar)])].component};
    for (int f : {p.f1, p.f2, p.eta1, p.eta2}) comps.insert(ix.comps_of_local[U(f)].begin(), ix.comps_of_local[U(f)].end());
    if (grouped_together(s, comps)) cause("iii");
  }
  const bool cd = !type.far && (type.letter == Letter::C || type.letter == Letter::D);
  if (cd) {
    if (ix.surrogates.count(s.tau[U(p.gstar)])) cause("i'");
    if (s.kind == SwapKind::Tree) {
      if (edge_cut(s, ix.opt_vertex[U(p.gstar)])) cause("ii'");
    } else if (p.g >= 0) {
      std::set<int> comps(ix.comps_of_local[U(p.f1)]);
      comps.insert(ix.comps_of_local[U(p.g)].begin(), ix.comps_of_local[U(p.g)].end());
      if (grouped_together(s, comps)) cause("iii'");
    }
  }
  tag.amenable = tag.causes.empty();

  if (s.kind == SwapKind::Tree && !type.far && (type.letter == Letter::A || type.letter == Letter::B)) {
    const int move = s.move_of_opt[U(p.fstar)];
    std::set<int> closers(ix.closing[U(p.f1)].begin(), ix.closing[U(p.f1)].end());
    closers.insert(ix.closing[U(p.f2)].begin(), ix.closing[U(p.f2)].end());
    const bool only_move = closers.size() == 1 && *closers.begin() == move;
    bool both_elsewhere = false;
    for (int k : ix.closing[U(p.f1)])
      if (k != move && contains(ix.closing[U(p.f2)], k)) both_elsewhere = true;
    const bool first = tag.event == TauEvent::T1;
    const bool a = type.letter == Letter::A;
    // Close A: T11 = only-move, T21 = both-elsewhere. Close B swaps the two.
    if (first)
      tag.refined = (a ? only_move : both_elsewhere) ? SubEvent::T11 : SubEvent::T12;
    else
      tag.refined = (a ? both_elsewhere : only_move) ? SubEvent::T21 : SubEvent::T22;
  }
  return tag;
}

std::vector<double> client_delta_sums(const AnalysisContext& ctx, const SwapSet& s, const PotentialParams& params) {
  std::vector<int> open(U(ctx.nl));
  std::iota(open.begin(), open.end(), 0);
  Solution sol(ctx.inst, open, std::min(params.q + 1, Solution::kMaxDepth));
  const std::size_t nc = ctx.inst.num_clients();
  std::vector<KahanSum> acc(nc);
  std::vector<double> per;
  for (const Swap& sw : s.swaps) {
    std::vector<int> Q;
    for (int j : sw.Q) Q.push_back(ctx.opt_facility(j));
    sol.delta_total(sw.P, Q, Objective::Potential, params, &per);
    for (std::size_t c = 0; c < nc; ++c) acc[c].add(per[c]);
  }
  std::vector<double> out(nc);
  for (std::size_t c = 0; c < nc; ++c) out[c] = acc[c].value();
  return out;
}

double client_delta_sum(const AnalysisContext& ctx, const SwapSet& s, int client, const PotentialParams& params) {
  if (s.swaps.empty()) return 0.0;
  return client_delta_sums(ctx, s, params)[U(client)];
}

std::vector<LinearBound> event_bounds(const ClientType& type, const EventTag& tag, double rho,
                                      const PotentialParams& params) {
  const double a = params.alpha2, b = params.beta2, r = rho, ab = a * b;
  const double ir = r > 0 ? 1.0 / r : kInf;
  std::vector<LinearBound> out;
  auto L = [&](double cs, double c1, double c2, std::string label) { out.push_back({cs, c1, c2, std::move(label)}); };
  const TauEvent e = tag.event;
  const bool simple = e == TauEvent::S1 || e == TauEvent::S2;
  const bool first = e == TauEvent::S1 || e == TauEvent::T1;

  if (type.far) {
    switch (type.letter) {
      case Letter::E:
        if (simple)
          L(2 + 3 * b, -(2 * ab - b), 0, "far-E simple");
        else {
          L(2 + 2 * b, -(2 * ab - 2 * b), 0, "far-E tree");
          L(1 + ab, -(1 + ab), 0, "far-E tree, f* with tau(f*)");
        }
        break;
      case Letter::A:
        if (first) {
          L(1 + ab, -(1 + ab), 0, "far-A S1/T1");
        } else if (simple) {
          L((1 + ir) * (1 + ab) + b, -((1 - ir) * (1 + ab) + ab), 0, "far-A S2");
        } else {
          L(1 + ir + 2 * b, -(1 + 2 * ab - 2 * b - ir), 0, "far-A T2");
          L(1 + ab, -(1 + ab), 0, "far-A T2, shared swap");
        }
        break;
      case Letter::B:
        if (!first) {
          L(1 + ab, -(1 + ab), 0, "far-B S2/T2");
        } else if (simple) {
          L((1 + r) * (1 + ab) + b, -((1 - r) * (1 + ab) + ab), 0, "far-B S1");
        } else {
          L(1 + r + 2 * b, -(1 + 2 * ab - 2 * b - r), 0, "far-B T1");
          L(1 + ab, -(1 + ab), 0, "far-B T1, shared swap");
        }
        break;
      default:
        break;
    }
    return out;
  }

  const auto low_a = [&] { L(1 + ab, -(1 - ab), -2 * b, "close-A rho<=2/3"); };
  switch (type.letter) {
    case Letter::E:
      if (simple)
        L(1 + 4 * b, -(2 - 3 * b), 1 - 3 * b, "close-E simple");
      else {
        L(3 + b, -(1 - 3 * b), -2 * b, "close-E tree (1)");
        L(1 + ab + 2 * b, -(1 - b), -2 * b, "close-E tree (2)");
        L(1 + 3 * b, -(2 - 4 * b), 1 - 3 * b, "close-E tree (3)");
      }
      break;
    case Letter::A:
      if (r <= 2.0 / 3.0) {
        low_a();
        break;
      }
      switch (tag.refined) {
        case SubEvent::T11: L(1 + ab, -1, -b, "close-A T11"); break;
        case SubEvent::T12: L(1 + ab + b, -1, 0, "close-A T12"); break;
        case SubEvent::T21: L(2 + b + ir, -(2 - 3 * b - ir), -2 * b, "close-A T21"); break;
        case SubEvent::T22: L(1 + ab + 2 * b, -(2 - 2 * b), 1 - b, "close-A T22"); break;
        case SubEvent::None:
          if (e == TauEvent::S1) L(1 + ab + b + b * ir, -(1 - b * ir), -2 * b, "close-A S1");
          if (e == TauEvent::S2) L(1 + 2 * b + 2 * b * ir, -(2 - b - 2 * b * ir), 1 - 3 * b, "close-A S2");
          break;
      }
      break;
    case Letter::B:
      switch (tag.refined) {
        case SubEvent::T11: L(2 + b + r, -(2 - 3 * b - r), -2 * b, "close-B T11"); break;
        case SubEvent::T12: L(1 + ab + 2 * b + 2 * r * b, -(2 - 2 * r * b), 1 - 3 * b, "close-B T12"); break;
        case SubEvent::T21: L(1 + ab, -1, -b, "close-B T21"); break;
        case SubEvent::T22: L(1 + ab + b, -1, 0, "close-B T22"); break;
        case SubEvent::None:
          if (e == TauEvent::S1) L(1 + 2 * b + 2 * r * b, -(2 - b - 2 * r * b), 1 - 3 * b, "close-B S1");
          if (e == TauEvent::S2) L(1 + ab + b + r * b, -(1 - r * b), -2 * b, "close-B S2");
          break;
      }
      break;
    case Letter::C:
      if (r <= 2.0 / 3.0) {
        low_a();
        break;
      }
      switch (e) {
        case TauEvent::S1:
          L(1 + ab, -(1 - ab), -2 * b, "close-C S1 (a,c,d,e,f)");
          L(1 + ab, -1, -b, "close-C S1 (b)");
          break;
        case TauEvent::S2:
          L(1 + ab, -1, -b, "close-C S2 (a)");
          L(1 + ab, -2, 1 + ab - 2 * b, "close-C S2 (b,e,f)");
          L(1 + ab + 2 * b, -(2 - 3 * b), 1 - 2 * b, "close-C S2 (c,d)");
          break;
        case TauEvent::T1:
          L(1 + ab + b, -1, 0, "close-C T1 (a,c,d,e,f)");
          L(1 + ab, -1, -b, "close-C T1 (b), T'_b");
          break;
        case TauEvent::T2:
          L(1 + ab, -1, -b, "close-C T2 (a,e), T'_b");
          L(1 + ab + b, -(2 - 2 * b), 1 - 2 * b, "close-C T2 (b,c,d,f)");
          break;
      }
      break;
    case Letter::D:
      switch (e) {
        case TauEvent::S1:
          L(1 + ab, -1, -b, "close-D S1 (a)");
          L(1, -(2 - b), 1 + ab - 2 * b, "close-D S1 (b,e,f)");
          L(1 - b, -(2 - 2 * b), 1 + ab - 2 * b, "close-D S1 (b')");
          L(1 + 2 * b, -(2 - 4 * b), 1 - 2 * b, "close-D S1 (c,d)");
          L(1 + 2 * b + 0.776 * ab, -(2 - 3.224 * b), 1 - 2 * b, "close-D S1 (c,d')");
          break;
        case TauEvent::S2:
          L(1 + ab, -(1 - ab), -2 * b, "close-D S2 (a,c,d,e,f)");
          L(1 + ab, -1, -b, "close-D S2 (b)");
          break;
        case TauEvent::T1:
          L(1 + ab, -1, -b, "close-D T1 (a,e), T'_b");
          L(1 + b, -(2 - 3 * b), 1 - 2 * b, "close-D T1 (b,c')");
          L(1 + ab + b, -(2 - 2 * b), 1 - 2 * b, "close-D T1 (c,d,f)");
          break;
        case TauEvent::T2:
          L(1 + ab + b, -1, 0, "close-D T2 (a)");
          L(1, -1, 0, "close-D T2 (b)");
          L(1 + ab + r * b, -(1 - r * b), -b, "close-D T2 (c,d,e,f)");
          L(1 + ab, -1, -b, "close-D T2 T'_b");
          break;
      }
      break;
  }
  return out;
}

std::pair<double, double> aggregate_coefficients(const ClientType& type) {
  if (type.letter == Letter::E) return {2.5, 0.9};
  if (type.far) return {2.47, 1.13};
  switch (type.letter) {
    case Letter::A: return {2.375, 0.9};
    case Letter::B: return {2.4, 0.9};
    case Letter::C: return {2.2, 0.8888};
    case Letter::D: return {2.5203, 0.8888};
    default: return {2.5, 0.9};
  }
}

std::vector<std::string> check_implications(const SwapSet& s, const ClientProfile& p, const ClientType& type) {
  std::vector<std::string> bad;
  auto closing = [&](int f) { return s.swaps_closing(f); };
  for (int f : {p.f1, p.f2})
    if (closing(f).size() > 1) bad.push_back("i");
  const int move = s.move_of_opt[U(p.fstar)];
  for (int k : closing(s.tau[U(p.fstar)]))
    if (k != move) bad.push_back("ii");
  // pi is recovered from the original local vertex's first out-edge target.
  if (s.kind == SwapKind::Tree) {
    for (int f : {p.f1, p.f2}) {
      const int v = s.vertex_of_local(f);
      if (v < 0) continue;
      const int target = s.vertices[U(s.vertices[U(v)].out)].facility;
      for (int k : closing(f))
        if (!std::binary_search(s.swaps[U(k)].Q.begin(), s.swaps[U(k)].Q.end(), target)) bad.push_back("Tii");
    }
  } else {
    std::vector<int> watch{p.f1, p.f2, p.eta1, p.eta2};
    std::sort(watch.begin(), watch.end());
    watch.erase(std::unique(watch.begin(), watch.end()), watch.end());
    for (const Swap& sw : s.swaps) {
      int n = 0;
      for (int f : watch) n += std::binary_search(sw.P.begin(), sw.P.end(), f);
      if (n > 1) bad.push_back("Siii");
    }
    for (int f : {p.f1, p.f2}) {
      if (f == s.tau[U(p.fstar)]) continue;
      for (int k : closing(f))
        if (std::binary_search(s.swaps[U(k)].Q.begin(), s.swaps[U(k)].Q.end(), p.fstar)) bad.push_back("Siv");
    }
  }
  if (!type.far && (type.letter == Letter::C || type.letter == Letter::D)) {
    const int mg = s.move_of_opt[U(p.gstar)];
    for (int k : closing(s.tau[U(p.gstar)]))
      if (k != mg) bad.push_back("ii'");
    if (s.kind == SwapKind::Simple && p.g >= 0)
      for (const Swap& sw : s.swaps)
        if (std::binary_search(sw.P.begin(), sw.P.end(), p.f1) && std::binary_search(sw.P.begin(), sw.P.end(), p.g))
          bad.push_back("Siii'");
  }
  std::sort(bad.begin(), bad.end());
  bad.erase(std::unique(bad.begin(), bad.end()), bad.end());
  return bad;
}

BoundsReport verify_amenable_bounds(const AnalysisContext& ctx, const BoundsConfig& cfg) {
  if (cfg.params.q != 2) throw std::invalid_argument("bound verification is defined for q = 2");
  cfg.params.validate();
  const MappingSample base = base_mapping(ctx);
  const int nc = static_cast<int>(ctx.inst.num_clients());
  std::vector<ClientProfile> prof;
  std::vector<ClientType> types;
  BoundsReport rep;
  for (int c = 0; c < nc; ++c) {
    prof.push_back(make_profile(ctx, base, c, cfg.params));
    types.push_back(classify(prof.back(), cfg.params));
    ++rep.type_counts[to_string(types.back())];
  }
  std::vector<KahanSum> amenable_sum(U(nc));
  Rng root(cfg.seed);
  for (int k = 0; k < cfg.samples; ++k) {
    Rng rng = root.split(static_cast<std::uint64_t>(k));
    SwapSet s;
    try {
      s = generate_swaps(ctx, base, cfg.gen, rng);
    } catch (const InfeasibleError&) {
      ++rep.infeasible;
      continue;
    }
    ++rep.samples;
    const std::vector<double> sums = client_delta_sums(ctx, s, cfg.params);
    for (int c = 0; c < nc; ++c) {
      const ClientProfile& p = prof[U(c)];
      const ClientType& t = types[U(c)];
      const EventTag tag = detect_event(s, p, t, base);
      const double v = sums[U(c)];
      ++rep.evaluations;
      ++rep.event_counts[to_string(t) + " " + tag.label() + (tag.amenable ? "" : " defiant")];
      for (const auto& cause : tag.causes) ++rep.defiant_causes[cause];
      auto witness = [&](std::string kind, double bound, std::string label) {
        BoundWitness w;
        w.client = c;
        w.sample = k;
        w.type = to_string(t);
        w.event = tag.label();
        w.causes = tag.causes;
        w.realized = v;
        w.bound = bound;
        w.bound_label = std::move(label);
        w.dstar = p.dstar;
        w.d1 = p.d1;
        w.d2 = p.d2;
        w.rho = p.rho;
        w.kind = std::move(kind);
        return w;
      };
      const double crude = cfg.gamma * (p.dstar + p.d1);
      if (v > crude + cfg.tol) rep.crude_violations.push_back(witness("crude", crude, "gamma*(d*+d1)"));
      if (!tag.amenable) continue;
      ++rep.amenable;
      amenable_sum[U(c)].add(v);
      for (const auto& item : check_implications(s, p, t))
        rep.implication_failures.push_back(witness("implication", 0.0, item));
      const auto bounds = event_bounds(t, tag, p.rho, cfg.params);
      if (bounds.empty()) continue;
      double best = -kInf;
      std::string label;
      for (const auto& b : bounds) {
        const double val = b.eval(p.dstar, p.d1, p.d2);
        if (val > best) {
          best = val;
          label = b.label;
        }
      }
      const double margin = best - v;
      auto it = rep.worst_margin.find(to_string(t));
      if (it == rep.worst_margin.end() || margin < it->second) rep.worst_margin[to_string(t)] = margin;
      if (v > best + cfg.tol) rep.violations.push_back(witness("boxed", best, label));
    }
  }
  if (rep.samples > 0) {
    for (int c = 0; c < nc; ++c) {
      const auto [cs, c1] = aggregate_coefficients(types[U(c)]);
      AggregateRow row;
      row.client = c;
      row.type = to_string(types[U(c)]);
      row.mean = amenable_sum[U(c)].value() / rep.samples;
      row.bound = cs * prof[U(c)].dstar - c1 * prof[U(c)].d1;
      row.slack = cfg.slack_k * cfg.gen.eps * (prof[U(c)].dstar + prof[U(c)].d1);
      row.within = row.mean <= row.bound + row.slack + cfg.tol;
      if (!row.within) ++rep.aggregate_exceeded;
      rep.aggregate.push_back(row);
    }
  }
  return rep;
}

void inequality_suite(const AnalysisContext& ctx, const MappingSample& base, const ClientProfile& p,
                      InequalityReport& report) {
  const int c = p.client;
  auto dl = [&](int local) { return ctx.inst.cf(c, local); };
  auto dopt = [&](int j) { return ctx.inst.cf(c, ctx.opt_facility(j)); };
  const double ds = p.dstar, d1 = p.d1, d2 = p.d2, r = p.rho;
  ++report.profiles;
  auto le = [&](const char* name, double lhs, double rhs) {
    ++report.checks;
    if (lhs > rhs + kDistTol * std::max(1.0, std::fabs(rhs)))
      report.violations.push_back({name, c, p.fstar, p.f1, lhs, rhs});
  };
  le("d(c,pi(f1)) <= 2d1 + d*", dopt(base.pi[U(p.f1)]), 2 * d1 + ds);
  le("d(c,pi(f2)) <= 2d2 + d*", dopt(base.pi[U(p.f2)]), 2 * d2 + ds);
  if (p.eta1 != p.f1) {
    le("eta1 != f1: d2 <= 2d* + d1", d2, 2 * ds + d1);
    le("eta1 != f1: d2 <= d* + rho(d1 + d*)", d2, ds + r * (d1 + ds));
    le("eta1 != f1: d(c,eta1) <= d* + rho(d* + d1)", dl(p.eta1), ds + r * (ds + d1));
    le("eta1 != f1: d(c,eta1) <= 2d* + d1", dl(p.eta1), 2 * ds + d1);
    le("eta1 != f1: d(c,eta2) <= 2d* + d1", dl(p.eta2), 2 * ds + d1);
  } else if (r > 0) {
    le("eta1 = f1: d2 >= d1/rho - (1 + 1/rho)d*", d1 / r - (1 + 1 / r) * ds, d2);
    le("eta1 = f1: d2 <= d* + (d1 + d*)/rho", d2, ds + (d1 + ds) / r);
    le("eta1 = f1: d(c,eta2) <= d* + (d* + d1)/rho", dl(p.eta2), ds + (ds + d1) / r);
  }
}

bool SurvivalCell::within(double z) const {
  if (trials == 0) return true;
  const double f = frequency();
  const double sd_hi = std::sqrt(std::max(upper * (1 - upper), 1e-12) / static_cast<double>(trials));
  const double sd_lo = std::sqrt(std::max(lower * (1 - lower), 1e-12) / static_cast<double>(trials));
  return f <= upper + z * sd_hi + 1e-12 && f >= lower - z * sd_lo - 1e-12;
}

SurvivalReport survival_statistics(const std::vector<SwapSet>& tree_samples, int max_s) {
  SurvivalReport rep;
  struct Acc {
    SurvivalCell cell;
    double lo = 0, hi = 0;
  };
  std::map<std::tuple<int, int, std::string>, Acc> cells;
  for (const SwapSet& s : tree_samples) {
    if (s.kind != SwapKind::Tree) continue;
    const int th = s.t_h;
    // One path per (1-tree, length) keeps trials independent: roots differ per 1-tree.
    std::set<std::pair<int, int>> taken;
    for (std::size_t v = 0; v < s.vertices.size(); ++v) {
      const Vertex& x = s.vertices[v];
      if (x.kind == VertexKind::Dummy) continue;
      if (x.on_cycle && x.cycle_length <= th && x.out_deleted) ++rep.short_cycle_edges_cut;
      if (x.on_cycle) continue;
      int u = static_cast<int>(v);
      bool alive = true;
      for (int len = 1; len <= max_s; ++len) {
        const Vertex& ux = s.vertices[U(u)];
        if (ux.on_cycle) break;  // paths avoid cycle edges
        alive = alive && !ux.out_deleted;
        if (len >= th && alive) ++rep.long_paths_survived;
        u = ux.out;
        if (!taken.insert({x.cycle_id, len}).second) continue;
        const bool shortc = x.cycle_length <= th;
        Acc& acc = cells[{th, len, shortc ? "short-cycle" : "long-cycle"}];
        acc.cell.t_h = th;
        acc.cell.s = len;
        acc.cell.regime = shortc ? "short-cycle" : "long-cycle";
        ++acc.cell.trials;
        acc.cell.survived += alive;
        const double base = std::max(static_cast<double>(th - len) / th, 0.0);
        const double l = x.cycle_length;
        if (shortc) {
          acc.lo += base;
          acc.hi += base;
        } else {
          acc.lo += base * std::max(0.0, 1.0 - 2.0 * th / l);
          acc.hi += std::min(1.0, base * (1.0 + th / l));
        }
      }
    }
  }
  for (auto& [key, acc] : cells) {
    SurvivalCell c = acc.cell;
    c.lower = acc.lo / static_cast<double>(c.trials);
    c.upper = acc.hi / static_cast<double>(c.trials);
    rep.cells.push_back(c);
  }
  return rep;
}

}  // namespace nols
