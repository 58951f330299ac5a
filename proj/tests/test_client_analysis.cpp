#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "nols/client_analysis.hpp"
#include "nols/instance_gen.hpp"
#include "nols/local_search.hpp"

using namespace nols;

namespace {

const PotentialParams kParams = PotentialParams::phi2(3, 0.2);

AnalysisContext random_context(int nc, int nl, int no, std::uint64_t seed, int dim = 2) {
  const auto inst = random_euclidean(nc, nl + no, dim, seed);
  std::vector<int> F, Fs;
  for (int i = 0; i < nl + no; ++i) (i < nl ? F : Fs).push_back(i);
  return make_context(inst, F, Fs);
}

// Hand truth table over (far, eta1, eta2) relative to (f1, f2).
std::string truth(bool far, int f1, int f2, int e1, int e2) {
  if (far) return e1 == f1 ? "far-A" : e2 == f1 ? "far-B" : "far-E";
  if (e1 == f1 && e2 == f2) return "close-C";
  if (e1 == f1) return "close-A";
  if (e2 == f1 && e1 == f2) return "close-D";
  if (e2 == f1) return "close-B";
  return "close-E";
}

// Client value under F from sorted distances.
double client_value(const AnalysisContext& ctx, int c, const std::vector<int>& F) {
  std::vector<double> d;
  for (int f : F) d.push_back(ctx.inst.cf(c, f));
  std::sort(d.begin(), d.end());
  d.resize(2, INFINITY);
  return d[0] + kParams.beta2 * std::min(d[1], kParams.alpha2 * d[0]);
}

}  // namespace

TEST_CASE("classification examples") {
  ClientProfile p;
  p.f1 = 0;
  p.f2 = 1;
  p.d1 = 1;
  p.d2 = 4;
  p.eta1 = 0;
  p.eta2 = 2;
  CHECK(to_string(classify(p, kParams)) == "far-A");
  p.d2 = 2;
  p.eta2 = 1;
  CHECK(to_string(classify(p, kParams)) == "close-C");
  p.d2 = 3;  // d2 = alpha d1 counts as far
  CHECK(classify(p, kParams).far);
}

TEST_CASE("classification is the truth-table partition") {
  ClientProfile p;
  p.f1 = 0;
  p.f2 = 1;
  p.d1 = 1;
  for (bool far : {false, true})
    for (int e1 = 0; e1 < 4; ++e1)
      for (int e2 = 0; e2 < 4; ++e2) {
        if (e1 == e2) continue;
        p.d2 = far ? 5 : 2;
        p.eta1 = e1;
        p.eta2 = e2;
        CHECK(to_string(classify(p, kParams)) == truth(far, 0, 1, e1, e2));
      }
}

TEST_CASE("micro instances: profile and type from raw distances") {
  std::set<std::string> seen;
  for (std::uint64_t seed = 1; seed <= 400; ++seed) {
    const int nl = 2 + int(seed % 2), no = 1 + int(seed % 3 == 0);
    const auto ctx = random_context(4, nl, no, seed, 1);
    const auto base = base_mapping(ctx);
    for (int c = 0; c < 4; ++c) {
      std::vector<std::pair<double, int>> dl, ds;
      for (int i = 0; i < nl; ++i) dl.emplace_back(ctx.inst.cf(c, i), i);
      for (int j = 0; j < no; ++j) ds.emplace_back(ctx.inst.cf(c, ctx.opt_facility(j)), j);
      std::sort(dl.begin(), dl.end());
      std::sort(ds.begin(), ds.end());
      const int fs = ds[0].second;
      std::vector<std::pair<double, int>> eo;
      for (int i = 0; i < nl; ++i) eo.emplace_back(ctx.local_opt(i, fs), i);
      std::sort(eo.begin(), eo.end());
      const auto p = make_profile(ctx, base, c, kParams);
      REQUIRE(p.f1 == dl[0].second);
      REQUIRE(p.f2 == dl[1].second);
      REQUIRE(p.fstar == fs);
      REQUIRE(p.eta1 == eo[0].second);
      REQUIRE(p.eta2 == eo[1].second);
      CHECK(p.d1 <= p.d2);
      CHECK(p.rho >= 0);
      CHECK(p.rho <= 1);
      const bool far = dl[1].first >= 3 * dl[0].first;
      const auto t = to_string(classify(p, kParams));
      CHECK(t == truth(far, p.f1, p.f2, p.eta1, p.eta2));
      seen.insert(t);
    }
  }
  MESSAGE(seen.size() << " distinct types seen");
  CHECK(seen.size() >= 6);
}

TEST_CASE("event bound examples") {
  EventTag tag;
  tag.event = TauEvent::S1;
  auto b = event_bounds({true, Letter::E}, tag, 0.5, kParams);
  REQUIRE(b.size() == 1);
  CHECK(b[0].cstar == doctest::Approx(2.6));
  CHECK(b[0].c1 == doctest::Approx(-1.0));
  tag.event = TauEvent::T1;
  b = event_bounds({true, Letter::E}, tag, 0.5, kParams);
  CHECK(b[0].cstar == doctest::Approx(2.4));
  CHECK(b[0].c1 == doctest::Approx(-0.8));
  tag.event = TauEvent::S1;
  b = event_bounds({true, Letter::A}, tag, 0.5, kParams);
  CHECK(b[0].eval(1, 1, 0) == doctest::Approx(0.0));  // (1+ab)(d* - d1)
  auto agg = aggregate_coefficients({false, Letter::D});
  CHECK(agg.first == 2.5203);
  CHECK(agg.second == 0.8888);
  agg = aggregate_coefficients({true, Letter::A});
  CHECK(agg.first == 2.47);
  CHECK(agg.second == 1.13);
  for (bool far : {false, true})
    for (Letter l : {Letter::A, Letter::B, Letter::C, Letter::D, Letter::E})
      for (TauEvent e : {TauEvent::S1, TauEvent::S2, TauEvent::T1, TauEvent::T2}) {
        if (far && (l == Letter::C || l == Letter::D)) continue;
        tag.event = e;
        tag.refined = SubEvent::None;
        if (!far && (l == Letter::A || l == Letter::B) && (e == TauEvent::T1 || e == TauEvent::T2))
          tag.refined = e == TauEvent::T1 ? SubEvent::T11 : SubEvent::T22;
        CHECK(!event_bounds({far, l}, tag, 0.8, kParams).empty());
      }
}

TEST_CASE("delta sums: empty set, single swap, and recomputation") {
  const auto ctx = random_context(30, 12, 8, 3);
  const auto base = base_mapping(ctx);
  SwapSet empty;
  CHECK(client_delta_sum(ctx, empty, 0, kParams) == 0.0);

  std::vector<int> F(12);
  for (int i = 0; i < 12; ++i) F[i] = i;
  SwapSet one;
  one.swaps.push_back({{2}, {5}});
  Solution sol(ctx.inst, F);
  const auto d = delta(sol, {2}, {ctx.opt_facility(5)}, kParams);
  const auto sums = client_delta_sums(ctx, one, kParams);
  for (int c = 0; c < 30; ++c) CHECK(sums[c] == doctest::Approx(d.per_client[c]));

  Rng rng(6);
  for (int t = 0; t < 30; ++t) {
    const auto s = generate_swaps(ctx, base, SwapGenConfig{}, rng);
    const auto got = client_delta_sums(ctx, s, kParams);
    for (int c = 0; c < 30; ++c) {
      double want = 0;
      for (const auto& sw : s.swaps) {
        std::vector<int> Q;
        for (int j : sw.Q) Q.push_back(ctx.opt_facility(j));
        want += client_value(ctx, c, swapped(F, sw.P, Q)) - client_value(ctx, c, F);
      }
      CHECK(got[c] == doctest::Approx(want).epsilon(1e-9));
    }
  }
}

TEST_CASE("defiant cause (i) tracks surrogate choices") {
  const auto ctx = random_context(40, 34, 26, 7);
  const auto base = base_mapping(ctx);
  Rng rng(9);
  long fired = 0;
  for (int t = 0; t < 300; ++t) {
    const auto s = generate_swaps(ctx, base, SwapGenConfig{}, rng);
    std::set<int> sur;
    for (auto [h, c] : s.local_surrogates) sur.insert(c);
    for (auto [v, l] : s.opt_surrogates) sur.insert(l);
    for (int c = 0; c < 40; ++c) {
      const auto p = make_profile(ctx, base, c, kParams);
      const auto tag = detect_event(s, p, classify(p, kParams), base);
      const bool expect = sur.count(p.f1) || sur.count(p.f2) || sur.count(s.tau[p.fstar]);
      const bool has = std::find(tag.causes.begin(), tag.causes.end(), "i") != tag.causes.end();
      CHECK(has == expect);
      fired += has;
      CHECK(tag.amenable == tag.causes.empty());
      const bool second = s.tau_choice[p.fstar] == TauChoice::Eta2;
      CHECK(s.tau[p.fstar] == (second ? p.eta2 : p.eta1));
      if (s.kind == SwapKind::Simple) CHECK(tag.event == (second ? TauEvent::S2 : TauEvent::S1));
      if (s.kind == SwapKind::Tree) CHECK(tag.event == (second ? TauEvent::T2 : TauEvent::T1));
    }
  }
  CHECK(fired > 0);
}

TEST_CASE("amenable samples satisfy the boxed bounds on a local optimum") {
  for (std::uint64_t seed = 1; seed <= 3; ++seed) {
    const auto inst = random_euclidean(40, 20, 2, seed);
    SearchConfig sc;
    sc.k = 8;
    sc.seed = seed;
    const auto local = run(inst, sc);
    const auto opt = brute_force_opt(inst, 6);
    const auto ctx = make_context(inst, local.open, opt.open);
    BoundsConfig cfg;
    cfg.samples = 40;
    cfg.seed = seed;
    const auto rep = verify_amenable_bounds(ctx, cfg);
    CHECK(rep.ok());
    CHECK(rep.samples + rep.infeasible == 40);
    CHECK(rep.amenable > 0);
    long types = 0;
    for (auto& [k, v] : rep.type_counts) types += v;
    CHECK(types == 40);
  }
}

TEST_CASE("distance inequalities hold on 10^4 random profiles") {
  InequalityReport rep;
  for (std::uint64_t seed = 1; rep.profiles < 10000; ++seed) {
    const auto ctx = random_context(50, 6 + int(seed % 5), 3 + int(seed % 4), seed, 1 + int(seed % 3));
    const auto base = base_mapping(ctx);
    for (int c = 0; c < 50; ++c) inequality_suite(ctx, base, make_profile(ctx, base, c, kParams), rep);
  }
  CHECK(rep.checks > 5 * rep.profiles);
  CHECK(rep.violations.empty());
}

TEST_CASE("survival statistics") {
  const auto ctx = random_context(30, 34, 26, 7);
  const auto base = base_mapping(ctx);
  Rng rng(13);
  std::vector<SwapSet> trees;
  for (int t = 0; t < 3000; ++t) trees.push_back(generate_tree(ctx, base, SwapGenConfig{}, rng));
  const auto rep = survival_statistics(trees, 8);
  CHECK(rep.long_paths_survived == 0);
  CHECK(rep.short_cycle_edges_cut == 0);
  REQUIRE(!rep.cells.empty());
  for (const auto& c : rep.cells) {
    INFO("t_h " << c.t_h << " s " << c.s << " " << c.regime << " freq " << c.frequency() << " in [" << c.lower << ", "
                << c.upper << "]");
    CHECK(c.within());
    if (c.s >= c.t_h) CHECK(c.survived == 0);
  }
}
