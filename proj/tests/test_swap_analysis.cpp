#include <algorithm>
#include <cmath>
#include <map>

#include "doctest.h"
#include "nols/instance_gen.hpp"
#include "nols/swap_analysis.hpp"

using namespace nols;

namespace {

// Facilities on a line; one client at the origin.
AnalysisContext line_context(const std::vector<double>& local, const std::vector<double>& opt) {
  std::vector<std::vector<double>> pts{{0.0}};
  std::vector<int> fac, F, Fs;
  for (double x : local) {
    F.push_back(int(fac.size()));
    fac.push_back(int(pts.size()));
    pts.push_back({x});
  }
  for (double x : opt) {
    Fs.push_back(int(fac.size()));
    fac.push_back(int(pts.size()));
    pts.push_back({x});
  }
  return make_context(MetricInstance::from_points(pts, {0}, fac), F, Fs);
}

AnalysisContext random_context(int nl, int no, std::uint64_t seed) {
  const auto inst = random_euclidean(30, nl + no, 2, seed);
  std::vector<int> F, Fs;
  for (int i = 0; i < nl + no; ++i) (i < nl ? F : Fs).push_back(i);
  return make_context(inst, F, Fs);
}

double sigma(double p, int n) { return std::sqrt(std::max(p * (1 - p), 1e-12) / n); }

}  // namespace

TEST_CASE("event probability table") {
  auto e = event_probabilities(0.5);
  CHECK(e.s1 == 0.5);
  CHECK(e.s2 == 0.0);
  CHECK(e.t1 == 0.5);
  CHECK(e.t2 == 0.0);
  e = event_probabilities(0.7);
  CHECK(e.s1 == 0.5);
  CHECK(e.s2 == 0.0);
  CHECK(e.t1 == 0.25);
  CHECK(e.t2 == 0.25);
  e = event_probabilities(0.9);
  CHECK(e.s1 == doctest::Approx(0.35));
  CHECK(e.s2 == doctest::Approx(0.15));
  CHECK(e.t1 == 0.25);
  CHECK(e.t2 == 0.25);
  for (double rho : {0.0, 0.3, 2.0 / 3, 0.75, 0.8, 1.0}) {
    e = event_probabilities(rho);
    CHECK(e.s1 + e.s2 + e.t1 + e.t2 == doctest::Approx(1.0));
  }
  Rng rng(1);
  CHECK_THROWS_AS(event_probabilities(1.2), std::invalid_argument);
  CHECK_THROWS_AS(sample_tau(-0.1, SwapKind::Simple, rng), std::invalid_argument);
}

TEST_CASE("sampled events follow the table within 3 sigma") {
  const int n = 100000;
  for (double rho : {0.5, 0.7, 0.9}) {
    Rng rng(std::uint64_t(rho * 1000));
    int count[4] = {0, 0, 0, 0};
    for (int i = 0; i < n; ++i) ++count[int(sample_event(rho, rng))];
    const auto e = event_probabilities(rho);
    const double p[4] = {e.s1, e.s2, e.t1, e.t2};
    for (int k = 0; k < 4; ++k) {
      INFO("rho " << rho << " event " << k);
      CHECK(std::fabs(double(count[k]) / n - p[k]) <= 3 * sigma(p[k], n));
    }
  }
}

TEST_CASE("thresholds") {
  CHECK(degree_threshold(1.0 / 3) == 3);
  CHECK(degree_threshold(0.2) == 5);
  CHECK(height_thresholds(1.0 / 3) == std::vector<int>{6, 18, 54});
  CHECK(strict_surplus_requirement(2, 0, 1.0) == doctest::Approx(16 * 32 * 2));
  CHECK_THROWS(degree_threshold(0));
}

TEST_CASE("base mapping on a line") {
  const auto ctx = line_context({1.0, 3.0, 10.0}, {0.0, 9.0});
  const auto m = base_mapping(ctx);
  CHECK(m.eta1 == std::vector<int>{0, 2});
  CHECK(m.eta2 == std::vector<int>{1, 1});
  CHECK(m.rho[0] == doctest::Approx(1.0 / 3));
  CHECK(m.rho[1] == doctest::Approx(1.0 / 6));
  CHECK(m.pi == std::vector<int>{0, 0, 1});
}

TEST_CASE("heavy local facilities") {
  // Five optimal facilities cluster around local 0.
  const auto ctx = line_context({0.0, 50.0, 100.0}, {0.1, -0.1, 0.2, -0.2, 0.3});
  auto m = base_mapping(ctx);
  CHECK(heavy_local_facilities(m, ctx.nl, 2) == std::vector<int>{0});
  CHECK(heavy_local_facilities(m, ctx.nl, 4).empty());
  CHECK_THROWS(heavy_local_facilities(m, ctx.nl, 0));

  // Bijective nearest maps: nothing is heavy.
  const auto bij = line_context({0.0, 10.0, 20.0, 30.0}, {0.1, 10.1, 20.1});
  CHECK(heavy_local_facilities(base_mapping(bij), bij.nl, 1).empty());
}

TEST_CASE("heavy set matches a direct recount") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto ctx = random_context(20, 15, seed);
    const auto m = base_mapping(ctx);
    std::vector<int> count(ctx.nl, 0);
    for (int j = 0; j < ctx.no; ++j) {
      std::vector<std::pair<double, int>> d;
      for (int i = 0; i < ctx.nl; ++i) d.emplace_back(ctx.local_opt(i, j), i);
      std::sort(d.begin(), d.end());
      REQUIRE(m.eta1[j] == d[0].second);
      REQUIRE(m.eta2[j] == d[1].second);
      const double rho = d[0].first / d[1].first;
      CHECK(m.rho[j] == doctest::Approx(rho));
      ++count[d[0].second];
      if (rho > 2.0 / 3) ++count[d[1].second];
    }
    for (int td : {1, 2, 3}) {
      std::vector<int> expect;
      for (int i = 0; i < ctx.nl; ++i)
        if (count[i] > td + 1) expect.push_back(i);
      CHECK(heavy_local_facilities(m, ctx.nl, td) == expect);
    }
  }
}

TEST_CASE("balancing examples") {
  Rng rng(3);
  auto r = balance({1, 1, 2}, {1, 1, 2}, {{}, {}, {}}, 1.0 / 3, BalanceMode::Desk, rng);
  CHECK(r.groups.size() == 3);
  for (const auto& g : r.groups) CHECK(g.size() == 1);

  r = balance({1, 0}, {0, 1}, {{}, {}}, 1.0 / 3, BalanceMode::Desk, rng);
  REQUIRE(r.groups.size() == 1);
  CHECK(r.groups[0].size() == 2);

  // A conflict forbids the only merge.
  CHECK_THROWS_AS(balance({1, 0}, {0, 1}, {{1}, {0}}, 1.0 / 3, BalanceMode::Desk, rng), InfeasibleError);
  CHECK_THROWS_AS(balance({0}, {1}, {{}}, 1.0 / 3, BalanceMode::Desk, rng), InfeasibleError);

  try {
    balance({2, 0}, {0, 1}, {{}, {}}, 0.5, BalanceMode::Strict, rng);
    FAIL("strict mode should refuse");
  } catch (const InfeasibleError& e) {
    CHECK(e.required_r == doctest::Approx(strict_surplus_requirement(2, 0, 0.5)));
  }
}

TEST_CASE("desk balancing stress: properties (i)-(iii) and merge frequency") {
  Rng rng(17);
  const int trials = 1000;
  std::map<std::pair<int, int>, int> merged;
  const int n = 60;
  // Fixed instance: sets of size <= 4, conflict degree <= 2.
  std::vector<int> green(n), red(n);
  std::vector<std::vector<int>> conflicts(n);
  for (int s = 0; s < n; ++s) {
    const int size = 1 + int(rng.below(4));
    green[s] = int(rng.below(std::uint64_t(size + 1)));
    red[s] = size - green[s];
  }
  int surplus = 0;
  for (int s = 0; s < n; ++s) surplus += green[s] - red[s];
  for (int s = 0; surplus < 40; s = (s + 1) % n)
    if (red[s] > 0) {
      --red[s];
      ++green[s];
      surplus += 2;
    }
  for (int s = 0; s + 1 < n; s += 2) {
    conflicts[s].push_back(s + 1);
  }
  for (int t = 0; t < trials; ++t) {
    const auto res = balance(green, red, conflicts, 1.0 / 3, BalanceMode::Desk, rng);
    CHECK(check_balance(green, red, conflicts, res).empty());
    CHECK(res.theta <= 2);
    CHECK(res.x <= 4);
    for (const auto& g : res.groups)
      for (std::size_t a = 0; a < g.size(); ++a)
        for (std::size_t b = a + 1; b < g.size(); ++b) ++merged[{std::min(g[a], g[b]), std::max(g[a], g[b])}];
  }
  double worst = 0;
  for (auto& [k, v] : merged) worst = std::max(worst, double(v) / trials);
  MESSAGE("worst pairwise merge frequency " << worst);
  CHECK(worst <= 1.0 / 3 + 3 * sigma(1.0 / 3, trials));
}

TEST_CASE("strict balancing meets the constructive properties") {
  Rng rng(5);
  // x = 2, theta = 1, eps = 1: requirement 16*32*1*2 = 1024.
  std::vector<int> green, red;
  std::vector<std::vector<int>> conflicts;
  for (int s = 0; s < 800; ++s) {
    green.push_back(2);
    red.push_back(0);
  }
  for (int s = 0; s < 150; ++s) {
    green.push_back(0);
    red.push_back(2);
  }
  for (int s = 0; s < 150; ++s) {
    green.push_back(0);
    red.push_back(1);
  }
  for (int s = 0; s < 100; ++s) {
    green.push_back(1);
    red.push_back(1);
  }
  conflicts.resize(green.size());
  for (std::size_t s = 0; s + 1 < green.size(); s += 2) conflicts[s].push_back(int(s + 1));
  const auto res = balance(green, red, conflicts, 1.0, BalanceMode::Strict, rng);
  CHECK(res.surplus == 1600 - 450);
  CHECK(res.surplus >= res.required_r);
  CHECK(check_balance(green, red, conflicts, res).empty());
}

TEST_CASE("heavy optimal split: five children with t_d = 2") {
  const auto ctx = line_context({0.1, 0.2, 0.3, 0.4, 0.5, 100.0, 101.0}, {0.0, 100.2});
  const auto m = base_mapping(ctx);
  for (int i = 0; i < 5; ++i) REQUIRE(m.pi[i] == 0);
  SwapGenConfig cfg;
  cfg.t_d = 2;
  cfg.t_h = 6;
  Rng rng(8);
  for (int t = 0; t < 50; ++t) {
    const auto s = generate_tree(ctx, m, cfg, rng);
    CHECK(s.heavy_opts == std::vector<int>{0});
    int copies = 0, surrogates = 0;
    for (const auto& v : s.vertices) {
      copies += v.kind == VertexKind::OptCopy && v.facility == 0;
      surrogates += v.kind == VertexKind::OptSurrogate;
    }
    CHECK(copies == 2);  // three copies of f* including the original
    REQUIRE(s.opt_surrogates.size() == 2);
    // Surrogates come from the preceding group of closest children.
    CHECK((s.opt_surrogates[0].second == 0 || s.opt_surrogates[0].second == 1));
    CHECK((s.opt_surrogates[1].second == 2 || s.opt_surrogates[1].second == 3));
    CHECK(validate_swap_set(s, ctx.nl, ctx.no).empty());
  }
}

TEST_CASE("a 2-cycle is never cut") {
  const auto ctx = line_context({0.1, 5.0}, {0.0});
  const auto m = base_mapping(ctx);
  SwapGenConfig cfg;
  Rng rng(2);
  for (int t = 0; t < 200; ++t) {
    const auto s = generate_tree(ctx, m, cfg, rng);
    const int vo = s.vertex_of_opt(0), vl = s.vertex_of_local(0);
    CHECK(s.vertices[vo].out == vl);
    CHECK(s.vertices[vl].out == vo);
    CHECK(!s.vertices[vo].out_deleted);
    CHECK(!s.vertices[vl].out_deleted);
    CHECK(s.component_of_opt(0) == s.component_of_local(0));
    CHECK(validate_swap_set(s, ctx.nl, ctx.no).empty());
  }
}

TEST_CASE("trivial simple structure: bijective tau") {
  const auto ctx = line_context({0.0, 10.0, 20.0, 30.0, 40.0, 50.0}, {0.1, 10.1, 20.1});
  const auto m = base_mapping(ctx);
  Rng rng(4);
  const auto s = generate_simple(ctx, m, SwapGenConfig{}, rng);
  CHECK(s.heavy.empty());
  for (int j = 0; j < 3; ++j) {
    const auto& sw = s.swaps[s.move_of_opt[j]];
    CHECK(std::binary_search(sw.P.begin(), sw.P.end(), j));
    CHECK(std::binary_search(sw.Q.begin(), sw.Q.end(), j));
  }
  CHECK(validate_swap_set(s, ctx.nl, ctx.no).empty());
}

TEST_CASE("random draws are valid and respect structural claims") {
  const auto ctx = random_context(34, 26, 7);
  const auto m = base_mapping(ctx);
  SwapGenConfig cfg;
  Rng rng(11);
  for (int t = 0; t < 1000; ++t) {
    const auto s = generate_swaps(ctx, m, cfg, rng);
    CHECK(validate_swap_set(s, ctx.nl, ctx.no).empty());
    CHECK(double(s.candidates.size()) >= s.t_d / 2.0 * double(s.heavy.size()));
    for (auto [h, c] : s.local_surrogates) CHECK(std::binary_search(s.candidates.begin(), s.candidates.end(), c));
    if (s.kind == SwapKind::Simple)
      for (const auto& comp : s.components) CHECK(int(comp.size()) <= s.t_d + 2);
    for (int j = 0; j < ctx.no; ++j) CHECK((s.tau[j] == m.eta1[j] || s.tau[j] == m.eta2[j]));
  }
}

TEST_CASE("generation is reproducible") {
  const auto ctx = random_context(34, 26, 7);
  const auto m = base_mapping(ctx);
  Rng a(42), b(42);
  for (int t = 0; t < 20; ++t) {
    const auto x = generate_swaps(ctx, m, SwapGenConfig{}, a), y = generate_swaps(ctx, m, SwapGenConfig{}, b);
    REQUIRE(x.swaps.size() == y.swaps.size());
    for (std::size_t k = 0; k < x.swaps.size(); ++k) {
      CHECK(x.swaps[k].P == y.swaps[k].P);
      CHECK(x.swaps[k].Q == y.swaps[k].Q);
    }
  }
}
