#include <algorithm>
#include <cmath>
#include <set>

#include "doctest.h"
#include "nols/instance_gen.hpp"
#include "nols/local_search.hpp"

using namespace nols;

namespace {

MetricInstance line(std::vector<double> xs) {
  std::vector<std::vector<double>> pts;
  std::vector<int> all;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    pts.push_back({xs[i]});
    all.push_back(int(i));
  }
  return MetricInstance::from_points(pts, all, all);
}

SearchConfig config(int k, int p, Objective obj) {
  SearchConfig c;
  c.k = k;
  c.p = p;
  c.objective = obj;
  c.params = PotentialParams::phi2(3, 0.2);
  return c;
}

}  // namespace

TEST_CASE("swap enumeration counts and uniqueness") {
  int n = 0;
  enumerate_swaps({0, 1}, {2, 3, 4}, 1, [&](auto&, auto&) { return ++n, true; });
  CHECK(n == 6);
  n = 0;
  std::set<std::pair<std::vector<int>, std::vector<int>>> seen;
  enumerate_swaps({0, 1}, {2, 3, 4}, 2, [&](auto& P, auto& Q) {
    seen.insert({P, Q});
    return ++n, true;
  });
  CHECK(n == 9);
  CHECK(seen.size() == 9);
  CHECK(swap_count(2, 3, 1) == 6);
  CHECK(swap_count(2, 3, 2) == 9);
  CHECK(swap_count(10, 90, 2) == 10 * 90 + 45 * 4005);
  CHECK(binomial(5, 2) == 10);
  CHECK(binomial(3, 4) == 0);
  CHECK(binomial(200, 100) == UINT64_MAX);
  // Early stop.
  n = 0;
  enumerate_swaps({0, 1}, {2, 3, 4}, 2, [&](auto&, auto&) { return ++n < 4; });
  CHECK(n == 4);
}

TEST_CASE("brute force examples") {
  const auto l = line({0, 1, 3});
  auto bf = brute_force_opt(l, 1);
  CHECK(bf.open == std::vector<int>{1});
  CHECK(bf.cost == doctest::Approx(3));
  CHECK(bf.subsets == 3);
  bf = brute_force_opt(l, 2);
  CHECK(bf.cost == doctest::Approx(1));
  CHECK_THROWS_AS(brute_force_opt(random_euclidean(5, 40, 2, 1), 10, 1000), SizeError);

  const auto g = biclique(4, 1, 2.5);
  CHECK(brute_force_opt(g.instance, 4).cost == doctest::Approx(kmed_cost(g.instance, g.opt)));
}

TEST_CASE("brute force equals exhaustive subset scan") {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) {
    const auto inst = random_euclidean(12, 8, 2, seed);
    double best = kInf;
    for (int mask = 0; mask < 256; ++mask) {
      if (__builtin_popcount(mask) != 3) continue;
      std::vector<int> F;
      for (int f = 0; f < 8; ++f)
        if (mask >> f & 1) F.push_back(f);
      best = std::min(best, kmed_cost(inst, F));
    }
    CHECK(brute_force_opt(inst, 3).cost == doctest::Approx(best));
  }
}

TEST_CASE("bi-clique local optima are certified") {
  const auto pp = PotentialParams::phi2(3, 0.2);
  const auto pred = predicted_gap(3, 0.2, 5, 1, 1);
  const auto good = biclique(5, 1, pred.d);
  const auto rep = verify_local_optimality(good.instance, good.local, 1, Objective::Potential, pp);
  CHECK(rep.certified());
  CHECK(rep.swaps_checked == 6 * 5);
  // Beyond the finite-k distance an improving swap appears.
  for (double d : {2.0, 2.6 - 1e-3, 3.0}) {
    const auto bad = biclique(5, 1, d);
    CHECK(!verify_local_optimality(bad.instance, bad.local, 1, Objective::Potential, pp).certified());
  }
}

TEST_CASE("search terminates at certified local optima within the approximation bound") {
  for (std::uint64_t seed = 1; seed <= 12; ++seed) {
    const auto inst = random_euclidean(25, 12, 2, seed);
    const int k = 2 + int(seed % 3);
    const int p = 1 + int(seed % 2);
    const double opt = brute_force_opt(inst, k).cost;
    for (Objective obj : {Objective::Potential, Objective::Cost}) {
      auto c = config(k, p, obj);
      c.seed = seed;
      c.delta = 0;
      c.post_check = true;
      const auto r = run(inst, c);
      CHECK(r.trace.termination == "local-optimum");
      REQUIRE(r.trace.post);
      CHECK(r.trace.post->certified());
      CHECK(r.cost <= (3.0 + 2.0 / p) * opt + 1e-6);
      CHECK(r.cost == doctest::Approx(kmed_cost(inst, r.open)));
      CHECK(r.potential == doctest::Approx(potential(inst, r.open, c.params)));
    }
  }
}

TEST_CASE("trace is monotone and respects the threshold") {
  const auto inst = random_euclidean(40, 20, 2, 3);
  for (Pivot pv : {Pivot::FirstImprovement, Pivot::BestImprovement}) {
    auto c = config(4, 1, Objective::Potential);
    c.pivot = pv;
    const auto r = run(inst, c);
    double prev = r.trace.initial_value;
    for (const auto& it : r.trace.iterations) {
      CHECK(it.phi_before == doctest::Approx(prev));
      CHECK(it.phi_after < (1 - r.trace.threshold) * it.phi_before + 1e-12);
      prev = it.phi_after;
    }
    CHECK(prev == doctest::Approx(r.trace.final_value));
    CHECK(r.trace.threshold == doctest::Approx(1e-4 / inst.num_locations()));
  }
}

TEST_CASE("iteration cap and determinism") {
  const auto inst = random_euclidean(40, 20, 2, 4);
  auto c = config(5, 1, Objective::Cost);
  c.max_iterations = 1;
  const auto capped = run(inst, c);
  CHECK(capped.trace.iterations.size() <= 1);
  c.max_iterations = 100000;
  const auto a = run(inst, c), b = run(inst, c);
  CHECK(a.open == b.open);
  CHECK(a.trace.iterations.size() == b.trace.iterations.size());
  // The number of improving steps is bounded by log(initial/final)/-log(1-delta').
  const double bound = std::log(a.trace.initial_value / a.trace.final_value) / -std::log1p(-a.trace.threshold);
  CHECK(double(a.trace.iterations.size()) <= bound + 1);
}

TEST_CASE("configuration errors") {
  const auto inst = random_euclidean(5, 4, 2, 1);
  CHECK_THROWS_AS(run(inst, config(0, 1, Objective::Cost)), std::invalid_argument);
  CHECK_THROWS_AS(run(inst, config(5, 1, Objective::Cost)), std::invalid_argument);
  CHECK_THROWS_AS(run(inst, config(2, 1, Objective::Cost), std::vector<int>{1, 1}), std::invalid_argument);
  auto c = config(2, 1, Objective::Cost);
  c.delta = 1.5;
  CHECK_THROWS_AS(run(inst, c), std::invalid_argument);
  const auto seeded = farthest_point_seed(inst, 3, 7);
  CHECK(seeded.size() == 3);
  CHECK(std::is_sorted(seeded.begin(), seeded.end()));
}
