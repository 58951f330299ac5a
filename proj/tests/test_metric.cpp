#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <queue>

#include "doctest.h"
#include "nols/instance_gen.hpp"
#include "nols/metric.hpp"
#include "nols/rng.hpp"

using namespace nols;

namespace {

// Dijkstra from every vertex of an undirected weighted graph.
std::vector<std::vector<double>> dijkstra_all(int n, const std::vector<std::tuple<int, int, double>>& edges) {
  std::vector<std::vector<std::pair<int, double>>> adj(n);
  for (auto [u, v, w] : edges) {
    adj[u].emplace_back(v, w);
    adj[v].emplace_back(u, w);
  }
  std::vector<std::vector<double>> out(n, std::vector<double>(n, INFINITY));
  for (int s = 0; s < n; ++s) {
    auto& dist = out[s];
    using Item = std::pair<double, int>;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> pq;
    dist[s] = 0;
    pq.push({0, s});
    while (!pq.empty()) {
      auto [d, u] = pq.top();
      pq.pop();
      if (d > dist[u]) continue;
      for (auto [v, w] : adj[u])
        if (d + w < dist[v]) {
          dist[v] = d + w;
          pq.push({dist[v], v});
        }
    }
  }
  return out;
}

}  // namespace

TEST_CASE("dense matrix parsing") {
  const auto inst = parse_matrix("3\n0 1 2\n1 0 1\n2 1 0\n");
  CHECK(inst.num_locations() == 3);
  CHECK(inst.num_clients() == 3);
  CHECK(inst.num_facilities() == 3);
  CHECK(inst.loc_dist(0, 2) == 2.0);
  CHECK(inst.representation() == Representation::ExplicitMatrix);
  CHECK(verify_metric(inst, VerifyMode::Exhaustive).ok());
}

TEST_CASE("matrix errors carry line numbers or fail validation") {
  try {
    parse_matrix("3\n0 1 2\n1 0\n2 1 0\n");
    FAIL("expected a parse error");
  } catch (const ParseError& e) {
    CHECK(e.line == 3);
  }
  CHECK_THROWS_AS(parse_matrix("2\n0 x\n1 0\n"), ParseError);
  CHECK_THROWS_AS(parse_matrix("2\n0 1\n2 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_matrix("2\n0 -1\n-1 0\n"), ValidationError);
  CHECK_THROWS_AS(parse_matrix("2\n1 1\n1 0\n"), ValidationError);
}

TEST_CASE("OR-Library format equals an independent shortest-path closure") {
  Rng rng(11);
  const int n = 12;
  std::vector<std::tuple<int, int, double>> edges;
  std::string text;
  for (int v = 1; v < n; ++v) edges.emplace_back(static_cast<int>(rng.below(v)), v, 1 + static_cast<double>(rng.below(9)));
  for (int e = 0; e < 10; ++e) {
    const int u = static_cast<int>(rng.below(n)), v = static_cast<int>(rng.below(n));
    if (u != v) edges.emplace_back(u, v, 1 + static_cast<double>(rng.below(20)));
  }
  // A repeated edge: the last weight is the one kept.
  edges.emplace_back(0, 1, 50.0);
  edges.emplace_back(0, 1, 2.0);
  text = std::to_string(n) + " " + std::to_string(edges.size()) + " 3\n";
  for (auto [u, v, w] : edges) text += std::to_string(u + 1) + " " + std::to_string(v + 1) + " " + std::to_string(int(w)) + "\n";

  // Oracle graph keeps only the last weight per pair.
  std::map<std::pair<int, int>, double> last;
  for (auto [u, v, w] : edges) last[{std::min(u, v), std::max(u, v)}] = w;
  std::vector<std::tuple<int, int, double>> dedup;
  for (auto& [k, w] : last) dedup.emplace_back(k.first, k.second, w);
  const auto oracle = dijkstra_all(n, dedup);

  const auto inst = parse_orlib(text);
  REQUIRE(inst.num_clients() == static_cast<std::size_t>(n));
  REQUIRE(inst.num_facilities() == static_cast<std::size_t>(n));
  CHECK(inst.suggested_k == 3);
  CHECK(inst.representation() == Representation::ShortestPathGraph);
  for (int c = 0; c < n; ++c)
    for (int f = 0; f < n; ++f) CHECK(inst.cf(c, f) == doctest::Approx(oracle[c][f]));
  CHECK(verify_metric(inst, VerifyMode::Exhaustive).ok());
}

TEST_CASE("OR-Library header and edge errors") {
  CHECK_THROWS_AS(parse_orlib("3 1\n1 2 1\n"), ParseError);
  CHECK_THROWS_AS(parse_orlib("3 1 1\n1 4 1\n"), ParseError);
  CHECK_THROWS_AS(parse_orlib("3 2 1\n1 2 1\n"), ParseError);
}

TEST_CASE("Euclidean CSV: unit square diagonal") {
  const auto inst = parse_euclidean_csv("client,0,0\nclient,1,1\nfacility,1,0\nboth,0,1\n");
  CHECK(inst.num_clients() == 3);
  CHECK(inst.num_facilities() == 2);
  CHECK(inst.loc_dist(0, 1) == doctest::Approx(std::sqrt(2.0)));
  CHECK(inst.representation() == Representation::EuclideanPoints);
  CHECK_THROWS_AS(parse_euclidean_csv("client,0,0\nhub,1,1\n"), ParseError);
  CHECK_THROWS_AS(parse_euclidean_csv("client,0,0\nfacility,1\n"), ParseError);
  CHECK_THROWS_AS(parse_euclidean_csv("client,0,0\nclient,1,1\n"), ValidationError);
}

TEST_CASE("load_instance detects formats from files") {
  const std::string path = "metric_test_tmp.matrix";
  {
    std::ofstream os(path);
    os << "2\n0 3\n3 0\n";
  }
  const auto inst = load_instance({path, InstanceFormat::Auto});
  CHECK(inst.loc_dist(0, 1) == 3.0);
  std::remove(path.c_str());
  CHECK_THROWS(load_instance({"definitely-missing.file", InstanceFormat::Auto}));
}

TEST_CASE("nearest facilities: examples and tie-break") {
  // Line: client at 0, facilities at 1 and 3 (locations 1, 2).
  const auto line = MetricInstance::from_points({{0.0}, {1.0}, {3.0}}, {0}, {1, 2});
  auto near = nearest_facilities(line, 0, {0, 1}, 2);
  REQUIRE(near.size() == 2);
  CHECK(near[0] == std::pair<int, double>{0, 1.0});
  CHECK(near[1] == std::pair<int, double>{1, 3.0});
  CHECK_THROWS_AS(nearest_facilities(line, 0, {0, 1}, 3), std::invalid_argument);
  CHECK_THROWS_AS(nearest_facilities(line, 0, {0, 1}, 0), std::invalid_argument);

  const auto tie = MetricInstance::from_points({{0.0}, {1.0}, {-1.0}}, {0}, {1, 2});
  CHECK(nearest_facilities(tie, 0, {1, 0}, 1)[0].first == 0);
}

TEST_CASE("nearest facilities match a full sort") {
  for (std::uint64_t seed = 1; seed <= 20; ++seed) {
    const auto inst = random_euclidean(8, 10, 2, seed);
    std::vector<int> F(10);
    for (int i = 0; i < 10; ++i) F[i] = i;
    for (int c = 0; c < 8; ++c) {
      std::vector<std::pair<double, int>> all;
      for (int f : F) all.emplace_back(inst.cf(c, f), f);
      std::sort(all.begin(), all.end());
      const auto got = nearest_facilities(inst, c, F, 3);
      for (int j = 0; j < 3; ++j) {
        CHECK(got[j].first == all[j].second);
        CHECK(got[j].second == all[j].first);
      }
      // Full list is a permutation with non-decreasing distances.
      const auto full = nearest_facilities(inst, c, F, 10);
      std::vector<int> ids;
      for (std::size_t j = 0; j < full.size(); ++j) {
        ids.push_back(full[j].first);
        if (j) CHECK(full[j - 1].second <= full[j].second);
      }
      std::sort(ids.begin(), ids.end());
      CHECK(ids == F);
    }
  }
}

TEST_CASE("verify_metric reports the violated triple") {
  const auto bad = MetricInstance::from_matrix({0, 1, 5, 1, 0, 1, 5, 1, 0}, 3, {0, 1, 2}, {0, 1, 2});
  const auto rep = verify_metric(bad, VerifyMode::Exhaustive);
  REQUIRE(rep.violations.size() == 1);
  const auto& v = rep.violations[0];
  CHECK(v.kind == MetricViolation::Kind::Triangle);
  CHECK(v.a == 0);
  CHECK(v.b == 1);
  CHECK(v.c == 2);
  CHECK(v.lhs == 5.0);
  CHECK(v.rhs == 2.0);
  // Sampling finds it too.
  CHECK(!verify_metric(bad, VerifyMode::Sampled, 2000, 3).ok());
}

TEST_CASE("Floyd-Warshall closure is metric") {
  Rng rng(5);
  const std::size_t n = 15;
  std::vector<double> m(n * n, INFINITY);
  for (std::size_t i = 0; i < n; ++i) m[i * n + i] = 0;
  for (std::size_t i = 1; i < n; ++i) {
    const std::size_t j = rng.below(i);
    const double w = 1 + rng.uniform() * 10;
    m[i * n + j] = m[j * n + i] = w;
  }
  floyd_warshall(m, n);
  std::vector<int> all(n);
  for (std::size_t i = 0; i < n; ++i) all[i] = static_cast<int>(i);
  const auto inst = MetricInstance::from_matrix(m, n, all, all, Representation::ShortestPathGraph);
  CHECK(verify_metric(inst, VerifyMode::Exhaustive).ok());
}

TEST_CASE("matrix text round trip and determinism") {
  const auto a = random_euclidean(5, 4, 2, 9);
  const auto b = random_euclidean(5, 4, 2, 9);
  CHECK(to_matrix_text(a) == to_matrix_text(b));
  const auto back = parse_matrix(to_matrix_text(a));
  for (std::size_t i = 0; i < a.num_locations(); ++i)
    for (std::size_t j = 0; j < a.num_locations(); ++j)
      CHECK(back.loc_dist(int(i), int(j)) == doctest::Approx(a.loc_dist(int(i), int(j))).epsilon(1e-12));
}
