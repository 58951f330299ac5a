#include <cmath>

#include "doctest.h"
#include "nols/rng.hpp"
#include "nols/simplex.hpp"

using namespace nols;

namespace {

DenseProblem::Row row(std::vector<std::pair<int, double>> t, LPSense s, double rhs) { return {std::move(t), s, rhs}; }

// Solve a k x k system by Gaussian elimination; false when singular.
bool solve_system(std::vector<std::vector<double>> A, std::vector<double> b, std::vector<double>& x) {
  const int n = int(b.size());
  for (int c = 0; c < n; ++c) {
    int p = c;
    for (int r = c + 1; r < n; ++r)
      if (std::fabs(A[r][c]) > std::fabs(A[p][c])) p = r;
    if (std::fabs(A[p][c]) < 1e-10) return false;
    std::swap(A[p], A[c]);
    std::swap(b[p], b[c]);
    for (int r = 0; r < n; ++r) {
      if (r == c) continue;
      const double f = A[r][c] / A[c][c];
      for (int k = c; k < n; ++k) A[r][k] -= f * A[c][k];
      b[r] -= f * b[c];
    }
  }
  x.resize(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / A[i][i];
  return true;
}

// max c.x over {A x <= b, x >= 0} by enumerating vertices.
double vertex_oracle(const std::vector<std::vector<double>>& A, const std::vector<double>& b, const std::vector<double>& c,
                     bool& feasible) {
  const int n = int(c.size()), m = int(b.size());
  // Rows: A (m) then -x <= 0 (n).
  std::vector<std::vector<double>> G = A;
  std::vector<double> h = b;
  for (int j = 0; j < n; ++j) {
    std::vector<double> r(n, 0.0);
    r[j] = -1;
    G.push_back(r);
    h.push_back(0);
  }
  const int total = m + n;
  double best = -INFINITY;
  feasible = false;
  std::vector<int> pick(n);
  for (int mask = 0; mask < (1 << total); ++mask) {
    if (__builtin_popcount(mask) != n) continue;
    std::vector<std::vector<double>> S;
    std::vector<double> rhs;
    for (int i = 0; i < total; ++i)
      if (mask >> i & 1) {
        S.push_back(G[i]);
        rhs.push_back(h[i]);
      }
    std::vector<double> x;
    if (!solve_system(S, rhs, x)) continue;
    bool ok = true;
    for (int i = 0; i < total && ok; ++i) {
      double lhs = 0;
      for (int j = 0; j < n; ++j) lhs += G[i][j] * x[j];
      ok = lhs <= h[i] + 1e-7;
    }
    if (!ok) continue;
    feasible = true;
    double v = 0;
    for (int j = 0; j < n; ++j) v += c[j] * x[j];
    best = std::max(best, v);
  }
  return best;
}

}  // namespace

TEST_CASE("textbook problem with duals") {
  DenseProblem p;
  p.n = 2;
  p.c = {3, 5};
  p.is_free = {false, false};
  p.rows = {row({{0, 1}}, LPSense::LE, 4), row({{1, 2}}, LPSense::LE, 12), row({{0, 3}, {1, 2}}, LPSense::LE, 18)};
  const auto r = solve_dense(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.objective == doctest::Approx(36));
  CHECK(r.x[0] == doctest::Approx(2));
  CHECK(r.x[1] == doctest::Approx(6));
  REQUIRE(r.duals.size() == 3);
  CHECK(r.duals[0] == doctest::Approx(0));
  CHECK(r.duals[1] == doctest::Approx(1.5));
  CHECK(r.duals[2] == doctest::Approx(1));
}

TEST_CASE("infeasible, unbounded and free variables") {
  DenseProblem p;
  p.n = 1;
  p.c = {1};
  p.is_free = {false};
  p.rows = {row({{0, 1}}, LPSense::GE, 2), row({{0, 1}}, LPSense::LE, 1)};
  CHECK(solve_dense(p).status == LPStatus::Infeasible);

  DenseProblem u;
  u.n = 2;
  u.c = {1, 0};
  u.is_free = {false, false};
  u.rows = {row({{0, 1}, {1, -1}}, LPSense::LE, 1)};
  const auto r = solve_dense(u);
  REQUIRE(r.status == LPStatus::Unbounded);
  REQUIRE(r.ray.size() == 2);
  CHECK(r.ray[0] > 0);
  CHECK(r.ray[0] - r.ray[1] <= 1e-9);
  CHECK(r.ray[1] >= -1e-12);

  DenseProblem f;
  f.n = 1;
  f.c = {1};
  f.is_free = {true};
  f.rows = {row({{0, 1}}, LPSense::LE, -3)};
  const auto rf = solve_dense(f);
  REQUIRE(rf.status == LPStatus::Optimal);
  CHECK(rf.x[0] == doctest::Approx(-3));
}

TEST_CASE("equalities and negative right-hand sides") {
  // max x + y, x + y = 3, x - y >= -1, x <= 1.5
  DenseProblem p;
  p.n = 2;
  p.c = {1, 2};
  p.is_free = {false, false};
  p.rows = {row({{0, 1}, {1, 1}}, LPSense::EQ, 3), row({{0, 1}, {1, -1}}, LPSense::GE, -1),
            row({{0, 1}}, LPSense::LE, 1.5)};
  const auto r = solve_dense(p);
  REQUIRE(r.status == LPStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1));
  CHECK(r.x[1] == doctest::Approx(2));
  CHECK(r.objective == doctest::Approx(5));
}

TEST_CASE("random bounded LPs match vertex enumeration") {
  Rng rng(31);
  int optimal = 0, infeasible = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const int n = 2 + int(rng.below(2)), m = 2 + int(rng.below(4));
    std::vector<std::vector<double>> A(m, std::vector<double>(n));
    std::vector<double> b(m), c(n);
    for (auto& r : A)
      for (auto& v : r) v = std::round((rng.uniform() * 4 - 1.5) * 4) / 4;
    for (auto& v : b) v = std::round((rng.uniform() * 6 - 1) * 4) / 4;
    for (auto& v : c) v = rng.uniform() * 2 - 0.5;
    // A box keeps every instance bounded.
    for (int j = 0; j < n; ++j) {
      std::vector<double> r(n, 0.0);
      r[j] = 1;
      A.push_back(r);
      b.push_back(10);
    }
    DenseProblem p;
    p.n = n;
    p.c = c;
    p.is_free.assign(n, false);
    for (std::size_t i = 0; i < A.size(); ++i) {
      DenseProblem::Row r;
      for (int j = 0; j < n; ++j)
        if (A[i][j] != 0) r.terms.emplace_back(j, A[i][j]);
      r.rhs = b[i];
      p.rows.push_back(r);
    }
    bool feasible = false;
    const double want = vertex_oracle(A, b, c, feasible);
    const auto got = solve_dense(p);
    if (!feasible) {
      CHECK(got.status == LPStatus::Infeasible);
      ++infeasible;
      continue;
    }
    REQUIRE(got.status == LPStatus::Optimal);
    CHECK(got.objective == doctest::Approx(want).epsilon(1e-7));
    ++optimal;
    // Strong duality.
    double dual = 0;
    for (std::size_t i = 0; i < b.size(); ++i) dual += got.duals[i] * b[i];
    CHECK(dual == doctest::Approx(got.objective).epsilon(1e-7));
  }
  CHECK(optimal > 100);
  CHECK(infeasible > 0);
}

TEST_CASE("re-optimization equals a fresh solve") {
  Rng rng(2);
  DenseProblem p;
  p.n = 4;
  p.c = {1, 1, 1, 1};
  p.is_free.assign(4, false);
  for (int i = 0; i < 6; ++i) {
    DenseProblem::Row r;
    for (int j = 0; j < 4; ++j) r.terms.emplace_back(j, rng.uniform() + 0.1);
    r.rhs = 1 + rng.uniform();
    p.rows.push_back(r);
  }
  DenseSimplex s(p);
  REQUIRE(s.solve().status == LPStatus::Optimal);
  for (int k = 0; k < 20; ++k) {
    std::vector<double> c(4);
    for (auto& v : c) v = rng.uniform() * 2 - 0.5;
    DenseProblem q = p;
    q.c = c;
    const auto fresh = solve_dense(q);
    const auto warm = s.reoptimize(c);
    REQUIRE(fresh.status == LPStatus::Optimal);
    REQUIRE(warm.status == LPStatus::Optimal);
    CHECK(warm.objective == doctest::Approx(fresh.objective));
  }
}
