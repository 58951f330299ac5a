#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "nols/instance_gen.hpp"
#include "nols/local_search.hpp"

using namespace nols;

namespace {

// Bellman-Ford style relaxation on the bi-clique gadget built from scratch:
// facilities 0..k-1 optimal, k..2k+r-1 local, then one client per pair.
std::vector<std::vector<double>> gadget_oracle(int k, int r, double d) {
  const int L = k + r, nf = k + L, n = nf + k * L;
  std::vector<std::vector<double>> w(n, std::vector<double>(n, INFINITY));
  for (int i = 0; i < n; ++i) w[i][i] = 0;
  for (int o = 0; o < k; ++o)
    for (int l = 0; l < L; ++l) {
      const int c = nf + o * L + l;
      w[c][o] = w[o][c] = 1;
      w[c][k + l] = w[k + l][c] = d;
    }
  for (bool changed = true; changed;) {
    changed = false;
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b)
        for (int c = 0; c < n; ++c)
          if (w[a][b] + w[b][c] < w[a][c] - 1e-12) {
            w[a][c] = w[a][b] + w[b][c];
            changed = true;
          }
  }
  return w;
}

}  // namespace

TEST_CASE("bi-clique k=2 distances") {
  const auto g = biclique(2, 0, 1.0);
  const auto& m = g.instance;
  CHECK(g.opt == std::vector<int>{0, 1});
  CHECK(g.local == std::vector<int>{2, 3});
  CHECK(m.num_clients() == 4);
  CHECK(m.ff(0, 2) == 2.0);  // opt to local: 1 + d
  CHECK(m.ff(0, 1) == 4.0);  // opt to opt: 2 + 2d
  CHECK(m.cf(0, 0) == 1.0);
}

TEST_CASE("bi-clique matches the gadget oracle") {
  for (auto [k, r, d] : std::vector<std::tuple<int, int, double>>{{2, 0, 1.0}, {3, 1, 2.5}, {4, 2, 1.7}}) {
    const auto g = biclique(k, r, d);
    const auto w = gadget_oracle(k, r, d);
    const int n = int(g.instance.num_locations());
    REQUIRE(n == int(w.size()));
    for (int a = 0; a < n; ++a)
      for (int b = 0; b < n; ++b) CHECK(g.instance.loc_dist(a, b) == doctest::Approx(w[a][b]));
    for (int o : g.opt)
      for (int l : g.local) CHECK(g.instance.ff(o, l) == doctest::Approx(1 + d));
    CHECK(kmed_cost(g.instance, g.opt) == doctest::Approx(k * (k + r)));
    CHECK(kmed_cost(g.instance, g.local) == doctest::Approx(d * k * (k + r)));
  }
}

TEST_CASE("every gap instance with k <= 6 is metric") {
  for (int k = 2; k <= 6; ++k)
    for (int r = 0; r <= 2; ++r)
      for (double d : {0.5, 1.9, 2.6, 3.4}) {
        CHECK(verify_metric(biclique(k, r, d).instance, VerifyMode::Exhaustive).ok());
        if (k % 2 == 0 && k >= 4) CHECK(verify_metric(double_biclique(k, r, d).instance, VerifyMode::Exhaustive).ok());
      }
}

TEST_CASE("double bi-clique structure") {
  const double d = 2.2;
  const auto g = double_biclique(4, 0, d);
  const auto& m = g.instance;
  CHECK(m.num_clients() == 8);
  for (std::size_t c = 0; c < m.num_clients(); ++c) {
    int near_opt = 0, near_local = 0;
    for (int o : g.opt) near_opt += m.cf(int(c), o) == 1.0;
    for (int l : g.local) near_local += std::fabs(m.cf(int(c), l) - d) < 1e-12;
    CHECK(near_opt == 1);
    CHECK(near_local == 2);  // one local on each side
  }
  CHECK(kmed_cost(m, g.local) == doctest::Approx(8 * d));
  CHECK(kmed_cost(m, g.opt) == doctest::Approx(8));
  CHECK_THROWS_AS(double_biclique(5, 0, 1), std::invalid_argument);
  CHECK_THROWS_AS(biclique(1, 0, 1), std::invalid_argument);
}

TEST_CASE("closed form and predicted gaps") {
  CHECK(closed_form_gap(3, 0.2) == doctest::Approx(2.6));
  CHECK(closed_form_gap(1.5, 0.2) == doctest::Approx(2.0));
  CHECK(closed_form_gap(3, 0.6) == doctest::Approx(3.0));
  CHECK(closed_form_gap(1.8, 0.6) == doctest::Approx(2.0));
  CHECK(closed_form_gap(5, 0.7) == doctest::Approx(3.8));

  auto g = predicted_gap(3, 0.2, 6, 1, 2);
  CHECK(g.case_label == "beta<=1/2,alpha>2/I");
  CHECK(g.family == GapFamily::Biclique);
  CHECK(g.eps == doctest::Approx((2 * 2 * 1 + 2 * 4) / (2.0 * 7)));
  CHECK(g.d == doctest::Approx(2.6 - g.eps));

  g = predicted_gap(1.5, 0.2, 6, 0, 1);
  CHECK(g.case_label == "alpha<=2/I");
  CHECK(g.d == doctest::Approx(2 - (2 + 0.8 - 0.6) / 6));

  g = predicted_gap(1.9, 0.9, 8, 0, 1);
  CHECK(g.case_label == "alpha<=2/II");
  CHECK(g.family == GapFamily::DoubleBiclique);
  CHECK(g.d == 2.0);

  g = predicted_gap(2.1, 0.2, 20, 1, 1);
  CHECK(g.case_label == "beta<=1/2,alpha>2/II");
  CHECK(g.d == 2.1);
  CHECK(g.eps == doctest::Approx((1.1 - 0.4 + 2) / 20));

  g = predicted_gap(3, 0.6, 8, 0, 1);
  CHECK(g.family == GapFamily::DoubleBiclique);
  CHECK(g.closed_form == doctest::Approx(3.0));

  CHECK_THROWS(predicted_gap(0.5, 0.2, 6, 1, 1));
  CHECK_THROWS(predicted_gap(3, 1.2, 6, 1, 1));
}

TEST_CASE("random Euclidean instances") {
  const auto a = random_euclidean(10, 5, 3, 42), b = random_euclidean(10, 5, 3, 42), c = random_euclidean(10, 5, 3, 43);
  CHECK(to_matrix_text(a) == to_matrix_text(b));
  CHECK(to_matrix_text(a) != to_matrix_text(c));
  CHECK(a.num_clients() == 10);
  CHECK(a.num_facilities() == 5);
  for (std::size_t i = 0; i < a.num_locations(); ++i)
    for (std::size_t j = 0; j < a.num_locations(); ++j) CHECK(a.loc_dist(int(i), int(j)) <= std::sqrt(3.0) + 1e-12);
  CHECK(verify_metric(a, VerifyMode::Exhaustive).ok());
  CHECK_THROWS(random_euclidean(0, 5, 2, 1));
}
