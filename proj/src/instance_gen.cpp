#include "nols/instance_gen.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "nols/rng.hpp"

namespace nols {

std::string to_string(GapFamily f) { return f == GapFamily::Biclique ? "biclique" : "double-biclique"; }

namespace {

struct Gadget {
  std::size_t n = 0;
  std::vector<double> w;
  void init(std::size_t locations) {
    n = locations;
    w.assign(n * n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i) w[i * n + i] = 0.0;
  }
  void edge(int a, int b, double len) {
    const auto i = static_cast<std::size_t>(a), j = static_cast<std::size_t>(b);
    w[i * n + j] = std::min(w[i * n + j], len);
    w[j * n + i] = std::min(w[j * n + i], len);
  }
};

GapInstance finish(Gadget& g, int n_fac, int k, int r, double d, GapFamily fam) {
  floyd_warshall(g.w, g.n);
  std::vector<int> fac(static_cast<std::size_t>(n_fac)), cli;
  for (int i = 0; i < n_fac; ++i) fac[static_cast<std::size_t>(i)] = i;
  for (std::size_t v = static_cast<std::size_t>(n_fac); v < g.n; ++v) cli.push_back(static_cast<int>(v));
  GapInstance out;
  out.instance = MetricInstance::from_matrix(std::move(g.w), g.n, std::move(cli), std::move(fac),
                                             Representation::ShortestPathGraph);
  out.family = fam;
  out.k = k;
  out.r = r;
  out.d = d;
  for (int i = 0; i < k; ++i) out.opt.push_back(i);
  for (int i = 0; i < k + r; ++i) out.local.push_back(k + i);
  return out;
}

}  // namespace

GapInstance biclique(int k, int r, double d) {
  if (k < 2 || r < 0 || !(d > 0)) throw std::invalid_argument("biclique needs k >= 2, r >= 0, d > 0");
  const int L = k + r;
  const int nf = k + L;
  Gadget g;
  g.init(static_cast<std::size_t>(nf + k * L));
  for (int o = 0; o < k; ++o)
    for (int l = 0; l < L; ++l) {
      const int c = nf + o * L + l;
      g.edge(c, o, 1.0);
      g.edge(c, k + l, d);
    }
  return finish(g, nf, k, r, d, GapFamily::Biclique);
}

GapInstance double_biclique(int k, int r, double d) {
  if (k < 4 || k % 2 != 0 || r < 0 || !(d > 0))
    throw std::invalid_argument("double_biclique needs even k >= 4, r >= 0, d > 0");
  const int half = k / 2;
  const int L = k + r;
  const int Ls[2] = {(L + 1) / 2, L / 2};
  const int lbase[2] = {k, k + Ls[0]};
  const int nf = k + L;
  const int nclients = half * Ls[0] + half * Ls[1];
  Gadget g;
  g.init(static_cast<std::size_t>(nf + nclients));
  int c = nf;
  for (int side = 0; side < 2; ++side) {
    const int other = 1 - side;
    for (int o = 0; o < half; ++o)
      for (int l = 0; l < Ls[side]; ++l, ++c) {
        // Round-robin over the other side; equals l when both sides match.
        const int t = o * Ls[side] + l;
        g.edge(c, side * half + o, 1.0);
        g.edge(c, lbase[side] + l, d);
        g.edge(c, lbase[other] + t % Ls[other], d);
      }
  }
  return finish(g, nf, k, r, d, GapFamily::DoubleBiclique);
}

double closed_form_gap(double alpha, double beta) {
  return std::min(std::max(3.0 - 2.0 * beta, 1.0 + 4.0 * beta), std::max(2.0, alpha));
}

GapPrediction predicted_gap(double alpha, double beta, int k, int r, int p) {
  if (!(alpha >= 1.0) || !(beta >= 0.0 && beta <= 1.0)) throw std::invalid_argument("need alpha >= 1, 0 <= beta <= 1");
  if (k < 1 || r < 0 || p < 1) throw std::invalid_argument("need k >= 1, r >= 0, p >= 1");
  const double a = alpha, b = beta, K = k, R = r, P = p;
  GapPrediction g;
  g.closed_form = closed_form_gap(a, b);
  if (a <= 2.0) {
    if (b == 0.0 || a <= 4.0 / 3.0 + 1.0 / (3.0 * b)) {
      g.case_label = "alpha<=2/I";
      g.family = GapFamily::Biclique;
      g.eps = std::max(0.0, (P * P * (2 + 4 * b - 2 * a * b) + R * P * (1 + a * b)) / (P * K));
      g.d = 2.0 - g.eps;
    } else {
      g.case_label = "alpha<=2/II";
      g.family = GapFamily::DoubleBiclique;
      g.eps = 0.0;
      g.d = 2.0;
      g.sufficient = R <= K / (24 * (1 + 2 * b - a * b)) && P <= K / (48 * (2 * a * b - 2 * b));
    }
  } else if (b <= 0.5) {
    g.family = GapFamily::Biclique;
    const double eps1 = (2 * P * R + 2 * P * P) / (P * (K + R));
    if (3 - 2 * b - eps1 <= a) {
      g.case_label = "beta<=1/2,alpha>2/I";
      g.eps = eps1;
      g.d = 3 - 2 * b - eps1;
    } else {
      g.case_label = "beta<=1/2,alpha>2/II";
      g.eps = (P * R * (a - 1 - 2 * b) + 2 * P * P) / (P * K);
      g.d = a;
      g.sufficient = a <= 3 - 2 * b - g.eps;
    }
  } else {
    g.family = GapFamily::DoubleBiclique;
    // Clients per optimal facility on the larger side; (k+r)/2 when k+r is even.
    const double side = std::ceil((K + R) / 2.0);
    const double eps1 = 4 * b * (1 - (K / 2 - P) / side);
    if (1 + 4 * b - eps1 <= a) {
      g.case_label = "beta>1/2,alpha>2/I";
      g.eps = eps1;
      g.d = 1 + 4 * b - eps1;
    } else {
      g.case_label = "beta>1/2,alpha>2/II";
      g.eps = (P * R * (a - 1) + 8 * P * P * b) / (P * K);
      g.d = a;
      g.sufficient = (a - 1) * side <= 2 * b * (K - 2 * P);
    }
  }
  return g;
}

MetricInstance random_euclidean(int n_clients, int n_facilities, int dim, std::uint64_t seed) {
  if (n_clients < 1 || n_facilities < 1 || dim < 1) throw std::invalid_argument("random_euclidean needs positive sizes");
  Rng rng(seed);
  const int n = n_clients + n_facilities;
  std::vector<std::vector<double>> pts(static_cast<std::size_t>(n), std::vector<double>(static_cast<std::size_t>(dim)));
  for (auto& p : pts)
    for (auto& x : p) x = rng.uniform();
  std::vector<int> cl, fa;
  for (int i = 0; i < n_clients; ++i) cl.push_back(i);
  for (int i = 0; i < n_facilities; ++i) fa.push_back(n_clients + i);
  return MetricInstance::from_points(std::move(pts), std::move(cl), std::move(fa));
}

}  // namespace nols
