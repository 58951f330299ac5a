#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "nols/metric.hpp"

namespace nols {

enum class GapFamily { Biclique, DoubleBiclique };

std::string to_string(GapFamily f);

// Lower-bound instance with designated local and optimal facility sets.
// Facility ids: optimal 0..k-1, local k..2k+r-1.
struct GapInstance {
  MetricInstance instance;
  GapFamily family = GapFamily::Biclique;
  int k = 0, r = 0;
  double d = 0;
  std::vector<int> local, opt;
};

// One client per (optimal, local) pair: distance 1 to its optimal facility,
// d to its local facility; everything else by shortest paths.
GapInstance biclique(int k, int r, double d);

// Two bi-cliques with k/2 optimal facilities each; local facilities split
// ceil/floor. Client t of a side (t = o * L_side + l) also reaches local
// (t mod L_other) of the other side at distance d.
GapInstance double_biclique(int k, int r, double d);

// min{max(3-2b, 1+4b), max(2, a)}
double closed_form_gap(double alpha, double beta);

struct GapPrediction {
  double closed_form = 0;  // asymptotic ratio
  std::string case_label;
  GapFamily family = GapFamily::Biclique;
  double d = 0;            // distance to build with at this (k, r, p)
  double eps = 0;          // slack subtracted from the family's nominal value
  bool sufficient = true;  // whether the case's own finite-k condition holds
};

// Case selection and concrete d for a finite instance certified against
// swaps of size <= p.
GapPrediction predicted_gap(double alpha, double beta, int k, int r, int p);

// Uniform points in [0,1]^dim; clients are locations 0..nc-1, facilities nc..nc+nf-1.
MetricInstance random_euclidean(int n_clients, int n_facilities, int dim, std::uint64_t seed);

}  // namespace nols
