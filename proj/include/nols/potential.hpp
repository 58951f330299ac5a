#pragma once

#include <limits>
#include <memory>
#include <vector>

#include "nols/metric.hpp"

namespace nols {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// Compensated summation.
struct KahanSum {
  double sum = 0.0, comp = 0.0;
  void add(double v) {
    const double y = v - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
  double value() const { return sum; }
};

struct PotentialParams {
  int q = 2;
  double alpha2 = 3.0;
  double beta2 = 0.2;
  double alpha3 = 3.0;
  double beta3 = 0.0;

  static PotentialParams phi2(double alpha, double beta) { return {2, alpha, beta, alpha, 0.0}; }
  // q=3 setting with alpha3 left to the caller (defaults to alpha2).
  static PotentialParams phi3(double a2, double b2, double a3, double b3) { return {3, a2, b2, a3, b3}; }

  void validate() const;  // throws std::invalid_argument
};

enum class Objective { Potential, Cost };

// d1 + beta2*min(d2, alpha2*d1) [+ beta3*min(d3, alpha3*d1) when q=3].
// Missing neighbors are passed as kInf.
double client_potential(double d1, double d2, const PotentialParams& params, double d3 = kInf);

// Per-client value of the chosen objective from its sorted nearest distances.
inline double client_value(const double* d, Objective obj, const PotentialParams& params) {
  if (obj == Objective::Cost) return d[0];
  return client_potential(d[0], d[1], params, params.q >= 3 ? d[2] : kInf);
}

// Every client's facility list sorted by (distance, index) with tolerance
// ties resolved by index. Built once per instance and shared by solutions.
class FacilityOrder {
 public:
  explicit FacilityOrder(const MetricInstance& inst);
  const MetricInstance& instance() const { return inst_; }
  const int* order(int client) const { return &order_[static_cast<std::size_t>(client) * nf_]; }
  std::size_t num_facilities() const { return nf_; }

 private:
  MetricInstance inst_;
  std::size_t nf_;
  std::vector<int> order_;
};

struct SwapDelta {
  std::vector<double> per_client;
  double total = 0.0;
};

// Open set plus, per client, the `depth` nearest open facilities (depth = q+1).
class Solution {
 public:
  static constexpr int kMaxDepth = 4;

  Solution(std::shared_ptr<const FacilityOrder> order, std::vector<int> open, int depth = 3);
  Solution(const MetricInstance& inst, std::vector<int> open, int depth = 3);

  const MetricInstance& instance() const { return order_->instance(); }
  const std::vector<int>& open() const { return open_; }  // ascending
  std::size_t size() const { return open_.size(); }
  bool is_open(int f) const { return is_open_[static_cast<std::size_t>(f)] != 0; }
  int depth() const { return depth_; }

  // j-th nearest open facility (0-based) and its distance; -1/kInf if absent.
  int nearest(int client, int j) const { return near_f_[slot(client, j)]; }
  double nearest_dist(int client, int j) const { return near_d_[slot(client, j)]; }

  // F <- (F \ P) u Q and refresh caches.
  void apply(const std::vector<int>& P, const std::vector<int>& Q);

  // Objective change of the swap without mutating; per-client values kept
  // only when `per_client` is non-null.
  double delta_total(const std::vector<int>& P, const std::vector<int>& Q, Objective obj,
                     const PotentialParams& params, std::vector<double>* per_client = nullptr) const;

  double value(Objective obj, const PotentialParams& params) const;

  // Cache equals a from-scratch rebuild.
  bool cache_consistent() const;

 private:
  std::size_t slot(int c, int j) const { return static_cast<std::size_t>(c) * kMaxDepth + static_cast<std::size_t>(j); }
  void rebuild(int client);

  std::shared_ptr<const FacilityOrder> order_;
  std::vector<int> open_;
  std::vector<char> is_open_;
  int depth_;
  std::vector<int> near_f_;
  std::vector<double> near_d_;
};

double kmed_cost(const MetricInstance& inst, const std::vector<int>& F);
double kmed_cost(const Solution& sol);

// Sum of client_potential; |F| = 1 treats d2 as +inf.
double potential(const MetricInstance& inst, const std::vector<int>& F, const PotentialParams& params);
double potential(const Solution& sol, const PotentialParams& params);

// Per-client and total change of the potential under F -> (F \ P) u Q.
SwapDelta delta(const Solution& sol, const std::vector<int>& P, const std::vector<int>& Q,
                const PotentialParams& params);

// Reference evaluation straight from the metric (no caches).
double objective_from_scratch(const MetricInstance& inst, const std::vector<int>& F, Objective obj,
                              const PotentialParams& params);

// (F \ P) u Q, sorted and deduplicated.
std::vector<int> swapped(const std::vector<int>& F, const std::vector<int>& P, const std::vector<int>& Q);

}  // namespace nols
