#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "nols/potential.hpp"

namespace nols {

enum class Pivot { FirstImprovement, BestImprovement };

struct SearchConfig {
  int k = 1;
  int p = 1;
  Objective objective = Objective::Potential;
  PotentialParams params;
  double delta = 1e-4;  // relative threshold before the n^-p scaling
  Pivot pivot = Pivot::FirstImprovement;
  std::uint64_t seed = 1;
  long max_iterations = 100000;
  bool shuffle = true;     // randomize enumeration order each iteration
  bool prune = false;      // restrict Q to facilities near clients of P
  bool post_check = false; // run verify_local_optimality on the result

  void validate() const;
};

struct IterationRecord {
  std::vector<int> P, Q;
  double phi_before = 0, phi_after = 0;
  double cost_before = 0, cost_after = 0;
  double seconds = 0;
};

struct LocalOptReport {
  double min_delta = kInf;
  std::vector<int> argmin_P, argmin_Q;
  std::uint64_t swaps_checked = 0;
  bool certified(double tol = 1e-9) const { return min_delta >= -tol; }
};

struct RunTrace {
  std::vector<IterationRecord> iterations;
  std::string termination;  // "local-optimum" | "iteration-cap"
  double threshold = 0;     // effective delta'
  double initial_value = 0, final_value = 0;
  std::optional<LocalOptReport> post;
};

struct RunResult {
  std::vector<int> open;
  double cost = 0;
  double potential = 0;
  RunTrace trace;
};

// delta * n^-p with n the number of locations.
double effective_threshold(double delta, std::size_t n, int p);

// Greedy farthest-point seeding: a seeded first facility, then repeatedly the
// facility maximizing distance to the chosen set (ties by index).
std::vector<int> farthest_point_seed(const MetricInstance& inst, int k, std::uint64_t seed);

RunResult run(const MetricInstance& inst, const SearchConfig& config,
              const std::optional<std::vector<int>>& initial = std::nullopt);

// Callback returns false to stop. P ranges over subsets of `open`, Q over
// equally sized subsets of `closed`, sizes 1..p, in lexicographic position
// order over the given sequences.
using SwapVisitor = std::function<bool(const std::vector<int>& P, const std::vector<int>& Q)>;
void enumerate_swaps(const std::vector<int>& open, const std::vector<int>& closed, int p, const SwapVisitor& visit);

// sum_{s<=p} C(nf,s) * C(nc,s)
std::uint64_t swap_count(std::size_t n_open, std::size_t n_closed, int p);

std::uint64_t binomial(std::uint64_t n, std::uint64_t k);  // saturates at UINT64_MAX

struct SizeError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct BruteForceResult {
  std::vector<int> open;
  double cost = 0;
  std::uint64_t subsets = 0;
};

// Exact k-median optimum; first subset in lexicographic order among ties.
BruteForceResult brute_force_opt(const MetricInstance& inst, int k, std::uint64_t guard = 10000000ULL);

LocalOptReport verify_local_optimality(const MetricInstance& inst, const std::vector<int>& F, int p,
                                       Objective objective, const PotentialParams& params);

}  // namespace nols
