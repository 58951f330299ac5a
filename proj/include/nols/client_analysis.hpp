#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "nols/potential.hpp"
#include "nols/swap_analysis.hpp"

namespace nols {

// Positions are context indices: locals 0..nl-1, optimal 0..no-1.
struct ClientProfile {
  int client = -1;
  double d1 = 0, d2 = 0, dstar = 0;
  int f1 = -1, f2 = -1, fstar = -1;
  int eta1 = -1, eta2 = -1;
  double rho = 1;
  int gstar = -1;  // pi(f1)
  int g = -1;      // nearest local to gstar other than f1, f2; -1 when none
  bool far = false;
};

ClientProfile make_profile(const AnalysisContext& ctx, const MappingSample& base, int client,
                           const PotentialParams& params);

enum class Letter { A, B, C, D, E };

struct ClientType {
  bool far = false;
  Letter letter = Letter::E;
  bool operator==(const ClientType&) const = default;
};

std::string to_string(Letter l);
std::string to_string(const ClientType& t);  // e.g. "far-A"

// Far-ness is recomputed from d1, d2 and alpha2.
ClientType classify(const ClientProfile& p, const PotentialParams& params);

enum class SubEvent { None, T11, T12, T21, T22 };

std::string to_string(SubEvent s);

struct EventTag {
  bool amenable = true;
  TauEvent event = TauEvent::S1;
  SubEvent refined = SubEvent::None;  // close A/B tree samples only
  std::vector<std::string> causes;    // "i", "ii", "iii", "i'", "ii'", "iii'"
  std::string label() const;          // e.g. "T21"
};

EventTag detect_event(const SwapSet& s, const ClientProfile& p, const ClientType& type, const MappingSample& base);

// Per-client sum over swaps of the potential change of each swap applied to F.
std::vector<double> client_delta_sums(const AnalysisContext& ctx, const SwapSet& s, const PotentialParams& params);
double client_delta_sum(const AnalysisContext& ctx, const SwapSet& s, int client, const PotentialParams& params);

struct LinearBound {
  double cstar = 0, c1 = 0, c2 = 0;  // value = cstar*d* + c1*d1 + c2*d2
  std::string label;
  double eval(double dstar, double d1, double d2) const { return cstar * dstar + c1 * d1 + c2 * d2; }
};

// Candidate per-event bounds for a (type, event) pair; the binding bound is
// their maximum. Empty when no bound applies.
std::vector<LinearBound> event_bounds(const ClientType& type, const EventTag& tag, double rho,
                                      const PotentialParams& params);

// Aggregate (d*, d1) coefficients per type.
std::pair<double, double> aggregate_coefficients(const ClientType& type);

// Amenability implications; returns the failing items.
std::vector<std::string> check_implications(const SwapSet& s, const ClientProfile& p, const ClientType& type);

struct BoundsConfig {
  SwapGenConfig gen;
  PotentialParams params;
  int samples = 200;
  std::uint64_t seed = 1;
  double gamma = 40.0;    // crude bound
  double slack_k = 5.0;   // aggregate slack K * eps * (d* + d1)
  double tol = 1e-6;
};

struct BoundWitness {
  int client = -1, sample = -1;
  std::string type, event, bound_label;
  std::vector<std::string> causes;
  double realized = 0, bound = 0, dstar = 0, d1 = 0, d2 = 0, rho = 0;
  std::string kind;
};

struct AggregateRow {
  int client = -1;
  std::string type;
  double mean = 0, bound = 0, slack = 0;
  bool within = true;
};

struct BoundsReport {
  int samples = 0, infeasible = 0;
  long evaluations = 0, amenable = 0;
  std::map<std::string, long> type_counts;   // per client (not per sample)
  std::map<std::string, long> event_counts;  // per (type, event) over evaluations
  std::map<std::string, long> defiant_causes;
  std::map<std::string, double> worst_margin;  // per type, min of bound - realized
  std::vector<BoundWitness> violations;        // boxed bound
  std::vector<BoundWitness> crude_violations;
  std::vector<BoundWitness> implication_failures;
  std::vector<AggregateRow> aggregate;
  long aggregate_exceeded = 0;
  double defiant_rate() const { return evaluations ? 1.0 - static_cast<double>(amenable) / evaluations : 0.0; }
  bool ok() const { return violations.empty() && crude_violations.empty() && implication_failures.empty(); }
};

// Draws cfg.samples swap sets (kind by fair coin) and checks every client.
BoundsReport verify_amenable_bounds(const AnalysisContext& ctx, const BoundsConfig& cfg);

struct InequalityViolation {
  std::string name;
  int client = -1, fstar = -1, f1 = -1;
  double lhs = 0, rhs = 0;
};

struct InequalityReport {
  long profiles = 0, checks = 0;
  std::vector<InequalityViolation> violations;
};

// Distance inequalities on one profile, each guarded by its side condition.
void inequality_suite(const AnalysisContext& ctx, const MappingSample& base, const ClientProfile& p,
                      InequalityReport& report);

struct SurvivalCell {
  int t_h = 0, s = 0;
  std::string regime;  // "short-cycle" (exact) | "long-cycle" (bracket)
  long trials = 0, survived = 0;
  double lower = 0, upper = 0;  // mean per-trial bounds
  double frequency() const { return trials ? static_cast<double>(survived) / trials : 0.0; }
  bool within(double z = 3.0) const;
};

struct SurvivalReport {
  std::vector<SurvivalCell> cells;
  long long_paths_survived = 0;      // paths of length >= t_h with no cut
  long short_cycle_edges_cut = 0;    // cycle edges of short cycles that were cut
};

// Paths of length 1..max_s following out-edges from every real vertex.
SurvivalReport survival_statistics(const std::vector<SwapSet>& tree_samples, int max_s);

}  // namespace nols
