#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nols/metric.hpp"
#include "nols/rng.hpp"

namespace nols {

// A local solution F and a reference solution F* over one metric. Facilities
// are re-indexed so that the two sets are disjoint even when they share
// locations: local i is facility i, optimal j is facility nl + j of `inst`.
struct AnalysisContext {
  MetricInstance inst;
  std::vector<int> local_ids, opt_ids;  // ids in the source instance
  int nl = 0, no = 0;

  int opt_facility(int j) const { return nl + j; }
  double local_opt(int i, int j) const { return inst.ff(i, nl + j); }
};

AnalysisContext make_context(const MetricInstance& base, const std::vector<int>& F, const std::vector<int>& Fstar);

// Deterministic neighborhood data plus the sampled tau. Indices are local
// (0..nl-1) and optimal (0..no-1) positions in the context.
struct MappingSample {
  std::vector<int> eta1, eta2;  // per optimal facility
  std::vector<double> rho;      // d(f*, eta1) / d(f*, eta2); 0/0 counts as 1
  std::vector<int> pi;          // per local facility: nearest optimal
  std::vector<int> tau;         // per optimal facility; empty until sampled
};

// Requires nl >= 2 and no >= 1.
MappingSample base_mapping(const AnalysisContext& ctx);

enum class SwapKind { Simple, Tree };
enum class TauChoice { Eta1, Eta2 };
enum class TauEvent { S1, S2, T1, T2 };

std::string to_string(SwapKind k);
std::string to_string(TauEvent e);

struct EventProbabilities {
  double s1 = 0, s2 = 0, t1 = 0, t2 = 0;
};

// Joint distribution over (kind, choice) when the kind is a fair coin.
EventProbabilities event_probabilities(double rho);

// Conditional draw for a fixed kind.
TauChoice sample_tau(double rho, SwapKind kind, Rng& rng);

// Joint draw: kind by fair coin, then the conditional choice.
TauEvent sample_event(double rho, Rng& rng);

// N(f*): {eta1} when rho <= 2/3, else {eta1, eta2}.
std::vector<int> neighbor_set(const MappingSample& m, int j);

// Local facilities that are neighbors of more than t_d + 1 optimal facilities.
std::vector<int> heavy_local_facilities(const MappingSample& m, int nl, int t_d);

// Non-heavy local facilities whose every tau-preimage has a heavy neighbor.
std::vector<int> local_candidates(const MappingSample& m, int nl, const std::vector<int>& heavy);

// {2c, 2c^2, ..., 2c^c} with c = ceil(1/eps).
std::vector<int> height_thresholds(double eps);

int degree_threshold(double eps);  // ceil(1/eps)

enum class BalanceMode { Strict, Desk };

std::string to_string(BalanceMode m);

struct InfeasibleError : std::runtime_error {
  InfeasibleError(const std::string& what, double required_r) : std::runtime_error(what), required_r(required_r) {}
  double required_r;
};

struct BalanceResult {
  std::vector<std::vector<int>> groups;  // set indices
  int x = 0;                             // largest set size
  int theta = 0;                         // conflict degree
  double required_r = 0;                 // strict-mode surplus requirement
  int surplus = 0;                       // greens minus reds
};

// 16 x^5 t^2 (t+1) / eps with t = max(theta, 1).
double strict_surplus_requirement(int x, int theta, double eps);

// Merge sets (with green/red counts) into groups with reds <= greens and no
// two conflicting sets together. Strict follows the constructive proof and
// refuses inputs below its surplus requirement; Desk absorbs positive sets
// into negative ones at random and fails only when no balancing exists.
BalanceResult balance(const std::vector<int>& green, const std::vector<int>& red,
                      const std::vector<std::vector<int>>& conflicts, double eps, BalanceMode mode, Rng& rng);

struct BalanceViolation {
  std::string property;  // "size" | "balance" | "conflict" | "partition"
  int group = -1;
  std::string detail;
};

// Properties (i)-(iii) plus exact partition of the input sets.
std::vector<BalanceViolation> check_balance(const std::vector<int>& green, const std::vector<int>& red,
                                            const std::vector<std::vector<int>>& conflicts,
                                            const BalanceResult& res);

enum class VertexKind { Local, LocalSurrogate, Opt, OptCopy, OptSurrogate, Dummy };

bool is_green(VertexKind k);
bool is_red(VertexKind k);

struct Vertex {
  VertexKind kind = VertexKind::Local;
  int facility = -1;   // local or optimal position; -1 for dummies
  int out = -1;        // successor vertex (self for loops); -1 when none
  bool out_deleted = false;
  int component = -1;  // after edge deletion
  // Tree instrumentation.
  int cycle_id = -1;
  int cycle_length = 0;  // real cycle length of the 1-tree
  int depth = 0;         // steps to reach the cycle
  int root_distance = 0; // steps to the cut root along the padded cycle
  bool on_cycle = false;
};

struct CycleCut {
  std::vector<int> cycle;  // real vertices in out-edge order
  int padded_length = 0;
  int root_position = 0;   // index into the padded cycle
  int root_vertex = -1;    // vertex id (dummy or real)
};

struct Swap {
  std::vector<int> P;  // local positions, ascending
  std::vector<int> Q;  // optimal positions, ascending
};

struct SwapGenConfig {
  double eps = 1.0 / 3.0;
  int t_d = 0;          // 0: ceil(1/eps)
  int t_h = 0;          // 0: drawn from height_thresholds(eps)
  BalanceMode balance = BalanceMode::Desk;
  int p_bound = 0;      // 0: unbounded
  void validate() const;
  int degree() const;
};

struct SwapSet {
  SwapKind kind = SwapKind::Simple;
  int t_d = 0, t_h = 0;
  std::vector<int> tau;
  std::vector<TauChoice> tau_choice;
  std::vector<int> heavy, candidates;
  std::vector<std::pair<int, int>> local_surrogates;  // (heavy local, chosen candidate)
  std::vector<int> heavy_opts;
  std::vector<std::pair<int, int>> opt_surrogates;    // (optimal copy vertex, local whose copy it is)
  std::vector<Vertex> vertices;
  std::vector<CycleCut> cuts;
  std::vector<int> deleted;                           // vertices whose out-edge was cut
  std::vector<std::vector<int>> components;           // real vertex ids
  std::vector<std::vector<int>> conflicts;            // adjacency over components
  std::vector<std::vector<int>> groups;               // component ids
  std::vector<int> group_of_component;
  std::vector<Swap> swaps;
  std::vector<int> swap_of_group;
  std::vector<int> move_of_opt;                       // swap opening the original copy
  BalanceResult balance;

  // Swaps whose P contains local i.
  std::vector<int> swaps_closing(int local) const;
  int component_of_local(int local) const;  // original copy; -1 when heavy
  int component_of_opt(int j) const;        // original copy
  int vertex_of_local(int local) const;     // original copy; -1 when heavy
  int vertex_of_opt(int j) const;
};

SwapSet generate_simple(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng);
SwapSet generate_tree(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng);

// Kind by fair coin, then the matching generator.
SwapSet generate_swaps(const AnalysisContext& ctx, const MappingSample& base, const SwapGenConfig& cfg, Rng& rng);

struct SwapSetIssue {
  std::string what;
};

// Structural checks: swap sizes, |Q| <= |P|, copy counts, one swap per
// original optimal copy, simple components with at most one local, tree
// out-degree one, component height below t_h, balancing properties.
std::vector<SwapSetIssue> validate_swap_set(const SwapSet& s, int nl, int no, int p_bound = 0);

}  // namespace nols
