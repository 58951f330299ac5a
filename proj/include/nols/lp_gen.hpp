#pragma once

#include <array>
#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "nols/client_analysis.hpp"
#include "nols/potential.hpp"
#include "nols/simplex.hpp"

namespace nols {

struct LPTerm {
  int var = -1;
  double coef = 0;
  bool operator==(const LPTerm&) const = default;
};

struct LPVariable {
  std::string name;
  bool free = false;
  int block = -1;  // ratio cell; -1 for global
  bool operator==(const LPVariable&) const = default;
};

struct LPConstraint {
  std::string name;
  std::string family;      // normalization | closeness | ordering | triangle | upper-bound | swap-sum | total-change
  std::string derivation;  // how the row was obtained
  std::vector<LPTerm> terms;
  LPSense sense = LPSense::LE;
  double rhs = 0;
  int block = -1;
  bool operator==(const LPConstraint&) const = default;
};

// Maximization model. Variables are nonnegative unless free.
struct LPModel {
  std::string name;
  std::vector<LPVariable> vars;
  std::vector<LPConstraint> constraints;
  std::vector<LPTerm> objective;

  int add_var(const std::string& name, bool free = false, int block = -1);
  int find_var(const std::string& name) const;  // -1 when absent
  std::size_t nonzeros() const;
  std::map<std::string, int> family_counts() const;
  bool operator==(const LPModel&) const = default;
};

// Linear form over (d*, d1, d2, d3) of one client type.
struct Lin {
  double x = 0, y1 = 0, y2 = 0, y3 = 0;
};

// One catalogued upper bound on a per-event potential change.
struct BoundSpec {
  enum class Opening { Single, Pair, Balanced };
  std::string label;
  Lin base;                          // Phi_2 bound
  Opening opening = Opening::Single;
  Lin first, second;                 // opening term first + beta*second (Pair)
  std::vector<std::pair<Lin, double>> primaries;  // nearest candidate per swap term, with weight
};

struct ClassSpec {
  std::string name;  // e.g. "farA.0", "closeC.f"
  bool far = false;
  Letter letter = Letter::E;
  std::array<std::vector<BoundSpec>, 4> events;  // indexed by TauEvent
};

// Client classes with their bounds at ratio rho. `low` and `high` select the
// regimes rho <= 2/3 and rho > 2/3 for the classes that split on it; the
// structure returned depends only on (low, high).
std::vector<ClassSpec> class_catalog(double rho, const PotentialParams& params, bool low, bool high);

struct RatioCell {
  double lo = 0, hi = 0;
  bool low_regime() const { return lo <= 2.0 / 3.0; }
  bool high_regime() const { return hi > 2.0 / 3.0; }
  bool has_s2() const { return lo > 0.75; }
  bool has_t2() const { return lo > 2.0 / 3.0; }
};

// grid >= 2: cells [i/(grid-1), (i+1)/(grid-1)) clipped at 1, i = 0..grid-1.
// grid == 1: the single point {1}.
std::vector<RatioCell> ratio_cells(int grid);

struct LpGenConfig {
  int q = 2;
  int grid = 101;
  PotentialParams params;
  bool simple = true;     // simple-swap constraint family
  bool tree = true;       // tree-swap constraint family
  bool triangle = true;   // triangle inequalities
  bool branches = true;   // min-branch variants of the opening term
  std::vector<std::string> classes;  // class-name prefixes to keep; empty keeps all
  void validate() const;  // throws std::invalid_argument
};

struct LpCensus {
  int cells = 0;
  int class_cells = 0;  // (class, cell) pairs
  int variables = 0;
  int constraints = 0;
  std::map<std::string, int> families;
};

// Counts predicted from the catalog without building the model.
LpCensus lp_census(const LpGenConfig& cfg);

LPModel build_lp(const LpGenConfig& cfg);

// CPLEX-style LP text. Provenance rides along in "\@" comment lines.
std::string emit_lp(const LPModel& m);
LPModel parse_lp(const std::string& text);  // throws std::runtime_error

struct SolveOptions {
  std::string method = "auto";  // auto | dense | decompose
  double dense_limit = 4e6;     // rows * columns above which auto decomposes
  double tol = 1e-9;
  int max_rounds = 2000;
  double dual_box = 1e4;        // bound on linking duals
};

struct LPSolution {
  LPStatus status = LPStatus::Infeasible;
  double objective = 0;
  std::vector<double> values;  // per model variable
  std::vector<double> ray;     // unbounded certificate
  std::string method;
  long iterations = 0;         // pivots (dense) or rounds (decompose)
  double pricing_gap = 0;      // largest positive block value at exit
  std::string message;
};

LPSolution solve_lp(const LPModel& m, const SolveOptions& opt = {});

}  // namespace nols
