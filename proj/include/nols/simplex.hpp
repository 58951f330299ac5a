#pragma once

#include <string>
#include <utility>
#include <vector>

namespace nols {

enum class LPSense { LE, GE, EQ };
enum class LPStatus { Optimal, Infeasible, Unbounded, IterationLimit, Unsupported };

std::string to_string(LPSense s);
std::string to_string(LPStatus s);

// maximize c.x subject to rows; x_j >= 0 unless is_free[j].
struct DenseProblem {
  struct Row {
    std::vector<std::pair<int, double>> terms;
    LPSense sense = LPSense::LE;
    double rhs = 0;
  };
  int n = 0;
  std::vector<double> c;
  std::vector<bool> is_free;
  std::vector<Row> rows;
};

struct DenseResult {
  LPStatus status = LPStatus::Infeasible;
  double objective = 0;
  std::vector<double> x;      // per original variable
  std::vector<double> duals;  // per row, sign convention of a maximization
  std::vector<double> ray;    // improving direction when unbounded
  long pivots = 0;
};

// Two-phase tableau simplex. Dantzig pricing, switching to Bland's rule after
// a run of degenerate pivots. Keeps its tableau so that a new objective over
// the same rows can be re-optimized from the last basis.
class DenseSimplex {
 public:
  explicit DenseSimplex(const DenseProblem& p, double tol = 1e-9);

  DenseResult solve();
  DenseResult reoptimize(const std::vector<double>& c);

  int rows() const { return m_; }
  int columns() const { return ncols_; }

 private:
  void pivot(int r, int q);
  void set_objective(const std::vector<double>& col_cost);
  LPStatus run(bool phase_one);
  DenseResult extract(LPStatus st);
  double& at(int i, int j) { return t_[static_cast<std::size_t>(i) * width_ + j]; }
  double at(int i, int j) const { return t_[static_cast<std::size_t>(i) * width_ + j]; }

  DenseProblem prob_;
  double tol_;
  int m_ = 0, ncols_ = 0, width_ = 0;
  int first_slack_ = 0, first_art_ = 0;
  std::vector<int> pos_col_, neg_col_;  // per original var; neg_col_ = -1 when not free
  std::vector<int> row_aux_;            // slack/surplus column per row, -1 for equalities
  std::vector<int> row_art_;            // artificial column per row, -1 when none
  std::vector<double> row_sign_;        // -1 when the row was negated to make rhs >= 0
  std::vector<double> t_;               // m_ x width_, last column = rhs
  std::vector<double> z_;               // reduced-cost row, last entry = objective
  std::vector<double> cost_;            // current column costs
  std::vector<int> basis_;
  bool phase_two_ready_ = false;
  bool infeasible_ = false;
  long pivots_ = 0;
  int ray_col_ = -1;
};

DenseResult solve_dense(const DenseProblem& p, double tol = 1e-9);

}  // namespace nols
