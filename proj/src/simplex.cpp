#include "nols/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nols {

std::string to_string(LPSense s) {
  switch (s) {
    case LPSense::LE: return "<=";
    case LPSense::GE: return ">=";
    case LPSense::EQ: return "=";
  }
  return "?";
}

std::string to_string(LPStatus s) {
  switch (s) {
    case LPStatus::Optimal: return "optimal";
    case LPStatus::Infeasible: return "infeasible";
    case LPStatus::Unbounded: return "unbounded";
    case LPStatus::IterationLimit: return "iteration-limit";
    case LPStatus::Unsupported: return "unsupported";
  }
  return "?";
}

DenseSimplex::DenseSimplex(const DenseProblem& p, double tol) : prob_(p), tol_(tol) {
  if (static_cast<int>(prob_.c.size()) != prob_.n) throw std::invalid_argument("objective size mismatch");
  if (prob_.is_free.empty()) prob_.is_free.assign(prob_.n, false);
  if (static_cast<int>(prob_.is_free.size()) != prob_.n) throw std::invalid_argument("free flag size mismatch");
  m_ = static_cast<int>(prob_.rows.size());
  int next = 0;
  pos_col_.resize(prob_.n);
  neg_col_.assign(prob_.n, -1);
  for (int j = 0; j < prob_.n; ++j) {
    pos_col_[j] = next++;
    if (prob_.is_free[j]) neg_col_[j] = next++;
  }
  first_slack_ = next;
  row_aux_.assign(m_, -1);
  row_art_.assign(m_, -1);
  row_sign_.assign(m_, 1.0);
  std::vector<LPSense> sense(m_);
  for (int i = 0; i < m_; ++i) {
    sense[i] = prob_.rows[i].sense;
    if (prob_.rows[i].rhs < 0) {
      row_sign_[i] = -1.0;
      if (sense[i] == LPSense::LE) sense[i] = LPSense::GE;
      else if (sense[i] == LPSense::GE) sense[i] = LPSense::LE;
    }
    if (sense[i] != LPSense::EQ) row_aux_[i] = next++;
  }
  first_art_ = next;
  for (int i = 0; i < m_; ++i)
    if (sense[i] != LPSense::LE) row_art_[i] = next++;
  ncols_ = next;
  width_ = ncols_ + 1;
  t_.assign(static_cast<std::size_t>(m_) * width_, 0.0);
  basis_.assign(m_, -1);
  for (int i = 0; i < m_; ++i) {
    const auto& row = prob_.rows[i];
    for (auto [j, a] : row.terms) {
      if (j < 0 || j >= prob_.n) throw std::invalid_argument("row references unknown variable");
      at(i, pos_col_[j]) += row_sign_[i] * a;
      if (neg_col_[j] >= 0) at(i, neg_col_[j]) -= row_sign_[i] * a;
    }
    at(i, ncols_) = row_sign_[i] * row.rhs;
    if (row_aux_[i] >= 0) at(i, row_aux_[i]) = sense[i] == LPSense::LE ? 1.0 : -1.0;
    if (row_art_[i] >= 0) {
      at(i, row_art_[i]) = 1.0;
      basis_[i] = row_art_[i];
    } else {
      basis_[i] = row_aux_[i];
    }
  }
}

void DenseSimplex::pivot(int r, int q) {
  const double piv = at(r, q);
  double* rr = &t_[static_cast<std::size_t>(r) * width_];
  std::vector<int> nz;
  nz.reserve(64);
  for (int j = 0; j < width_; ++j) {
    if (rr[j] != 0.0) {
      rr[j] /= piv;
      nz.push_back(j);
    }
  }
  rr[q] = 1.0;
  for (int i = 0; i < m_; ++i) {
    if (i == r) continue;
    double* ri = &t_[static_cast<std::size_t>(i) * width_];
    const double f = ri[q];
    if (f == 0.0) continue;
    for (int j : nz) ri[j] -= f * rr[j];
    ri[q] = 0.0;
    if (ri[ncols_] < 0 && ri[ncols_] > -1e-12) ri[ncols_] = 0.0;
  }
  const double f = z_[q];
  if (f != 0.0) {
    for (int j : nz) z_[j] -= f * rr[j];
    z_[q] = 0.0;
  }
  basis_[r] = q;
  ++pivots_;
}

void DenseSimplex::set_objective(const std::vector<double>& col_cost) {
  cost_ = col_cost;
  z_.assign(width_, 0.0);
  for (int j = 0; j < ncols_; ++j) z_[j] = -cost_[j];
  for (int i = 0; i < m_; ++i) {
    const double cb = cost_[basis_[i]];
    if (cb == 0.0) continue;
    const double* ri = &t_[static_cast<std::size_t>(i) * width_];
    for (int j = 0; j < width_; ++j) z_[j] += cb * ri[j];
  }
}

LPStatus DenseSimplex::run(bool phase_one) {
  const int limit_col = phase_one ? ncols_ : first_art_;
  const long max_pivots = 200L * (m_ + ncols_) + 1000;
  int degenerate = 0;
  bool bland = false;
  for (long it = 0; it < max_pivots; ++it) {
    int q = -1;
    double best = -tol_;
    for (int j = 0; j < limit_col; ++j) {
      if (z_[j] < best) {
        q = j;
        if (bland) break;
        best = z_[j];
      }
    }
    if (q < 0) return LPStatus::Optimal;
    int r = -1;
    double best_ratio = 0;
    if (bland) {
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, q);
        if (a <= tol_) continue;
        const double ratio = std::max(0.0, at(i, ncols_)) / a;
        if (r < 0 || ratio < best_ratio - 1e-12 || (ratio <= best_ratio + 1e-12 && basis_[i] < basis_[r])) {
          r = i;
          best_ratio = ratio;
        }
      }
    } else {
      // Two-pass ratio test: bound with a small feasibility slack, then take
      // the largest pivot among rows under the bound.
      double bound = INFINITY;
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, q);
        if (a <= tol_) continue;
        bound = std::min(bound, (std::max(0.0, at(i, ncols_)) + 1e-9) / a);
      }
      double best_a = 0;
      for (int i = 0; i < m_; ++i) {
        const double a = at(i, q);
        if (a <= tol_) continue;
        const double ratio = std::max(0.0, at(i, ncols_)) / a;
        if (ratio <= bound && a > best_a) {
          r = i;
          best_a = a;
          best_ratio = ratio;
        }
      }
    }
    if (r < 0) {
      ray_col_ = q;
      return LPStatus::Unbounded;
    }
    if (best_ratio <= tol_) {
      if (++degenerate > 50) bland = true;
    } else {
      degenerate = 0;
      bland = false;
    }
    pivot(r, q);
  }
  return LPStatus::IterationLimit;
}

DenseResult DenseSimplex::extract(LPStatus st) {
  DenseResult res;
  res.status = st;
  res.pivots = pivots_;
  std::vector<double> val(ncols_, 0.0);
  for (int i = 0; i < m_; ++i) val[basis_[i]] = at(i, ncols_);
  res.x.assign(prob_.n, 0.0);
  for (int j = 0; j < prob_.n; ++j) {
    res.x[j] = val[pos_col_[j]];
    if (neg_col_[j] >= 0) res.x[j] -= val[neg_col_[j]];
  }
  double obj = 0;
  for (int j = 0; j < prob_.n; ++j) obj += prob_.c[j] * res.x[j];
  res.objective = obj;
  res.duals.assign(m_, 0.0);
  for (int i = 0; i < m_; ++i) {
    double y;
    if (row_art_[i] >= 0) y = z_[row_art_[i]] + cost_[row_art_[i]];
    else y = z_[row_aux_[i]];
    res.duals[i] = row_sign_[i] * y;
  }
  if (st == LPStatus::Unbounded && ray_col_ >= 0) {
    std::vector<double> dir(ncols_, 0.0);
    dir[ray_col_] = 1.0;
    for (int i = 0; i < m_; ++i) dir[basis_[i]] = -at(i, ray_col_);
    res.ray.assign(prob_.n, 0.0);
    for (int j = 0; j < prob_.n; ++j) {
      res.ray[j] = dir[pos_col_[j]];
      if (neg_col_[j] >= 0) res.ray[j] -= dir[neg_col_[j]];
    }
  }
  return res;
}

DenseResult DenseSimplex::solve() {
  pivots_ = 0;
  ray_col_ = -1;
  if (first_art_ < ncols_) {
    std::vector<double> c1(ncols_, 0.0);
    for (int j = first_art_; j < ncols_; ++j) c1[j] = -1.0;
    set_objective(c1);
    const LPStatus st = run(true);
    double rhs_scale = 1.0;
    for (int i = 0; i < m_; ++i) rhs_scale = std::max(rhs_scale, std::fabs(at(i, ncols_)));
    if (st != LPStatus::Optimal || -z_[ncols_] > 1e-7 * rhs_scale) {
      infeasible_ = true;
      DenseResult res;
      res.status = st == LPStatus::IterationLimit ? st : LPStatus::Infeasible;
      res.pivots = pivots_;
      return res;
    }
    for (int i = 0; i < m_; ++i) {
      if (basis_[i] < first_art_) continue;
      int best = -1;
      for (int j = 0; j < first_art_; ++j)
        if (std::fabs(at(i, j)) > 1e-9 && (best < 0 || std::fabs(at(i, j)) > std::fabs(at(i, best)))) best = j;
      if (best >= 0) pivot(i, best);
    }
  }
  phase_two_ready_ = true;
  return reoptimize(prob_.c);
}

DenseResult DenseSimplex::reoptimize(const std::vector<double>& c) {
  if (!phase_two_ready_) throw std::logic_error("reoptimize before solve");
  if (infeasible_) {
    DenseResult res;
    res.status = LPStatus::Infeasible;
    return res;
  }
  if (static_cast<int>(c.size()) != prob_.n) throw std::invalid_argument("objective size mismatch");
  prob_.c = c;
  ray_col_ = -1;
  std::vector<double> cc(ncols_, 0.0);
  for (int j = 0; j < prob_.n; ++j) {
    cc[pos_col_[j]] = c[j];
    if (neg_col_[j] >= 0) cc[neg_col_[j]] = -c[j];
  }
  set_objective(cc);
  return extract(run(false));
}

DenseResult solve_dense(const DenseProblem& p, double tol) {
  DenseSimplex s(p, tol);
  return s.solve();
}

}  // namespace nols
