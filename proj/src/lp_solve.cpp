#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <stdexcept>

#include "nols/lp_gen.hpp"

namespace nols {

namespace {

DenseProblem to_dense(const LPModel& m) {
  DenseProblem p;
  p.n = static_cast<int>(m.vars.size());
  p.c.assign(p.n, 0.0);
  p.is_free.resize(p.n);
  for (int j = 0; j < p.n; ++j) p.is_free[j] = m.vars[j].free;
  for (const auto& t : m.objective) p.c[t.var] += t.coef;
  for (const auto& c : m.constraints) {
    DenseProblem::Row r;
    for (const auto& t : c.terms) r.terms.emplace_back(t.var, t.coef);
    r.sense = c.sense;
    r.rhs = c.rhs;
    p.rows.push_back(std::move(r));
  }
  return p;
}

LPSolution solve_whole(const LPModel& m, const SolveOptions& opt) {
  const DenseResult r = solve_dense(to_dense(m), opt.tol);
  LPSolution s;
  s.status = r.status;
  s.objective = r.objective;
  s.values = r.x;
  s.ray = r.ray;
  s.method = "dense";
  s.iterations = r.pivots;
  return s;
}

// A generated extreme direction of one block's cone.
struct Column {
  int block;
  std::vector<double> z;  // over the block's local variables
  double cost;
  std::vector<double> link;  // linking-row activity
};

struct Block {
  std::vector<int> vars;  // global indices
  std::vector<int> rows;
  DenseProblem prob;
  std::unique_ptr<DenseSimplex> lp;
};

// Largest violation of the block rows by a pricing answer.
double violation(const DenseProblem& p, const std::vector<double>& x) {
  double worst = 0;
  for (const auto& r : p.rows) {
    double lhs = 0, scale = 1;
    for (auto [j, a] : r.terms) {
      lhs += a * x[j];
      scale = std::max(scale, std::fabs(a * x[j]));
    }
    double v = 0;
    if (r.sense != LPSense::GE) v = std::max(v, lhs - r.rhs);
    if (r.sense != LPSense::LE) v = std::max(v, r.rhs - lhs);
    worst = std::max(worst, v / scale);
  }
  return worst;
}

// Dantzig-Wolfe over homogeneous blocks: every block row has zero rhs, so a
// block's feasible set is a cone and is generated by its directions, which
// are normalized by sum of nonnegative variables <= 1 in the pricing LP.
LPSolution solve_decomposed(const LPModel& m, const SolveOptions& opt) {
  LPSolution sol;
  sol.method = "decompose";
  const int n = static_cast<int>(m.vars.size());
  std::map<int, int> block_index;
  std::vector<Block> blocks;
  std::vector<int> local(n, -1), owner(n, -1);
  for (int j = 0; j < n; ++j) {
    const int b = m.vars[j].block;
    if (b < 0) {
      sol.status = LPStatus::Unsupported;
      sol.message = "variable " + m.vars[j].name + " has no block";
      return sol;
    }
    auto [it, fresh] = block_index.emplace(b, static_cast<int>(blocks.size()));
    if (fresh) blocks.emplace_back();
    owner[j] = it->second;
    local[j] = static_cast<int>(blocks[it->second].vars.size());
    blocks[it->second].vars.push_back(j);
  }
  std::vector<int> linking;
  for (int i = 0; i < static_cast<int>(m.constraints.size()); ++i) {
    const auto& c = m.constraints[i];
    if (c.block < 0) {
      linking.push_back(i);
      continue;
    }
    auto it = block_index.find(c.block);
    bool ok = it != block_index.end() && c.rhs == 0.0;
    if (ok)
      for (const auto& t : c.terms) ok = ok && owner[t.var] == it->second;
    if (!ok) {
      sol.status = LPStatus::Unsupported;
      sol.message = "row " + c.name + " is not a homogeneous block row";
      return sol;
    }
    blocks[it->second].rows.push_back(i);
  }
  std::vector<double> cost(n, 0.0);
  for (const auto& t : m.objective) cost[t.var] += t.coef;
  const int R = static_cast<int>(linking.size());
  // Linking coefficients per variable.
  std::vector<std::vector<std::pair<int, double>>> link_of(n);
  for (int r = 0; r < R; ++r)
    for (const auto& t : m.constraints[linking[r]].terms) link_of[t.var].emplace_back(r, t.coef);

  for (auto& b : blocks) {
    DenseProblem p;
    p.n = static_cast<int>(b.vars.size());
    p.c.assign(p.n, 0.0);
    p.is_free.resize(p.n);
    DenseProblem::Row scale;
    scale.sense = LPSense::LE;
    scale.rhs = 1.0;
    for (int k = 0; k < p.n; ++k) {
      p.is_free[k] = m.vars[b.vars[k]].free;
      if (!p.is_free[k]) scale.terms.emplace_back(k, 1.0);
    }
    for (int i : b.rows) {
      DenseProblem::Row r;
      for (const auto& t : m.constraints[i].terms) r.terms.emplace_back(local[t.var], t.coef);
      r.sense = m.constraints[i].sense;
      r.rhs = 0.0;
      p.rows.push_back(std::move(r));
    }
    p.rows.push_back(std::move(scale));
    b.prob = std::move(p);
  }

  std::vector<Column> cols;
  std::vector<double> duals(R, 0.0);
  std::vector<bool> started(blocks.size(), false);
  std::vector<double> weights;
  double rp_obj = 0;
  for (int round = 0; round < opt.max_rounds; ++round) {
    sol.iterations = round + 1;
    int added = 0;
    double gap = 0;
    for (int bi = 0; bi < static_cast<int>(blocks.size()); ++bi) {
      Block& b = blocks[bi];
      std::vector<double> c(b.vars.size(), 0.0);
      for (std::size_t k = 0; k < b.vars.size(); ++k) {
        const int j = b.vars[k];
        double v = cost[j];
        for (auto [r, a] : link_of[j]) v -= duals[r] * a;
        c[k] = v;
      }
      auto cold = [&]() {
        b.lp = std::make_unique<DenseSimplex>(b.prob, opt.tol);
        b.lp->solve();
        return b.lp->reoptimize(c);
      };
      DenseResult res = started[bi] ? b.lp->reoptimize(c) : cold();
      if (started[bi] && (res.status != LPStatus::Optimal || violation(b.prob, res.x) > 1e-7)) res = cold();
      started[bi] = true;
      if (res.status == LPStatus::Unbounded) {
        // Free variables unbounded in a normalized cone: the block admits a
        // direction with zero nonnegative part and positive reduced value.
        sol.status = LPStatus::Unbounded;
        sol.ray.assign(n, 0.0);
        for (std::size_t k = 0; k < b.vars.size(); ++k) sol.ray[b.vars[k]] = res.ray[k];
        sol.message = "pricing unbounded in block " + std::to_string(m.vars[b.vars[0]].block);
        return sol;
      }
      if (res.status != LPStatus::Optimal) {
        sol.status = res.status;
        sol.message = "pricing failed in block " + std::to_string(m.vars[b.vars[0]].block);
        return sol;
      }
      gap = std::max(gap, res.objective);
      if (res.objective > opt.tol * std::max(1.0, std::fabs(rp_obj)) * 10) {
        Column col;
        col.block = bi;
        col.z = res.x;
        col.cost = 0;
        col.link.assign(R, 0.0);
        for (std::size_t k = 0; k < b.vars.size(); ++k) {
          const int j = b.vars[k];
          col.cost += cost[j] * res.x[k];
          for (auto [r, a] : link_of[j]) col.link[r] += a * res.x[k];
        }
        cols.push_back(std::move(col));
        ++added;
      }
    }
    sol.pricing_gap = gap;
    if (added == 0 && round > 0) break;
    // Restricted primal: columns w_k >= 0 plus penalized slack in both
    // directions per linking row.
    DenseProblem rp;
    const int K = static_cast<int>(cols.size());
    rp.n = K + 2 * R;
    rp.c.assign(rp.n, 0.0);
    for (int k = 0; k < K; ++k) rp.c[k] = cols[k].cost;
    for (int r = 0; r < 2 * R; ++r) rp.c[K + r] = -opt.dual_box;
    for (int r = 0; r < R; ++r) {
      const auto& lc = m.constraints[linking[r]];
      DenseProblem::Row row;
      for (int k = 0; k < K; ++k)
        if (cols[k].link[r] != 0.0) row.terms.emplace_back(k, cols[k].link[r]);
      row.terms.emplace_back(K + 2 * r, 1.0);
      row.terms.emplace_back(K + 2 * r + 1, -1.0);
      row.sense = lc.sense;
      row.rhs = lc.rhs;
      rp.rows.push_back(std::move(row));
    }
    const DenseResult rr = solve_dense(rp, opt.tol);
    if (rr.status != LPStatus::Optimal) {
      sol.status = rr.status == LPStatus::Unbounded ? LPStatus::Unbounded : rr.status;
      sol.message = "restricted master " + to_string(rr.status);
      return sol;
    }
    duals = rr.duals;
    // Sign-feasible duals for a maximization; the simplex leaves roundoff.
    for (int r = 0; r < R; ++r) {
      const LPSense s = m.constraints[linking[r]].sense;
      if (s == LPSense::LE) duals[r] = std::max(0.0, duals[r]);
      if (s == LPSense::GE) duals[r] = std::min(0.0, duals[r]);
    }
    weights = rr.x;
    rp_obj = rr.objective;
    if (round + 1 == opt.max_rounds) {
      sol.status = LPStatus::IterationLimit;
      sol.message = "column generation round limit";
      return sol;
    }
  }
  double penalty = 0;
  const int K = static_cast<int>(cols.size());
  for (int r = 0; r < 2 * R; ++r) penalty += weights.empty() ? 0.0 : weights[K + r];
  sol.values.assign(n, 0.0);
  for (int k = 0; k < K && k < static_cast<int>(weights.size()); ++k) {
    if (weights[k] == 0.0) continue;
    const Block& b = blocks[cols[k].block];
    for (std::size_t l = 0; l < b.vars.size(); ++l) sol.values[b.vars[l]] += weights[k] * cols[k].z[l];
  }
  sol.objective = 0;
  for (int j = 0; j < n; ++j) sol.objective += cost[j] * sol.values[j];
  if (penalty > 1e-7) {
    sol.status = LPStatus::Infeasible;
    sol.message = "linking rows need penalty slack " + std::to_string(penalty);
    return sol;
  }
  sol.status = LPStatus::Optimal;
  return sol;
}

}  // namespace

LPSolution solve_lp(const LPModel& m, const SolveOptions& opt) {
  if (opt.method != "auto" && opt.method != "dense" && opt.method != "decompose")
    throw std::invalid_argument("unknown solve method: " + opt.method);
  std::size_t free_vars = 0;
  for (const auto& v : m.vars) free_vars += v.free ? 1 : 0;
  const double rows = static_cast<double>(m.constraints.size());
  const double cols = static_cast<double>(m.vars.size() + free_vars) + 2 * rows;
  const bool dense = opt.method == "dense" || (opt.method == "auto" && rows * cols <= opt.dense_limit);
  return dense ? solve_whole(m, opt) : solve_decomposed(m, opt);
}

}  // namespace nols
