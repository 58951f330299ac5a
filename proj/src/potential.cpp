#include "nols/potential.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace nols {

void PotentialParams::validate() const {
  if (q != 2 && q != 3) throw std::invalid_argument("potential order q must be 2 or 3");
  if (!(alpha2 >= 1.0)) throw std::invalid_argument("alpha2 must be >= 1");
  if (!(beta2 >= 0.0 && beta2 <= 1.0)) throw std::invalid_argument("beta2 must lie in [0,1]");
  if (q == 3) {
    if (!(alpha3 >= 1.0)) throw std::invalid_argument("alpha3 must be >= 1");
    if (!(beta3 >= 0.0 && beta3 <= 1.0)) throw std::invalid_argument("beta3 must lie in [0,1]");
  }
}

double client_potential(double d1, double d2, const PotentialParams& params, double d3) {
  if (d2 < d1 - kDistTol) throw std::invalid_argument("client_potential: d2 < d1");
  double v = d1 + params.beta2 * std::min(d2, params.alpha2 * d1);
  if (params.q >= 3) {
    if (d3 < d2 - kDistTol) throw std::invalid_argument("client_potential: d3 < d2");
    v += params.beta3 * std::min(d3, params.alpha3 * d1);
  }
  return v;
}

FacilityOrder::FacilityOrder(const MetricInstance& inst) : inst_(inst), nf_(inst.num_facilities()) {
  const std::size_t nc = inst.num_clients();
  order_.resize(nc * nf_);
  std::vector<int> all(nf_);
  for (std::size_t f = 0; f < nf_; ++f) all[f] = static_cast<int>(f);
  for (std::size_t c = 0; c < nc; ++c) {
    if (nf_ == 0) break;
    auto sorted = nearest_facilities(inst, static_cast<int>(c), all, static_cast<int>(nf_));
    for (std::size_t i = 0; i < nf_; ++i) order_[c * nf_ + i] = sorted[i].first;
  }
}

Solution::Solution(std::shared_ptr<const FacilityOrder> order, std::vector<int> open, int depth)
    : order_(std::move(order)), open_(std::move(open)), depth_(depth) {
  if (depth_ < 1 || depth_ > kMaxDepth) throw std::invalid_argument("solution cache depth out of range");
  std::sort(open_.begin(), open_.end());
  open_.erase(std::unique(open_.begin(), open_.end()), open_.end());
  const auto nf = order_->num_facilities();
  is_open_.assign(nf, 0);
  for (int f : open_) {
    if (f < 0 || static_cast<std::size_t>(f) >= nf) throw std::invalid_argument("open facility out of range");
    is_open_[static_cast<std::size_t>(f)] = 1;
  }
  const auto nc = instance().num_clients();
  near_f_.assign(nc * kMaxDepth, -1);
  near_d_.assign(nc * kMaxDepth, kInf);
  for (std::size_t c = 0; c < nc; ++c) rebuild(static_cast<int>(c));
}

Solution::Solution(const MetricInstance& inst, std::vector<int> open, int depth)
    : Solution(std::make_shared<const FacilityOrder>(inst), std::move(open), depth) {}

void Solution::rebuild(int c) {
  const int* ord = order_->order(c);
  const auto nf = order_->num_facilities();
  int filled = 0;
  for (std::size_t i = 0; i < nf && filled < depth_; ++i) {
    const int f = ord[i];
    if (!is_open_[static_cast<std::size_t>(f)]) continue;
    near_f_[slot(c, filled)] = f;
    near_d_[slot(c, filled)] = instance().cf(c, f);
    ++filled;
  }
  for (int j = filled; j < kMaxDepth; ++j) {
    near_f_[slot(c, j)] = -1;
    near_d_[slot(c, j)] = kInf;
  }
}

void Solution::apply(const std::vector<int>& P, const std::vector<int>& Q) {
  auto next = swapped(open_, P, Q);
  if (next.empty()) throw std::invalid_argument("swap would close every facility");
  open_ = std::move(next);
  std::fill(is_open_.begin(), is_open_.end(), 0);
  for (int f : open_) {
    if (f < 0 || static_cast<std::size_t>(f) >= is_open_.size()) throw std::invalid_argument("facility out of range");
    is_open_[static_cast<std::size_t>(f)] = 1;
  }
  const int nc = static_cast<int>(instance().num_clients());
  for (int c = 0; c < nc; ++c) rebuild(c);
}

double Solution::delta_total(const std::vector<int>& P, const std::vector<int>& Q, Objective obj,
                             const PotentialParams& params, std::vector<double>* per_client) const {
  const MetricInstance& inst = instance();
  const int nc = static_cast<int>(inst.num_clients());
  const int need = obj == Objective::Cost ? 1 : params.q;
  const auto nf = order_->num_facilities();

  auto in = [](const std::vector<int>& v, int f) { return std::find(v.begin(), v.end(), f) != v.end(); };
  // Q members that are not already open after closing P.
  std::vector<int> added;
  for (int f : Q)
    if ((!is_open(f) || in(P, f)) && !in(added, f)) added.push_back(f);
  // Open count after the swap decides how many neighbors can exist.
  std::size_t closed = 0;
  for (std::size_t i = 0; i < P.size(); ++i)
    if (is_open(P[i]) && std::find(P.begin(), P.begin() + static_cast<long>(i), P[i]) == P.begin() + static_cast<long>(i))
      ++closed;
  const std::size_t remaining = open_.size() - closed;  // F \ P
  const std::size_t new_size = remaining + added.size();
  if (new_size == 0) throw std::invalid_argument("swap would close every facility");

  if (per_client) per_client->assign(static_cast<std::size_t>(nc), 0.0);
  KahanSum total;
  double oldd[kMaxDepth], newd[kMaxDepth];
  for (int c = 0; c < nc; ++c) {
    for (int j = 0; j < kMaxDepth; ++j) oldd[j] = near_d_[slot(c, j)];
    // Survivors of the cache, in order.
    double keep[kMaxDepth];
    int nkeep = 0;
    for (int j = 0; j < depth_; ++j) {
      const int f = near_f_[slot(c, j)];
      if (f < 0) break;
      if (in(P, f)) continue;
      keep[nkeep++] = near_d_[slot(c, j)];
    }
    // Cache exhausted before `need` survivors while more of F \ P exists.
    if (nkeep < need && static_cast<std::size_t>(nkeep) < remaining) {
      nkeep = 0;
      const int* ord = order_->order(c);
      for (std::size_t i = 0; i < nf && nkeep < need; ++i) {
        const int f = ord[i];
        if (!is_open_[static_cast<std::size_t>(f)] || in(P, f)) continue;
        keep[nkeep++] = inst.cf(c, f);
      }
    }
    // Merge survivors with the opened facilities.
    int filled = 0;
    int ki = 0;
    // Smallest `need` distances to opened facilities, ascending.
    double qd[kMaxDepth];
    int nq = 0;
    for (int f : added) {
      double v = inst.cf(c, f);
      if (nq < need) qd[nq++] = kInf;
      for (int j = 0; j < nq; ++j)
        if (v < qd[j]) std::swap(v, qd[j]);
    }
    int qi = 0;
    while (filled < need && (ki < nkeep || qi < nq)) {
      if (qi >= nq || (ki < nkeep && keep[ki] <= qd[qi]))
        newd[filled++] = keep[ki++];
      else
        newd[filled++] = qd[qi++];
    }
    for (int j = filled; j < kMaxDepth; ++j) newd[j] = kInf;
    const double dv = client_value(newd, obj, params) - client_value(oldd, obj, params);
    if (per_client) (*per_client)[static_cast<std::size_t>(c)] = dv;
    total.add(dv);
  }
  return total.value();
}

double Solution::value(Objective obj, const PotentialParams& params) const {
  KahanSum s;
  const int nc = static_cast<int>(instance().num_clients());
  double d[kMaxDepth];
  for (int c = 0; c < nc; ++c) {
    for (int j = 0; j < kMaxDepth; ++j) d[j] = near_d_[slot(c, j)];
    s.add(client_value(d, obj, params));
  }
  return s.value();
}

bool Solution::cache_consistent() const {
  const int nc = static_cast<int>(instance().num_clients());
  for (int c = 0; c < nc; ++c) {
    const int want = std::min<int>(depth_, static_cast<int>(open_.size()));
    auto ref = nearest_facilities(instance(), c, open_, want);
    for (int j = 0; j < want; ++j) {
      if (std::fabs(ref[static_cast<std::size_t>(j)].second - near_d_[slot(c, j)]) > kDistTol) return false;
      if (ref[static_cast<std::size_t>(j)].first != near_f_[slot(c, j)]) return false;
    }
    for (int j = want; j < kMaxDepth; ++j)
      if (near_f_[slot(c, j)] != -1) return false;
  }
  return true;
}

std::vector<int> swapped(const std::vector<int>& F, const std::vector<int>& P, const std::vector<int>& Q) {
  std::vector<int> out;
  for (int f : F)
    if (std::find(P.begin(), P.end(), f) == P.end()) out.push_back(f);
  out.insert(out.end(), Q.begin(), Q.end());
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

double objective_from_scratch(const MetricInstance& inst, const std::vector<int>& F, Objective obj,
                              const PotentialParams& params) {
  if (F.empty()) throw std::invalid_argument("empty facility set");
  const int nc = static_cast<int>(inst.num_clients());
  const int need = std::min<int>(obj == Objective::Cost ? 1 : params.q, static_cast<int>(F.size()));
  KahanSum s;
  double d[Solution::kMaxDepth];
  for (int c = 0; c < nc; ++c) {
    for (double& x : d) x = kInf;
    // Plain scan for the `need` smallest distances.
    for (int f : F) {
      double v = inst.cf(c, f);
      for (int j = 0; j < need; ++j) {
        if (v < d[j]) std::swap(v, d[j]);
      }
    }
    s.add(client_value(d, obj, params));
  }
  return s.value();
}

double kmed_cost(const MetricInstance& inst, const std::vector<int>& F) {
  return objective_from_scratch(inst, F, Objective::Cost, PotentialParams{});
}

double kmed_cost(const Solution& sol) { return sol.value(Objective::Cost, PotentialParams{}); }

double potential(const MetricInstance& inst, const std::vector<int>& F, const PotentialParams& params) {
  return objective_from_scratch(inst, F, Objective::Potential, params);
}

double potential(const Solution& sol, const PotentialParams& params) {
  if (sol.depth() < params.q) throw std::invalid_argument("solution cache shallower than q");
  return sol.value(Objective::Potential, params);
}

SwapDelta delta(const Solution& sol, const std::vector<int>& P, const std::vector<int>& Q,
                const PotentialParams& params) {
  SwapDelta out;
  out.total = sol.delta_total(P, Q, Objective::Potential, params, &out.per_client);
  return out;
}

}  // namespace nols
