#include "nols/lp_gen.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>
#include <unordered_map>

namespace nols {

namespace {

Lin operator+(Lin a, const Lin& b) {
  a.x += b.x;
  a.y1 += b.y1;
  a.y2 += b.y2;
  a.y3 += b.y3;
  return a;
}
Lin operator*(double k, Lin a) {
  a.x *= k;
  a.y1 *= k;
  a.y2 *= k;
  a.y3 *= k;
  return a;
}
Lin operator-(const Lin& a, const Lin& b) { return a + (-1.0) * b; }

const Lin kX{1, 0, 0, 0};
const Lin kY1{0, 1, 0, 0};
const Lin kY2{0, 0, 1, 0};
const Lin kY3{0, 0, 0, 1};

Lin lin(double x, double y1, double y2 = 0) { return Lin{x, y1, y2, 0}; }

bool finite(const Lin& l) {
  return std::isfinite(l.x) && std::isfinite(l.y1) && std::isfinite(l.y2) && std::isfinite(l.y3);
}

std::vector<std::pair<Lin, double>> prim(std::initializer_list<Lin> ls) {
  std::vector<std::pair<Lin, double>> out;
  for (const Lin& l : ls) out.emplace_back(l, 1.0);
  return out;
}

BoundSpec single(const std::string& label, Lin base, std::initializer_list<Lin> primaries) {
  BoundSpec b;
  b.label = label;
  b.base = base;
  b.primaries = prim(primaries);
  return b;
}

BoundSpec pair(const std::string& label, Lin base, Lin first, Lin second, std::initializer_list<Lin> primaries) {
  BoundSpec b = single(label, base, primaries);
  b.opening = BoundSpec::Opening::Pair;
  b.first = first;
  b.second = second;
  return b;
}

BoundSpec balanced(const std::string& label, Lin base, std::initializer_list<Lin> primaries) {
  BoundSpec b = single(label, base, primaries);
  b.opening = BoundSpec::Opening::Balanced;
  return b;
}

BoundSpec average(const std::string& label, const BoundSpec& a, const BoundSpec& b) {
  BoundSpec out;
  out.label = label;
  out.base = 0.5 * (a.base + b.base);
  for (const auto& [l, w] : a.primaries) out.primaries.emplace_back(l, 0.5 * w);
  for (const auto& [l, w] : b.primaries) out.primaries.emplace_back(l, 0.5 * w);
  return out;
}

constexpr int kS1 = 0, kS2 = 1, kT1 = 2, kT2 = 3;

ClassSpec make_class(const std::string& name, bool far, Letter letter) {
  ClassSpec c;
  c.name = name;
  c.far = far;
  c.letter = letter;
  return c;
}

}  // namespace

std::vector<ClassSpec> class_catalog(double rho, const PotentialParams& params, bool low, bool high) {
  const double a = params.alpha2, b = params.beta2, ab = a * b;
  const double r = rho;
  const double ir = 1.0 / rho;  // infinite at rho = 0; such bounds are dropped downstream
  const Lin eta1_far = kX + r * (kX + kY1);   // d(c, eta1) when eta1 != f1
  const Lin eta2_near = kX + ir * (kX + kY1);  // d(c, eta2) when eta1 = f1
  const Lin via_eta = 2.0 * kX + kY1;
  std::vector<ClassSpec> out;

  // Far E: tree alternatives a (separate swaps), b (f* and f1 in one swap).
  {
    const BoundSpec s = pair("far-E simple", lin(2 + 3 * b, -(2 * ab - b)), kY1, kX, {kY1, via_eta});
    const BoundSpec ta = pair("far-E tree, separate swaps", lin(2 + 2 * b, -(2 * ab - 2 * b)), kY1, kX, {kY1, via_eta});
    const BoundSpec tb = single("far-E tree, shared swap", lin(1 + ab, -(1 + ab)), {kX});
    for (int i = 0; i < 2; ++i)
      for (int j = 0; j < 2; ++j) {
        ClassSpec c = make_class(std::string("farE.") + "ab"[i] + "ab"[j], true, Letter::E);
        c.events[kS1] = {s};
        c.events[kS2] = {s};
        c.events[kT1] = {i == 0 ? ta : tb};
        c.events[kT2] = {j == 0 ? ta : tb};
        out.push_back(c);
      }
  }
  // Far A and far B.
  {
    const BoundSpec shared = single("far shared swap", lin(1 + ab, -(1 + ab)), {kX});
    const BoundSpec as2 = pair("far-A S2", lin((1 + ir) * (1 + ab) + b, -((1 - ir) * (1 + ab) + ab)), kY1, kX,
                               {kY1, eta2_near});
    const BoundSpec at2 = pair("far-A T2, separate swaps", lin(1 + ir + 2 * b, -(1 + 2 * ab - 2 * b - ir)), kY1, kX,
                               {kY1, eta2_near});
    for (int i = 0; i < 2; ++i) {
      ClassSpec c = make_class(std::string("farA.") + "ab"[i], true, Letter::A);
      c.events[kS1] = {shared};
      c.events[kS2] = {as2};
      c.events[kT1] = {shared};
      c.events[kT2] = {i == 0 ? at2 : shared};
      out.push_back(c);
    }
    const BoundSpec bs1 = pair("far-B S1", lin((1 + r) * (1 + ab) + b, -((1 - r) * (1 + ab) + ab)), kY1, kX,
                               {kY1, eta1_far});
    const BoundSpec bt1 = pair("far-B T1, separate swaps", lin(1 + r + 2 * b, -(1 + 2 * ab - 2 * b - r)), kY1, kX,
                               {kY1, eta1_far});
    for (int i = 0; i < 2; ++i) {
      ClassSpec c = make_class(std::string("farB.") + "ab"[i], true, Letter::B);
      c.events[kS1] = {bs1};
      c.events[kS2] = {shared};
      c.events[kT1] = {i == 0 ? bt1 : shared};
      c.events[kT2] = {shared};
      out.push_back(c);
    }
  }
  // Close E: tree alternatives a (f1, f2 together, f* apart), b (all three
  // together), c (f1, f2 apart).
  {
    const BoundSpec s = pair("close-E simple", lin(1 + 4 * b, -(2 - 3 * b), 1 - 3 * b), kX, kY1, {kX, kY2, kY1});
    const BoundSpec ta = pair("close-E tree, f1 f2 together", lin(3 + b, -(1 - 3 * b), -2 * b), kX, kY1, {kX, via_eta});
    const BoundSpec tb = single("close-E tree, one swap", lin(1 + ab + 2 * b, -(1 - b), -2 * b), {kX});
    const BoundSpec tc = balanced("close-E tree, f1 f2 apart", lin(1 + 3 * b, -(2 - 4 * b), 1 - 3 * b), {kX, kY2, kY1});
    const BoundSpec alts[3] = {ta, tb, tc};
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 3; ++j) {
        ClassSpec c = make_class(std::string("closeE.") + "abc"[i] + "abc"[j], false, Letter::E);
        c.events[kS1] = {s};
        c.events[kS2] = {s};
        c.events[kT1] = {alts[i]};
        c.events[kT2] = {alts[j]};
        out.push_back(c);
      }
  }
  const BoundSpec low_bound = single("rho <= 2/3 whole event", lin(1 + ab, -(1 - ab), -2 * b), {kX, kY1});
  // Close A.
  if (low) {
    ClassSpec c = make_class("closeA.low", false, Letter::A);
    for (auto& e : c.events) e = {low_bound};
    out.push_back(c);
  }
  if (high) {
    const BoundSpec s1 = single("close-A S1", lin(1 + ab + b + b * ir, -(1 - b * ir), -2 * b), {kX, kY1});
    const BoundSpec s2 = pair("close-A S2", lin(1 + 2 * b + 2 * b * ir, -(2 - b - 2 * b * ir), 1 - 3 * b), kX, kY1,
                              {kX, kY2, kY1});
    const BoundSpec t11 = single("close-A T11", lin(1 + ab, -1, -b), {kX});
    const BoundSpec t12 = single("close-A T12", lin(1 + ab + b, -1, 0), {kX, kY1});
    const BoundSpec t21 = pair("close-A T21", lin(2 + b + ir, -(2 - 3 * b - ir), -2 * b), kX, kY1, {kX, eta2_near});
    const BoundSpec t22 = single("close-A T22", lin(1 + ab + 2 * b, -(2 - 2 * b), 1 - b), {kX, kY2, kY1});
    const std::pair<const char*, std::pair<BoundSpec, BoundSpec>> shapes[3] = {
        {"11-21", {t11, t21}}, {"11-22", {t11, t22}}, {"12-22", {t12, t22}}};
    for (const auto& [tag, tt] : shapes) {
      ClassSpec c = make_class(std::string("closeA.") + tag, false, Letter::A);
      c.events[kS1] = {s1};
      c.events[kS2] = {s2};
      c.events[kT1] = {tt.first};
      c.events[kT2] = {tt.second};
      out.push_back(c);
    }
  }
  // Close B.
  {
    const BoundSpec s1 = pair("close-B S1", lin(1 + 2 * b + 2 * r * b, -(2 - b - 2 * r * b), 1 - 3 * b), kX, kY1,
                              {kX, kY2, kY1});
    const BoundSpec s2 = single("close-B S2", lin(1 + ab + b + r * b, -(1 - r * b), -2 * b), {kX, kY1});
    const BoundSpec t11 = pair("close-B T11", lin(2 + b + r, -(2 - 3 * b - r), -2 * b), kX, kY1, {kX, eta1_far});
    const BoundSpec t12 = single("close-B T12", lin(1 + ab + 2 * b + 2 * r * b, -(2 - 2 * r * b), 1 - 3 * b),
                                 {kX, kY2, kY1});
    const BoundSpec t21 = single("close-B T21", lin(1 + ab, -1, -b), {kX});
    const BoundSpec t22 = single("close-B T22", lin(1 + ab + b, -1, 0), {kX, kY1});
    const std::pair<const char*, std::pair<BoundSpec, BoundSpec>> shapes[3] = {
        {"11-21", {t11, t21}}, {"12-21", {t12, t21}}, {"12-22", {t12, t22}}};
    for (const auto& [tag, tt] : shapes) {
      ClassSpec c = make_class(std::string("closeB.") + tag, false, Letter::B);
      c.events[kS1] = {s1};
      c.events[kS2] = {s2};
      c.events[kT1] = {tt.first};
      c.events[kT2] = {tt.second};
      out.push_back(c);
    }
  }
  // Shared forms for C and D sub-cases.
  const BoundSpec cx = single("f* alone, f2 kept", lin(1 + ab, -1, -b), {kX});
  const BoundSpec cy = single("f* alone plus f1 with partner", lin(1 + ab + b, -1, 0), {kX, kY1});
  const BoundSpec cz = single("f* alone plus f2 alone", lin(1 + ab, -2, 1 + ab - 2 * b), {kX, kY2});
  const BoundSpec cw = single("f* alone plus f2 with partner", lin(1 + ab + b, -(2 - 2 * b), 1 - 2 * b), {kX, kY2});
  const BoundSpec clow = single("f* alone plus f1 alone", lin(1 + ab, -(1 - ab), -2 * b), {kX, kY1});
  // Close C.
  if (low) {
    ClassSpec c = make_class("closeC.low", false, Letter::C);
    for (auto& e : c.events) e = {low_bound};
    out.push_back(c);
  }
  if (high) {
    const BoundSpec cs2c = single("close-C(c) S2", lin(1 + ab + 2 * b, -(2 - 3 * b), 1 - 2 * b), {kX, kY2});
    const struct {
      const char* tag;
      BoundSpec s1, s2, t1, t2;
    } sub[5] = {
        {"a", clow, cx, cy, cx},
        {"b", cx, cz, cx, cw},
        {"c", clow, cs2c, cy, cw},
        {"e", clow, cz, cy, cx},
        {"f", clow, cz, average("close-C(f) T1 average", cy, cx), average("close-C(f) T2 average", cw, cx)},
    };
    for (const auto& s : sub) {
      ClassSpec c = make_class(std::string("closeC.") + s.tag, false, Letter::C);
      c.events[kS1] = {s.s1};
      c.events[kS2] = {s.s2};
      c.events[kT1] = {s.t1};
      c.events[kT2] = {s.t2};
      out.push_back(c);
    }
  }
  // Close D.
  {
    const BoundSpec v = single("f* alone plus f1 with pi(f2)", lin(1 + ab + r * b, -(1 - r * b), -b), {kX, kY1});
    const BoundSpec e_s1 = pair("close-D S1, f2 kept alone", lin(1, -(2 - b), 1 + ab - 2 * b), kX, kY1, {kX, kY2});
    const BoundSpec b_s1_bal = balanced("close-D(b) S1 balanced", lin(1 - b, -(2 - 2 * b), 1 + ab - 2 * b), {kX, kY2});
    const BoundSpec b_t1 = pair("close-D(b) T1", lin(1 + b, -(2 - 3 * b), 1 - 2 * b), kX, kY1, {kX, kY2});
    const BoundSpec b_t2 = pair("close-D(b) T2", lin(1, -1, 0), kX, kY2, {kX});
    const BoundSpec c_s1 = pair("close-D(c) S1", lin(1 + 2 * b, -(2 - 4 * b), 1 - 2 * b), kX, kY1, {kX, kY2});
    const BoundSpec c_s1_mix = single("close-D(c) S1 mixed", lin(1 + 2 * b + 0.776 * ab, -(2 - 3.224 * b), 1 - 2 * b),
                                      {kX, kY2});
    const BoundSpec c_t1 = pair("close-D(c) T1", lin(1 + b, -(2 - 3 * b), 1 - 2 * b), kX, kY1, {kX, kY2});
    const struct {
      const char* tag;
      std::vector<BoundSpec> s1, s2, t1, t2;
    } sub[5] = {
        {"a", {cx}, {clow}, {cx}, {cy}},
        {"b", {e_s1, b_s1_bal}, {cx}, {b_t1}, {b_t2}},
        {"c", {c_s1, c_s1_mix}, {clow}, {cw, c_t1}, {v}},
        {"e", {e_s1}, {clow}, {cx}, {v}},
        {"f", {e_s1}, {clow}, {average("close-D(f) T1 average", cw, cx)}, {average("close-D(f) T2 average", v, cx)}},
    };
    for (const auto& s : sub) {
      ClassSpec c = make_class(std::string("closeD.") + s.tag, false, Letter::D);
      c.events[kS1] = s.s1;
      c.events[kS2] = s.s2;
      c.events[kT1] = s.t1;
      c.events[kT2] = s.t2;
      out.push_back(c);
    }
  }
  return out;
}

std::vector<RatioCell> ratio_cells(int grid) {
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  if (grid == 1) return {RatioCell{1.0, 1.0}};
  std::vector<RatioCell> cells;
  const double step = 1.0 / (grid - 1);
  for (int i = 0; i < grid; ++i) cells.push_back({i * step, std::min(1.0, (i + 1) * step)});
  cells.back().lo = 1.0;
  return cells;
}

void LpGenConfig::validate() const {
  if (q != 2 && q != 3) throw std::invalid_argument("q must be 2 or 3");
  if (grid < 1) throw std::invalid_argument("grid must be >= 1");
  if (!simple && !tree) throw std::invalid_argument("at least one swap family is required");
  PotentialParams p = params;
  p.q = q;
  p.validate();
}

int LPModel::add_var(const std::string& n, bool is_free, int block) {
  vars.push_back({n, is_free, block});
  return static_cast<int>(vars.size()) - 1;
}

int LPModel::find_var(const std::string& n) const {
  for (std::size_t i = 0; i < vars.size(); ++i)
    if (vars[i].name == n) return static_cast<int>(i);
  return -1;
}

std::size_t LPModel::nonzeros() const {
  std::size_t nz = 0;
  for (const auto& c : constraints) nz += c.terms.size();
  return nz;
}

std::map<std::string, int> LPModel::family_counts() const {
  std::map<std::string, int> out;
  for (const auto& c : constraints) ++out[c.family];
  return out;
}

namespace {

const char* kEventNames[4] = {"S1", "S2", "T1", "T2"};

bool event_enabled(int e, const RatioCell& cell, const LpGenConfig& cfg) {
  switch (e) {
    case kS1: return cfg.simple;
    case kS2: return cfg.simple && cell.has_s2();
    case kT1: return cfg.tree;
    case kT2: return cfg.tree && cell.has_t2();
  }
  return false;
}

bool keep_class(const std::string& name, const LpGenConfig& cfg) {
  if (cfg.classes.empty()) return true;
  for (const auto& p : cfg.classes)
    if (name.compare(0, p.size(), p) == 0) return true;
  return false;
}

struct Variant {
  Lin form;
  std::string label;
};

// Phi_2 form, its opening branch, and the Phi_3 lift with the given third
// closeness (far3 = d3 >= alpha3 d1).
std::vector<Variant> bound_variants(const BoundSpec& bs, const LpGenConfig& cfg, bool far3) {
  const double a = cfg.params.alpha2, b = cfg.params.beta2, ab = a * b;
  std::vector<Variant> out{{bs.base, bs.label}};
  if (cfg.branches) {
    if (bs.opening == BoundSpec::Opening::Pair)
      out.push_back({bs.base - (bs.first + b * bs.second) + (1 + ab) * bs.first, bs.label + "; opening branch (1+a2 b2) first"});
    else if (bs.opening == BoundSpec::Opening::Balanced)
      out.push_back({bs.base - ((1 - b) * kX + 2 * b * kY1) + (1 + ab) * kX, bs.label + "; opening branch (1+a2 b2) d*"});
  }
  if (cfg.q == 3) {
    const double a3 = cfg.params.alpha3, b3 = cfg.params.beta3;
    const Lin pre3 = far3 ? a3 * kY1 : kY3;
    Lin lift = a3 * kY1 - pre3;  // the swap closing f3
    for (const auto& [l, w] : bs.primaries) lift = lift + w * (a3 * l - pre3);
    for (auto& v : out) {
      v.form = v.form + b3 * lift;
      v.label += "; third term truncated at alpha3";
    }
  }
  return out;
}

// Per-coefficient max over the two endpoint evaluations; non-finite drops.
bool relax_max(const Lin& lo, const Lin& hi, Lin& out) {
  if (!finite(lo) || !finite(hi)) return false;
  out = Lin{std::max(lo.x, hi.x), std::max(lo.y1, hi.y1), std::max(lo.y2, hi.y2), std::max(lo.y3, hi.y3)};
  return true;
}

std::string cell_tag(int i) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "c%03d", i);
  return buf;
}

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct CellClasses {
  std::vector<ClassSpec> lo, hi;
};

CellClasses cell_classes(const RatioCell& cell, const LpGenConfig& cfg) {
  CellClasses cc;
  cc.lo = class_catalog(cell.lo, cfg.params, cell.low_regime(), cell.high_regime());
  cc.hi = class_catalog(cell.hi, cfg.params, cell.low_regime(), cell.high_regime());
  return cc;
}

// Relaxed upper-bound rows for one (class, event).
std::vector<Variant> relaxed_rows(const ClassSpec& lo, const ClassSpec& hi, int e, const LpGenConfig& cfg, bool far3,
                                  const RatioCell& cell) {
  std::vector<Variant> rows;
  for (std::size_t k = 0; k < lo.events[e].size(); ++k) {
    const auto vl = bound_variants(lo.events[e][k], cfg, far3);
    const auto vh = bound_variants(hi.events[e][k], cfg, far3);
    for (std::size_t v = 0; v < vl.size(); ++v) {
      Lin f;
      if (!relax_max(vl[v].form, vh[v].form, f)) continue;
      rows.push_back({f, vl[v].label + " over [" + fmt(cell.lo) + ", " + fmt(cell.hi) + "]"});
    }
  }
  return rows;
}

}  // namespace

LpCensus lp_census(const LpGenConfig& cfg) {
  cfg.validate();
  LpCensus c;
  const auto cells = ratio_cells(cfg.grid);
  c.cells = static_cast<int>(cells.size());
  const int splits = cfg.q == 3 ? 2 : 1;
  const int per_class_vars = cfg.q == 3 ? 4 : 3;
  const int per_class_structural = (cfg.q == 3 ? 2 : 1);  // closeness rows, and ordering rows
  for (const auto& cell : cells) {
    const auto cc = cell_classes(cell, cfg);
    for (std::size_t i = 0; i < cc.lo.size(); ++i) {
      if (!keep_class(cc.lo[i].name, cfg)) continue;
      for (int sp = 0; sp < splits; ++sp) {
        ++c.class_cells;
        c.variables += per_class_vars;
        c.families["closeness"] += per_class_structural;
        c.families["ordering"] += per_class_structural;
        if (cfg.triangle) c.families["triangle"] += 2;
        for (int e = 0; e < 4; ++e) {
          if (!event_enabled(e, cell, cfg)) continue;
          const int rows = static_cast<int>(relaxed_rows(cc.lo[i], cc.hi[i], e, cfg, sp == 1, cell).size());
          if (rows == 0) continue;
          c.variables += 1;
          c.families["upper-bound"] += rows;
        }
      }
    }
    for (int e = 0; e < 4; ++e)
      if (event_enabled(e, cell, cfg)) c.families["swap-sum"] += 1;
    c.variables += (cfg.simple ? 1 : 0) + (cfg.tree ? 1 : 0);
  }
  c.families["normalization"] = 1;
  c.families["total-change"] = (cfg.simple ? 1 : 0) + (cfg.tree ? 1 : 0);
  for (const auto& [f, n] : c.families) c.constraints += n;
  return c;
}

LPModel build_lp(const LpGenConfig& cfg) {
  cfg.validate();
  LPModel m;
  m.name = "phi" + std::to_string(cfg.q) + "-grid" + std::to_string(cfg.grid);
  const double a2 = cfg.params.alpha2, a3 = cfg.params.alpha3;
  const auto cells = ratio_cells(cfg.grid);
  std::vector<int> all_x, all_s, all_t;

  auto add = [&](const std::string& name, const std::string& family, const std::string& why,
                 std::vector<LPTerm> terms, LPSense sense, double rhs, int block) {
    std::vector<LPTerm> kept;
    for (const auto& t : terms)
      if (t.coef != 0.0) kept.push_back(t);
    m.constraints.push_back({name, family, why, kept, sense, rhs, block});
  };

  for (int ci = 0; ci < static_cast<int>(cells.size()); ++ci) {
    const RatioCell& cell = cells[ci];
    const std::string tag = cell_tag(ci);
    const auto cc = cell_classes(cell, cfg);
    const int s = cfg.simple ? m.add_var("s." + tag, true, ci) : -1;
    const int t = cfg.tree ? m.add_var("t." + tag, true, ci) : -1;
    if (s >= 0) all_s.push_back(s);
    if (t >= 0) all_t.push_back(t);
    std::array<std::vector<int>, 4> deltas;
    const int splits = cfg.q == 3 ? 2 : 1;
    for (std::size_t k = 0; k < cc.lo.size(); ++k) {
      const ClassSpec& cls = cc.lo[k];
      if (!keep_class(cls.name, cfg)) continue;
      for (int sp = 0; sp < splits; ++sp) {
        const bool far3 = sp == 1;
        const std::string cname = cls.name + (cfg.q == 3 ? (far3 ? ".f3" : ".n3") : "");
        const std::string sfx = "." + cname + "." + tag;
        const int x = m.add_var("x" + sfx, false, ci);
        const int y1 = m.add_var("y1" + sfx, false, ci);
        const int y2 = m.add_var("y2" + sfx, false, ci);
        const int y3 = cfg.q == 3 ? m.add_var("y3" + sfx, false, ci) : -1;
        all_x.push_back(x);
        m.objective.push_back({y1, 1.0});
        if (cls.far)
          add("close" + sfx, "closeness", "far: d2 >= alpha2 d1", {{y1, a2}, {y2, -1}}, LPSense::LE, 0, ci);
        else
          add("close" + sfx, "closeness", "close: d2 <= alpha2 d1", {{y2, 1}, {y1, -a2}}, LPSense::LE, 0, ci);
        add("order" + sfx, "ordering", "d1 <= d2", {{y1, 1}, {y2, -1}}, LPSense::LE, 0, ci);
        if (cfg.q == 3) {
          if (far3)
            add("close3" + sfx, "closeness", "far3: d3 >= alpha3 d1", {{y1, a3}, {y3, -1}}, LPSense::LE, 0, ci);
          else
            add("close3" + sfx, "closeness", "close3: d3 <= alpha3 d1", {{y3, 1}, {y1, -a3}}, LPSense::LE, 0, ci);
          add("order3" + sfx, "ordering", "d2 <= d3", {{y2, 1}, {y3, -1}}, LPSense::LE, 0, ci);
        }
        if (cfg.triangle) {
          const std::string range = " over [" + fmt(cell.lo) + ", " + fmt(cell.hi) + "]";
          if (cls.letter == Letter::A || cls.letter == Letter::C) {
            add("tri1" + sfx, "triangle", "rho d2 >= d1 - (1+rho) d*" + range,
                {{y1, 1}, {x, -(1 + cell.hi)}, {y2, -cell.hi}}, LPSense::LE, 0, ci);
            add("tri2" + sfx, "triangle", "rho d2 <= (1+rho) d* + d1" + range,
                {{y2, cell.lo}, {x, -(1 + cell.hi)}, {y1, -1}}, LPSense::LE, 0, ci);
          } else {
            add("tri1" + sfx, "triangle", "d2 <= 2 d* + d1", {{y2, 1}, {x, -2}, {y1, -1}}, LPSense::LE, 0, ci);
            add("tri2" + sfx, "triangle", "d2 <= d* + rho (d* + d1)" + range,
                {{y2, 1}, {x, -(1 + cell.hi)}, {y1, -cell.hi}}, LPSense::LE, 0, ci);
          }
        }
        for (int e = 0; e < 4; ++e) {
          if (!event_enabled(e, cell, cfg)) continue;
          const auto rows = relaxed_rows(cc.lo[k], cc.hi[k], e, cfg, far3, cell);
          if (rows.empty()) continue;
          const int d = m.add_var(std::string("d.") + kEventNames[e] + sfx, true, ci);
          deltas[e].push_back(d);
          for (std::size_t r = 0; r < rows.size(); ++r) {
            const Lin& f = rows[r].form;
            std::vector<LPTerm> terms{{d, 1.0}, {x, -f.x}, {y1, -f.y1}, {y2, -f.y2}};
            if (y3 >= 0) terms.push_back({y3, -f.y3});
            add("ub." + std::string(kEventNames[e]) + "." + std::to_string(r) + sfx, "upper-bound", rows[r].label, terms,
                LPSense::LE, 0, ci);
          }
        }
      }
    }
    for (int e = 0; e < 4; ++e) {
      if (!event_enabled(e, cell, cfg)) continue;
      const int lhs = e < 2 ? s : t;
      std::vector<LPTerm> terms{{lhs, 1.0}};
      for (int d : deltas[e]) terms.push_back({d, -1.0});
      add("sum." + std::string(kEventNames[e]) + "." + tag, "swap-sum",
          std::string(e < 2 ? "s" : "t") + " <= total change on " + kEventNames[e], terms, LPSense::LE, 0, ci);
    }
  }
  {
    std::vector<LPTerm> terms;
    for (int x : all_x) terms.push_back({x, 1.0});
    add("norm", "normalization", "sum of d* = 1", terms, LPSense::EQ, 1.0, -1);
  }
  if (cfg.simple) {
    std::vector<LPTerm> terms;
    for (int v : all_s) terms.push_back({v, 1.0});
    add("total.s", "total-change", "simple swaps do not improve", terms, LPSense::GE, 0, -1);
  }
  if (cfg.tree) {
    std::vector<LPTerm> terms;
    for (int v : all_t) terms.push_back({v, 1.0});
    add("total.t", "total-change", "tree swaps do not improve", terms, LPSense::GE, 0, -1);
  }
  return m;
}

// ---------------------------------------------------------------- LP text

namespace {

void emit_terms(std::ostringstream& os, const LPModel& m, const std::vector<LPTerm>& terms) {
  int on_line = 0;
  for (const auto& t : terms) {
    if (on_line == 4) {
      os << "\n   ";
      on_line = 0;
    }
    os << (t.coef < 0 ? " - " : " + ") << fmt(std::fabs(t.coef)) << ' ' << m.vars[t.var].name;
    ++on_line;
  }
  if (terms.empty()) os << " 0 " << (m.vars.empty() ? std::string("x") : m.vars[0].name);
}

}  // namespace

std::string emit_lp(const LPModel& m) {
  std::ostringstream os;
  os << "\\ nols analysis LP\n";
  os << "\\@model " << m.name << '\n';
  for (const auto& v : m.vars) os << "\\@var " << v.name << ' ' << v.block << '\n';
  os << "Maximize\n obj:";
  emit_terms(os, m, m.objective);
  os << "\nSubject To\n";
  for (const auto& c : m.constraints) {
    os << "\\@row " << c.name << ' ' << c.block << ' ' << c.family << ' ' << c.derivation << '\n';
    os << ' ' << c.name << ':';
    emit_terms(os, m, c.terms);
    os << ' ' << to_string(c.sense) << ' ' << fmt(c.rhs) << '\n';
  }
  os << "Bounds\n";
  for (const auto& v : m.vars)
    if (v.free) os << ' ' << v.name << " free\n";
  os << "End\n";
  return os.str();
}

LPModel parse_lp(const std::string& text) {
  LPModel m;
  std::unordered_map<std::string, int> index;
  struct Meta {
    int block;
    std::string family, derivation;
  };
  std::unordered_map<std::string, Meta> row_meta;
  auto var_of = [&](const std::string& name) {
    auto it = index.find(name);
    if (it != index.end()) return it->second;
    const int id = m.add_var(name);
    index[name] = id;
    return id;
  };
  enum class Section { None, Objective, Rows, Bounds, Done } sec = Section::None;
  std::vector<std::string> tokens;  // pending statement tokens
  auto fail = [](const std::string& why) { throw std::runtime_error("LP parse error: " + why); };
  auto parse_number = [&](const std::string& s) {
    try {
      std::size_t pos = 0;
      const double v = std::stod(s, &pos);
      if (pos != s.size()) fail("bad number '" + s + "'");
      return v;
    } catch (const std::logic_error&) {
      fail("bad number '" + s + "'");
    }
    return 0.0;
  };
  // tokens: name: (+|-) coef var ... [sense rhs]
  auto parse_terms = [&](std::size_t begin, std::size_t end) {
    std::vector<LPTerm> terms;
    std::size_t i = begin;
    while (i < end) {
      double sign = 1.0;
      if (tokens[i] == "+" || tokens[i] == "-") {
        sign = tokens[i] == "-" ? -1.0 : 1.0;
        ++i;
      }
      if (i + 1 >= end + 1) fail("dangling sign");
      double coef = 1.0;
      if (i < end && (std::isdigit(static_cast<unsigned char>(tokens[i][0])) || tokens[i][0] == '.')) {
        coef = parse_number(tokens[i]);
        ++i;
      }
      if (i >= end) fail("missing variable");
      const int v = var_of(tokens[i]);
      ++i;
      terms.push_back({v, sign * coef});
    }
    return terms;
  };
  auto flush_objective = [&]() {
    if (tokens.empty()) return;
    if (tokens[0] != "obj:") fail("objective must be named obj");
    auto terms = parse_terms(1, tokens.size());
    for (const auto& t : terms)
      if (t.coef != 0.0) m.objective.push_back(t);
    tokens.clear();
  };
  auto flush_row = [&]() {
    if (tokens.empty()) return;
    if (tokens.size() < 4 || tokens[0].back() != ':') fail("malformed row");
    const std::string name = tokens[0].substr(0, tokens[0].size() - 1);
    const std::string& sense = tokens[tokens.size() - 2];
    LPConstraint c;
    c.name = name;
    if (sense == "<=") c.sense = LPSense::LE;
    else if (sense == ">=") c.sense = LPSense::GE;
    else if (sense == "=") c.sense = LPSense::EQ;
    else fail("bad sense in row " + name);
    c.rhs = parse_number(tokens.back());
    c.terms = parse_terms(1, tokens.size() - 2);
    if (c.terms.size() == 1 && c.terms[0].coef == 0.0) c.terms.clear();
    auto it = row_meta.find(name);
    if (it != row_meta.end()) {
      c.block = it->second.block;
      c.family = it->second.family;
      c.derivation = it->second.derivation;
    }
    m.constraints.push_back(std::move(c));
    tokens.clear();
  };
  auto flush = [&]() {
    if (sec == Section::Objective) flush_objective();
    else if (sec == Section::Rows) flush_row();
  };
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.rfind("\\@model ", 0) == 0) {
      m.name = line.substr(8);
      continue;
    }
    if (line.rfind("\\@var ", 0) == 0) {
      std::istringstream ls(line.substr(6));
      std::string name;
      int block = -1;
      if (!(ls >> name >> block)) fail("bad var metadata");
      const int id = var_of(name);
      m.vars[id].block = block;
      continue;
    }
    if (line.rfind("\\@row ", 0) == 0) {
      std::istringstream ls(line.substr(6));
      std::string name, family;
      int block = -1;
      if (!(ls >> name >> block >> family)) fail("bad row metadata");
      std::string rest;
      std::getline(ls, rest);
      if (!rest.empty() && rest[0] == ' ') rest.erase(0, 1);
      row_meta[name] = {block, family, rest};
      continue;
    }
    if (!line.empty() && line[0] == '\\') continue;
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    std::string lower = first;
    std::transform(lower.begin(), lower.end(), lower.begin(), ::tolower);
    if (lower == "maximize" || lower == "maximise" || lower == "max") {
      sec = Section::Objective;
      continue;
    }
    if (lower == "minimize" || lower == "minimise" || lower == "min") fail("only maximization models are supported");
    if (lower == "subject" || lower == "st" || lower == "s.t.") {
      flush();
      sec = Section::Rows;
      continue;
    }
    if (lower == "bounds") {
      flush();
      sec = Section::Bounds;
      continue;
    }
    if (lower == "end") {
      flush();
      sec = Section::Done;
      continue;
    }
    std::vector<std::string> toks{first};
    for (std::string tk; ls >> tk;) toks.push_back(tk);
    if (sec == Section::Objective) {
      tokens.insert(tokens.end(), toks.begin(), toks.end());
    } else if (sec == Section::Rows) {
      if (toks[0].back() == ':') flush_row();
      tokens.insert(tokens.end(), toks.begin(), toks.end());
    } else if (sec == Section::Bounds) {
      if (toks.size() == 2 && (toks[1] == "free" || toks[1] == "Free" || toks[1] == "FREE")) {
        m.vars[var_of(toks[0])].free = true;
      } else {
        fail("unsupported bound line: " + line);
      }
    } else {
      fail("content outside a section: " + line);
    }
  }
  if (sec != Section::Done) fail("missing End");
  return m;
}

}  // namespace nols
