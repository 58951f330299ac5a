// nols: command-line front end for the solver, gap instances, swap analysis,
// LP generation and benchmarks.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"
#include "nols/client_analysis.hpp"
#include "nols/instance_gen.hpp"
#include "nols/local_search.hpp"
#include "nols/lp_gen.hpp"
#include "nols/metric.hpp"
#include "nols/potential.hpp"
#include "nols/swap_analysis.hpp"

using nlohmann::ordered_json;
namespace fs = std::filesystem;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitFailed = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct Global {
  std::uint64_t seed = 1;
  int threads = 0;
  std::string out;
  std::string log_level = "warn";
};

void log(const Global& g, const std::string& level, const std::string& msg) {
  static const std::vector<std::string> order{"debug", "info", "warn", "error"};
  auto rank = [&](const std::string& l) {
    for (std::size_t i = 0; i < order.size(); ++i)
      if (order[i] == l) return static_cast<int>(i);
    return 2;
  };
  if (rank(level) >= rank(g.log_level)) std::cerr << "[" << level << "] " << msg << '\n';
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw UsageError("cannot write " + path);
  os << text;
}

void write_json(const Global& g, const ordered_json& j) { write_text(g.out, j.dump(2) + "\n"); }

ordered_json global_echo(const Global& g) {
  return {{"seed", g.seed}, {"threads", g.threads}, {"out", g.out}, {"log_level", g.log_level}};
}

nols::InstanceFormat parse_format(const std::string& f) {
  if (f == "auto") return nols::InstanceFormat::Auto;
  if (f == "matrix") return nols::InstanceFormat::Matrix;
  if (f == "orlib") return nols::InstanceFormat::OrLibrary;
  if (f == "csv") return nols::InstanceFormat::EuclideanCsv;
  throw UsageError("unknown instance format: " + f);
}

nols::MetricInstance load(const std::string& path, const std::string& format) {
  if (!fs::exists(path)) throw UsageError("instance not found: " + path);
  return nols::load_instance({path, parse_format(format)});
}

// Facility list from a result JSON (open_facilities) or a bare JSON array.
std::vector<int> read_facilities(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw UsageError("cannot read " + path);
  nlohmann::json j;
  try {
    is >> j;
  } catch (const nlohmann::json::exception& e) {
    throw UsageError(path + ": " + e.what());
  }
  const nlohmann::json& arr = j.is_array() ? j : j.value("open_facilities", nlohmann::json::array());
  if (!arr.is_array() || arr.empty()) throw UsageError(path + ": no facility list");
  return arr.get<std::vector<int>>();
}

// ------------------------------------------------------------------ solve

struct SolveArgs {
  std::string instance, format = "auto", objective = "phi", pivot = "first";
  int k = 0, p = 1, q = 2;
  double alpha = 3.0, beta = 0.2, alpha3 = 0, beta3 = 0, delta = 1e-4;
  long max_iter = 100000;
  bool prune = false, verify = false, trace = false;
};

nols::PotentialParams make_params(int q, double alpha, double beta, double alpha3, double beta3) {
  nols::PotentialParams p = q == 3 ? nols::PotentialParams::phi3(alpha, beta, alpha3 > 0 ? alpha3 : alpha, beta3)
                                   : nols::PotentialParams::phi2(alpha, beta);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return p;
}

ordered_json params_json(const nols::PotentialParams& p) {
  ordered_json j{{"q", p.q}, {"alpha", p.alpha2}, {"beta", p.beta2}};
  if (p.q == 3) {
    j["alpha3"] = p.alpha3;
    j["beta3"] = p.beta3;
  }
  return j;
}

int cmd_solve(const Global& g, const SolveArgs& a) {
  const auto inst = load(a.instance, a.format);
  nols::SearchConfig cfg;
  cfg.k = a.k > 0 ? a.k : inst.suggested_k.value_or(0);
  if (cfg.k <= 0) throw UsageError("--k is required for this instance");
  cfg.p = a.p;
  if (a.objective == "phi") cfg.objective = nols::Objective::Potential;
  else if (a.objective == "cost") cfg.objective = nols::Objective::Cost;
  else throw UsageError("--objective must be phi or cost");
  cfg.params = make_params(a.q, a.alpha, a.beta, a.alpha3, a.beta3);
  cfg.delta = a.delta;
  cfg.pivot = a.pivot == "best" ? nols::Pivot::BestImprovement : nols::Pivot::FirstImprovement;
  if (a.pivot != "best" && a.pivot != "first") throw UsageError("--pivot must be first or best");
  cfg.seed = g.seed;
  cfg.max_iterations = a.max_iter;
  cfg.prune = a.prune;
  cfg.post_check = a.verify;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  log(g, "info", "solving " + a.instance);
  const auto res = nols::run(inst, cfg);
  ordered_json out;
  out["config"] = {{"command", "solve"},
                   {"instance", a.instance},
                   {"k", cfg.k},
                   {"p", cfg.p},
                   {"objective", a.objective},
                   {"params", params_json(cfg.params)},
                   {"delta", cfg.delta},
                   {"pivot", a.pivot},
                   {"max_iterations", cfg.max_iterations},
                   {"prune", cfg.prune},
                   {"global", global_echo(g)}};
  out["cost"] = res.cost;
  out["potential"] = res.potential;
  out["open_facilities"] = res.open;
  out["iterations"] = res.trace.iterations.size();
  out["termination"] = res.trace.termination;
  out["threshold"] = res.trace.threshold;
  if (a.trace) {
    ordered_json tr = ordered_json::array();
    for (const auto& it : res.trace.iterations)
      tr.push_back({{"P", it.P},
                    {"Q", it.Q},
                    {"phi_before", it.phi_before},
                    {"phi_after", it.phi_after},
                    {"cost_before", it.cost_before},
                    {"cost_after", it.cost_after}});
    out["trace"] = tr;
  }
  int code = kExitOk;
  if (res.trace.post) {
    const auto& r = *res.trace.post;
    out["local_optimality"] = {{"min_delta", r.min_delta},
                               {"argmin_P", r.argmin_P},
                               {"argmin_Q", r.argmin_Q},
                               {"swaps_checked", r.swaps_checked},
                               {"certified", r.certified()}};
    if (!r.certified()) code = kExitFailed;
  }
  write_json(g, out);
  return code;
}

// ------------------------------------------------------------------ gap

struct GapArgs {
  std::string family = "auto", d = "auto", emit;
  int k = 6, r = 1, p = 1;
  double alpha = 3.0, beta = 0.2;
  bool verify = false;
};

int cmd_gap(const Global& g, const GapArgs& a) {
  if (a.k < 2 || a.r < 0 || a.p < 1) throw UsageError("need k >= 2, r >= 0, p >= 1");
  const auto params = make_params(2, a.alpha, a.beta, 0, 0);
  const auto pred = nols::predicted_gap(a.alpha, a.beta, a.k, a.r, a.p);
  nols::GapFamily fam = pred.family;
  if (a.family == "biclique") fam = nols::GapFamily::Biclique;
  else if (a.family == "double") fam = nols::GapFamily::DoubleBiclique;
  else if (a.family != "auto") throw UsageError("--family must be biclique, double or auto");
  double d = pred.d;
  if (a.d != "auto") {
    try {
      d = std::stod(a.d);
    } catch (const std::exception&) {
      throw UsageError("--d must be a number or auto");
    }
  }
  if (!(d > 0)) throw UsageError("--d must be positive");
  const auto gi = fam == nols::GapFamily::Biclique ? nols::biclique(a.k, a.r, d) : nols::double_biclique(a.k, a.r, d);
  const double ratio = nols::kmed_cost(gi.instance, gi.local) / nols::kmed_cost(gi.instance, gi.opt);
  ordered_json out;
  out["config"] = {{"command", "gap"}, {"family", nols::to_string(fam)}, {"k", a.k}, {"r", a.r},
                   {"p", a.p},          {"d", a.d},                       {"alpha", a.alpha}, {"beta", a.beta},
                   {"global", global_echo(g)}};
  out["family"] = nols::to_string(fam);
  out["d"] = d;
  out["case"] = pred.case_label;
  out["closed_form"] = pred.closed_form;
  out["eps_prime"] = pred.eps;
  out["sufficient"] = pred.sufficient;
  out["ratio"] = ratio;
  out["local"] = gi.local;
  out["opt"] = gi.opt;
  out["clients"] = gi.instance.num_clients();
  int code = kExitOk;
  if (a.verify) {
    const auto mr = nols::verify_metric(gi.instance, nols::VerifyMode::Exhaustive);
    const auto lo = nols::verify_local_optimality(gi.instance, gi.local, a.p, nols::Objective::Potential, params);
    out["metric_valid"] = mr.ok();
    out["local_optimality"] = {{"p", a.p},
                               {"min_delta", lo.min_delta},
                               {"argmin_P", lo.argmin_P},
                               {"argmin_Q", lo.argmin_Q},
                               {"swaps_checked", lo.swaps_checked},
                               {"certified", lo.certified()}};
    if (!mr.ok() || !lo.certified()) code = kExitFailed;
  }
  if (!a.emit.empty()) write_text(a.emit, nols::to_matrix_text(gi.instance));
  write_json(g, out);
  return code;
}

// ------------------------------------------------------------------ analyze

struct AnalyzeArgs {
  std::string instance, format = "auto", local, opt, kind = "random";
  int opt_k = 0, samples = 100;
  double eps = 1.0 / 3.0, alpha = 3.0, beta = 0.2;
  std::string balance = "desk";
};

nols::AnalysisContext analysis_context(const AnalyzeArgs& a, ordered_json& echo) {
  const auto inst = load(a.instance, a.format);
  if (a.local.empty()) throw UsageError("--local is required");
  const auto F = read_facilities(a.local);
  std::vector<int> Fs;
  if (!a.opt.empty()) {
    Fs = read_facilities(a.opt);
  } else if (a.opt_k > 0) {
    Fs = nols::brute_force_opt(inst, a.opt_k).open;
    echo["opt_from_brute_force_k"] = a.opt_k;
  } else {
    throw UsageError("one of --opt or --opt-k is required");
  }
  const int nf = static_cast<int>(inst.num_facilities());
  for (int f : F)
    if (f < 0 || f >= nf) throw UsageError("local facility out of range: " + std::to_string(f));
  for (int f : Fs)
    if (f < 0 || f >= nf) throw UsageError("optimal facility out of range: " + std::to_string(f));
  if (F.size() < 2) throw UsageError("the local solution needs at least 2 facilities");
  echo["local"] = F;
  echo["opt"] = Fs;
  return nols::make_context(inst, F, Fs);
}

nols::SwapGenConfig gen_config(const AnalyzeArgs& a) {
  nols::SwapGenConfig c;
  c.eps = a.eps;
  if (a.balance == "desk") c.balance = nols::BalanceMode::Desk;
  else if (a.balance == "strict") c.balance = nols::BalanceMode::Strict;
  else throw UsageError("--balance must be desk or strict");
  try {
    c.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  return c;
}

int cmd_swapgen(const Global& g, const AnalyzeArgs& a) {
  ordered_json echo{{"command", "analyze swapgen"}, {"instance", a.instance}, {"kind", a.kind},
                    {"eps", a.eps},                 {"samples", a.samples},   {"balance", a.balance}};
  const auto ctx = analysis_context(a, echo);
  echo["global"] = global_echo(g);
  const auto base = nols::base_mapping(ctx);
  const auto cfg = gen_config(a);
  nols::Rng rng(g.seed);
  ordered_json sets = ordered_json::array();
  long issues = 0, infeasible = 0;
  for (int s = 0; s < a.samples; ++s) {
    nols::Rng local = rng.split(static_cast<std::uint64_t>(s));
    ordered_json js;
    js["sample"] = s;
    try {
      nols::SwapSet set;
      if (a.kind == "simple") set = nols::generate_simple(ctx, base, cfg, local);
      else if (a.kind == "tree") set = nols::generate_tree(ctx, base, cfg, local);
      else if (a.kind == "random") set = nols::generate_swaps(ctx, base, cfg, local);
      else throw UsageError("--kind must be simple, tree or random");
      js["kind"] = nols::to_string(set.kind);
      js["t_d"] = set.t_d;
      js["t_h"] = set.t_h;
      js["heavy"] = set.heavy;
      js["candidates"] = set.candidates;
      js["heavy_opts"] = set.heavy_opts;
      js["deleted_edges"] = set.deleted.size();
      ordered_json sw = ordered_json::array();
      for (const auto& w : set.swaps) sw.push_back({{"P", w.P}, {"Q", w.Q}});
      js["swaps"] = sw;
      ordered_json iss = ordered_json::array();
      for (const auto& i : nols::validate_swap_set(set, ctx.nl, ctx.no)) iss.push_back(i.what);
      issues += static_cast<long>(iss.size());
      js["issues"] = iss;
    } catch (const nols::InfeasibleError& e) {
      ++infeasible;
      js["infeasible"] = e.what();
    }
    sets.push_back(js);
  }
  ordered_json out;
  out["config"] = echo;
  out["samples"] = a.samples;
  out["infeasible"] = infeasible;
  out["issues"] = issues;
  out["swap_sets"] = sets;
  write_json(g, out);
  return issues == 0 ? kExitOk : kExitFailed;
}

ordered_json witness_json(const nols::BoundWitness& w) {
  return {{"client", w.client}, {"sample", w.sample}, {"type", w.type},   {"event", w.event},
          {"bound_label", w.bound_label}, {"causes", w.causes}, {"realized", w.realized},
          {"bound", w.bound},   {"dstar", w.dstar},   {"d1", w.d1},       {"d2", w.d2},
          {"rho", w.rho},       {"kind", w.kind}};
}

int cmd_bounds(const Global& g, const AnalyzeArgs& a) {
  ordered_json echo{{"command", "analyze bounds"}, {"instance", a.instance}, {"eps", a.eps},
                    {"samples", a.samples},        {"alpha", a.alpha},       {"beta", a.beta}};
  const auto ctx = analysis_context(a, echo);
  echo["global"] = global_echo(g);
  nols::BoundsConfig cfg;
  cfg.gen = gen_config(a);
  cfg.params = make_params(2, a.alpha, a.beta, 0, 0);
  cfg.samples = a.samples;
  cfg.seed = g.seed;
  const auto rep = nols::verify_amenable_bounds(ctx, cfg);
  ordered_json out;
  out["config"] = echo;
  out["samples"] = rep.samples;
  out["infeasible_samples"] = rep.infeasible;
  out["evaluations"] = rep.evaluations;
  out["amenable"] = rep.amenable;
  out["defiant_rate"] = rep.defiant_rate();
  out["type_counts"] = rep.type_counts;
  out["event_counts"] = rep.event_counts;
  out["defiant_causes"] = rep.defiant_causes;
  out["worst_margin"] = rep.worst_margin;
  std::map<std::string, long> per_type;
  for (const auto& w : rep.violations) ++per_type[w.type];
  out["violations_per_type"] = per_type;
  auto list = [](const std::vector<nols::BoundWitness>& v) {
    ordered_json arr = ordered_json::array();
    for (const auto& w : v) arr.push_back(witness_json(w));
    return arr;
  };
  out["violations"] = list(rep.violations);
  out["crude_violations"] = list(rep.crude_violations);
  out["implication_failures"] = list(rep.implication_failures);
  ordered_json agg = ordered_json::array();
  for (const auto& r : rep.aggregate)
    agg.push_back({{"client", r.client}, {"type", r.type}, {"mean", r.mean}, {"bound", r.bound}, {"slack", r.slack},
                   {"within", r.within}});
  out["aggregate"] = agg;
  out["aggregate_exceeded"] = rep.aggregate_exceeded;
  write_json(g, out);
  return rep.ok() ? kExitOk : kExitFailed;
}

// ------------------------------------------------------------------ lpgen

struct LpArgs {
  int q = 2, grid = 101;
  double alpha = 3.0, beta = 0.2, alpha3 = 0, beta3 = 0;
  std::string emit, method = "auto";
  bool solve = false, no_simple = false, no_tree = false, no_triangle = false, no_branches = false;
  std::vector<std::string> classes;
};

int cmd_lpgen(const Global& g, const LpArgs& a) {
  nols::LpGenConfig cfg;
  cfg.q = a.q;
  cfg.grid = a.grid;
  cfg.params = make_params(a.q, a.alpha, a.beta, a.alpha3, a.beta3);
  cfg.simple = !a.no_simple;
  cfg.tree = !a.no_tree;
  cfg.triangle = !a.no_triangle;
  cfg.branches = !a.no_branches;
  cfg.classes = a.classes;
  try {
    cfg.validate();
  } catch (const std::invalid_argument& e) {
    throw UsageError(e.what());
  }
  const auto model = nols::build_lp(cfg);
  const auto census = nols::lp_census(cfg);
  ordered_json out;
  out["config"] = {{"command", "lpgen"},      {"q", a.q},
                   {"grid", a.grid},          {"params", params_json(cfg.params)},
                   {"simple", cfg.simple},    {"tree", cfg.tree},
                   {"triangle", cfg.triangle}, {"branches", cfg.branches},
                   {"classes", cfg.classes},  {"emit", a.emit},
                   {"solve", a.solve},        {"method", a.method},
                   {"global", global_echo(g)}};
  out["model"] = {{"name", model.name},
                  {"variables", model.vars.size()},
                  {"constraints", model.constraints.size()},
                  {"nonzeros", model.nonzeros()},
                  {"families", model.family_counts()}};
  out["census"] = {{"cells", census.cells},
                   {"class_cells", census.class_cells},
                   {"variables", census.variables},
                   {"constraints", census.constraints},
                   {"families", census.families},
                   {"matches_model", census.variables == static_cast<int>(model.vars.size()) &&
                                         census.constraints == static_cast<int>(model.constraints.size()) &&
                                         census.families == model.family_counts()}};
  if (!a.emit.empty()) write_text(a.emit, nols::emit_lp(model));
  int code = kExitOk;
  if (a.solve) {
    nols::SolveOptions opt;
    opt.method = a.method;
    const auto sol = nols::solve_lp(model, opt);
    out["solution"] = {{"status", nols::to_string(sol.status)},
                       {"objective", sol.objective},
                       {"method", sol.method},
                       {"iterations", sol.iterations},
                       {"pricing_gap", sol.pricing_gap},
                       {"message", sol.message}};
    if (sol.status == nols::LPStatus::Unbounded) {
      ordered_json ray;
      for (std::size_t j = 0; j < sol.ray.size(); ++j)
        if (std::fabs(sol.ray[j]) > 1e-12) ray[model.vars[j].name] = sol.ray[j];
      out["solution"]["ray"] = ray;
    }
    if (sol.status == nols::LPStatus::Optimal) {
      // Mass by class, summed over cells.
      std::map<std::string, double> mass;
      for (std::size_t j = 0; j < model.vars.size(); ++j) {
        const auto& n = model.vars[j].name;
        if (n.rfind("x.", 0) != 0 || sol.values[j] < 1e-9) continue;
        const auto cls = n.substr(2, n.rfind('.') - 2);
        mass[cls] += sol.values[j];
      }
      out["solution"]["class_mass"] = mass;
    } else {
      code = kExitFailed;
    }
  }
  write_json(g, out);
  return code;
}

// ------------------------------------------------------------------ bench

struct BenchArgs {
  std::string suite = "random", dir, objective = "both";
  bool k_from_file = false;
  int k = 5, p = 1, count = 10, n_clients = 30, n_facilities = 20;
  double alpha = 3.0, beta = 0.2;
  double opt_guard = 1e7;
};

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.10g", v);
  return buf;
}

int cmd_bench(const Global& g, const BenchArgs& a) {
  struct Item {
    std::string name;
    nols::MetricInstance inst;
  };
  std::vector<Item> items;
  if (a.suite == "pmed") {
    if (a.dir.empty() || !fs::is_directory(a.dir)) throw UsageError("--dir must name a directory of OR-Library files");
    std::vector<fs::path> files;
    for (const auto& e : fs::directory_iterator(a.dir))
      if (e.is_regular_file()) files.push_back(e.path());
    std::sort(files.begin(), files.end());
    for (const auto& f : files)
      items.push_back({f.filename().string(), nols::load_instance({f.string(), nols::InstanceFormat::OrLibrary})});
  } else if (a.suite == "random") {
    for (int i = 0; i < a.count; ++i)
      items.push_back({"random-" + std::to_string(i),
                       nols::random_euclidean(a.n_clients, a.n_facilities, 2, g.seed + static_cast<std::uint64_t>(i))});
  } else {
    throw UsageError("--suite must be pmed or random");
  }
  std::vector<std::pair<std::string, nols::Objective>> objectives;
  if (a.objective == "phi" || a.objective == "both") objectives.emplace_back("phi", nols::Objective::Potential);
  if (a.objective == "cost" || a.objective == "both") objectives.emplace_back("cost", nols::Objective::Cost);
  if (objectives.empty()) throw UsageError("--objective must be phi, cost or both");
  const auto params = make_params(2, a.alpha, a.beta, 0, 0);

  std::ostringstream os;
  ordered_json echo{{"command", "bench"}, {"suite", a.suite}, {"dir", a.dir},     {"objective", a.objective},
                    {"k_from_file", a.k_from_file}, {"k", a.k}, {"p", a.p}, {"alpha", a.alpha},
                    {"beta", a.beta},  {"count", a.count}, {"global", global_echo(g)}};
  os << "# config: " << echo.dump() << '\n';
  os << "instance,k,p,objective,cost,potential,opt,ratio,seconds,seed\n";
  for (const auto& it : items) {
    int k = a.k;
    if (a.k_from_file) {
      if (!it.inst.suggested_k) throw UsageError(it.name + " records no k");
      k = *it.inst.suggested_k;
    }
    if (k < 1 || k > static_cast<int>(it.inst.num_facilities())) throw UsageError(it.name + ": k out of range");
    std::optional<double> opt;
    if (static_cast<double>(nols::binomial(it.inst.num_facilities(), static_cast<std::uint64_t>(k))) <= a.opt_guard)
      opt = nols::brute_force_opt(it.inst, k, static_cast<std::uint64_t>(a.opt_guard)).cost;
    for (const auto& [oname, obj] : objectives) {
      nols::SearchConfig cfg;
      cfg.k = k;
      cfg.p = a.p;
      cfg.objective = obj;
      cfg.params = params;
      cfg.seed = g.seed;
      const auto t0 = std::chrono::steady_clock::now();
      const auto res = nols::run(it.inst, cfg);
      const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      os << it.name << ',' << k << ',' << a.p << ',' << oname << ',' << csv_num(res.cost) << ','
         << csv_num(nols::potential(it.inst, res.open, params)) << ',' << (opt ? csv_num(*opt) : "") << ','
         << (opt && *opt > 0 ? csv_num(res.cost / *opt) : "") << ',' << csv_num(secs) << ',' << g.seed << '\n';
    }
  }
  write_text(g.out, os.str());
  return kExitOk;
}

void add_global(CLI::App& app, Global& g) {
  app.add_option("--seed", g.seed, "random seed")->capture_default_str();
  app.add_option("--threads", g.threads, "worker cap (evaluation is single-threaded)")->capture_default_str();
  app.add_option("--out", g.out, "output path (default stdout)");
  app.add_option("--log-level", g.log_level, "debug|info|warn|error")
      ->check(CLI::IsMember({"debug", "info", "warn", "error"}))
      ->capture_default_str();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"nols: non-oblivious local search for k-median"};
  app.require_subcommand(1);
  Global g;

  SolveArgs sa;
  auto* solve = app.add_subcommand("solve", "run local search on an instance");
  solve->add_option("--instance", sa.instance, "instance file")->required();
  solve->add_option("--format", sa.format, "auto|matrix|orlib|csv")->capture_default_str();
  solve->add_option("--k", sa.k, "number of facilities (default: from file)");
  solve->add_option("--p", sa.p, "swap size")->capture_default_str();
  solve->add_option("--q", sa.q, "potential depth (2 or 3)")->capture_default_str();
  solve->add_option("--objective", sa.objective, "phi|cost")->capture_default_str();
  solve->add_option("--alpha", sa.alpha)->capture_default_str();
  solve->add_option("--beta", sa.beta)->capture_default_str();
  solve->add_option("--alpha3", sa.alpha3, "q=3 only; default alpha");
  solve->add_option("--beta3", sa.beta3, "q=3 only");
  solve->add_option("--delta", sa.delta, "relative improvement threshold")->capture_default_str();
  solve->add_option("--pivot", sa.pivot, "first|best")->capture_default_str();
  solve->add_option("--max-iter", sa.max_iter)->capture_default_str();
  solve->add_flag("--prune", sa.prune, "restrict candidate facilities");
  solve->add_flag("--verify", sa.verify, "certify local optimality of the result");
  solve->add_flag("--trace", sa.trace, "include the iteration trace");
  add_global(*solve, g);

  GapArgs ga;
  auto* gap = app.add_subcommand("gap", "build a locality-gap instance");
  gap->add_option("--family", ga.family, "biclique|double|auto")->capture_default_str();
  gap->add_option("--k", ga.k)->capture_default_str();
  gap->add_option("--r", ga.r)->capture_default_str();
  gap->add_option("--p", ga.p, "swap size certified by --verify")->capture_default_str();
  gap->add_option("--d", ga.d, "distance or auto")->capture_default_str();
  gap->add_option("--alpha", ga.alpha)->capture_default_str();
  gap->add_option("--beta", ga.beta)->capture_default_str();
  gap->add_option("--emit", ga.emit, "write the instance as a matrix file");
  gap->add_flag("--verify", ga.verify, "check the metric and certify local optimality");
  add_global(*gap, g);

  AnalyzeArgs aa;
  auto* analyze = app.add_subcommand("analyze", "swap generation and per-client bounds");
  analyze->require_subcommand(1);
  auto add_analysis = [&](CLI::App* c) {
    c->add_option("--instance", aa.instance)->required();
    c->add_option("--format", aa.format)->capture_default_str();
    c->add_option("--local", aa.local, "local solution JSON")->required();
    c->add_option("--opt", aa.opt, "reference solution JSON");
    c->add_option("--opt-k", aa.opt_k, "brute-force the reference with this many facilities");
    c->add_option("--eps", aa.eps)->capture_default_str();
    c->add_option("--samples", aa.samples)->capture_default_str();
    c->add_option("--balance", aa.balance, "desk|strict")->capture_default_str();
    add_global(*c, g);
  };
  auto* swapgen = analyze->add_subcommand("swapgen", "sample swap sets");
  add_analysis(swapgen);
  swapgen->add_option("--kind", aa.kind, "simple|tree|random")->capture_default_str();
  auto* bounds = analyze->add_subcommand("bounds", "verify per-client bounds");
  add_analysis(bounds);
  bounds->add_option("--alpha", aa.alpha)->capture_default_str();
  bounds->add_option("--beta", aa.beta)->capture_default_str();

  LpArgs la;
  auto* lpgen = app.add_subcommand("lpgen", "generate (and solve) the analysis LP");
  lpgen->add_option("--q", la.q)->capture_default_str();
  lpgen->add_option("--grid", la.grid)->capture_default_str();
  lpgen->add_option("--alpha", la.alpha)->capture_default_str();
  lpgen->add_option("--beta", la.beta)->capture_default_str();
  lpgen->add_option("--alpha3", la.alpha3, "q=3 only; default alpha");
  lpgen->add_option("--beta3", la.beta3, "q=3 only");
  lpgen->add_option("--emit", la.emit, "write the model in LP format");
  lpgen->add_flag("--solve", la.solve, "solve with the embedded simplex");
  lpgen->add_option("--method", la.method, "auto|dense|decompose")->capture_default_str();
  lpgen->add_option("--class", la.classes, "keep only classes with this name prefix (repeatable)");
  lpgen->add_flag("--no-simple", la.no_simple);
  lpgen->add_flag("--no-tree", la.no_tree);
  lpgen->add_flag("--no-triangle", la.no_triangle);
  lpgen->add_flag("--no-branches", la.no_branches);
  add_global(*lpgen, g);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "compare objectives over a suite (CSV)");
  bench->add_option("--suite", ba.suite, "pmed|random")->capture_default_str();
  bench->add_option("--dir", ba.dir, "directory of OR-Library files (pmed suite)");
  bench->add_flag("--k-from-file", ba.k_from_file, "use the p recorded in each file as k");
  bench->add_option("--k", ba.k)->capture_default_str();
  bench->add_option("--p", ba.p)->capture_default_str();
  bench->add_option("--objective", ba.objective, "phi|cost|both")->capture_default_str();
  bench->add_option("--alpha", ba.alpha)->capture_default_str();
  bench->add_option("--beta", ba.beta)->capture_default_str();
  bench->add_option("--count", ba.count, "random suite size")->capture_default_str();
  bench->add_option("--clients", ba.n_clients, "random suite clients")->capture_default_str();
  bench->add_option("--facilities", ba.n_facilities, "random suite facilities")->capture_default_str();
  bench->add_option("--opt-guard", ba.opt_guard, "largest C(n,k) solved exactly")->capture_default_str();
  add_global(*bench, g);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitUsage;
  }
  try {
    if (solve->parsed()) return cmd_solve(g, sa);
    if (gap->parsed()) return cmd_gap(g, ga);
    if (swapgen->parsed()) return cmd_swapgen(g, aa);
    if (bounds->parsed()) return cmd_bounds(g, aa);
    if (lpgen->parsed()) return cmd_lpgen(g, la);
    if (bench->parsed()) return cmd_bench(g, ba);
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nols::ParseError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nols::SizeError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const nols::ValidationError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "failed: " << e.what() << '\n';
    return kExitFailed;
  }
  return kExitUsage;
}
