#include "nols/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>

#include "nols/rng.hpp"

namespace nols {

std::string to_string(Representation r) {
  switch (r) {
    case Representation::ExplicitMatrix: return "explicit-matrix";
    case Representation::EuclideanPoints: return "euclidean-points";
    case Representation::ShortestPathGraph: return "shortest-path-graph";
  }
  return "unknown";
}

MetricInstance MetricInstance::from_matrix(std::vector<double> matrix, std::size_t n,
                                           std::vector<int> client_locations,
                                           std::vector<int> facility_locations, Representation rep) {
  if (matrix.size() != n * n) throw std::invalid_argument("matrix size does not match n*n");
  for (int v : client_locations)
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("client location out of range");
  for (int v : facility_locations)
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("facility location out of range");
  auto s = std::make_shared<Storage>();
  s->rep = rep;
  s->n = n;
  s->matrix = std::move(matrix);
  MetricInstance inst;
  inst.store_ = std::move(s);
  inst.clients_ = std::move(client_locations);
  inst.facilities_ = std::move(facility_locations);
  return inst;
}

MetricInstance MetricInstance::from_points(std::vector<std::vector<double>> coords,
                                           std::vector<int> client_locations,
                                           std::vector<int> facility_locations) {
  const std::size_t n = coords.size();
  if (n > 0) {
    const std::size_t dim = coords[0].size();
    for (const auto& p : coords)
      if (p.size() != dim) throw std::invalid_argument("inconsistent point dimension");
  }
  for (int v : client_locations)
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("client location out of range");
  for (int v : facility_locations)
    if (v < 0 || static_cast<std::size_t>(v) >= n) throw std::invalid_argument("facility location out of range");
  auto s = std::make_shared<Storage>();
  s->rep = Representation::EuclideanPoints;
  s->n = n;
  s->coords = std::move(coords);
  MetricInstance inst;
  inst.store_ = std::move(s);
  inst.clients_ = std::move(client_locations);
  inst.facilities_ = std::move(facility_locations);
  return inst;
}

MetricInstance MetricInstance::with_facilities(std::vector<int> facility_locations) const {
  for (int v : facility_locations)
    if (v < 0 || static_cast<std::size_t>(v) >= num_locations())
      throw std::invalid_argument("facility location out of range");
  MetricInstance inst = *this;
  inst.facilities_ = std::move(facility_locations);
  return inst;
}

std::size_t MetricInstance::num_locations() const { return store_ ? store_->n : 0; }

Representation MetricInstance::representation() const {
  return store_ ? store_->rep : Representation::ExplicitMatrix;
}

double MetricInstance::loc_dist(int a, int b) const {
  const Storage& s = *store_;
  if (s.rep == Representation::EuclideanPoints) {
    if (a == b) return 0.0;
    const auto& p = s.coords[static_cast<std::size_t>(a)];
    const auto& q = s.coords[static_cast<std::size_t>(b)];
    double acc = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      const double t = p[i] - q[i];
      acc += t * t;
    }
    return std::sqrt(acc);
  }
  return s.matrix[static_cast<std::size_t>(a) * s.n + static_cast<std::size_t>(b)];
}

void floyd_warshall(std::vector<double>& m, std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t i = 0; i < n; ++i) {
      const double dik = m[i * n + k];
      if (!std::isfinite(dik)) continue;
      double* row = &m[i * n];
      const double* krow = &m[k * n];
      for (std::size_t j = 0; j < n; ++j) {
        const double cand = dik + krow[j];
        if (cand < row[j]) row[j] = cand;
      }
    }
  }
}

namespace {

std::vector<std::string> split_lines(const std::string& text) {
  std::vector<std::string> lines;
  std::string cur;
  std::istringstream in(text);
  while (std::getline(in, cur)) {
    if (!cur.empty() && cur.back() == '\r') cur.pop_back();
    lines.push_back(cur);
  }
  return lines;
}

bool blank_or_comment(const std::string& line) {
  auto pos = line.find_first_not_of(" \t");
  return pos == std::string::npos || line[pos] == '#';
}

std::vector<std::string> tokens(const std::string& line) {
  std::vector<std::string> out;
  std::istringstream in(line);
  std::string t;
  while (in >> t) out.push_back(t);
  return out;
}

double parse_number(const std::string& tok, const std::string& name, std::size_t line) {
  try {
    std::size_t used = 0;
    double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(name, line, "expected a number, got '" + tok + "'");
  }
}

long parse_integer(const std::string& tok, const std::string& name, std::size_t line) {
  try {
    std::size_t used = 0;
    long v = std::stol(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(name, line, "expected an integer, got '" + tok + "'");
  }
}

std::vector<int> iota_vec(std::size_t n) {
  std::vector<int> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<int>(i);
  return v;
}

void validate_matrix(const std::vector<double>& m, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) {
    if (std::fabs(m[i * n + i]) > kDistTol)
      throw ValidationError("nonzero diagonal at " + std::to_string(i));
    for (std::size_t j = 0; j < n; ++j) {
      const double v = m[i * n + j];
      if (!std::isfinite(v))
        throw ValidationError("infinite distance between " + std::to_string(i) + " and " + std::to_string(j));
      if (v < -kDistTol)
        throw ValidationError("negative distance between " + std::to_string(i) + " and " + std::to_string(j));
      if (std::fabs(v - m[j * n + i]) > kDistTol)
        throw ValidationError("asymmetric distance between " + std::to_string(i) + " and " + std::to_string(j));
    }
  }
}

}  // namespace

MetricInstance parse_matrix(const std::string& text, const std::string& name) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  auto next_content = [&]() -> bool {
    while (li < lines.size() && blank_or_comment(lines[li])) ++li;
    return li < lines.size();
  };
  if (!next_content()) throw ParseError(name, lines.size() + 1, "missing point count");
  auto head = tokens(lines[li]);
  if (head.size() != 1) throw ParseError(name, li + 1, "first line must hold the point count");
  const long n = parse_integer(head[0], name, li + 1);
  if (n <= 0) throw ParseError(name, li + 1, "point count must be positive");
  ++li;
  const std::size_t N = static_cast<std::size_t>(n);
  std::vector<double> m(N * N);
  for (std::size_t r = 0; r < N; ++r) {
    if (!next_content()) throw ParseError(name, lines.size() + 1, "expected row " + std::to_string(r + 1));
    auto tk = tokens(lines[li]);
    if (tk.size() != N)
      throw ParseError(name, li + 1, "row has " + std::to_string(tk.size()) + " entries, expected " + std::to_string(N));
    for (std::size_t c = 0; c < N; ++c) m[r * N + c] = parse_number(tk[c], name, li + 1);
    ++li;
  }
  if (next_content()) throw ParseError(name, li + 1, "unexpected trailing content");
  validate_matrix(m, N);
  return MetricInstance::from_matrix(std::move(m), N, iota_vec(N), iota_vec(N), Representation::ExplicitMatrix);
}

MetricInstance parse_orlib(const std::string& text, const std::string& name) {
  const auto lines = split_lines(text);
  std::size_t li = 0;
  auto next_content = [&]() -> bool {
    while (li < lines.size() && blank_or_comment(lines[li])) ++li;
    return li < lines.size();
  };
  if (!next_content()) throw ParseError(name, lines.size() + 1, "missing header 'n m p'");
  auto head = tokens(lines[li]);
  if (head.size() != 3) throw ParseError(name, li + 1, "header must be 'n m p'");
  const long n = parse_integer(head[0], name, li + 1);
  const long m = parse_integer(head[1], name, li + 1);
  const long p = parse_integer(head[2], name, li + 1);
  if (n <= 0 || m < 0 || p <= 0 || p > n) throw ParseError(name, li + 1, "invalid header values");
  ++li;
  const std::size_t N = static_cast<std::size_t>(n);
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> w(N * N, inf);
  for (std::size_t i = 0; i < N; ++i) w[i * N + i] = 0.0;
  // Repeated edges: the last occurrence wins.
  std::vector<double> edge(N * N, -1.0);
  for (long e = 0; e < m; ++e) {
    if (!next_content()) throw ParseError(name, lines.size() + 1, "expected edge " + std::to_string(e + 1));
    auto tk = tokens(lines[li]);
    if (tk.size() != 3) throw ParseError(name, li + 1, "edge line must be 'u v w'");
    const long u = parse_integer(tk[0], name, li + 1);
    const long v = parse_integer(tk[1], name, li + 1);
    const double c = parse_number(tk[2], name, li + 1);
    if (u < 1 || u > n || v < 1 || v > n) throw ParseError(name, li + 1, "vertex index out of range");
    if (c < 0) throw ParseError(name, li + 1, "negative edge weight");
    const std::size_t a = static_cast<std::size_t>(u - 1), b = static_cast<std::size_t>(v - 1);
    edge[a * N + b] = c;
    edge[b * N + a] = c;
    ++li;
  }
  if (next_content()) throw ParseError(name, li + 1, "unexpected trailing content");
  for (std::size_t i = 0; i < N * N; ++i)
    if (edge[i] >= 0 && i / N != i % N) w[i] = edge[i];
  floyd_warshall(w, N);
  validate_matrix(w, N);
  auto inst = MetricInstance::from_matrix(std::move(w), N, iota_vec(N), iota_vec(N),
                                          Representation::ShortestPathGraph);
  inst.suggested_k = static_cast<int>(p);
  return inst;
}

MetricInstance parse_euclidean_csv(const std::string& text, const std::string& name) {
  const auto lines = split_lines(text);
  std::vector<std::vector<double>> coords;
  std::vector<int> clients, facilities;
  std::size_t dim = 0;
  for (std::size_t li = 0; li < lines.size(); ++li) {
    const std::string& line = lines[li];
    if (blank_or_comment(line)) continue;
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
      auto b = cell.find_first_not_of(" \t");
      auto e = cell.find_last_not_of(" \t");
      cells.push_back(b == std::string::npos ? "" : cell.substr(b, e - b + 1));
    }
    if (cells.empty()) continue;
    if (coords.empty() && clients.empty() && facilities.empty() && cells[0] == "role") continue;
    if (cells.size() < 2) throw ParseError(name, li + 1, "expected 'role,x1,...,xd'");
    const std::string& role = cells[0];
    if (role != "client" && role != "facility" && role != "both")
      throw ParseError(name, li + 1, "unknown role '" + role + "'");
    std::vector<double> p;
    for (std::size_t i = 1; i < cells.size(); ++i) p.push_back(parse_number(cells[i], name, li + 1));
    if (dim == 0) dim = p.size();
    if (p.size() != dim) throw ParseError(name, li + 1, "dimension mismatch");
    const int loc = static_cast<int>(coords.size());
    coords.push_back(std::move(p));
    if (role != "facility") clients.push_back(loc);
    if (role != "client") facilities.push_back(loc);
  }
  if (coords.empty()) throw ParseError(name, lines.size() + 1, "no points");
  if (clients.empty()) throw ValidationError(name + ": no clients");
  if (facilities.empty()) throw ValidationError(name + ": no facilities");
  return MetricInstance::from_points(std::move(coords), std::move(clients), std::move(facilities));
}

MetricInstance load_instance(const InstanceSource& source) {
  std::ifstream in(source.path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open instance file '" + source.path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  const std::string text = buf.str();
  InstanceFormat fmt = source.format;
  if (fmt == InstanceFormat::Auto) {
    const auto& p = source.path;
    if (p.size() >= 4 && p.substr(p.size() - 4) == ".csv") {
      fmt = InstanceFormat::EuclideanCsv;
    } else {
      fmt = InstanceFormat::Matrix;
      for (const auto& line : split_lines(text)) {
        if (blank_or_comment(line)) continue;
        if (tokens(line).size() == 3) fmt = InstanceFormat::OrLibrary;
        break;
      }
    }
  }
  switch (fmt) {
    case InstanceFormat::Matrix: return parse_matrix(text, source.path);
    case InstanceFormat::OrLibrary: return parse_orlib(text, source.path);
    case InstanceFormat::EuclideanCsv: return parse_euclidean_csv(text, source.path);
    case InstanceFormat::Auto: break;
  }
  throw std::logic_error("unreachable format");
}

std::string to_matrix_text(const MetricInstance& inst) {
  const int n = static_cast<int>(inst.num_locations());
  std::ostringstream out;
  out.precision(17);
  out << n << "\n";
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) out << (j ? " " : "") << inst.loc_dist(i, j);
    out << "\n";
  }
  return out.str();
}

std::vector<std::pair<int, double>> nearest_from_location(const MetricInstance& inst, int location,
                                                          const std::vector<int>& F, int j) {
  if (j < 1 || static_cast<std::size_t>(j) > F.size())
    throw std::invalid_argument("nearest_facilities: need 1 <= j <= |F|");
  std::vector<std::pair<int, double>> all;
  all.reserve(F.size());
  for (int f : F) all.emplace_back(f, inst.loc_dist(location, inst.facility_location(f)));
  std::sort(all.begin(), all.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second < b.second : a.first < b.first;
  });
  // Distances within tolerance of a run's first element count as ties.
  for (std::size_t s = 0; s < all.size();) {
    std::size_t e = s + 1;
    while (e < all.size() && all[e].second - all[s].second <= kDistTol) ++e;
    if (e - s > 1)
      std::sort(all.begin() + static_cast<long>(s), all.begin() + static_cast<long>(e),
                [](const auto& a, const auto& b) { return a.first < b.first; });
    s = e;
  }
  all.resize(static_cast<std::size_t>(j));
  return all;
}

std::vector<std::pair<int, double>> nearest_facilities(const MetricInstance& inst, int client,
                                                       const std::vector<int>& F, int j) {
  return nearest_from_location(inst, inst.client_location(client), F, j);
}

VerifyMode default_verify_mode(const MetricInstance& inst) {
  return inst.num_locations() <= 200 ? VerifyMode::Exhaustive : VerifyMode::Sampled;
}

MetricReport verify_metric(const MetricInstance& inst, VerifyMode mode, std::uint64_t trials,
                           std::uint64_t seed) {
  MetricReport rep;
  const int n = static_cast<int>(inst.num_locations());
  rep.points = static_cast<std::size_t>(n);
  rep.mode = mode;
  using K = MetricViolation::Kind;
  for (int a = 0; a < n; ++a) {
    const double daa = inst.loc_dist(a, a);
    if (std::fabs(daa) > kDistTol) rep.violations.push_back({K::Diagonal, a, a, -1, daa, 0.0});
    for (int b = a + 1; b < n; ++b) {
      const double ab = inst.loc_dist(a, b), ba = inst.loc_dist(b, a);
      if (ab < -kDistTol) rep.violations.push_back({K::Negative, a, b, -1, ab, 0.0});
      if (std::fabs(ab - ba) > kDistTol) rep.violations.push_back({K::Asymmetric, a, b, -1, ab, ba});
    }
  }
  auto check = [&](int a, int b, int c) {
    const double lhs = inst.loc_dist(a, c);
    const double rhs = inst.loc_dist(a, b) + inst.loc_dist(b, c);
    ++rep.triples_checked;
    if (lhs > rhs + kDistTol) rep.violations.push_back({K::Triangle, a, b, c, lhs, rhs});
  };
  if (mode == VerifyMode::Exhaustive) {
    for (int a = 0; a < n; ++a)
      for (int c = a + 1; c < n; ++c)
        for (int b = 0; b < n; ++b)
          if (b != a && b != c) check(a, b, c);
  } else if (n >= 3) {
    Rng rng(seed);
    for (std::uint64_t t = 0; t < trials; ++t) {
      int a = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int b = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      int c = static_cast<int>(rng.below(static_cast<std::uint64_t>(n)));
      if (a == b || b == c || a == c) continue;
      check(a, b, c);
    }
  }
  return rep;
}

}  // namespace nols
