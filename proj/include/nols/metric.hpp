#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace nols {

inline constexpr double kDistTol = 1e-9;

enum class Representation { ExplicitMatrix, EuclideanPoints, ShortestPathGraph };

std::string to_string(Representation r);

struct ParseError : std::runtime_error {
  ParseError(const std::string& file, std::size_t line, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

struct ValidationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Finite metric over "locations". Clients and facilities are separate index
// spaces, each entry mapped to a location; co-located identifiers have
// distance 0. Immutable after construction.
class MetricInstance {
 public:
  MetricInstance() = default;

  static MetricInstance from_matrix(std::vector<double> matrix, std::size_t n_locations,
                                    std::vector<int> client_locations,
                                    std::vector<int> facility_locations,
                                    Representation rep = Representation::ExplicitMatrix);

  static MetricInstance from_points(std::vector<std::vector<double>> coords,
                                    std::vector<int> client_locations,
                                    std::vector<int> facility_locations);

  // Same metric and clients, different facility identifiers (used to keep
  // local and optimal copies disjoint).
  MetricInstance with_facilities(std::vector<int> facility_locations) const;

  std::size_t num_clients() const { return clients_.size(); }
  std::size_t num_facilities() const { return facilities_.size(); }
  std::size_t num_locations() const;
  Representation representation() const;

  int client_location(int c) const { return clients_[static_cast<std::size_t>(c)]; }
  int facility_location(int f) const { return facilities_[static_cast<std::size_t>(f)]; }
  const std::vector<int>& client_locations() const { return clients_; }
  const std::vector<int>& facility_locations() const { return facilities_; }

  double loc_dist(int a, int b) const;
  double cf(int c, int f) const { return loc_dist(client_location(c), facility_location(f)); }
  double ff(int f, int g) const { return loc_dist(facility_location(f), facility_location(g)); }

  // Suggested k recorded by some formats (OR-Library p), if any.
  std::optional<int> suggested_k;

 private:
  struct Storage {
    Representation rep = Representation::ExplicitMatrix;
    std::size_t n = 0;
    std::vector<double> matrix;               // n*n when explicit
    std::vector<std::vector<double>> coords;  // when euclidean
  };
  std::shared_ptr<const Storage> store_;
  std::vector<int> clients_;
  std::vector<int> facilities_;
};

enum class InstanceFormat { Auto, Matrix, OrLibrary, EuclideanCsv };

struct InstanceSource {
  std::string path;
  InstanceFormat format = InstanceFormat::Auto;
};

MetricInstance load_instance(const InstanceSource& source);
MetricInstance parse_matrix(const std::string& text, const std::string& name = "<matrix>");
MetricInstance parse_orlib(const std::string& text, const std::string& name = "<orlib>");
MetricInstance parse_euclidean_csv(const std::string& text, const std::string& name = "<csv>");

// All-pairs shortest paths in place over an n*n matrix (inf = no edge).
void floyd_warshall(std::vector<double>& m, std::size_t n);

// Dense matrix text for an instance's location metric.
std::string to_matrix_text(const MetricInstance& inst);

// Ordered nearest facilities among F: ascending distance, ties (within
// kDistTol) by ascending facility index.
std::vector<std::pair<int, double>> nearest_facilities(const MetricInstance& inst, int client,
                                                       const std::vector<int>& F, int j);

// Same ordering for an arbitrary source location against facility ids.
std::vector<std::pair<int, double>> nearest_from_location(const MetricInstance& inst, int location,
                                                          const std::vector<int>& F, int j);

enum class VerifyMode { Exhaustive, Sampled };

struct MetricViolation {
  enum class Kind { Diagonal, Negative, Asymmetric, Triangle } kind;
  int a = -1, b = -1, c = -1;  // locations; triangle means d(a,c) > d(a,b) + d(b,c)
  double lhs = 0, rhs = 0;
};

struct MetricReport {
  std::size_t points = 0;
  std::uint64_t triples_checked = 0;
  VerifyMode mode = VerifyMode::Exhaustive;
  std::vector<MetricViolation> violations;
  bool ok() const { return violations.empty(); }
};

// Exhaustive checks every location triple; Sampled draws `trials` random
// triples. Pair axioms (diagonal, sign, symmetry) are always checked in full.
MetricReport verify_metric(const MetricInstance& inst, VerifyMode mode, std::uint64_t trials = 100000,
                           std::uint64_t seed = 1);

// Exhaustive up to 200 locations, sampled beyond.
VerifyMode default_verify_mode(const MetricInstance& inst);

}  // namespace nols
