#pragma once

// Experiment configuration: a JSON document with a fixed schema. Parsing is
// strict (unknown keys and wrong types are errors) and happens before any
// computation.

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <nlohmann/json.hpp>

#include "zerores/bounds.hpp"
#include "zerores/model.hpp"
#include "zerores/threebody.hpp"
#include "zerores/twobody.hpp"

namespace zerores::cli {

inline const std::vector<std::string> kExperiments{
    "twobody-threshold", "mu-curve", "wk-decomp",      "lemma3",
    "green-bound",       "zabyv",    "threebody-scan", "spreading"};

bool is_experiment(const std::string& name);

struct Issue {
  enum class Level { error, warning };
  Level level = Level::error;
  std::string path;  // JSON pointer-like location, e.g. /twobody/nodes
  std::string message;
};

std::string format_issue(const Issue& issue);

struct PotentialSpec {
  Shape shape = Shape::gaussian;
  double depth = 1.0;
  double range = 1.0;
  PairPotential make() const { return {shape, depth, range, 1.0}; }
};

struct LogRange {
  double lo = 0.0;
  double hi = 0.0;
  int count = 0;
  std::vector<double> values() const;
};

struct TwoBodySpec {
  Pair pair = Pair::p12;
  int nodes = 400;
  double r_max = 0.0;  // 0 selects 20 / b2
  double tolerance = 1e-6;
  double gap_min = 0.05;
  std::vector<double> k_samples;
  FitWindow fit_window;
  std::vector<double> wk_samples{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<double> binding_excess{1e-3};
};

struct ZabyvSpec {
  std::vector<double> r0{1.0};
  std::vector<double> delta{0.5};
  std::int64_t samples = 100000;
};

struct BoundsSpec {
  Profile profile;
  double eps0 = 1.0;
  std::vector<double> z_samples;
  std::vector<double> xi;
  ZabyvSpec zabyv;
};

/// How the Theta grid is given: absolute values, fractions of Theta_cr, or
/// approach steps j with Theta = Theta_0 + (Theta_cr - Theta_0) 2^{-j}.
struct ThetaGrid {
  enum class Mode { values, fractions, approach };
  Mode mode = Mode::approach;
  std::vector<double> entries{0, 1, 2, 3, 4, 6, 8, 10, 12};
};

struct CouplingValue {
  bool fraction = false;  // relative to the pair's critical coupling
  double value = 1.0;
};

struct ThreeBodySpec {
  CouplingValue lambda;
  ThetaGrid theta_grid;
  double tol_bind = 1e-6;
  std::vector<double> radii{5.0};
  int nodes = 400;
  BasisRecipe basis = BasisRecipe::standard();
  bool prune = false;
  double prune_cutoff = 1e-12;
};

struct ExperimentConfig {
  std::vector<std::string> experiments;  // optional, used by validate
  std::string output_dir = "out";
  std::uint64_t seed = 1;
  MassConfig masses = reduced_masses(1.0, 1.0, 1.0);
  std::optional<std::array<PotentialSpec, 3>> potentials;
  std::optional<TwoBodySpec> twobody;
  std::optional<BoundsSpec> bounds;
  std::optional<ThreeBodySpec> threebody;
  nlohmann::json source;  // the document as read, for hashing

  PairPotentials pair_potentials() const;
};

struct ParseResult {
  std::optional<ExperimentConfig> config;  // set when there are no errors
  std::vector<Issue> issues;
  bool ok() const;
};

/// Schema and range checks. Blocks required by `experiment` (or by every entry
/// of the document's "experiments" list when empty) must be present.
ParseResult parse_config(const nlohmann::json& doc, const std::string& experiment = "");

/// Reads and parses a file; unreadable files or malformed JSON are reported as issues.
ParseResult load_config(const std::string& path, const std::string& experiment = "");

/// FNV-1a 64-bit over the compact serialization with sorted keys.
std::uint64_t config_hash(const nlohmann::json& doc);
std::string hex64(std::uint64_t value);

}  // namespace zerores::cli
