#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "zerores/cli/config.hpp"

namespace zerores::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  std::string out_dir;  // empty: the config's output_dir
  int threads = 1;
  std::optional<std::uint64_t> seed;
};

/// One CSV file: header plus rows, already formatted.
struct Table {
  std::string name;  // file stem
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;

  void add(std::vector<std::string> row);
  std::string csv() const;
};

/// 17 significant digits, enough to read back the same double.
std::string fmt(double value);
std::string fmt(std::int64_t value);

/// Runs the computation only; throws InputError or NumericalError.
std::vector<Table> compute(const std::string& experiment, const ExperimentConfig& config,
                           const RunOptions& options, std::ostream& log);

/// Full command: parse, compute, write CSVs and manifests. Returns the exit code.
int run(const std::string& experiment, const std::string& config_path, const RunOptions& options,
        std::ostream& out, std::ostream& err);

/// Lists every issue; returns 0 when there are no errors, 2 otherwise.
int validate(const std::string& config_path, const std::string& experiment, std::ostream& out);

}  // namespace zerores::cli
