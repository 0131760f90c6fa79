#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "zerores/cli/config.hpp"
#include "zerores/cli/runner.hpp"

using namespace zerores::cli;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("zerores-test-" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string write_config(const fs::path& dir, const json& doc) {
  const fs::path p = dir / "config.json";
  std::ofstream(p) << doc.dump(2);
  return p.string();
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

json square_well_config() {
  const json well = {{"shape", "square_well"}, {"depth", 1.0}, {"range", 1.0}};
  return {{"masses", {{"m1", 1.0}, {"m2", 1.0}, {"m3", 1.0}}},
          {"potentials", {{"12", well}, {"13", well}, {"23", well}}},
          {"twobody", {{"nodes", 400}, {"binding_excess", {1e-3}}}}};
}

json bounds_config() {
  return {{"bounds",
           {{"z_samples", {{"lo", 1e-5}, {"hi", 1e-1}, {"count", 5}}},
            {"xi", {{"lo", 0.1}, {"hi", 20.0}, {"count", 50}}},
            {"zabyv", {{"r0", {1.0, 2.0}}, {"delta", {0.5}}, {"samples", 20000}}}}}};
}

std::vector<std::string> csv_lines(const fs::path& p) {
  std::ifstream in(p);
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  return lines;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string cell; std::getline(ss, cell, ',');) out.push_back(cell);
  return out;
}

int run_quiet(const std::string& exp, const std::string& cfg, const RunOptions& o) {
  std::ostringstream out, err;
  return run(exp, cfg, o, out, err);
}

}  // namespace

TEST(Cli, SquareWellThreshold) {
  const fs::path dir = scratch("threshold");
  const std::string cfg = write_config(dir, square_well_config());
  RunOptions o;
  o.out_dir = (dir / "out").string();
  ASSERT_EQ(run_quiet("twobody-threshold", cfg, o), kExitOk);
  const auto lines = csv_lines(dir / "out" / "threshold.csv");
  ASSERT_EQ(lines.size(), 2u);
  const auto head = split(lines[0]);
  const auto row = split(lines[1]);
  const auto col = std::find(head.begin(), head.end(), "lambda_cr") - head.begin();
  EXPECT_NEAR(std::stod(row[col]), oracle::pi * oracle::pi / 4, 1e-4);
  EXPECT_TRUE(fs::exists(dir / "out" / "threshold.manifest.json"));
  EXPECT_TRUE(fs::exists(dir / "out" / "binding.csv"));
}

TEST(Cli, NegativeMassRejectedWithoutOutput) {
  const fs::path dir = scratch("negative");
  json doc = square_well_config();
  doc["masses"]["m2"] = -1.0;
  const std::string cfg = write_config(dir, doc);
  RunOptions o;
  o.out_dir = (dir / "out").string();
  EXPECT_EQ(run_quiet("twobody-threshold", cfg, o), kExitInput);
  EXPECT_FALSE(fs::exists(dir / "out"));
}

TEST(Cli, UnreadableConfig) {
  const fs::path dir = scratch("unreadable");
  RunOptions o;
  o.out_dir = (dir / "out").string();
  EXPECT_EQ(run_quiet("lemma3", (dir / "missing.json").string(), o), kExitInput);
  std::ofstream(dir / "broken.json") << "{ \"bounds\": ";
  EXPECT_EQ(run_quiet("lemma3", (dir / "broken.json").string(), o), kExitInput);
  std::ostringstream report;
  EXPECT_EQ(validate((dir / "missing.json").string(), "", report), kExitInput);
  EXPECT_FALSE(report.str().empty());
}

TEST(Cli, UnknownKeyRejected) {
  const fs::path dir = scratch("unknown");
  json doc = bounds_config();
  doc["bounds"]["epsilon"] = 2.0;
  std::ostringstream report;
  EXPECT_EQ(validate(write_config(dir, doc), "lemma3", report), kExitInput);
  EXPECT_NE(report.str().find("epsilon"), std::string::npos);
}

TEST(Cli, NumericalFailureExitCode) {
  const fs::path dir = scratch("numerical");
  json doc = square_well_config();
  doc["twobody"]["nodes"] = 60;
  doc["twobody"]["wk_samples"] = {1e-15};
  const std::string cfg = write_config(dir, doc);
  RunOptions o;
  o.out_dir = (dir / "out").string();
  std::ostringstream out, err;
  EXPECT_EQ(run("wk-decomp", cfg, o, out, err), kExitNumerical);
  EXPECT_NE(err.str().find("smallest trustworthy k"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "out" / "wk_decomp.csv"));
}

TEST(Cli, RepeatedRunByteIdentical) {
  const fs::path dir = scratch("repeat");
  const std::string cfg = write_config(dir, bounds_config());
  for (const char* exp : {"lemma3", "zabyv"}) {
    RunOptions a, b;
    a.out_dir = (dir / "a").string();
    b.out_dir = (dir / "b").string();
    ASSERT_EQ(run_quiet(exp, cfg, a), kExitOk);
    ASSERT_EQ(run_quiet(exp, cfg, b), kExitOk);
  }
  for (const char* f : {"lemma3.csv", "lemma3_fit.csv", "zabyv.csv"}) {
    EXPECT_EQ(slurp(dir / "a" / f), slurp(dir / "b" / f)) << f;
  }
}

TEST(Cli, SeedOverride) {
  const fs::path dir = scratch("seed");
  const std::string cfg = write_config(dir, bounds_config());
  RunOptions a, b;
  a.out_dir = (dir / "a").string();
  b.out_dir = (dir / "b").string();
  b.seed = 99;
  ASSERT_EQ(run_quiet("zabyv", cfg, a), kExitOk);
  ASSERT_EQ(run_quiet("zabyv", cfg, b), kExitOk);
  EXPECT_NE(slurp(dir / "a" / "zabyv.csv"), slurp(dir / "b" / "zabyv.csv"));
  const json m = json::parse(slurp(dir / "b" / "zabyv.manifest.json"));
  EXPECT_EQ(m.at("seed").get<std::uint64_t>(), 99u);
}

TEST(Validate, ShippedConfigsClean) {
  for (const char* name : {"twobody.json", "bounds.json", "threebody.json"}) {
    std::ostringstream report;
    EXPECT_EQ(validate(std::string(ZERORES_CONFIG_DIR) + "/" + name, "", report), kExitOk);
    EXPECT_EQ(report.str(), "") << name;
  }
}

TEST(Validate, ThetaGridRangeWarning) {
  const fs::path dir = scratch("theta-range");
  const json g = {{"shape", "gaussian"}, {"depth", 1.0}, {"range", 1.0}};
  json doc = {{"potentials", {{"12", g}, {"13", g}, {"23", g}}},
              {"threebody", {{"lambda", 1.0}, {"theta_grid", {{"fractions", {0.5, 1.0, 2.0}}}}}}};
  std::ostringstream report;
  EXPECT_EQ(validate(write_config(dir, doc), "threebody-scan", report), kExitOk);
  EXPECT_NE(report.str().find("warning"), std::string::npos);
  EXPECT_NE(report.str().find("theta_grid"), std::string::npos);

  doc["threebody"]["theta_grid"] = {{"fractions", {-0.5, 1.0}}};
  std::ostringstream bad;
  EXPECT_EQ(validate(write_config(dir, doc), "threebody-scan", bad), kExitInput);
}

TEST(Validate, MissingBlockNamed) {
  const fs::path dir = scratch("missing-block");
  const json doc = {{"threebody", {{"lambda", 1.0}}}};
  std::ostringstream report;
  EXPECT_EQ(validate(write_config(dir, doc), "threebody-scan", report), kExitInput);
  EXPECT_NE(report.str().find("potentials"), std::string::npos);
}

TEST(Validate, ReportsEveryIssue) {
  const fs::path dir = scratch("many");
  json doc = square_well_config();
  doc["masses"]["m1"] = 0.0;
  doc["twobody"]["nodes"] = -3;
  doc["twobody"]["colour"] = "blue";
  std::ostringstream report;
  EXPECT_EQ(validate(write_config(dir, doc), "twobody-threshold", report), kExitInput);
  const std::string text = report.str();
  EXPECT_NE(text.find("m1"), std::string::npos);
  EXPECT_NE(text.find("nodes"), std::string::npos);
  EXPECT_NE(text.find("colour"), std::string::npos);
}

TEST(CliInvariant, ThreadCountDoesNotChangeOutput) {
  const fs::path dir = scratch("threads");
  json doc = square_well_config();
  doc["twobody"]["k_samples"] = {1e-3, 2e-3, 5e-3, 1e-2, 0.1};
  const std::string cfg = write_config(dir, doc);
  const std::string bcfg = (dir / "bounds.json").string();
  std::ofstream(bcfg) << bounds_config().dump();
  for (int threads : {1, 4}) {
    RunOptions o;
    o.out_dir = (dir / std::to_string(threads)).string();
    o.threads = threads;
    ASSERT_EQ(run_quiet("mu-curve", cfg, o), kExitOk);
    ASSERT_EQ(run_quiet("green-bound", bcfg, o), kExitOk);
    ASSERT_EQ(run_quiet("zabyv", bcfg, o), kExitOk);
  }
  for (const char* f : {"mu_curve.csv", "mu_fit.csv", "green_bound.csv", "zabyv.csv"}) {
    EXPECT_EQ(slurp(dir / "1" / f), slurp(dir / "4" / f)) << f;
  }
}

TEST(CliInvariant, EveryCsvHasHeaderAndManifest) {
  const fs::path dir = scratch("manifests");
  const std::string cfg = write_config(dir, bounds_config());
  RunOptions o;
  o.out_dir = (dir / "out").string();
  for (const char* exp : {"lemma3", "green-bound", "zabyv"}) {
    ASSERT_EQ(run_quiet(exp, cfg, o), kExitOk);
  }
  int count = 0;
  for (const auto& entry : fs::directory_iterator(dir / "out")) {
    if (entry.path().extension() != ".csv") continue;
    ++count;
    const auto lines = csv_lines(entry.path());
    ASSERT_GE(lines.size(), 2u);
    const fs::path manifest =
        entry.path().parent_path() / (entry.path().stem().string() + ".manifest.json");
    ASSERT_TRUE(fs::exists(manifest)) << manifest;
    const json m = json::parse(slurp(manifest));
    EXPECT_EQ(m.at("columns").get<std::vector<std::string>>(), split(lines[0]));
    EXPECT_EQ(m.at("rows").get<std::size_t>(), lines.size() - 1);
    for (const char* key : {"config_hash", "version", "wall_time_s", "libraries"}) {
      EXPECT_TRUE(m.contains(key)) << key;
    }
  }
  EXPECT_EQ(count, 5);
}
