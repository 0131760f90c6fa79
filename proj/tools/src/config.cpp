#include "zerores/cli/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "zerores/errors.hpp"

namespace zerores::cli {

using nlohmann::json;

bool is_experiment(const std::string& name) {
  return std::find(kExperiments.begin(), kExperiments.end(), name) != kExperiments.end();
}

std::string format_issue(const Issue& issue) {
  const char* level = issue.level == Issue::Level::error ? "error" : "warning";
  return std::string(level) + ": " + (issue.path.empty() ? "/" : issue.path) + ": " +
         issue.message;
}

std::vector<double> LogRange::values() const {
  std::vector<double> out(count);
  if (count == 1) {
    out[0] = lo;
    return out;
  }
  const double step = std::log(hi / lo) / (count - 1);
  for (int i = 0; i < count; ++i) out[i] = lo * std::exp(step * i);
  out.back() = hi;
  return out;
}

PairPotentials ExperimentConfig::pair_potentials() const {
  if (!potentials) throw ConfigError("potentials block is missing");
  return {{(*potentials)[0].make(), (*potentials)[1].make(), (*potentials)[2].make()}};
}

bool ParseResult::ok() const {
  return std::none_of(issues.begin(), issues.end(),
                      [](const Issue& i) { return i.level == Issue::Level::error; });
}

namespace {

// Walks one JSON object, collecting issues instead of throwing.
class Block {
 public:
  Block(const json& value, std::string path, std::vector<Issue>& issues)
      : value_(value), path_(std::move(path)), issues_(issues) {
    if (!value_.is_object()) error(path_, "expected an object");
  }

  bool valid() const { return value_.is_object(); }
  const std::string& path() const { return path_; }
  bool has(const std::string& key) {
    allowed_.insert(key);
    return valid() && value_.contains(key);
  }
  const json& at(const std::string& key) const { return value_.at(key); }
  std::string child(const std::string& key) const { return path_ + "/" + key; }

  void error(const std::string& where, const std::string& message) {
    issues_.push_back({Issue::Level::error, where, message});
  }
  void warning(const std::string& where, const std::string& message) {
    issues_.push_back({Issue::Level::warning, where, message});
  }

  double number(const std::string& key, double fallback, double lo, double hi,
                bool lo_open = false) {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number()) {
      error(child(key), "expected a number");
      return fallback;
    }
    const double x = v.get<double>();
    if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo)) {
      std::ostringstream msg;
      msg << "value " << x << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
      error(child(key), msg.str());
      return fallback;
    }
    return x;
  }

  std::int64_t integer(const std::string& key, std::int64_t fallback, std::int64_t lo,
                       std::int64_t hi) {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (!v.is_number_integer()) {
      error(child(key), "expected an integer");
      return fallback;
    }
    const auto x = v.get<std::int64_t>();
    if (x < lo || x > hi) {
      error(child(key), "value " + std::to_string(x) + " outside [" + std::to_string(lo) + ", " +
                            std::to_string(hi) + "]");
      return fallback;
    }
    return x;
  }

  bool boolean(const std::string& key, bool fallback) {
    if (!has(key)) return fallback;
    if (!value_.at(key).is_boolean()) {
      error(child(key), "expected true or false");
      return fallback;
    }
    return value_.at(key).get<bool>();
  }

  std::string string(const std::string& key, const std::string& fallback) {
    if (!has(key)) return fallback;
    if (!value_.at(key).is_string()) {
      error(child(key), "expected a string");
      return fallback;
    }
    return value_.at(key).get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback, double lo,
                              double hi, bool lo_open = false) {
    if (!has(key)) return fallback;
    return number_list(value_.at(key), child(key), lo, hi, lo_open).value_or(fallback);
  }

  std::optional<std::vector<double>> number_list(const json& v, const std::string& where,
                                                 double lo, double hi, bool lo_open) {
    if (!v.is_array() || v.empty()) {
      error(where, "expected a non-empty array of numbers");
      return std::nullopt;
    }
    std::vector<double> out;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (!v[i].is_number()) {
        error(where + "/" + std::to_string(i), "expected a number");
        return std::nullopt;
      }
      const double x = v[i].get<double>();
      if (!std::isfinite(x) || x < lo || x > hi || (lo_open && x == lo)) {
        std::ostringstream msg;
        msg << "value " << x << " outside " << (lo_open ? "(" : "[") << lo << ", " << hi << "]";
        error(where + "/" + std::to_string(i), msg.str());
        return std::nullopt;
      }
      out.push_back(x);
    }
    return out;
  }

  /// Either an explicit array or {"lo", "hi", "count"} on a log scale.
  std::vector<double> samples(const std::string& key, std::vector<double> fallback, double lo,
                              double hi) {
    if (!has(key)) return fallback;
    const json& v = value_.at(key);
    if (v.is_array()) return number_list(v, child(key), lo, hi, true).value_or(fallback);
    Block range(v, child(key), issues_);
    if (!range.valid()) return fallback;
    LogRange r;
    r.lo = range.number("lo", 0.0, lo, hi, true);
    r.hi = range.number("hi", 0.0, lo, hi, true);
    r.count = static_cast<int>(range.integer("count", 0, 1, 100000));
    range.finish();
    if (!range.has("lo") || !range.has("hi") || !range.has("count")) {
      error(child(key), "range needs lo, hi and count");
      return fallback;
    }
    if (!(r.lo > 0.0) || !(r.hi >= r.lo) || r.count < 1) return fallback;
    return r.values();
  }

  void finish() {
    if (!valid()) return;
    for (const auto& [key, _] : value_.items()) {
      if (!allowed_.count(key)) error(child(key), "unknown key");
    }
  }

 private:
  const json& value_;
  std::string path_;
  std::vector<Issue>& issues_;
  std::set<std::string> allowed_;
};

std::optional<Shape> shape_of(Block& b, const std::string& key) {
  const std::string text = b.string(key, "");
  if (text.empty()) {
    b.error(b.child(key), "shape is required (gaussian, exponential or square-well)");
    return std::nullopt;
  }
  try {
    return parse_shape(text);
  } catch (const InputError&) {
    b.error(b.child(key), "unknown shape '" + text + "'");
    return std::nullopt;
  }
}

PotentialSpec parse_potential(const json& v, const std::string& where,
                              std::vector<Issue>& issues) {
  Block b(v, where, issues);
  PotentialSpec p;
  if (!b.valid()) return p;
  if (auto s = shape_of(b, "shape")) p.shape = *s;
  p.depth = b.number("depth", 1.0, 0.0, 1e12);
  p.range = b.number("range", 1.0, 0.0, 1e12, true);
  b.finish();
  return p;
}

WidthLadder parse_ladder(const json& v, const std::string& where, WidthLadder fallback,
                         std::vector<Issue>& issues) {
  Block b(v, where, issues);
  if (!b.valid()) return fallback;
  WidthLadder w;
  w.lo = b.number("lo", fallback.lo, 0.0, 1e9, true);
  w.hi = b.number("hi", fallback.hi, 0.0, 1e9, true);
  w.count = static_cast<int>(b.integer("count", fallback.count, 1, 200));
  b.finish();
  if (w.hi < w.lo) b.error(where, "hi must not be below lo");
  return w;
}

TwoBodySpec parse_twobody(const json& v, std::vector<Issue>& issues) {
  Block b(v, "/twobody", issues);
  TwoBodySpec t;
  if (!b.valid()) return t;
  const std::string pair = b.string("pair", "12");
  try {
    t.pair = parse_pair(pair);
  } catch (const InputError&) {
    b.error(b.child("pair"), "pair must be \"12\", \"13\" or \"23\"");
  }
  t.nodes = static_cast<int>(b.integer("nodes", 400, 4, 4000));
  t.r_max = b.number("r_max", 0.0, 0.0, 1e6);
  t.tolerance = b.number("tolerance", 1e-6, 0.0, 1e-1, true);
  t.gap_min = b.number("gap_min", 0.05, 0.0, 1.0, true);
  t.k_samples = b.samples("k_samples", LogRange{1e-3, 1e-2, 11}.values(), 0.0, 1e6);
  const std::vector<double> window =
      b.numbers("fit_window", {t.fit_window.lo, t.fit_window.hi}, 0.0, 1e6, true);
  if (window.size() != 2 || window[1] <= window[0]) {
    b.error(b.child("fit_window"), "expected [lo, hi] with lo < hi");
  } else {
    t.fit_window = {window[0], window[1]};
  }
  t.wk_samples = b.samples("wk_samples", t.wk_samples, 0.0, 1e6);
  t.binding_excess = b.numbers("binding_excess", t.binding_excess, 0.0, 1e3, true);
  b.finish();
  return t;
}

BoundsSpec parse_bounds(const json& v, std::vector<Issue>& issues) {
  Block b(v, "/bounds", issues);
  BoundsSpec s;
  s.z_samples = LogRange{1e-6, 1e-1, 6}.values();
  s.xi = LogRange{0.1, 20.0, 200}.values();
  if (!b.valid()) return s;
  if (b.has("profile")) {
    Block p(b.at("profile"), b.child("profile"), issues);
    if (p.valid()) {
      const std::string shape = p.string("shape", "gaussian");
      ProfileShape ps = ProfileShape::gaussian;
      try {
        ps = parse_profile_shape(shape);
      } catch (const InputError&) {
        p.error(p.child("shape"), "unknown profile shape '" + shape + "'");
      }
      const double amplitude = p.number("amplitude", 1.0, 0.0, 1e12, true);
      const double width = p.number("width", 1.0, 0.0, 1e6, true);
      p.finish();
      s.profile = Profile(ps, amplitude, width);
    }
  }
  s.eps0 = b.number("eps0", 1.0, 0.0, 1e6, true);
  s.z_samples = b.samples("z_samples", s.z_samples, 0.0, 1e6);
  s.xi = b.samples("xi", s.xi, 0.0, 1e4);
  if (b.has("zabyv")) {
    Block z(b.at("zabyv"), b.child("zabyv"), issues);
    if (z.valid()) {
      s.zabyv.r0 = z.numbers("r0", s.zabyv.r0, 0.0, 1e6, true);
      s.zabyv.delta = z.numbers("delta", s.zabyv.delta, 0.0, 1e6, true);
      s.zabyv.samples = z.integer("samples", s.zabyv.samples, 1, 1000000000);
      z.finish();
    }
  }
  b.finish();
  return s;
}

ThreeBodySpec parse_threebody(const json& v, std::vector<Issue>& issues) {
  Block b(v, "/threebody", issues);
  ThreeBodySpec t;
  if (!b.valid()) return t;

  if (b.has("lambda")) {
    const json& l = b.at("lambda");
    if (l.is_number()) {
      t.lambda = {false, b.number("lambda", 1.0, 0.0, 1e6)};
    } else {
      Block lb(l, b.child("lambda"), issues);
      if (lb.valid()) {
        t.lambda = {true, lb.number("fraction", 0.0, 0.0, 1e3)};
        if (!lb.has("fraction")) lb.error(lb.path(), "expected a number or {\"fraction\": f}");
        lb.finish();
        if (t.lambda.value > 1.5) {
          lb.warning(lb.child("fraction"), "Lambda beyond 1.5 Lambda_cr");
        }
      }
    }
  }

  if (b.has("theta_grid")) {
    const json& g = b.at("theta_grid");
    const std::string where = b.child("theta_grid");
    if (g.is_array()) {
      t.theta_grid.mode = ThetaGrid::Mode::values;
      t.theta_grid.entries = b.numbers("theta_grid", {}, 0.0, 1e6);
      b.warning(where, "absolute Theta values are range-checked only at run time; use "
                       "{\"fractions\": [...]} to check against Theta_cr here");
    } else {
      Block gb(g, where, issues);
      if (gb.valid()) {
        const bool fr = gb.has("fractions");
        const bool ap = gb.has("approach");
        if (fr == ap) {
          gb.error(where, "give exactly one of \"fractions\" or \"approach\"");
        } else if (fr) {
          t.theta_grid.mode = ThetaGrid::Mode::fractions;
          t.theta_grid.entries = gb.numbers("fractions", {}, 0.0, 1e6);
          for (std::size_t i = 0; i < t.theta_grid.entries.size(); ++i) {
            if (t.theta_grid.entries[i] > 1.5) {
              gb.warning(gb.child("fractions") + "/" + std::to_string(i),
                         "Theta outside [0, 1.5 Theta_cr]");
            }
          }
        } else {
          t.theta_grid.mode = ThetaGrid::Mode::approach;
          t.theta_grid.entries = gb.numbers("approach", {}, 0.0, 60.0);
        }
        gb.finish();
      }
    }
    if (t.theta_grid.entries.empty()) b.error(where, "Theta grid is empty");
  }

  t.tol_bind = b.number("tol_bind", 1e-6, 0.0, 1.0, true);
  t.radii = b.numbers("radii", t.radii, 0.0, 1e9, true);
  t.nodes = static_cast<int>(b.integer("nodes", 400, 4, 4000));
  if (b.has("basis")) {
    Block bb(b.at("basis"), b.child("basis"), issues);
    if (bb.valid()) {
      if (bb.has("pair")) {
        t.basis.pair = parse_ladder(bb.at("pair"), bb.child("pair"), t.basis.pair, issues);
      }
      if (bb.has("spectator")) {
        t.basis.spectator =
            parse_ladder(bb.at("spectator"), bb.child("spectator"), t.basis.spectator, issues);
      }
      if (bb.has("arrangements")) {
        const json& a = bb.at("arrangements");
        if (!a.is_array() || a.empty()) {
          bb.error(bb.child("arrangements"), "expected a non-empty array of pair labels");
        } else {
          t.basis.arrangements.clear();
          for (std::size_t i = 0; i < a.size(); ++i) {
            try {
              t.basis.arrangements.push_back(parse_pair(a[i].get<std::string>()));
            } catch (const std::exception&) {
              bb.error(bb.child("arrangements") + "/" + std::to_string(i),
                       "expected \"12\", \"13\" or \"23\"");
            }
          }
        }
      }
      t.basis.stride = static_cast<int>(bb.integer("stride", 1, 1, 100));
      bb.finish();
      const long size = static_cast<long>(t.basis.arrangements.size()) *
                        ((t.basis.pair.count + t.basis.stride - 1) / t.basis.stride) *
                        ((t.basis.spectator.count + t.basis.stride - 1) / t.basis.stride);
      if (size > 2000) bb.error(bb.path(), "basis would exceed 2000 functions");
    }
  }
  t.prune = b.boolean("prune", false);
  t.prune_cutoff = b.number("prune_cutoff", 1e-12, 0.0, 1e-2, true);
  b.finish();
  return t;
}

struct Needs {
  bool potentials = false;
  bool twobody = false;
  bool bounds = false;
  bool threebody = false;
};

Needs needs_of(const std::string& experiment) {
  Needs n;
  if (experiment == "twobody-threshold" || experiment == "mu-curve" ||
      experiment == "wk-decomp") {
    n.potentials = n.twobody = true;
  } else if (experiment == "lemma3" || experiment == "green-bound" || experiment == "zabyv") {
    n.bounds = true;
  } else if (experiment == "threebody-scan" || experiment == "spreading") {
    n.potentials = n.threebody = true;
  }
  return n;
}

}  // namespace

ParseResult parse_config(const json& doc, const std::string& experiment) {
  ParseResult result;
  auto& issues = result.issues;
  Block root(doc, "", issues);
  if (!root.valid()) return result;

  ExperimentConfig cfg;
  cfg.source = doc;
  if (root.has("experiments")) {
    const json& e = root.at("experiments");
    if (!e.is_array()) {
      root.error("/experiments", "expected an array of experiment names");
    } else {
      for (std::size_t i = 0; i < e.size(); ++i) {
        const std::string name = e[i].is_string() ? e[i].get<std::string>() : "";
        if (!is_experiment(name)) {
          root.error("/experiments/" + std::to_string(i), "unknown experiment '" + name + "'");
        } else {
          cfg.experiments.push_back(name);
        }
      }
    }
  }
  cfg.output_dir = root.string("output_dir", "out");
  if (root.has("seed")) {
    const json& s = root.at("seed");
    if (!s.is_number_unsigned()) {
      root.error("/seed", "expected a non-negative integer");
    } else {
      cfg.seed = s.get<std::uint64_t>();
    }
  }

  if (root.has("masses")) {
    Block m(root.at("masses"), "/masses", issues);
    if (m.valid()) {
      const double m1 = m.number("m1", 1.0, 0.0, 1e12, true);
      const double m2 = m.number("m2", 1.0, 0.0, 1e12, true);
      const double m3 = m.number("m3", 1.0, 0.0, 1e12, true);
      m.finish();
      cfg.masses = reduced_masses(m1 > 0 ? m1 : 1.0, m2 > 0 ? m2 : 1.0, m3 > 0 ? m3 : 1.0);
    }
  }

  if (root.has("potentials")) {
    Block p(root.at("potentials"), "/potentials", issues);
    if (p.valid()) {
      std::array<PotentialSpec, 3> specs;
      bool complete = true;
      for (Pair pair : kAllPairs) {
        const std::string key(to_string(pair));
        if (p.has(key)) {
          specs[static_cast<int>(pair)] = parse_potential(p.at(key), p.child(key), issues);
        } else {
          complete = false;
          p.error(p.child(key), "potential for pair " + key + " is missing");
        }
      }
      p.finish();
      if (complete) cfg.potentials = specs;
    }
  }
  if (root.has("twobody")) cfg.twobody = parse_twobody(root.at("twobody"), issues);
  if (root.has("bounds")) cfg.bounds = parse_bounds(root.at("bounds"), issues);
  if (root.has("threebody")) cfg.threebody = parse_threebody(root.at("threebody"), issues);
  root.finish();

  std::vector<std::string> wanted = cfg.experiments;
  if (!experiment.empty()) {
    if (!is_experiment(experiment)) {
      root.error("", "unknown experiment '" + experiment + "'");
    }
    wanted = {experiment};
  }
  for (const std::string& name : wanted) {
    const Needs n = needs_of(name);
    const auto missing = [&](const char* block) {
      root.error(std::string("/") + block, std::string("block '") + block + "' is required by " + name);
    };
    if (n.potentials && !root.has("potentials")) missing("potentials");
    if (n.twobody && !root.has("twobody")) missing("twobody");
    if (n.bounds && !root.has("bounds")) missing("bounds");
    if (n.threebody && !root.has("threebody")) missing("threebody");
  }

  if (result.ok()) result.config = std::move(cfg);
  return result;
}

ParseResult load_config(const std::string& path, const std::string& experiment) {
  std::ifstream in(path);
  if (!in) {
    ParseResult r;
    r.issues.push_back({Issue::Level::error, "", "cannot read config file '" + path + "'"});
    return r;
  }
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    ParseResult r;
    r.issues.push_back({Issue::Level::error, "", std::string("malformed JSON: ") + e.what()});
    return r;
  }
  return parse_config(doc, experiment);
}

std::uint64_t config_hash(const json& doc) {
  const std::string text = doc.dump();
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t value) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(value));
  return buf;
}

}  // namespace zerores::cli
