#include "chemo/config.hpp"

#include "chemo/snapshot.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>

namespace chemo {

namespace {

const std::map<std::string, std::set<std::string>> kSchema = {
    {"grid", {"dim", "lengths", "cells"}},
    {"params", {"a", "b", "sigma"}},
    {"motility", {"family", "chi", "k", "c", "table"}},
    {"initial", {"kind", "value", "mean", "amplitude", "mode", "seed", "path"}},
    {"stepper", {"scheme", "cfl_safety", "dt_max", "blowup_threshold"}},
    {"run", {"t_end", "observe_every"}},
    {"output", {"diagnostics", "snapshot_prefix", "snapshot_times", "sweep"}},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

struct Entry {
  std::string value;
  int line = 0;
};

class Sections {
 public:
  Sections(const std::string& text, std::string origin, std::filesystem::path base)
      : origin_(std::move(origin)), base_(std::move(base)) {
    std::istringstream in(text);
    std::string raw;
    std::string current;
    int lineno = 0;
    while (std::getline(in, raw)) {
      ++lineno;
      const auto hash = raw.find('#');
      const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
      if (line.empty()) continue;
      if (line.front() == '[') {
        if (line.back() != ']') fail(lineno, "malformed section header '" + line + "'");
        current = trim(line.substr(1, line.size() - 2));
        if (!kSchema.count(current)) fail(lineno, "unknown section [" + current + "]");
        if (data_.count(current)) fail(lineno, "duplicate section [" + current + "]");
        data_[current];
        continue;
      }
      const auto eq = line.find('=');
      if (eq == std::string::npos) fail(lineno, "expected 'key = value'");
      if (current.empty()) fail(lineno, "key outside of any section");
      const std::string key = trim(line.substr(0, eq));
      if (!kSchema.at(current).count(key)) fail(lineno, "unknown key '" + key + "' in section [" + current + "]");
      if (data_[current].count(key)) fail(lineno, "duplicate key '" + key + "'");
      data_[current][key] = Entry{trim(line.substr(eq + 1)), lineno};
    }
    for (const auto& [name, keys] : kSchema) {
      if (!data_.count(name)) throw ConfigError(origin_ + ": missing section [" + name + "]");
    }
  }

  [[noreturn]] void fail(int line, const std::string& msg) const {
    throw ConfigError(origin_ + ":" + std::to_string(line) + ": " + msg);
  }

  bool has(const std::string& sec, const std::string& key) const { return data_.at(sec).count(key) > 0; }

  const Entry& entry(const std::string& sec, const std::string& key) const {
    const auto& s = data_.at(sec);
    const auto it = s.find(key);
    if (it == s.end()) throw ConfigError(origin_ + ": missing key '" + key + "' in section [" + sec + "]");
    return it->second;
  }

  int line(const std::string& sec, const std::string& key) const { return has(sec, key) ? entry(sec, key).line : 0; }

  std::string str(const std::string& sec, const std::string& key) const { return entry(sec, key).value; }

  std::string str(const std::string& sec, const std::string& key, const std::string& fallback) const {
    return has(sec, key) ? str(sec, key) : fallback;
  }

  double number(const std::string& sec, const std::string& key) const {
    const Entry& e = entry(sec, key);
    return parse_number(e.value, e.line, key);
  }

  double number(const std::string& sec, const std::string& key, double fallback) const {
    return has(sec, key) ? number(sec, key) : fallback;
  }

  long integer(const std::string& sec, const std::string& key) const {
    const Entry& e = entry(sec, key);
    const double x = parse_number(e.value, e.line, key);
    if (x != std::floor(x)) fail(e.line, "key '" + key + "' expects an integer, got '" + e.value + "'");
    return static_cast<long>(x);
  }

  std::vector<double> list(const std::string& sec, const std::string& key) const {
    const Entry& e = entry(sec, key);
    std::vector<double> out;
    std::stringstream ss(e.value);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_number(trim(item), e.line, key));
    return out;
  }

  std::string path(const std::string& sec, const std::string& key) const {
    std::filesystem::path p(str(sec, key));
    if (p.is_relative() && !base_.empty()) p = base_ / p;
    return p.string();
  }

 private:
  double parse_number(const std::string& text, int line, const std::string& key) const {
    try {
      std::size_t used = 0;
      const double x = std::stod(text, &used);
      if (used == text.size() && std::isfinite(x)) return x;
    } catch (const std::exception&) {
    }
    fail(line, "key '" + key + "' expects a number, got '" + text + "'");
  }

  std::string origin_;
  std::filesystem::path base_;
  std::map<std::string, std::map<std::string, Entry>> data_;
};

/// Runs a validator and rethrows its message as a ConfigError at `line`.
template <typename Fn>
void checked(const Sections& s, int line, Fn&& fn) {
  try {
    fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    s.fail(line, e.what());
  }
}

}  // namespace

ScenarioConfig parse_config_text(const std::string& text, const std::string& origin,
                                 const std::filesystem::path& base_dir) {
  const Sections s(text, origin, base_dir);
  ScenarioConfig cfg;

  // [grid]
  const long dim = s.integer("grid", "dim");
  const auto lengths = s.list("grid", "lengths");
  const auto cells = s.list("grid", "cells");
  if (dim != 1 && dim != 2) s.fail(s.line("grid", "dim"), "dim must be 1 or 2");
  if (static_cast<long>(lengths.size()) != dim) s.fail(s.line("grid", "lengths"), "expected one length per axis");
  if (static_cast<long>(cells.size()) != dim) s.fail(s.line("grid", "cells"), "expected one node count per axis");
  for (double c : cells) {
    if (c != std::floor(c)) s.fail(s.line("grid", "cells"), "node counts must be integers");
  }
  checked(s, s.line("grid", "cells"), [&] {
    cfg.grid = dim == 1 ? Grid::line(lengths[0], static_cast<Index>(cells[0]))
                        : Grid::rect(lengths[0], lengths[1], static_cast<Index>(cells[0]), static_cast<Index>(cells[1]));
  });

  // [motility]
  const std::string family = s.str("motility", "family");
  checked(s, s.line("motility", "family"), [&] {
    if (family == "exponential") {
      cfg.params.motility = Motility::exponential(s.number("motility", "chi"));
    } else if (family == "algebraic") {
      cfg.params.motility = Motility::algebraic_offset(s.number("motility", "k"), s.number("motility", "c", 1.0));
    } else if (family == "tabulated") {
      const std::string table = s.path("motility", "table");
      if (!std::filesystem::exists(table)) throw ConfigError(origin + ": motility table '" + table + "' does not exist");
      cfg.params.motility = Motility(TabulatedMotility::load_csv(table));
    } else {
      throw std::invalid_argument("family must be exponential, algebraic or tabulated");
    }
  });

  // [params]
  cfg.params.a = s.number("params", "a");
  cfg.params.b = s.number("params", "b");
  cfg.params.sigma = s.number("params", "sigma");
  if (!(cfg.params.a > 0.0)) s.fail(s.line("params", "a"), "a must be positive");
  if (!(cfg.params.b > 0.0)) s.fail(s.line("params", "b"), "b must be positive");
  if (!(cfg.params.sigma > 1.0)) s.fail(s.line("params", "sigma"), "sigma must exceed 1");

  // [initial]
  const std::string kind = s.str("initial", "kind");
  InitialSpec& init = cfg.initial;
  const int kind_line = s.line("initial", "kind");
  if (kind == "constant") {
    init.kind = InitialSpec::Kind::Constant;
    init.value = s.number("initial", "value");
    if (!(init.value > 0.0)) s.fail(s.line("initial", "value"), "constant initial value must be positive");
  } else if (kind == "cosine") {
    init.kind = InitialSpec::Kind::Cosine;
    init.mean = s.number("initial", "mean");
    init.amplitude = s.number("initial", "amplitude");
    init.mode = static_cast<int>(s.has("initial", "mode") ? s.integer("initial", "mode") : 1);
    if (init.mode < 0) s.fail(s.line("initial", "mode"), "mode must be nonnegative");
    if (!(init.mean > 0.0) || std::abs(init.amplitude) > init.mean) {
      s.fail(s.line("initial", "amplitude"), "cosine initial data needs mean > 0 and |amplitude| <= mean");
    }
  } else if (kind == "random") {
    init.kind = InitialSpec::Kind::Random;
    init.mean = s.number("initial", "mean");
    init.amplitude = s.number("initial", "amplitude");
    init.seed = static_cast<std::uint64_t>(s.integer("initial", "seed"));
    if (!(init.mean > 0.0) || !(init.amplitude >= 0.0 && init.amplitude < 1.0)) {
      s.fail(s.line("initial", "amplitude"), "random initial data needs mean > 0 and amplitude in [0, 1)");
    }
  } else if (kind == "file") {
    init.kind = InitialSpec::Kind::File;
    init.path = s.path("initial", "path");
    if (!std::filesystem::exists(init.path)) {
      s.fail(s.line("initial", "path"), "initial data file '" + init.path + "' does not exist");
    }
  } else {
    s.fail(kind_line, "kind must be constant, cosine, random or file");
  }

  // [stepper]
  const std::string scheme = s.str("stepper", "scheme");
  if (scheme == "euler") {
    cfg.stepper.scheme = Scheme::ExplicitEuler;
  } else if (scheme == "heun") {
    cfg.stepper.scheme = Scheme::Heun;
  } else {
    s.fail(s.line("stepper", "scheme"), "scheme must be euler or heun");
  }
  cfg.stepper.cfl_safety = s.number("stepper", "cfl_safety", cfg.stepper.cfl_safety);
  cfg.stepper.dt_max = s.number("stepper", "dt_max", cfg.stepper.dt_max);
  cfg.stepper.blowup_threshold = s.number("stepper", "blowup_threshold", cfg.stepper.blowup_threshold);
  checked(s, s.line("stepper", "scheme"), [&] { cfg.stepper.validate(); });

  // [run]
  cfg.t_end = s.number("run", "t_end");
  if (!(cfg.t_end >= 0.0)) s.fail(s.line("run", "t_end"), "t_end must be >= 0");
  cfg.observe_every = s.number("run", "observe_every", 0.0);

  // [output]
  cfg.diagnostics_path = s.path("output", "diagnostics");
  if (s.has("output", "snapshot_prefix")) cfg.snapshot_prefix = s.path("output", "snapshot_prefix");
  if (s.has("output", "snapshot_times")) {
    cfg.snapshot_times = s.list("output", "snapshot_times");
    if (cfg.snapshot_prefix.empty()) {
      s.fail(s.line("output", "snapshot_times"), "snapshot_times needs snapshot_prefix");
    }
  }
  if (s.has("output", "sweep")) cfg.sweep_path = s.path("output", "sweep");
  return cfg;
}

ScenarioConfig parse_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str(), path, std::filesystem::path(path).parent_path());
}

ScalarField make_initial(const ScenarioConfig& config) {
  const Grid& grid = config.grid;
  const InitialSpec& init = config.initial;
  switch (init.kind) {
    case InitialSpec::Kind::Constant:
      return ScalarField::constant(grid, init.value);
    case InitialSpec::Kind::Cosine: {
      const double pi = std::numbers::pi;
      return ScalarField::sample(grid, [&](double x, double y) {
        double c = std::cos(init.mode * pi * x / grid.length(0));
        if (grid.dim() == 2) c *= std::cos(init.mode * pi * y / grid.length(1));
        return std::max(0.0, init.mean + init.amplitude * c);
      });
    }
    case InitialSpec::Kind::Random: {
      // mt19937_64 with the configured seed; one draw per node in storage order.
      std::mt19937_64 rng(init.seed);
      std::uniform_real_distribution<double> unit(0.0, 1.0);
      ArrayXd u(grid.size());
      for (Index i = 0; i < u.size(); ++i) u[i] = init.mean * (1.0 + init.amplitude * (2.0 * unit(rng) - 1.0));
      return ScalarField(grid, u);
    }
    case InitialSpec::Kind::File:
      return read_snapshot(init.path, grid).first;
  }
  throw std::logic_error("unhandled initial kind");
}

}  // namespace chemo
