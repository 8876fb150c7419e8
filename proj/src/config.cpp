#include "tle/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "tle/errors.hpp"
#include "tle/io.hpp"

namespace tle {

namespace {

const std::vector<std::pair<ExperimentKind, std::string>> kKindNames{
    {ExperimentKind::Sample, "sample"},
    {ExperimentKind::UpperTail, "upper-tail"},
    {ExperimentKind::LowerTail, "lower-tail"},
    {ExperimentKind::Confinement, "confinement"},
    {ExperimentKind::Covariance, "covariance"},
    {ExperimentKind::Scaling, "scaling"},
    {ExperimentKind::Couple, "couple"},
    {ExperimentKind::FsReference, "fs-reference"},
    {ExperimentKind::FreeVsZero, "free-vs-zero"},
    {ExperimentKind::PinnedExceedance, "pinned-exceedance"},
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& s) {
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || !std::isfinite(v)) {
    throw ConfigError("expected a number, got '" + s + "'");
  }
  return v;
}

std::uint64_t parse_u64(const std::string& s) {
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec == std::errc() && res.ptr == s.data() + s.size()) return v;
  // Allow 1e6 style for counts.
  const double d = parse_double(s);
  if (d < 0 || d > 9007199254740992.0 || d != std::floor(d)) {
    throw ConfigError("expected a non-negative integer, got '" + s + "'");
  }
  return static_cast<std::uint64_t>(d);
}

std::vector<double> parse_list(const std::string& s) {
  std::vector<double> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) out.push_back(parse_double(trim(item)));
  if (out.empty()) throw ConfigError("expected a comma-separated list");
  return out;
}

std::string print_list(const std::vector<double>& v) {
  std::string out;
  for (std::size_t k = 0; k < v.size(); ++k) {
    if (k) out += ',';
    out += format_double(v[k]);
  }
  return out;
}

struct Field {
  std::string key;
  std::function<void(ExperimentConfig&, const std::string&)> parse;
  std::function<std::string(const ExperimentConfig&)> print;
};

template <typename T>
Field size_field(const std::string& key, T ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, const std::string& s) { c.*member = static_cast<T>(parse_u64(s)); },
          [member](const ExperimentConfig& c) { return std::to_string(c.*member); }};
}

Field double_field(const std::string& key, double ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, const std::string& s) { c.*member = parse_double(s); },
          [member](const ExperimentConfig& c) { return format_double(c.*member); }};
}

Field list_field(const std::string& key, std::vector<double> ExperimentConfig::*member) {
  return {key, [member](ExperimentConfig& c, const std::string& s) { c.*member = parse_list(s); },
          [member](const ExperimentConfig& c) { return print_list(c.*member); }};
}

const std::vector<Field>& fields() {
  static const std::vector<Field> f{
      {"experiment", [](ExperimentConfig& c, const std::string& s) { c.experiment = parse_experiment_kind(s); },
       [](const ExperimentConfig& c) { return to_string(c.experiment); }},
      size_field("n", &ExperimentConfig::n),
      double_field("T", &ExperimentConfig::T),
      double_field("dt", &ExperimentConfig::dt),
      double_field("a", &ExperimentConfig::a),
      double_field("lambda", &ExperimentConfig::lambda),
      {"boundary",
       [](ExperimentConfig& c, const std::string& s) {
         if (s == "zero") c.boundary = BoundaryKind::Zero;
         else if (s == "free") c.boundary = BoundaryKind::Free;
         else throw ConfigError("boundary must be zero or free, got '" + s + "'");
       },
       [](const ExperimentConfig& c) { return std::string(c.boundary == BoundaryKind::Free ? "free" : "zero"); }},
      {"source",
       [](ExperimentConfig& c, const std::string& s) {
         if (s == "chain") c.source = SampleSource::Chain;
         else if (s == "fs") c.source = SampleSource::Fs;
         else throw ConfigError("source must be chain or fs, got '" + s + "'");
       },
       [](const ExperimentConfig& c) { return std::string(c.source == SampleSource::Fs ? "fs" : "chain"); }},
      size_field("samples", &ExperimentConfig::samples),
      size_field("thinning", &ExperimentConfig::thinning),
      size_field("burn_in", &ExperimentConfig::burn_in),
      size_field("min_burn_in", &ExperimentConfig::min_burn_in),
      size_field("blocks_per_sweep", &ExperimentConfig::blocks_per_sweep),
      size_field("max_block_depth", &ExperimentConfig::max_block_depth),
      size_field("min_window", &ExperimentConfig::min_window),
      double_field("sigma_prop", &ExperimentConfig::sigma_prop),
      size_field("checkpoint_every", &ExperimentConfig::checkpoint_every),
      list_field("eps", &ExperimentConfig::eps),
      list_field("T_list", &ExperimentConfig::T_list),
      double_field("u", &ExperimentConfig::u),
      size_field("trials", &ExperimentConfig::trials),
      list_field("lags", &ExperimentConfig::lags),
      list_field("windows", &ExperimentConfig::windows),
      list_field("v", &ExperimentConfig::v),
      size_field("equilibration_sweeps", &ExperimentConfig::equilibration_sweeps),
      size_field("coupled_sweeps", &ExperimentConfig::coupled_sweeps),
      {"output_dir",
       [](ExperimentConfig& c, const std::string& s) {
         if (s.empty()) throw ConfigError("output_dir must not be empty");
         c.output_dir = s;
       },
       [](const ExperimentConfig& c) { return c.output_dir; }},
      size_field("seed", &ExperimentConfig::seed),
  };
  return f;
}

bool whole_steps(double length, double dt) {
  const double steps = length / dt;
  return std::abs(steps - std::round(steps)) < 1e-6 * std::max(1.0, steps) && std::round(steps) >= 2;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  for (const auto& [k, name] : kKindNames)
    if (k == kind) return name;
  return "unknown";
}

ExperimentKind parse_experiment_kind(const std::string& name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  throw ConfigError("unknown experiment '" + name + "'");
}

std::vector<std::string> config_keys() {
  std::vector<std::string> keys;
  for (const auto& f : fields()) keys.push_back(f.key);
  return keys;
}

void validate(const ExperimentConfig& c) {
  auto fail = [](const std::string& key, const std::string& msg) { throw ConfigError(key + ": " + msg); };
  if (!(c.lambda > 1.0)) fail("lambda", "lambda must exceed 1");
  if (!(c.a > 0.0)) fail("a", "a must be positive");
  if (c.n < 1) fail("n", "need at least one line");
  if (!(c.T > 0.0)) fail("T", "T must be positive");
  if (!(c.dt > 0.0)) fail("dt", "dt must be positive");
  if (!whole_steps(2.0 * c.T, c.dt)) fail("dt", "2T must be a whole number (>= 2) of steps");
  if (c.samples < 1) fail("samples", "need at least one sample");
  if (c.thinning < 1) fail("thinning", "thinning must be at least 1");
  if (c.min_window < 2) fail("min_window", "min_window must be at least 2");
  if (c.max_block_depth < 1) fail("max_block_depth", "max_block_depth must be at least 1");
  if (!(c.sigma_prop > 0.0)) fail("sigma_prop", "sigma_prop must be positive");
  for (double e : c.eps)
    if (!(e > 0.0)) fail("eps", "levels must be positive");
  for (double t : c.T_list)
    if (!(t > 0.0) || !whole_steps(2.0 * t, c.dt)) fail("T_list", "each T must be positive with 2T a whole number of steps");
  if (!(c.u > 0.0)) fail("u", "u must be positive");
  for (double l : c.lags)
    if (!(l >= 0.0)) fail("lags", "lags must be non-negative");
  for (double s : c.windows)
    if (!(s > 0.0)) fail("windows", "windows must be positive");
  for (double v : c.v)
    if (!(v > 0.0)) fail("v", "v must be positive");
  if (c.trials < 1) fail("trials", "need at least one trial");
}

ExperimentConfig parse_config(const std::string& text) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::istringstream in(text);
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = "line " + std::to_string(number);
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const Field* field = nullptr;
    for (const auto& f : fields())
      if (f.key == key) field = &f;
    if (!field) throw ConfigError(where + ": unknown key '" + key + "'");
    if (!seen.insert(key).second) throw ConfigError(where + ": repeated key '" + key + "'");
    try {
      field->parse(c, value);
    } catch (const ConfigError& e) {
      throw ConfigError(where + ": " + key + ": " + e.what());
    }
  }
  validate(c);
  return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  std::string out;
  for (const auto& f : fields()) out += f.key + " = " + f.print(c) + "\n";
  return out;
}

}  // namespace tle
