#include "qgrom/config.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "qgrom/errors.hpp"

namespace qgrom {

namespace {

constexpr std::array<std::string_view, 37> kKnownKeys = {
    // full-order model
    "nx", "ny", "re", "ro", "dt", "t_start", "t_end", "snapshot_t0", "snapshot_t1", "n_snapshots",
    "seed_perturbation_amplitude", "seed",
    // reduced models
    "modes", "gp_dt", "sigma", "epochs", "batch_size", "validation_fraction", "learning_rate",
    "beta1", "beta2", "epsilon", "shuffle", "hidden", "layers", "predict_dt",
    // artifacts
    "snapshot_file", "reference_file", "basis_file", "tensors_file", "model_file",
    "gp_trajectory_file", "lstm_trajectory_file", "report_file", "timeseries_prefix", "hurst_file",
    "train_end"};

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

bool RunConfig::is_known_key(std::string_view key) {
  return std::find(kKnownKeys.begin(), kKnownKeys.end(), key) != kKnownKeys.end();
}

RunConfig RunConfig::parse(std::istream& in, const std::string& source) {
  RunConfig cfg;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const std::string body = trim(line);
    if (body.empty()) continue;
    const auto eq = body.find('=');
    const std::string where = source + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw ConfigError(where + ": expected 'key = value'");
    const std::string key = trim(std::string_view(body).substr(0, eq));
    const std::string value = trim(std::string_view(body).substr(eq + 1));
    if (!is_known_key(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": empty value for '" + key + "'");
    if (cfg.has(key)) throw ConfigError(where + ": duplicate key '" + key + "'");
    cfg.values_[key] = value;
  }
  return cfg;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  return parse(in, path.string());
}

void RunConfig::set(const std::string& key, const std::string& value) {
  if (!is_known_key(key)) throw ConfigError("unknown key '" + key + "'");
  values_[key] = value;
}

std::string RunConfig::text(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("missing required key '" + key + "'");
  return it->second;
}

double RunConfig::real(const std::string& key) const {
  const std::string s = text(key);
  if (s == "inf" || s == "infinity") return INFINITY;
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || std::isnan(v))
    throw ConfigError("key '" + key + "': '" + s + "' is not a real number");
  return v;
}

double RunConfig::real_or(const std::string& key, double fallback) const {
  return has(key) ? real(key) : fallback;
}

std::uint64_t RunConfig::integer(const std::string& key) const {
  const std::string s = text(key);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size())
    throw ConfigError("key '" + key + "': '" + s + "' is not a non-negative integer");
  return v;
}

std::uint64_t RunConfig::integer_or(const std::string& key, std::uint64_t fallback) const {
  return has(key) ? integer(key) : fallback;
}

bool RunConfig::boolean_or(const std::string& key, bool fallback) const {
  if (!has(key)) return fallback;
  const std::string s = text(key);
  if (s == "true" || s == "1" || s == "yes") return true;
  if (s == "false" || s == "0" || s == "no") return false;
  throw ConfigError("key '" + key + "': '" + s + "' is not a boolean");
}

void RunConfig::require(std::initializer_list<std::string_view> keys) const {
  for (std::string_view k : keys)
    if (!has(std::string(k))) throw ConfigError("missing required key '" + std::string(k) + "'");
}

FomConfig RunConfig::fom() const {
  require({"nx", "ny", "re", "ro", "dt", "t_end", "snapshot_t0", "snapshot_t1", "n_snapshots"});
  FomConfig c;
  c.grid = Grid(integer("nx"), integer("ny"));
  c.re = real("re");
  c.ro = real("ro");
  c.dt = real("dt");
  c.t_start = real_or("t_start", 0.0);
  c.t_end = real("t_end");
  c.snapshot_t0 = real("snapshot_t0");
  c.snapshot_t1 = real("snapshot_t1");
  c.n_snapshots = integer("n_snapshots");
  c.seed_perturbation_amplitude = real_or("seed_perturbation_amplitude", 0.0);
  c.seed = integer_or("seed", 0);
  c.validate();
  return c;
}

lstm::TrainConfig RunConfig::train() const {
  lstm::TrainConfig c;
  c.epochs = integer_or("epochs", c.epochs);
  c.batch_size = integer_or("batch_size", c.batch_size);
  c.validation_fraction = real_or("validation_fraction", c.validation_fraction);
  c.learning_rate = real_or("learning_rate", c.learning_rate);
  c.beta1 = real_or("beta1", c.beta1);
  c.beta2 = real_or("beta2", c.beta2);
  c.epsilon = real_or("epsilon", c.epsilon);
  c.seed = integer_or("seed", c.seed);
  c.shuffle = boolean_or("shuffle", c.shuffle);
  c.hidden = integer_or("hidden", c.hidden);
  c.n_layers = integer_or("layers", c.n_layers);
  c.validate();
  return c;
}

}  // namespace qgrom
