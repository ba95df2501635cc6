#pragma once

#include <cstdint>
#include <filesystem>
#include <initializer_list>
#include <istream>
#include <map>
#include <string>
#include <string_view>

#include "qgrom/fom.hpp"
#include "qgrom/lstm.hpp"

namespace qgrom {

/// Flat `key = value` run configuration. Lines starting with `#` (after
/// optional whitespace) and blank lines are ignored; trailing `# ...` comments
/// are stripped. Unknown and duplicate keys are rejected.
class RunConfig {
 public:
  static RunConfig parse(std::istream& in, const std::string& source = "<config>");
  static RunConfig load(const std::filesystem::path& path);

  /// Every key the parser accepts.
  static bool is_known_key(std::string_view key);

  bool has(const std::string& key) const { return values_.count(key) != 0; }
  void set(const std::string& key, const std::string& value);

  std::string text(const std::string& key) const;
  double real(const std::string& key) const;
  double real_or(const std::string& key, double fallback) const;
  std::uint64_t integer(const std::string& key) const;
  std::uint64_t integer_or(const std::string& key, std::uint64_t fallback) const;
  bool boolean_or(const std::string& key, bool fallback) const;

  /// Throws ConfigError naming the first missing key.
  void require(std::initializer_list<std::string_view> keys) const;

  FomConfig fom() const;
  lstm::TrainConfig train() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace qgrom
