#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"

namespace ogsd::cli {

/// Bad user input: unreadable files, malformed values, inconsistent options.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The pipeline produced non-finite or otherwise unusable numbers.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class ValueKind { text, real, integer, boolean };

struct KeySpec {
  std::string name;      ///< flag name without dashes, also the config key
  ValueKind kind = ValueKind::text;
  std::string fallback;  ///< built-in default ("" = unset)
  std::string help;
};

using Layer = std::map<std::string, std::string>;

/// Resolved option values. Lookup order: command-line flag, config file or
/// manifest, profile preset, built-in default.
class Settings {
 public:
  Settings(std::vector<KeySpec> keys, Layer flags, Layer config, Layer preset);

  /// True when `key` is one of this command's keys.
  bool defines(const std::string& key) const;
  bool has(const std::string& key) const;
  const std::string& text(const std::string& key) const;
  double real(const std::string& key) const;
  int integer(const std::string& key) const;
  bool boolean(const std::string& key) const;

  /// Typed echo of every resolved key, for manifests.
  nlohmann::json to_json() const;

 private:
  const KeySpec& spec(const std::string& key) const;

  std::vector<KeySpec> keys_;
  Layer values_;
};

/// Reads a key=value config file, rejecting keys not in `keys`.
Layer load_config_layer(const std::string& path, const std::vector<KeySpec>& keys);

/// Reads the "config" object of a previously written manifest. The manifest
/// must have been produced by `command`.
Layer load_manifest_layer(const std::string& path, const std::string& command,
                          const std::vector<KeySpec>& keys);

/// Preset values for a named profile ("" for none).
Layer profile_preset(const std::string& profile, const std::string& command);

std::string format_real(double v);

}  // namespace ogsd::cli
