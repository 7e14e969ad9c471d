#include "settings.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>

#include "ogsdeconv/io.hpp"

namespace ogsd::cli {

std::string format_real(double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

Settings::Settings(std::vector<KeySpec> keys, Layer flags, Layer config, Layer preset)
    : keys_(std::move(keys)) {
  for (const KeySpec& k : keys_) {
    if (auto it = flags.find(k.name); it != flags.end()) {
      values_[k.name] = it->second;
    } else if (auto ic = config.find(k.name); ic != config.end()) {
      values_[k.name] = ic->second;
    } else if (auto ip = preset.find(k.name); ip != preset.end()) {
      values_[k.name] = ip->second;
    } else if (!k.fallback.empty()) {
      values_[k.name] = k.fallback;
    }
  }
}

const KeySpec& Settings::spec(const std::string& key) const {
  auto it = std::find_if(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.name == key; });
  if (it == keys_.end()) throw std::logic_error("unknown option key: " + key);
  return *it;
}

bool Settings::defines(const std::string& key) const {
  return std::any_of(keys_.begin(), keys_.end(), [&](const KeySpec& k) { return k.name == key; });
}

bool Settings::has(const std::string& key) const {
  spec(key);
  auto it = values_.find(key);
  return it != values_.end() && !it->second.empty();
}

const std::string& Settings::text(const std::string& key) const {
  spec(key);
  static const std::string empty;
  auto it = values_.find(key);
  return it == values_.end() ? empty : it->second;
}

double Settings::real(const std::string& key) const {
  const std::string& s = text(key);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size() || !std::isfinite(v))
    throw InputError("--" + key + ": expected a number, got '" + s + "'");
  return v;
}

int Settings::integer(const std::string& key) const {
  const std::string& s = text(key);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size())
    throw InputError("--" + key + ": expected an integer, got '" + s + "'");
  return v;
}

bool Settings::boolean(const std::string& key) const {
  const std::string& s = text(key);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s.empty() || s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw InputError("--" + key + ": expected true or false, got '" + s + "'");
}

nlohmann::json Settings::to_json() const {
  nlohmann::json out = nlohmann::json::object();
  for (const KeySpec& k : keys_) {
    if (!has(k.name)) {
      out[k.name] = nullptr;
      continue;
    }
    switch (k.kind) {
      case ValueKind::real: out[k.name] = real(k.name); break;
      case ValueKind::integer: out[k.name] = integer(k.name); break;
      case ValueKind::boolean: out[k.name] = boolean(k.name); break;
      case ValueKind::text: out[k.name] = text(k.name); break;
    }
  }
  return out;
}

namespace {

void check_known(const Layer& layer, const std::vector<KeySpec>& keys, const std::string& where) {
  for (const auto& [key, value] : layer) {
    const bool known =
        std::any_of(keys.begin(), keys.end(), [&](const KeySpec& k) { return k.name == key; });
    if (!known) throw InputError(where + ": unknown key '" + key + "'");
  }
}

}  // namespace

Layer load_config_layer(const std::string& path, const std::vector<KeySpec>& keys) {
  Layer layer;
  try {
    layer = io::read_key_values(path);
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  }
  check_known(layer, keys, path);
  return layer;
}

Layer load_manifest_layer(const std::string& path, const std::string& command,
                          const std::vector<KeySpec>& keys) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(io::read_file(path));
  } catch (const io::FormatError& e) {
    throw InputError(e.what());
  } catch (const nlohmann::json::exception& e) {
    throw InputError(path + ": " + e.what());
  }
  if (!doc.is_object() || !doc.contains("config") || !doc["config"].is_object())
    throw InputError(path + ": not a manifest (missing config object)");
  if (doc.value("command", std::string{}) != command)
    throw InputError(path + ": manifest was written by '" + doc.value("command", std::string{"?"}) +
                     "', not '" + command + "'");
  Layer layer;
  for (const auto& [key, value] : doc["config"].items()) {
    if (value.is_null()) continue;
    if (value.is_string()) {
      layer[key] = value.get<std::string>();
    } else if (value.is_boolean()) {
      layer[key] = value.get<bool>() ? "true" : "false";
    } else if (value.is_number_integer()) {
      layer[key] = std::to_string(value.get<long long>());
    } else if (value.is_number()) {
      layer[key] = format_real(value.get<double>());
    } else {
      throw InputError(path + ": config key '" + key + "' has an unsupported type");
    }
  }
  check_known(layer, keys, path);
  return layer;
}

Layer profile_preset(const std::string& profile, const std::string& command) {
  if (profile.empty() || profile == "full") return {};
  if (profile == "desk") {
    if (command == "blind")
      return {{"iterations", "300"},
              {"cg-max-iter", "60"},
              {"kernel-domain", "gradient"},
              {"lambda1", "0.0005"}};
    return {};
  }
  throw InputError("--profile: unknown profile '" + profile + "' (expected desk or full)");
}

}  // namespace ogsd::cli
