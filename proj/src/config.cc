//
// Copyright 2026 The ftm Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
//
#include "ftm/config.h"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <istream>

#include "ftm/errors.h"

namespace ftm {
namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

// Drops a trailing comment that is not inside a quoted string.
std::string strip_comment(const std::string& s) {
  bool quoted = false;
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] == '"') quoted = !quoted;
    if (s[i] == '#' && !quoted) return s.substr(0, i);
  }
  return s;
}

std::uint32_t as_u32(const KeyValueConfig& kv, const std::string& key,
                     std::uint32_t fallback) {
  const auto v = kv.number(key);
  if (!v) return fallback;
  if (*v < 0 || *v > 4294967295.0 || std::floor(*v) != *v) {
    throw ConfigError("config: '" + key + "' must be a non-negative integer");
  }
  return static_cast<std::uint32_t>(*v);
}

}  // namespace

KeyValueConfig KeyValueConfig::parse(std::istream& in) {
  KeyValueConfig kv;
  std::string section;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    const std::string line = trim(strip_comment(raw));
    if (line.empty()) continue;
    const std::string where = "config line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']' || line.size() < 3) {
        throw ConfigError(where + "bad section header");
      }
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + "expected key = value");
    const std::string key = trim(line.substr(0, eq));
    std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw ConfigError(where + "empty key or value");
    if (value.front() == '"') {
      if (value.size() < 2 || value.back() != '"') {
        throw ConfigError(where + "unterminated string");
      }
      value = value.substr(1, value.size() - 2);
    }
    const std::string full = section.empty() ? key : section + "." + key;
    if (!kv.values_.emplace(full, value).second) {
      throw ConfigError(where + "duplicate key '" + full + "'");
    }
  }
  return kv;
}

std::optional<std::string> KeyValueConfig::string(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  used_[key] = true;
  return it->second;
}

std::optional<double> KeyValueConfig::number(const std::string& key) const {
  const auto s = string(key);
  if (!s) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s->data(), s->data() + s->size(), v);
  if (ec != std::errc() || ptr != s->data() + s->size() || !std::isfinite(v)) {
    throw ConfigError("config: '" + key + "' is not a number: " + *s);
  }
  return v;
}

std::optional<bool> KeyValueConfig::boolean(const std::string& key) const {
  const auto s = string(key);
  if (!s) return std::nullopt;
  if (*s == "true") return true;
  if (*s == "false") return false;
  throw ConfigError("config: '" + key + "' must be true or false");
}

void KeyValueConfig::reject_unused() const {
  for (const auto& [key, value] : values_) {
    if (!used_.count(key)) throw ConfigError("config: unknown key '" + key + "'");
  }
}

OwnerConfig parse_owner_config(std::istream& in) {
  const KeyValueConfig kv = KeyValueConfig::parse(in);
  OwnerConfig c;
  c.database_path = kv.string("database").value_or("");
  c.index_path = kv.string("index").value_or("");
  c.listen = kv.string("listen").value_or(c.listen);
  c.tau = kv.number("tau").value_or(c.tau);
  c.parallelism = as_u32(kv, "parallelism", 1);
  c.disclose_database_size =
      kv.boolean("disclose_database_size").value_or(false);

  c.spec.origin.x = kv.number("grid.origin_x").value_or(0.0);
  c.spec.origin.y = kv.number("grid.origin_y").value_or(0.0);
  const auto cell = kv.number("grid.cell_size");
  const auto eps = kv.number("grid.epsilon");
  const auto delta = kv.number("grid.delta");
  const auto p0 = kv.number("grid.p0");
  if (cell && (eps || delta || p0)) {
    throw ConfigError("config: give grid.cell_size or the privacy budget, not both");
  }
  if (cell) {
    c.spec.cell_size = *cell;
  } else if (eps) {
    PrivacyParams params;
    params.epsilon = *eps;
    params.delta = delta.value_or(params.delta);
    params.p0 = p0.value_or(params.p0);
    params.validate();
    c.spec.cell_size = solve_noise_bound(params).grid_size;
  } else {
    throw ConfigError("config: grid.cell_size or grid.epsilon is required");
  }

  c.partition.alpha = kv.number("partition.alpha").value_or(c.partition.alpha);
  c.cost.session_overhead = as_u32(kv, "cost.session_overhead", c.cost.session_overhead);
  c.cost.per_comparison = as_u32(kv, "cost.per_comparison", c.cost.per_comparison);
  c.cost.per_increment = as_u32(kv, "cost.per_increment", c.cost.per_increment);
  c.cost.per_equality = as_u32(kv, "cost.per_equality", c.cost.per_equality);
  kv.reject_unused();

  if (!(c.tau > 0.0)) throw ConfigError("config: tau must be positive");
  if (!(c.spec.cell_size > 0.0)) throw ConfigError("config: cell size must be positive");
  if (!(c.partition.alpha > 0.0)) throw ConfigError("config: partition.alpha must be positive");
  if (c.parallelism == 0) throw ConfigError("config: parallelism must be >= 1");
  if (const char* env = std::getenv("FTM_LISTEN"); env != nullptr && *env != '\0') {
    c.listen = env;
  }
  return c;
}

OwnerConfig load_owner_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  return parse_owner_config(in);
}

}  // namespace ftm
