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
#ifndef FTM_CONFIG_H_
#define FTM_CONFIG_H_

#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "ftm/bpl.h"
#include "ftm/grid.h"
#include "ftm/partition.h"
#include "ftm/secure_verify.h"

namespace ftm {

// Flat view of a TOML-style file: `key = value` lines, `[section]`
// headers prefixing later keys with "section.", `#` comments, and values
// that are numbers, booleans or double-quoted strings.
class KeyValueConfig {
 public:
  static KeyValueConfig parse(std::istream& in);

  std::optional<std::string> string(const std::string& key) const;
  std::optional<double> number(const std::string& key) const;
  std::optional<bool> boolean(const std::string& key) const;

  // Throws ConfigError naming the first key never read by an accessor.
  void reject_unused() const;

 private:
  std::map<std::string, std::string> values_;
  mutable std::map<std::string, bool> used_;
};

struct OwnerConfig {
  std::string database_path;
  std::string index_path;
  std::string listen = "127.0.0.1:7400";
  GridSpec spec;
  double tau = 50.0;
  PartitionParams partition;
  CostModel cost;
  unsigned parallelism = 1;
  bool disclose_database_size = false;
};

// Keys:
//   database, index, listen, tau, parallelism, disclose_database_size
//   [grid]      origin_x, origin_y, and either cell_size or
//               epsilon + delta + p0 (L solved from the privacy budget)
//   [partition] alpha
//   [cost]      session_overhead, per_comparison, per_increment,
//               per_equality
// FTM_LISTEN in the environment overrides `listen`. Throws ConfigError.
OwnerConfig parse_owner_config(std::istream& in);
OwnerConfig load_owner_config(const std::string& path);

}  // namespace ftm

#endif  // FTM_CONFIG_H_
