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
// Data-owner server: offline index build and the online query service.

#include <CLI11.hpp>

#include <algorithm>
#include <iostream>

#include "ftm/config.h"
#include "ftm/errors.h"
#include "ftm/grid_index.h"
#include "ftm/owner.h"
#include "ftm/trajectory_io.h"

int main(int argc, char** argv) {
  CLI::App app{"Federated trajectory matching: data owner"};
  std::string config_path;
  std::string db_path;
  std::string index_path;
  bool build_only = false;
  app.add_option("--config", config_path, "owner config file")->required();
  app.add_option("--db", db_path, "NDJSON database (overrides config)");
  app.add_option("--index", index_path, "index file (overrides config)");
  app.add_flag("--build-index", build_only, "build and persist the index, then exit");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  try {
    ftm::OwnerConfig config = ftm::load_owner_config(config_path);
    if (!db_path.empty()) config.database_path = db_path;
    if (!index_path.empty()) config.index_path = index_path;
    if (build_only) {
      if (config.index_path.empty()) throw ftm::ConfigError("no index path configured");
      const auto db = ftm::read_ndjson_file(config.database_path);
      const auto index = ftm::build_index(db, config.tau, config.spec,
                                          std::max(1u, config.parallelism));
      ftm::persist_index(index, config.index_path);
      std::cout << "indexed " << db.size() << " trajectories into "
                << index.entries.size() << " cells: " << config.index_path << '\n';
      return 0;
    }
    ftm::serve(config, false);
    return 0;
  } catch (const ftm::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return 2;
  } catch (const ftm::IngestionError& e) {
    std::cerr << "ingestion error: " << e.what() << '\n';
    return 2;
  } catch (const ftm::IndexFormatError& e) {
    std::cerr << "index error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
