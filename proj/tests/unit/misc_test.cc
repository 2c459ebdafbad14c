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
#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <set>
#include <sstream>

#include <json.hpp>

#include "ftm/bench.h"
#include "ftm/config.h"
#include "ftm/errors.h"
#include "ftm/report.h"
#include "ftm/synth.h"

namespace ftm {
namespace {

OwnerConfig parse(const std::string& text) {
  std::istringstream in(text);
  return parse_owner_config(in);
}

TEST(Config, ParsesAllSections) {
  ::unsetenv("FTM_LISTEN");
  const OwnerConfig c = parse(R"(
# owner 1
database = "db.ndjson"
index = "db.idx"
listen = "0.0.0.0:7401"
tau = 40
parallelism = 3
disclose_database_size = true

[grid]
origin_x = -100.5
origin_y = 20
cell_size = 700

[partition]
alpha = 1.5

[cost]
per_comparison = 16
)");
  EXPECT_EQ(c.database_path, "db.ndjson");
  EXPECT_EQ(c.index_path, "db.idx");
  EXPECT_EQ(c.listen, "0.0.0.0:7401");
  EXPECT_EQ(c.tau, 40);
  EXPECT_EQ(c.parallelism, 3u);
  EXPECT_TRUE(c.disclose_database_size);
  EXPECT_EQ(c.spec.origin, (Vec2{-100.5, 20}));
  EXPECT_EQ(c.spec.cell_size, 700);
  EXPECT_EQ(c.partition.alpha, 1.5);
  EXPECT_EQ(c.cost.per_comparison, 16u);
  EXPECT_EQ(c.cost.session_overhead, CostModel{}.session_overhead);
}

TEST(Config, SolvesCellSizeFromBudget) {
  const OwnerConfig c = parse("[grid]\nepsilon = 0.01\ndelta = 1e-5\np0 = 0.81\n");
  EXPECT_NEAR(c.spec.cell_size, 690.194, 5e-3);
}

TEST(Config, Errors) {
  EXPECT_THROW(parse("tau = 50\n"), ConfigError);  // no grid size
  EXPECT_THROW(parse("[grid]\ncell_size = 100\nepsilon = 0.01\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\ncell_size = 100\ncolour = 3\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\ncell_size = 100\ntau = -1\n"), ConfigError);
  EXPECT_THROW(parse("[grid\ncell_size = 100\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\ncell_size = abc\n"), ConfigError);
  EXPECT_THROW(parse("[grid]\nepsilon = 0.01\np0 = 0.5\n"), ConfigError);
}

TEST(Config, EnvironmentOverridesListen) {
  ::setenv("FTM_LISTEN", "127.0.0.1:9999", 1);
  EXPECT_EQ(parse("[grid]\ncell_size = 100\n").listen, "127.0.0.1:9999");
  ::unsetenv("FTM_LISTEN");
}

TEST(Synth, DeterministicAndValid) {
  SynthParams p;
  const auto a = generate_corpus(200, p, 5);
  EXPECT_EQ(a, generate_corpus(200, p, 5));
  EXPECT_NE(a, generate_corpus(200, p, 6));
  std::set<std::string> ids;
  for (const auto& t : a) {
    EXPECT_NO_THROW(validate(t));
    EXPECT_GE(t.size(), p.min_points);
    EXPECT_LE(t.size(), p.max_points);
    EXPECT_EQ(t, quantized(t));
    ids.insert(t.id);
  }
  EXPECT_EQ(ids.size(), a.size());
  EXPECT_EQ(a[7].id, "t000007");
}

TEST(Synth, SpatialSkew) {
  SynthParams p;
  const auto db = generate_corpus(2000, p, 1);
  // Count points per 2 km cell; hotspots make the busiest cells far
  // denser than a uniform spread would.
  std::map<std::pair<int, int>, int> cells;
  std::size_t total = 0;
  for (const auto& t : db) {
    for (const auto& pt : t.points) {
      cells[{int(pt.loc.x / 2000), int(pt.loc.y / 2000)}]++;
      ++total;
    }
  }
  int busiest = 0;
  for (const auto& [k, n] : cells) busiest = std::max(busiest, n);
  EXPECT_GT(busiest, 4.0 * total / 100.0);
}

TEST(Synth, SampleQuery) {
  const auto db = generate_corpus(10, {}, 2);
  Rng rng(1);
  const Trajectory q = sample_query(db[0], 0.25, rng, 0.0, "qq");
  EXPECT_EQ(q.id, "qq");
  EXPECT_EQ(q.size(), static_cast<std::size_t>(std::lround(0.25 * db[0].size())));
  for (const Point& p : q.points) {
    EXPECT_NE(std::find(db[0].points.begin(), db[0].points.end(), p), db[0].points.end());
  }
  const Trajectory tiny = sample_query(db[0], 0.001, rng);
  EXPECT_EQ(tiny.size(), 2u);
  const Trajectory jittered = sample_query(db[0], 0.5, rng, 10.0);
  EXPECT_NO_THROW(validate(jittered));
}

TEST(Report, JsonIsStableWithoutTiming) {
  RunReport r;
  r.mode = "filtered";
  r.seed = 9;
  r.records.push_back({"q1", {"a", "b"}, 12.5, 100, 200, 0.25, 3, 10, 2, 1, 4, 40});
  r.records.push_back({"q2", {}, 7.5, 50, 60, std::nullopt, 1, 0, 0, 0, 0, 0});
  const std::string a = to_json(r, false);
  r.records[0].wall_ms = 99;
  EXPECT_EQ(a, to_json(r, false));
  EXPECT_NE(a, to_json(r, true));
  const auto doc = nlohmann::json::parse(a);
  EXPECT_EQ(doc["schema_version"], 1);
  EXPECT_EQ(doc["records"][0]["result_ids"], nlohmann::json({"a", "b"}));
  EXPECT_TRUE(doc["records"][1]["retention"].is_null());
  EXPECT_DOUBLE_EQ(doc["aggregate"]["mean_retention"].get<double>(), 0.25);
  EXPECT_DOUBLE_EQ(doc["aggregate"]["mean_bytes_up"].get<double>(), 75);
  EXPECT_NE(to_table(r).find("q1"), std::string::npos);
}

TEST(Sweep, CsvShapeAndInfeasibleCells) {
  SweepConfig c;
  c.epsilons = {0.01, 1.0};  // L at eps = 1 falls below tau
  c.db_sizes = {60};
  c.queries = 3;
  std::ostringstream progress;
  const auto rows = sweep(c, &progress);
  std::ostringstream csv;
  write_sweep_csv(csv, rows);
  std::istringstream lines(csv.str());
  std::string header;
  std::getline(lines, header);
  EXPECT_EQ(header, sweep_csv_header());
  const auto columns = std::count(header.begin(), header.end(), ',');
  int infeasible = 0;
  for (std::string line; std::getline(lines, line);) {
    EXPECT_GE(std::count(line.begin(), line.end(), ','), columns);
  }
  for (const auto& r : rows) {
    infeasible += r.infeasible;
    if (!r.infeasible) EXPECT_TRUE(r.results_equal);
  }
  EXPECT_GE(infeasible, 1);
  EXPECT_GE(rows.size(), 3u);
}

}  // namespace
}  // namespace ftm
