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
// Command-line front end: parameter solving, publishing, federated
// queries, batches and sweeps.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

#include "ftm/bench.h"
#include "ftm/bpl.h"
#include "ftm/client.h"
#include "ftm/errors.h"
#include "ftm/publish.h"
#include "ftm/report.h"
#include "ftm/synth.h"
#include "ftm/trajectory_io.h"

namespace {

using namespace ftm;

constexpr int kExitProtocol = 1;
constexpr int kExitUsage = 2;
constexpr int kExitInternal = 3;

struct PrivacyFlags {
  double epsilon = 0.01;
  double delta = 1e-5;
  double rho = 0.6;
  double p0 = 0.81;
  double tau = 50.0;
  double origin_x = 0.0;
  double origin_y = 0.0;

  void add_to(CLI::App* app, bool with_rho, bool with_grid) {
    app->add_option("--epsilon", epsilon, "privacy budget (1/m)")->capture_default_str();
    app->add_option("--delta", delta, "failure probability")->capture_default_str();
    app->add_option("--p0", p0, "target in-cell success probability")->capture_default_str();
    if (with_rho) app->add_option("--rho", rho, "publishing rate")->capture_default_str();
    if (with_grid) {
      app->add_option("--tau", tau, "matching threshold (m)")->capture_default_str();
      app->add_option("--origin-x", origin_x, "grid origin x (m)")->capture_default_str();
      app->add_option("--origin-y", origin_y, "grid origin y (m)")->capture_default_str();
    }
  }

  PrivacyParams privacy() const {
    PrivacyParams p{epsilon, delta, rho, p0};
    p.validate();
    return p;
  }
};

std::vector<Trajectory> read_queries(const std::string& path) {
  if (path == "-") return read_ndjson(std::cin);
  return read_ndjson_file(path);
}

QueryMode parse_mode(const std::string& m) {
  return m == "naive" ? QueryMode::kNaive : QueryMode::kFiltered;
}

std::string result_digest(const std::vector<std::string>& ids) {
  std::string joined;
  for (const auto& id : ids) joined += id + '\n';
  char buf[16];
  std::snprintf(buf, sizeof(buf), "%08x",
                crc32_of({reinterpret_cast<const std::uint8_t*>(joined.data()),
                          joined.size()}));
  return buf;
}

int cmd_solve_params(const PrivacyFlags& f) {
  PrivacyParams p{f.epsilon, f.delta, 0.6, f.p0};
  p.validate();
  const NoiseBound b = solve_noise_bound(p);
  nlohmann::json out = {{"epsilon", f.epsilon},
                        {"delta", f.delta},
                        {"p0", f.p0},
                        {"Delta", b.tail_mass},
                        {"R", b.radius},
                        {"L", b.grid_size},
                        {"L_over_R", b.grid_size / b.radius},
                        {"residual", fixed_point_residual(b, f.delta)}};
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_publish(const PrivacyFlags& f, const std::string& query_path,
                std::uint64_t seed) {
  const auto queries = read_queries(query_path);
  const PrivacyParams p = f.privacy();
  const NoiseBound b = solve_noise_bound(p);
  const GridSpec spec{{f.origin_x, f.origin_y}, b.grid_size};
  nlohmann::json out = nlohmann::json::array();
  for (std::size_t i = 0; i < queries.size(); ++i) {
    Rng rng(seed + i);
    const PublishedQuery pub = publish(queries[i], p, b, spec, f.tau, rng);
    nlohmann::json grids = nlohmann::json::array();
    for (const GridId& g : pub.grids) grids.push_back({g.ix, g.iy});
    out.push_back({{"query_id", queries[i].id},
                   {"cell_size", spec.cell_size},
                   {"origin", {spec.origin.x, spec.origin.y}},
                   {"grids", grids}});
  }
  std::cout << out.dump(2) << '\n';
  return 0;
}

QueryOptions options_from(const PrivacyFlags& f, const std::string& mode) {
  QueryOptions o;
  o.mode = parse_mode(mode);
  o.privacy = f.privacy();
  o.spec = {{f.origin_x, f.origin_y}, solve_noise_bound(o.privacy).grid_size};
  o.tau = f.tau;
  return o;
}

int cmd_query(const PrivacyFlags& f, const std::vector<std::string>& owners,
              const std::string& query_path, const std::string& mode,
              std::uint64_t seed, bool table) {
  const auto queries = read_queries(query_path);
  const QueryOptions options = options_from(f, mode);
  RunReport report;
  report.mode = to_string(options.mode);
  report.seed = seed;
  const Connector connect = tcp_connector(owners);
  for (std::size_t i = 0; i < queries.size(); ++i) {
    const FederationResult r =
        query_federation(owners, connect, queries[i], options, seed + i);
    report.records.push_back(record_of(queries[i].id, r));
  }
  std::cout << to_json(report) << '\n';
  if (table) std::cerr << to_table(report);
  return 0;
}

int cmd_bench(const PrivacyFlags& f, const std::string& db_path,
              std::size_t queries, std::size_t owners, const std::string& mode,
              double rate, double alpha, std::uint64_t seed) {
  const std::vector<Trajectory> db = read_ndjson_file(db_path);
  if (db.empty()) throw ConfigError("bench: empty database");
  std::vector<std::string> modes =
      mode == "both" ? std::vector<std::string>{"filtered", "naive"}
                     : std::vector<std::string>{mode};
  OwnerSettings settings;
  settings.tau = f.tau;
  settings.partition.alpha = alpha;
  settings.spec = options_from(f, "filtered").spec;
  const LocalFederation fed(shard(db, owners), settings);
  std::cout << "query_id,mode,matches,result_digest,wall_ms,bytes_up,bytes_down,"
               "retention,grids,candidates,partitions,n_r,sessions,comparisons\n";
  for (const auto& m : modes) {
    const QueryOptions options = options_from(f, m);
    Rng pick(seed);
    for (std::size_t j = 0; j < queries; ++j) {
      const Trajectory& source = db[pick() % db.size()];
      const Trajectory q = sample_query(source, rate, pick, 0.0, "q" + std::to_string(j));
      const QueryRecord r =
          record_of(q.id, fed.query(q, options, seed * 1000003ULL + j), db.size());
      std::cout << r.query_id << ',' << m << ',' << r.result_ids.size() << ','
                << result_digest(r.result_ids) << ',' << r.wall_ms << ','
                << r.bytes_up << ',' << r.bytes_down << ',' << r.retention.value_or(0.0)
                << ',' << r.grids << ',' << r.candidates << ',' << r.partitions << ','
                << r.surviving << ',' << r.sessions << ',' << r.comparisons << '\n';
    }
  }
  return 0;
}

int cmd_gen_data(std::size_t n, std::uint64_t seed, const SynthParams& params,
                 const std::string& out_path) {
  const auto corpus = generate_corpus(n, params, seed);
  if (out_path.empty() || out_path == "-") {
    write_ndjson(std::cout, corpus);
  } else {
    std::ofstream out(out_path);
    if (!out) throw ConfigError("cannot write " + out_path);
    write_ndjson(out, corpus);
  }
  return 0;
}

void print_error(const char* kind, int code, const std::string& message) {
  nlohmann::json e = {{"error", {{"class", kind}, {"code", code}, {"message", message}}}};
  std::cerr << e.dump() << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Federated trajectory matching"};
  app.require_subcommand(1);

  PrivacyFlags solve_flags;
  auto* solve = app.add_subcommand("solve-params", "solve Delta, R and L");
  solve_flags.add_to(solve, false, false);

  PrivacyFlags publish_flags;
  std::string publish_query;
  std::uint64_t publish_seed = 1;
  auto* pub = app.add_subcommand("publish", "print the published grids of each query");
  publish_flags.add_to(pub, true, true);
  pub->add_option("--query", publish_query, "NDJSON query file ('-' for stdin)")->required();
  pub->add_option("--seed", publish_seed, "RNG seed")->capture_default_str();

  PrivacyFlags query_flags;
  std::vector<std::string> owners;
  std::string query_path;
  std::string query_mode = "filtered";
  std::uint64_t query_seed = 1;
  bool no_table = false;
  auto* query = app.add_subcommand("query", "run federated queries against owners");
  query_flags.add_to(query, true, true);
  query->add_option("--owners", owners, "owner addresses host:port")
      ->required()
      ->delimiter(',');
  query->add_option("--query", query_path, "NDJSON query file ('-' for stdin)")->required();
  query->add_option("--mode", query_mode, "filtered or naive")
      ->check(CLI::IsMember({"filtered", "naive"}))
      ->capture_default_str();
  query->add_option("--seed", query_seed, "RNG seed")->capture_default_str();
  query->add_flag("--no-table", no_table, "skip the human-readable table on stderr");

  PrivacyFlags bench_flags;
  std::string bench_db;
  std::size_t bench_queries = 100;
  std::size_t bench_owners = 1;
  std::string bench_mode = "both";
  double bench_rate = 0.2;
  double bench_alpha = 0.5;
  std::uint64_t bench_seed = 1;
  auto* bench = app.add_subcommand("bench", "run a query batch on in-process owners, CSV out");
  bench_flags.add_to(bench, true, true);
  bench->add_option("--db", bench_db, "NDJSON corpus")->required();
  bench->add_option("--queries", bench_queries, "queries in the batch")->capture_default_str();
  bench->add_option("--owner-count", bench_owners, "shards / owners")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench->add_option("--mode", bench_mode, "filtered, naive or both")
      ->check(CLI::IsMember({"filtered", "naive", "both"}))
      ->capture_default_str();
  bench->add_option("--sampling-rate", bench_rate, "fraction of source points kept")
      ->capture_default_str();
  bench->add_option("--alpha", bench_alpha, "partition parameter")->capture_default_str();
  bench->add_option("--seed", bench_seed, "RNG seed")->capture_default_str();

  SweepConfig sweep_config;
  std::string sweep_out;
  auto* sweep_cmd = app.add_subcommand("sweep", "parameter sweep on synthetic corpora, CSV out");
  sweep_cmd->add_option("--epsilons", sweep_config.epsilons)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--rates", sweep_config.sampling_rates)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--alphas", sweep_config.alphas)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--db-sizes", sweep_config.db_sizes)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--owner-counts", sweep_config.owner_counts)->delimiter(',')->capture_default_str();
  sweep_cmd->add_option("--queries", sweep_config.queries)->capture_default_str();
  sweep_cmd->add_option("--tau", sweep_config.tau)->capture_default_str();
  sweep_cmd->add_option("--delta", sweep_config.delta)->capture_default_str();
  sweep_cmd->add_option("--rho", sweep_config.rho)->capture_default_str();
  sweep_cmd->add_option("--p0", sweep_config.p0)->capture_default_str();
  sweep_cmd->add_option("--seed", sweep_config.seed)->capture_default_str();
  sweep_cmd->add_option("--out", sweep_out, "CSV path (default stdout)");
  bool sweep_no_naive = false;
  sweep_cmd->add_flag("--filtered-only", sweep_no_naive, "skip the naive runs");

  std::size_t gen_n = 1000;
  std::uint64_t gen_seed = 1;
  std::string gen_out;
  SynthParams synth;
  auto* gen = app.add_subcommand("gen-data", "emit a synthetic NDJSON corpus");
  gen->add_option("--n", gen_n, "number of trajectories")->required();
  gen->add_option("--seed", gen_seed, "RNG seed")->capture_default_str();
  gen->add_option("--out", gen_out, "output path (default stdout)");
  gen->add_option("--extent", synth.extent, "square side (m)")->capture_default_str();
  gen->add_option("--hotspots", synth.hotspots)->capture_default_str();
  gen->add_option("--min-points", synth.min_points)->capture_default_str();
  gen->add_option("--max-points", synth.max_points)->capture_default_str();
  gen->add_option("--companion-share", synth.companion_share)->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : kExitUsage;
  }

  try {
    if (*solve) return cmd_solve_params(solve_flags);
    if (*pub) return cmd_publish(publish_flags, publish_query, publish_seed);
    if (*query) {
      return cmd_query(query_flags, owners, query_path, query_mode, query_seed, !no_table);
    }
    if (*bench) {
      return cmd_bench(bench_flags, bench_db, bench_queries, bench_owners, bench_mode,
                       bench_rate, bench_alpha, bench_seed);
    }
    if (*sweep_cmd) {
      sweep_config.run_naive = !sweep_no_naive;
      const auto rows = sweep(sweep_config, &std::cerr);
      if (sweep_out.empty()) {
        write_sweep_csv(std::cout, rows);
      } else {
        std::ofstream out(sweep_out);
        if (!out) throw ConfigError("cannot write " + sweep_out);
        write_sweep_csv(out, rows);
      }
      return 0;
    }
    if (*gen) return cmd_gen_data(gen_n, gen_seed, synth, gen_out);
  } catch (const ProtocolError& e) {
    print_error("protocol", static_cast<int>(e.code()), e.what());
    return kExitProtocol;
  } catch (const FederationError& e) {
    print_error("federation", 0, e.what());
    return kExitProtocol;
  } catch (const TransportError& e) {
    print_error("transport", 0, e.what());
    return kExitProtocol;
  } catch (const PublishFailure& e) {
    print_error("publish", 0, e.what());
    return kExitProtocol;
  } catch (const ConfigError& e) {
    print_error("usage", 0, e.what());
    return kExitUsage;
  } catch (const IngestionError& e) {
    print_error("usage", 0, e.what());
    return kExitUsage;
  } catch (const std::exception& e) {
    print_error("internal", 0, e.what());
    return kExitInternal;
  }
  return kExitUsage;
}
