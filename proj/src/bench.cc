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
#include "ftm/bench.h"

#include <map>
#include <ostream>
#include <sstream>
#include <thread>

#include "ftm/channel.h"
#include "ftm/errors.h"

namespace ftm {

std::vector<std::vector<Trajectory>> shard(const std::vector<Trajectory>& db,
                                           std::size_t k) {
  if (k == 0) throw DomainError("shard: need at least one shard");
  std::vector<std::vector<Trajectory>> out(k);
  for (std::size_t i = 0; i < db.size(); ++i) out[i % k].push_back(db[i]);
  return out;
}

LocalFederation::LocalFederation(std::vector<std::vector<Trajectory>> shards,
                                 const OwnerSettings& settings) {
  for (std::size_t i = 0; i < shards.size(); ++i) {
    nodes_.push_back(std::make_unique<OwnerNode>(settings, std::move(shards[i])));
    names_.push_back("owner-" + std::to_string(i));
  }
}

std::size_t LocalFederation::database_size() const {
  std::size_t n = 0;
  for (const auto& node : nodes_) n += node->database().size();
  return n;
}

FederationResult LocalFederation::query(const Trajectory& q,
                                        const QueryOptions& options,
                                        std::uint64_t seed,
                                        std::vector<OwnerQueryStats>* owner_stats,
                                        std::vector<Transcript>* owner_transcripts) const {
  const std::size_t k = nodes_.size();
  std::vector<OwnerQueryStats> stats(k);
  std::vector<Transcript> transcripts(k, Transcript(options.retain_frames));
  std::vector<std::jthread> servers(k);
  const Connector connect = [&](std::size_t i) {
    auto [client, server] = make_memory_pipe();
    servers[i] = std::jthread([&, i, s = std::move(server)]() mutable {
      try {
        stats[i] = nodes_[i]->handle(*s, &transcripts[i]);
      } catch (const std::exception&) {
        // Reported to the client through the Error frame or the closed pipe.
      }
    });
    return std::move(client);
  };
  FederationResult result;
  try {
    result = query_federation(names_, connect, q, options, seed);
  } catch (...) {
    servers.clear();
    throw;
  }
  servers.clear();  // join
  if (owner_stats != nullptr) *owner_stats = std::move(stats);
  if (owner_transcripts != nullptr) *owner_transcripts = std::move(transcripts);
  return result;
}

namespace {

std::string cell_label(double eps, double rate, double alpha, std::size_t n,
                       std::size_t owners) {
  std::ostringstream s;
  s << "eps=" << eps << " rate=" << rate << " alpha=" << alpha << " |TD|=" << n
    << " owners=" << owners;
  return s.str();
}

}  // namespace

std::vector<SweepRow> sweep(const SweepConfig& config, std::ostream* progress) {
  std::vector<SweepRow> rows;
  std::map<std::size_t, std::vector<Trajectory>> corpora;
  for (std::size_t n : config.db_sizes) {
    corpora[n] = generate_corpus(n, config.synth, config.seed);
  }
  for (double eps : config.epsilons) {
    PrivacyParams privacy{eps, config.delta, config.rho, config.p0};
    std::string infeasible;
    NoiseBound bound;
    try {
      privacy.validate();
      bound = solve_noise_bound(privacy);
      prune_threshold(config.tau, bound.grid_size);
    } catch (const ConfigError& e) {
      infeasible = e.what();
    }
    for (double rate : config.sampling_rates) {
      for (double alpha : config.alphas) {
        for (std::size_t n : config.db_sizes) {
          for (std::size_t owners : config.owner_counts) {
            SweepRow base;
            base.epsilon = eps;
            base.sampling_rate = rate;
            base.alpha = alpha;
            base.db_size = n;
            base.owners = owners;
            if (!infeasible.empty()) {
              base.infeasible = true;
              base.note = infeasible;
              rows.push_back(base);
              if (config.run_naive) {
                base.mode = QueryMode::kNaive;
                rows.push_back(base);
              }
              continue;
            }
            if (progress != nullptr) {
              *progress << cell_label(eps, rate, alpha, n, owners) << '\n';
            }
            const auto& corpus = corpora.at(n);
            OwnerSettings settings;
            settings.spec = GridSpec{{0.0, 0.0}, bound.grid_size};
            settings.tau = config.tau;
            settings.partition.alpha = alpha;
            settings.cost = config.cost;
            const LocalFederation fed(shard(corpus, owners), settings);

            std::vector<QueryMode> modes = {QueryMode::kFiltered};
            if (config.run_naive) modes.push_back(QueryMode::kNaive);
            std::vector<std::vector<std::vector<std::string>>> results(modes.size());
            std::vector<SweepRow> cell_rows;
            for (std::size_t mi = 0; mi < modes.size(); ++mi) {
              QueryOptions options;
              options.mode = modes[mi];
              options.privacy = privacy;
              options.spec = settings.spec;
              options.tau = config.tau;
              RunReport report;
              report.mode = to_string(modes[mi]);
              SweepRow row = base;
              row.mode = modes[mi];
              Rng pick(config.seed ^ 0x5eedULL);
              for (std::size_t j = 0; j < config.queries; ++j) {
                const Trajectory& source = corpus[pick() % corpus.size()];
                const Trajectory q =
                    sample_query(source, rate, pick, 0.0, "q" + std::to_string(j));
                std::vector<OwnerQueryStats> stats;
                const FederationResult r =
                    fed.query(q, options, config.seed * 1000003ULL + j, &stats);
                report.records.push_back(record_of(q.id, r, corpus.size()));
                results[mi].push_back(r.ids);
                for (const auto& s : stats) {
                  row.mean_prune_ms += s.prune_ms;
                  row.mean_validate_ms += s.validate_ms;
                }
              }
              row.aggregate = report.aggregate();
              if (config.queries > 0) {
                row.mean_prune_ms /= static_cast<double>(config.queries);
                row.mean_validate_ms /= static_cast<double>(config.queries);
              }
              cell_rows.push_back(row);
            }
            const bool equal = results.size() < 2 || results[0] == results[1];
            for (auto& r : cell_rows) {
              r.results_equal = equal;
              rows.push_back(r);
            }
          }
        }
      }
    }
  }
  return rows;
}

std::string sweep_csv_header() {
  return "epsilon,sampling_rate,alpha,db_size,owners,mode,queries,retention,"
         "bytes,bytes_up,bytes_down,wall_ms,prune_ms,validate_ms,n_r,"
         "partitions,comparisons,results_equal,infeasible,note";
}

void write_sweep_csv(std::ostream& out, const std::vector<SweepRow>& rows) {
  out << sweep_csv_header() << '\n';
  for (const auto& r : rows) {
    const auto& a = r.aggregate;
    std::string note = r.note;
    for (char& c : note) {
      if (c == ',' || c == '\n' || c == '"') c = ' ';
    }
    out << r.epsilon << ',' << r.sampling_rate << ',' << r.alpha << ','
        << r.db_size << ',' << r.owners << ',' << to_string(r.mode) << ','
        << a.queries << ',';
    if (a.mean_retention) out << *a.mean_retention;
    out << ',' << (a.mean_bytes_up + a.mean_bytes_down) << ',' << a.mean_bytes_up
        << ',' << a.mean_bytes_down << ',' << a.mean_wall_ms << ','
        << r.mean_prune_ms << ',' << r.mean_validate_ms << ',' << a.mean_surviving
        << ',' << a.mean_partitions << ',' << a.mean_comparisons << ','
        << (r.results_equal ? 1 : 0) << ',' << (r.infeasible ? 1 : 0) << ','
        << note << '\n';
  }
}

}  // namespace ftm
