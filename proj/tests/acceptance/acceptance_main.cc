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
// Acceptance checks, one line per criterion:
//   acceptance            run all
//   acceptance 3 7        run the listed criteria
// Exit status is 0 only when every selected criterion passed.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <map>
#include <numbers>
#include <numeric>
#include <set>
#include <tuple>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "ftm/audit.h"
#include "ftm/bench.h"
#include "ftm/bpl.h"
#include "ftm/channel.h"
#include "ftm/client.h"
#include "ftm/errors.h"
#include "ftm/grid_index.h"
#include "ftm/owner.h"
#include "ftm/partition.h"
#include "ftm/planar_laplace.h"
#include "ftm/publish.h"
#include "ftm/secure_verify.h"
#include "ftm/synth.h"
#include "ftm/wire.h"
#include "test_util.h"

namespace ftm {
namespace {

using Clock = std::chrono::steady_clock;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof(buf), f, args...);
  return buf;
}

double seconds_since(Clock::time_point t) {
  return std::chrono::duration<double>(Clock::now() - t).count();
}

std::vector<std::string> oracle_ids(const std::vector<Trajectory>& db,
                                    const Trajectory& q, double tau) {
  std::vector<std::string> out;
  for (const auto& t : db) {
    if (testing::brute_force_matches(t, q, tau)) out.push_back(t.id);
  }
  std::sort(out.begin(), out.end());
  return out;
}

QueryOptions default_options(const NoiseBound& bound, double tau = 50) {
  QueryOptions o;
  o.spec = {{0, 0}, bound.grid_size};
  o.tau = tau;
  return o;
}

OwnerSettings default_settings(const NoiseBound& bound, double tau = 50) {
  OwnerSettings s;
  s.spec = {{0, 0}, bound.grid_size};
  s.tau = tau;
  return s;
}

// --- 1 ----------------------------------------------------------------------

Verdict end_to_end() {
  const auto start = Clock::now();
  const PrivacyParams privacy;  // eps 0.01, delta 1e-5, rho 0.6, p0 0.81
  const NoiseBound bound = solve_noise_bound(privacy);
  const auto db = generate_corpus(1000, {}, 101);
  const LocalFederation fed(shard(db, 3), default_settings(bound));
  const QueryOptions opt = default_options(bound);
  Rng rng(102);
  std::size_t tp = 0, fp = 0, fn = 0, exact = 0;
  for (int i = 0; i < 100; ++i) {
    const Trajectory q = sample_query(db[rng() % db.size()], 0.2, rng, 20.0,
                                      "q" + std::to_string(i));
    const auto expected = oracle_ids(db, q, 50);
    const auto got = fed.query(q, opt, 1000 + i).ids;
    exact += got == expected;
    for (const auto& id : got) {
      std::binary_search(expected.begin(), expected.end(), id) ? ++tp : ++fp;
    }
    for (const auto& id : expected) fn += !std::binary_search(got.begin(), got.end(), id);
  }
  const double secs = seconds_since(start);
  const double precision = tp + fp ? double(tp) / (tp + fp) : 1.0;
  const double recall = tp + fn ? double(tp) / (tp + fn) : 1.0;
  return {exact == 100 && secs < 120,
          fmt("%zu/100 result sets exact, precision %.4f, recall %.4f, %zu true matches, %.1f s",
              exact, precision, recall, tp + fn, secs)};
}

// --- 2, 3 -------------------------------------------------------------------

Verdict bpl_bounded() {
  const PrivacyParams p;
  const NoiseBound b = solve_noise_bound(p);
  Rng rng(201);
  constexpr int kN = 1000000;
  int violations = 0;
  int uniform = 0;
  double max_r = 0;
  for (int i = 0; i < kN; ++i) {
    const BplSample s = bpl_sample(b, p.epsilon, rng);
    const double r = std::hypot(s.offset.x, s.offset.y);
    max_r = std::max(max_r, r);
    violations += r > b.radius;
    uniform += s.uniform_branch;
  }
  const double frac = double(uniform) / kN;
  const double sigma = std::sqrt(b.tail_mass * (1 - b.tail_mass) / kN);
  const double z = std::fabs(frac - b.tail_mass) / sigma;
  return {violations == 0 && z <= 3,
          fmt("max radius %.6f vs R %.6f, %d violations; uniform fraction %.5f vs Delta %.5f (%.2f sigma)",
              max_r, b.radius, violations, frac, b.tail_mass, z)};
}

Verdict radius_distribution() {
  const PrivacyParams p;
  const NoiseBound b = solve_noise_bound(p);
  Rng rng(301);
  constexpr int kN = 1000000;
  std::vector<double> r(kN);
  for (double& v : r) {
    const Vec2 o = bpl_sample(b, p.epsilon, rng).offset;
    v = std::hypot(o.x, o.y);
  }
  std::sort(r.begin(), r.end());
  // Laplace radial CDF truncated at R plus the uniform-in-disc tail.
  const double eps = p.epsilon;
  auto cdf = [&](double x) {
    if (x >= b.radius) return 1.0;
    return 1 - (1 + eps * x) * std::exp(-eps * x) + b.tail_mass * (x / b.radius) * (x / b.radius);
  };
  double ks = 0;
  for (int i = 0; i < kN; ++i) {
    const double f = cdf(r[i]);
    ks = std::max({ks, std::fabs(f - double(i) / kN), std::fabs(f - double(i + 1) / kN)});
  }
  return {ks <= 0.005, fmt("KS distance %.6f (limit 0.005) at 10^6 samples", ks)};
}

// --- 4 ----------------------------------------------------------------------

Verdict geo_indistinguishability() {
  const PrivacyParams p;
  const NoiseBound b = solve_noise_bound(p);
  constexpr int kN = 1000000;
  constexpr int kCells = 41;
  constexpr double kZ = 2.5758;  // two-sided 99%
  std::ostringstream detail;
  bool all_ok = true;
  Rng rng(401);
  for (double frac : {0.25, 0.5, 1.0}) {
    const double d = frac * b.radius;
    const Vec2 x{0, 0};
    const Vec2 y{d, 0};
    // Output window: bounding box of both supports.
    const double lo_x = -b.radius, hi_x = d + b.radius;
    const double lo_y = -b.radius, hi_y = b.radius;
    auto histogram = [&](Vec2 c) {
      std::vector<double> h(kCells * kCells);
      for (int i = 0; i < kN; ++i) {
        const Vec2 o = bpl_perturb(c, b, p.epsilon, rng);
        const int ix = std::clamp(int((o.x - lo_x) / (hi_x - lo_x) * kCells), 0, kCells - 1);
        const int iy = std::clamp(int((o.y - lo_y) / (hi_y - lo_y) * kCells), 0, kCells - 1);
        h[ix * kCells + iy] += 1.0 / kN;
      }
      return h;
    };
    const auto hx = histogram(x);
    const auto hy = histogram(y);
    const double bound = std::exp(p.epsilon * d);
    // Wilson-style half-width, nonzero even for empty cells.
    auto slack = [&](double q) { return kZ * std::sqrt((q * (1 - q) + kZ * kZ / (4.0 * kN)) / kN); };
    int bad = 0;
    double worst = 0;
    for (std::size_t c = 0; c < hx.size(); ++c) {
      for (const auto& [a, o] : {std::pair{hx[c], hy[c]}, std::pair{hy[c], hx[c]}}) {
        const double excess = a - slack(a) - (bound * (o + slack(o)) + p.delta);
        if (excess > 0) {
          ++bad;
          worst = std::max(worst, excess);
        }
      }
    }
    all_ok = all_ok && bad == 0;
    detail << fmt("d=%.0f%%R: %d violating cell checks (worst excess %.2e); ", frac * 100, bad, worst);
  }
  std::string s = detail.str();
  s.resize(s.size() - 2);
  if (!all_ok) s += "; the truncated support leaves mass where the neighbour has none";
  return {all_ok, s};
}

// --- 5 ----------------------------------------------------------------------

Verdict success_probability() {
  const PrivacyParams base;
  const NoiseBound solved = solve_noise_bound(base);
  std::ostringstream detail;
  bool ok = true;
  Rng rng(501);
  for (double p0 : {0.70, 0.81, 0.90}) {
    NoiseBound b = solved;
    b.grid_size = solved.radius / (2 * (1 - std::sqrt(p0)));
    const GridSpec spec{{0, 0}, b.grid_size};
    constexpr int kN = 100000;
    int hits = 0;
    for (int i = 0; i < kN; ++i) {
      const Vec2 x{testing::uniform(rng, 0, 100 * b.grid_size), testing::uniform(rng, 0, 100 * b.grid_size)};
      hits += spec.cell_of(bpl_perturb(x, b, base.epsilon, rng)) == spec.cell_of(x);
    }
    const double phat = double(hits) / kN;
    const double sigma = std::sqrt(phat * (1 - phat) / kN);
    const bool this_ok = phat + 3 * sigma >= p0;
    ok = ok && this_ok;
    detail << fmt("p0=%.2f: L=%.2f p=%.4f+-%.4f; ", p0, b.grid_size, phat, 3 * sigma);
  }
  std::string s = detail.str();
  s.resize(s.size() - 2);
  return {ok, s};
}

// --- 6 ----------------------------------------------------------------------

Verdict numerics() {
  Rng rng(601);
  double worst_cdf = 0;
  for (int i = 0; i < 1000; ++i) {
    const double eps = std::exp(testing::uniform(rng, std::log(1e-4), std::log(10.0)));
    const double p = testing::uniform(rng, 0, 0.999999);
    worst_cdf = std::max(worst_cdf, std::fabs(laplace_cdf(eps, laplace_cdf_inverse(eps, p)) - p));
  }
  double worst_residual = 0;
  for (double eps : {0.01, 0.02, 0.03, 0.04, 0.05}) {
    PrivacyParams p;
    p.epsilon = eps;
    const NoiseBound b = solve_noise_bound(p);
    // Plug back into Delta = delta pi R^2 with R from the Laplace tail.
    const double tail = (1 + eps * b.radius) * std::exp(-eps * b.radius);
    worst_residual = std::max({worst_residual,
                               std::fabs(b.tail_mass - p.delta * std::numbers::pi * b.radius * b.radius) / b.tail_mass,
                               std::fabs(tail - b.tail_mass) / b.tail_mass});
  }
  return {worst_cdf <= 1e-9 && worst_residual <= 1e-10,
          fmt("max |C(C^-1(p)) - p| = %.2e over 1000 draws; max fixed-point residual %.2e over eps 0.01..0.05",
              worst_cdf, worst_residual)};
}

// --- 7 ----------------------------------------------------------------------

Verdict soundness() {
  const PrivacyParams privacy;
  const NoiseBound bound = solve_noise_bound(privacy);
  const GridSpec spec{{0, 0}, bound.grid_size};
  const double tau = 50;
  Rng rng(701);
  std::vector<Trajectory> db;
  for (int i = 0; i < 3000; ++i) {
    db.push_back(testing::random_trajectory(rng, 2 + rng() % 12, 6000, 150, "t" + std::to_string(i)));
  }
  const GridIndex index = build_index(db, tau, spec);
  const SimulatedIdealEvaluator evaluator;
  const double prune_tau = prune_threshold(tau, spec.cell_size);
  auto lookup = [&](TrajId id) -> const Trajectory& { return db[id]; };

  std::size_t filter_cases = 0, filter_misses = 0;
  std::size_t prune_cases = 0, prune_misses = 0, pruned = 0;
  while (filter_cases < 10000 || prune_cases < 10000) {
    const Trajectory& src = db[rng() % db.size()];
    const Trajectory q = testing::follower_query(rng, src, 2 + rng() % 8, 30);
    PublishedQuery pub;
    try {
      pub = publish(q, privacy, bound, spec, tau, rng);
    } catch (const PublishFailure&) {
      continue;
    }
    std::vector<TrajId> truth;
    for (TrajId id = 0; id < db.size(); ++id) {
      if (testing::brute_force_matches(db[id], q, tau)) truth.push_back(id);
    }
    const auto tc = filter(index, pub.grids);
    for (TrajId id : truth) {
      ++filter_cases;
      filter_misses += !std::binary_search(tc.begin(), tc.end(), id);
    }
    if (tc.empty()) continue;
    const PresenceTable presence(tc, pub.grids, tau, spec, lookup);
    for (const Partition& part : partition(tc, presence, PartitionParams{}.max_size(tc.size()))) {
      const ReferenceTrajectory rt = reference_trajectory(part, presence);
      const bool keep = secure_verify({VerifyRole::kReferencePrune, pub.subquery.points, rt.segments, prune_tau},
                                      evaluator).match;
      pruned += !keep;
      for (TrajId id : part.members) {
        if (!std::binary_search(truth.begin(), truth.end(), id)) continue;
        ++prune_cases;
        prune_misses += !keep;
      }
    }
  }

  // Traversal grids against dense sampling at tau / 20 (L = 100, tau = 50).
  const GridSpec fine{{0, 0}, 100};
  int equal = 0;
  int oracle_extra = 0;
  int boundary_only = 0;
  for (int i = 0; i < 500; ++i) {
    const Trajectory t = testing::random_trajectory(rng, 1 + rng() % 6, 2000, 300);
    const auto got = traversal_grids(t, 50, fine);
    const std::set<GridId> exact(got.begin(), got.end());
    const auto dense = testing::dense_traversal(t, 50, fine, 50.0 / 20);
    if (exact == dense) {
      ++equal;
      continue;
    }
    bool superset = std::includes(exact.begin(), exact.end(), dense.begin(), dense.end());
    oracle_extra += !superset;
    // Cells only the exact method finds must sit in the band the sampling
    // step can miss: farther than tau minus half a step.
    bool banded = superset;
    for (const GridId& g : exact) {
      if (dense.count(g)) continue;
      double best = 1e300;
      for (const Segment& s : segments_of(t)) {
        best = std::min(best, squared_distance(s.o.loc, s.d.loc, fine.rect_of(g)));
      }
      banded = banded && std::sqrt(best) > 50 - 50.0 / 40 - 1e-9;
    }
    boundary_only += banded;
  }
  const bool traversal_ok = equal + boundary_only == 500 && oracle_extra == 0;
  return {filter_misses == 0 && prune_misses == 0 && traversal_ok,
          fmt("filter: %zu/%zu matches kept; pruning: %zu/%zu kept (%zu partitions pruned); "
              "traversal: %d/500 identical to dense sampling, %d differ only by cells within the sampling gap of tau",
              filter_cases - filter_misses, filter_cases, prune_cases - prune_misses, prune_cases,
              pruned, equal, boundary_only)};
}

// --- 8 ----------------------------------------------------------------------

Verdict efficiency() {
  const PrivacyParams privacy;
  const NoiseBound bound = solve_noise_bound(privacy);
  const auto db = generate_corpus(10000, {}, 801);
  const LocalFederation fed({db}, default_settings(bound));
  Rng rng(802);
  int better = 0;
  int equal_results = 0;
  double retention_sum = 0;
  for (int i = 0; i < 100; ++i) {
    const Trajectory q = sample_query(db[rng() % db.size()], 0.2, rng, 20.0);
    QueryOptions f = default_options(bound);
    QueryOptions n = f;
    n.mode = QueryMode::kNaive;
    const FederationResult rf = fed.query(q, f, 900 + i);
    const FederationResult rn = fed.query(q, n, 900 + i);
    const std::uint64_t bf = rf.bytes_up() + rf.bytes_down();
    const std::uint64_t bn = rn.bytes_up() + rn.bytes_down();
    better += rf.comparisons() < rn.comparisons() && bf < bn;
    equal_results += rf.ids == rn.ids;
    retention_sum += double(rf.candidates()) / db.size();
  }
  const double retention = retention_sum / 100;
  return {better >= 95 && retention < 0.2 && equal_results == 100,
          fmt("filtered cheaper in comparisons and bytes on %d/100 queries; mean retention %.4f; "
              "%d/100 identical result sets",
              better, retention, equal_results)};
}

// --- 9 ----------------------------------------------------------------------

Verdict multi_owner() {
  const PrivacyParams privacy;
  const NoiseBound bound = solve_noise_bound(privacy);
  const OwnerSettings settings = default_settings(bound);
  const QueryOptions opt = default_options(bound);
  // Re-sharding one corpus.
  const auto db = generate_corpus(1000, {}, 901);
  std::vector<LocalFederation> feds;
  for (std::size_t k = 1; k <= 5; ++k) feds.emplace_back(shard(db, k), settings);
  Rng rng(902);
  int unchanged = 0;
  for (int i = 0; i < 20; ++i) {
    const Trajectory q = sample_query(db[rng() % db.size()], 0.2, rng, 20.0);
    const auto base = feds[0].query(q, opt, i).ids;
    bool same = true;
    for (std::size_t k = 1; k < 5; ++k) same = same && feds[k].query(q, opt, i).ids == base;
    unchanged += same;
  }
  // Equal shards: k owners each holding a 1000-trajectory shard.
  const auto big = generate_corpus(5000, {}, 903);
  const auto shards = shard(big, 5);
  std::vector<Trajectory> queries;
  for (int i = 0; i < 20; ++i) queries.push_back(sample_query(big[rng() % big.size()], 0.2, rng, 20.0));
  std::vector<double> xs, ys;
  for (std::size_t k = 1; k <= 5; ++k) {
    const LocalFederation fed({shards.begin(), shards.begin() + k}, settings);
    double total = 0;
    for (std::size_t i = 0; i < queries.size(); ++i) {
      const auto r = fed.query(queries[i], opt, 50 + i);
      total += double(r.bytes_up() + r.bytes_down());
    }
    xs.push_back(double(k));
    ys.push_back(total / queries.size());
  }
  const double mx = std::accumulate(xs.begin(), xs.end(), 0.0) / xs.size();
  const double my = std::accumulate(ys.begin(), ys.end(), 0.0) / ys.size();
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxy += (xs[i] - mx) * (ys[i] - my);
    sxx += (xs[i] - mx) * (xs[i] - mx);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  const double r2 = sxy * sxy / (sxx * syy);
  std::ostringstream bytes;
  for (double y : ys) bytes << fmt("%.0f ", y);
  std::string b = bytes.str();
  b.pop_back();
  return {unchanged == 20 && r2 >= 0.99,
          fmt("%d/20 queries identical across 1-5 owners; mean bytes for 1..5 equal shards [%s], R^2 %.4f",
              unchanged, b.c_str(), r2)};
}

// --- 10 ---------------------------------------------------------------------

Verdict leakage_audit() {
  const PrivacyParams privacy;
  const NoiseBound bound = solve_noise_bound(privacy);
  const auto db = generate_corpus(600, {}, 1001);
  const LocalFederation fed(shard(db, 2), default_settings(bound));
  Rng rng(1002);
  int audited = 0;
  int passed = 0;
  std::string first_violation;
  for (int i = 0; i < 20; ++i) {
    const Trajectory q = sample_query(db[rng() % db.size()], 0.2, rng, 20.0);
    QueryOptions opt = default_options(bound);
    opt.retain_frames = true;
    if (i % 4 == 3) opt.mode = QueryMode::kNaive;
    std::vector<Transcript> owner_side;
    const FederationResult r = fed.query(q, opt, 70 + i, nullptr, &owner_side);
    std::vector<Point> unmatched;
    for (const auto& t : db) {
      if (!std::binary_search(r.ids.begin(), r.ids.end(), t.id)) {
        unmatched.insert(unmatched.end(), t.points.begin(), t.points.end());
      }
    }
    const AuditSecrets secrets{unmatched, q.points};
    for (std::size_t k = 0; k < r.owners.size(); ++k) {
      for (const Transcript* t : std::initializer_list<const Transcript*>{&r.owners[k].transcript, &owner_side[k]}) {
        const AuditReport rep = audit_transcript(*t, secrets);
        ++audited;
        passed += rep.passed();
        if (!rep.passed() && first_violation.empty()) first_violation = rep.violations.front();
      }
    }
  }
  // The auditor must notice a planted leak, or a pass means nothing.
  const Trajectory& victim = db[0];
  QueryOptions opt = default_options(bound);
  opt.retain_frames = true;
  const Trajectory q = sample_query(db[1], 0.2, rng, 20.0);
  FederationResult r = fed.query(q, opt, 1);
  Transcript planted = r.owners[0].transcript;
  Bytes body;
  ByteWriter w(body);
  w.put<std::uint32_t>(1);
  w.put_string16(std::string(8, 'x'));
  w.put<std::int64_t>(to_fixed(victim.points[0].loc.x));
  planted.record(Direction::kOwnerToClient, MessageType::kResultSet,
                 encode_frame(MessageType::kResultSet, body));
  const bool detects = !audit_transcript(planted, {victim.points, q.points}).passed();
  return {passed == audited && detects,
          fmt("%d/%d transcripts (client and owner views, both modes) within policy; planted leak %s%s%s",
              passed, audited, detects ? "detected" : "NOT detected",
              first_violation.empty() ? "" : "; first violation: ", first_violation.c_str())};
}

// --- 11 ---------------------------------------------------------------------

template <typename E, typename Code>
bool raises(Code expected, const std::function<void()>& fn) {
  try {
    fn();
  } catch (const E& e) {
    return e.code() == expected;
  } catch (...) {
    return false;
  }
  return false;
}

Verdict robustness() {
  std::vector<std::string> failed;
  auto check = [&](bool ok, const char* what) {
    if (!ok) failed.push_back(what);
  };
  const PrivacyParams privacy;
  const NoiseBound bound = solve_noise_bound(privacy);
  const auto db = generate_corpus(1000, {}, 1101);
  const GridSpec spec{{0, 0}, bound.grid_size};
  const GridIndex index = build_index(db, 50, spec);
  const auto path = (std::filesystem::temp_directory_path() /
                     ("ftm-acceptance-" + std::to_string(::getpid()) + ".idx")).string();
  persist_index(index, path);
  check(load_index(path) == index, "index round trip");
  std::filesystem::remove(path);

  const Bytes good = serialize_index(index);
  Bytes b = good;
  b[b.size() / 3] ^= 0x01;
  check(raises<IndexFormatError>(IndexFormatErrorCode::kChecksum, [&] { deserialize_index(b); }),
        "index flipped byte");
  b = good;
  b[4] = 7;
  check(raises<IndexFormatError>(IndexFormatErrorCode::kVersionMismatch, [&] { deserialize_index(b); }),
        "index version");
  b = good;
  b[0] = 'Z';
  check(raises<IndexFormatError>(IndexFormatErrorCode::kBadMagic, [&] { deserialize_index(b); }),
        "index magic");
  check(raises<IndexFormatError>(IndexFormatErrorCode::kTruncated, [&] { deserialize_index({}); }),
        "index empty");

  const Bytes frame = encode_frame(MessageType::kHello, encode(Hello{spec, 50}));
  auto decode = [](const Bytes& f) {
    std::size_t used = 0;
    decode_frame(f, used);
  };
  Bytes f = frame;
  f[20] ^= 0x80;
  check(raises<ProtocolError>(ProtocolErrorCode::kChecksum, [&] { decode(f); }), "frame checksum");
  f = frame;
  f[4] = kWireVersion + 1;
  check(raises<ProtocolError>(ProtocolErrorCode::kVersionMismatch, [&] { decode(f); }), "frame version");
  f = frame;
  f[0] = 'X';
  check(raises<ProtocolError>(ProtocolErrorCode::kBadMagic, [&] { decode(f); }), "frame magic");
  check(raises<ProtocolError>(ProtocolErrorCode::kTruncated,
                              [&] { decode(Bytes(frame.begin(), frame.end() - 1)); }),
        "frame truncated");

  // A live owner answers a corrupted or wrong-version frame with an Error
  // frame carrying the designated code, then closes.
  OwnerSettings settings = default_settings(bound);
  const OwnerNode node(settings, std::vector<Trajectory>(db.begin(), db.begin() + 100));
  for (const auto& [mutate, code, what] :
       {std::tuple{std::size_t{20}, ProtocolErrorCode::kChecksum, "owner: corrupted frame"},
        std::tuple{std::size_t{4}, ProtocolErrorCode::kVersionMismatch, "owner: version mismatch"}}) {
    auto [c, s] = make_memory_pipe();
    bool owner_raised = false;
    std::thread server([&, srv = std::move(s)] {
      try {
        node.handle(*srv);
      } catch (const ProtocolError& e) {
        owner_raised = e.code() == code;
      }
    });
    Bytes bad = frame;
    bad[mutate] ^= mutate == 4 ? 0x03 : 0x80;
    c->write_all(bad);
    bool replied = false;
    try {
      const Frame reply = read_frame(*c);
      replied = reply.type == MessageType::kError && decode_error(reply.body).code == code;
    } catch (const Error&) {
    }
    c->close();
    server.join();
    check(replied && owner_raised, what);
  }
  std::string detail = failed.empty() ? "index round trip equal; 8 corruption cases and 2 live-owner cases raised their designated codes"
                                      : "failed:";
  for (const auto& x : failed) detail += " [" + x + "]";
  return {failed.empty(), detail};
}

struct Criterion {
  int number;
  const char* name;
  Verdict (*run)();
};

const Criterion kCriteria[] = {
    {1, "end-to-end exactness", end_to_end},
    {2, "BPL boundedness and tail mass", bpl_bounded},
    {3, "radius distribution", radius_distribution},
    {4, "geo-indistinguishability audit", geo_indistinguishability},
    {5, "in-cell success probability", success_probability},
    {6, "numerics round trips", numerics},
    {7, "filter and pruning soundness", soundness},
    {8, "efficiency", efficiency},
    {9, "multi-owner equivalence and scaling", multi_owner},
    {10, "leakage audit", leakage_audit},
    {11, "persistence and protocol robustness", robustness},
};

}  // namespace
}  // namespace ftm

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  bool all_passed = true;
  for (const auto& c : ftm::kCriteria) {
    if (!selected.empty() && std::find(selected.begin(), selected.end(), c.number) == selected.end()) {
      continue;
    }
    ftm::Verdict v;
    try {
      v = c.run();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    all_passed = all_passed && v.pass;
    std::printf("criterion %2d %s: %s: %s\n", c.number, v.pass ? "PASS" : "FAIL", c.name, v.detail.c_str());
    std::fflush(stdout);
  }
  return all_passed ? 0 : 1;
}
