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
#include "ftm/secure_verify.h"

#include <sodium.h>

#include <algorithm>
#include <cmath>
#include <cstring>
#include <mutex>
#include <string>

#include "ftm/errors.h"

namespace ftm {
namespace {

using u128 = unsigned __int128;
using i128 = __int128;

void ensure_sodium() {
  static std::once_flag once;
  std::call_once(once, [] {
    if (sodium_init() < 0) throw Error("libsodium failed to initialize");
  });
}

u128 magnitude(i128 v) { return v < 0 ? static_cast<u128>(-v) : static_cast<u128>(v); }

// 256-bit unsigned value as two 128-bit halves; enough for the sum of two
// squares of 127-bit magnitudes.
struct Wide {
  u128 hi = 0;
  u128 lo = 0;
};

Wide square(u128 v) {
  const auto vh = static_cast<std::uint64_t>(v >> 64);
  const auto vl = static_cast<std::uint64_t>(v);
  const u128 mid = static_cast<u128>(vh) * vl;
  Wide r{static_cast<u128>(vh) * vh, static_cast<u128>(vl) * vl};
  // v^2 = hh 2^128 + 2 mid 2^64 + ll
  const u128 mid_lo = mid << 65;
  r.lo += mid_lo;
  if (r.lo < mid_lo) ++r.hi;
  r.hi += mid >> 63;
  return r;
}

Wide add(Wide a, Wide b) {
  Wide r{a.hi + b.hi, a.lo + b.lo};
  if (r.lo < a.lo) ++r.hi;
  return r;
}

bool less_equal(Wide a, Wide b) {
  return a.hi < b.hi || (a.hi == b.hi && a.lo <= b.lo);
}

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

enum class InputKind : std::uint8_t { kQueryKey = 0, kDirect = 1 };

Bytes session_plaintext(VerifyRole role, std::uint32_t session_id,
                        std::span<const Point> points) {
  Bytes out;
  out.reserve(9 + points.size() * 24);
  ByteWriter w(out);
  w.put(session_id);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(role));
  w.put<std::uint32_t>(static_cast<std::uint32_t>(points.size()));
  for (const Point& p : points) {
    const FixedPoint f = to_fixed(p);
    w.put(f.ts);
    w.put(f.x);
    w.put(f.y);
  }
  return out;
}

std::array<std::uint8_t, crypto_secretbox_NONCEBYTES> session_nonce(
    VerifyRole role, std::uint32_t session_id) {
  std::array<std::uint8_t, crypto_secretbox_NONCEBYTES> n{};
  n[0] = 'F';
  n[1] = 'T';
  n[2] = 'M';
  n[3] = 'S';
  n[4] = static_cast<std::uint8_t>(role);
  std::memcpy(n.data() + 5, &session_id, 4);
  return n;
}

[[noreturn]] void reject(ProtocolErrorCode code, const std::string& what) {
  throw ProtocolError(code, "secure session: " + what);
}

}  // namespace

std::int64_t to_fixed(double v) {
  const double q = std::round(v / kQuantum);
  if (!std::isfinite(q) || std::fabs(q) > static_cast<double>(kFixedLimit)) {
    throw DomainError("value " + std::to_string(v) +
                      " is outside the fixed-point range");
  }
  return static_cast<std::int64_t>(q);
}

FixedPoint to_fixed(const Point& p) {
  return {to_fixed(p.ts), to_fixed(p.loc.x), to_fixed(p.loc.y)};
}

FixedSegment to_fixed(const Segment& s) { return {to_fixed(s.o), to_fixed(s.d)}; }

std::int64_t threshold_to_fixed(double tau) {
  // The small slack keeps exact multiples such as 50 m at 50000 quanta.
  const double q = std::ceil(tau / kQuantum - 1e-6);
  if (!(tau > 0.0) || !(q < 2147483648.0)) {
    throw DomainError("threshold " + std::to_string(tau) +
                      " is outside (0, 2^31) quanta");
  }
  return std::max<std::int64_t>(1, static_cast<std::int64_t>(q));
}

bool fixed_within(const FixedPoint& q, const FixedSegment& s, std::int64_t tau) {
  if (q.ts < s.o.ts || q.ts > s.d.ts) return false;
  const std::int64_t duration = s.d.ts - s.o.ts;
  i128 dx;
  i128 dy;
  i128 limit;
  if (duration == 0) {
    dx = static_cast<i128>(q.x) - s.o.x;
    dy = static_cast<i128>(q.y) - s.o.y;
    limit = tau;
  } else {
    // Scaled by the duration D so no division is needed:
    // (q - o) D - (q.ts - o.ts)(d - o) = D (q - loc_s(q.ts)).
    const i128 elapsed = static_cast<i128>(q.ts) - s.o.ts;
    dx = (static_cast<i128>(q.x) - s.o.x) * duration -
         elapsed * (static_cast<i128>(s.d.x) - s.o.x);
    dy = (static_cast<i128>(q.y) - s.o.y) * duration -
         elapsed * (static_cast<i128>(s.d.y) - s.o.y);
    limit = static_cast<i128>(tau) * duration;
  }
  const u128 ax = magnitude(dx);
  const u128 ay = magnitude(dy);
  const u128 al = magnitude(limit);
  if (ax > al || ay > al) return false;
  return less_equal(add(square(ax), square(ay)), square(al));
}

bool secure_match(SecureSession& session, std::span<const FixedSegment> owner,
                  std::int64_t tau) {
  const std::size_t n = session.query_length();
  const SecureSession::Counter count = session.zero_counter();
  for (std::size_t q = 0; q < n; ++q) {
    const SecureSession::Bit match = session.zero_bit();
    for (const FixedSegment& s : owner) {
      session.test_point_segment(q, s, tau, match);
    }
    session.accumulate(count, match);
  }
  return session.reveal_equals(count, static_cast<std::uint32_t>(n));
}

// --- SimulatedIdeal -------------------------------------------------------

std::uint64_t CostModel::traffic_bytes(std::uint64_t comparisons,
                                       std::uint64_t increments) const {
  return session_overhead + comparisons * per_comparison +
         increments * per_increment + per_equality;
}

QueryKey generate_query_key() {
  ensure_sodium();
  QueryKey k;
  crypto_secretbox_keygen(k.bytes.data());
  return k;
}

Bytes seal_query_key(const QueryKey& key, const EvaluatorKey& evaluator) {
  ensure_sodium();
  Bytes out(crypto_box_SEALBYTES + key.bytes.size());
  crypto_box_seal(out.data(), key.bytes.data(), key.bytes.size(),
                  evaluator.data());
  return out;
}

Bytes seal_session_input(const QueryKey& key, VerifyRole role,
                         std::uint32_t session_id,
                         std::span<const Point> points) {
  ensure_sodium();
  const Bytes plain = session_plaintext(role, session_id, points);
  const auto nonce = session_nonce(role, session_id);
  Bytes out(1 + crypto_secretbox_MACBYTES + plain.size());
  out[0] = static_cast<std::uint8_t>(InputKind::kQueryKey);
  crypto_secretbox_easy(out.data() + 1, plain.data(), plain.size(),
                        nonce.data(), key.bytes.data());
  return out;
}

Bytes seal_session_input(const EvaluatorKey& evaluator, VerifyRole role,
                         std::uint32_t session_id,
                         std::span<const Point> points) {
  ensure_sodium();
  const Bytes plain = session_plaintext(role, session_id, points);
  Bytes out(1 + crypto_box_SEALBYTES + plain.size());
  out[0] = static_cast<std::uint8_t>(InputKind::kDirect);
  crypto_box_seal(out.data() + 1, plain.data(), plain.size(), evaluator.data());
  return out;
}

SimulatedIdealEvaluator::SimulatedIdealEvaluator(CostModel cost) : cost_(cost) {
  ensure_sodium();
  crypto_box_keypair(public_key_.data(), secret_key_.data());
}

SimulatedIdealEvaluator::~SimulatedIdealEvaluator() {
  sodium_memzero(secret_key_.data(), secret_key_.size());
}

QueryKey SimulatedIdealEvaluator::open_query_key(
    std::span<const std::uint8_t> sealed) const {
  QueryKey k;
  if (sealed.size() != crypto_box_SEALBYTES + k.bytes.size() ||
      crypto_box_seal_open(k.bytes.data(), sealed.data(), sealed.size(),
                           public_key_.data(), secret_key_.data()) != 0) {
    reject(ProtocolErrorCode::kMalformed, "query key does not open");
  }
  return k;
}

std::unique_ptr<SimulatedSession> SimulatedIdealEvaluator::open_session(
    std::span<const std::uint8_t> blob, const QueryKey* key, VerifyRole role,
    std::uint32_t session_id, std::uint32_t expected_length) const {
  if (blob.empty()) reject(ProtocolErrorCode::kMalformed, "empty input");
  Bytes plain;
  const auto body = blob.subspan(1);
  switch (static_cast<InputKind>(blob[0])) {
    case InputKind::kQueryKey: {
      if (key == nullptr) {
        reject(ProtocolErrorCode::kMalformed, "no query key was published");
      }
      if (body.size() < crypto_secretbox_MACBYTES) {
        reject(ProtocolErrorCode::kMalformed, "input does not open");
      }
      plain.resize(body.size() - crypto_secretbox_MACBYTES);
      const auto nonce = session_nonce(role, session_id);
      if (crypto_secretbox_open_easy(plain.data(), body.data(), body.size(),
                                     nonce.data(), key->bytes.data()) != 0) {
        reject(ProtocolErrorCode::kMalformed, "input does not open");
      }
      break;
    }
    case InputKind::kDirect: {
      if (body.size() < crypto_box_SEALBYTES) {
        reject(ProtocolErrorCode::kMalformed, "input does not open");
      }
      plain.resize(body.size() - crypto_box_SEALBYTES);
      if (crypto_box_seal_open(plain.data(), body.data(), body.size(),
                               public_key_.data(), secret_key_.data()) != 0) {
        reject(ProtocolErrorCode::kMalformed, "input does not open");
      }
      break;
    }
    default:
      reject(ProtocolErrorCode::kMalformed, "unknown input kind");
  }

  ByteReader r(plain);
  std::uint32_t sid = 0;
  std::uint8_t sealed_role = 0;
  std::uint32_t n = 0;
  if (!r.get(sid) || !r.get(sealed_role) || !r.get(n)) {
    reject(ProtocolErrorCode::kMalformed, "short input");
  }
  if (sid != session_id || sealed_role != static_cast<std::uint8_t>(role)) {
    reject(ProtocolErrorCode::kSessionMismatch,
           "input bound to session " + std::to_string(sid) + ", expected " +
               std::to_string(session_id));
  }
  if (n != expected_length) {
    reject(ProtocolErrorCode::kLengthMismatch,
           "client supplied " + std::to_string(n) + " points, owner expects " +
               std::to_string(expected_length));
  }
  if (r.remaining() != static_cast<std::size_t>(n) * 24) {
    reject(ProtocolErrorCode::kMalformed, "input size disagrees with its count");
  }
  std::vector<FixedPoint> points(n);
  for (auto& p : points) {
    r.get(p.ts);
    r.get(p.x);
    r.get(p.y);
  }
  sodium_memzero(plain.data(), plain.size());
  return std::make_unique<SimulatedSession>(std::move(points), cost_,
                                            session_id, role);
}

SimulatedSession::SimulatedSession(std::vector<FixedPoint> query, CostModel cost,
                                   std::uint32_t session_id, VerifyRole role)
    : query_(std::move(query)), cost_(cost), session_id_(session_id), role_(role) {}

SecureSession::Bit SimulatedSession::zero_bit() {
  bits_.push_back(0);
  return {static_cast<std::uint32_t>(bits_.size() - 1)};
}

SecureSession::Counter SimulatedSession::zero_counter() {
  counters_.push_back(0);
  return {static_cast<std::uint32_t>(counters_.size() - 1)};
}

void SimulatedSession::test_point_segment(std::size_t q, const FixedSegment& s,
                                          std::int64_t tau, Bit match) {
  ++comparisons_;
  const bool hit = fixed_within(query_.at(q), s, tau);
  bits_.at(match.slot) |= static_cast<std::uint8_t>(hit);
}

void SimulatedSession::accumulate(Counter counter, Bit bit) {
  ++increments_;
  counters_.at(counter.slot) += bits_.at(bit.slot);
}

bool SimulatedSession::reveal_equals(Counter counter, std::uint32_t length) {
  ++equalities_;
  return counters_.at(counter.slot) == length;
}

Bytes SimulatedSession::traffic() const {
  const std::uint64_t size =
      cost_.traffic_bytes(comparisons_, increments_) +
      (equalities_ > 1 ? (equalities_ - 1) * cost_.per_equality : 0);
  Bytes out(size);
  std::uint64_t state = (static_cast<std::uint64_t>(session_id_) << 8) |
                        static_cast<std::uint8_t>(role_);
  std::size_t i = 0;
  for (; i + 8 <= out.size(); i += 8) {
    const std::uint64_t v = splitmix64(state);
    std::memcpy(out.data() + i, &v, 8);
  }
  if (i < out.size()) {
    const std::uint64_t v = splitmix64(state);
    std::memcpy(out.data() + i, &v, out.size() - i);
  }
  return out;
}

// --- one-shot -------------------------------------------------------------

MessageType session_message(VerifyRole role) {
  return role == VerifyRole::kReferencePrune ? MessageType::kPruneSession
                                             : MessageType::kValidateSession;
}

VerifyOutcome secure_verify(const VerifyRequest& req,
                            const SimulatedIdealEvaluator& evaluator,
                            bool retain_frames) {
  if (req.query.empty() || req.owner.empty()) {
    throw DomainError("secure_verify: both sides need at least one element");
  }
  const std::int64_t tau = threshold_to_fixed(req.tau_eff);
  const MessageType type = session_message(req.role);
  const std::uint32_t sid = 0;
  const auto query_length = static_cast<std::uint32_t>(req.query.size());
  VerifyOutcome out{false, 0, Transcript(retain_frames)};
  LeakageLedger& ledger = out.transcript.ledger();

  // Owner announces the session and its own length.
  SessionBatch open{SessionPhase::kOpen, {{sid, static_cast<std::uint32_t>(req.owner.size()), query_length}}, {}, {}};
  out.transcript.record(Direction::kOwnerToClient, type, encode_frame(type, encode(open)));
  ledger.client.insert(req.role == VerifyRole::kReferencePrune ? fact::kReferenceLengths
                                                               : fact::kCandidateLengths);

  // Client seals its points to the evaluator.
  SessionBatch input{SessionPhase::kInput, {}, {{sid, seal_session_input(evaluator.public_key(), req.role, sid, req.query)}}, {}};
  out.transcript.record(Direction::kClientToOwner, type, encode_frame(type, encode(input)));
  ledger.owner.insert(req.role == VerifyRole::kReferencePrune ? fact::kSubqueryLength
                                                              : fact::kQueryLength);

  auto session = evaluator.open_session(input.inputs.front().blob, nullptr,
                                        req.role, sid, query_length);
  std::vector<FixedSegment> owner;
  owner.reserve(req.owner.size());
  for (const Segment& s : req.owner) owner.push_back(to_fixed(s));
  out.match = secure_match(*session, owner, tau);
  out.comparisons = session->comparisons();

  SessionBatch result{SessionPhase::kResult, {}, {}, {{sid, out.match, session->traffic()}}};
  out.transcript.record(Direction::kOwnerToClient, type, encode_frame(type, encode(result)));
  ledger.owner.insert(fact::kMatchBits);
  ledger.client.insert(fact::kMatchBits);
  return out;
}

}  // namespace ftm
