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
#ifndef FTM_SECURE_VERIFY_H_
#define FTM_SECURE_VERIFY_H_

// Secure verification of one (owner trajectory, query) pair.
//
// The protocol logic lives in secure_match() and touches private data only
// through three primitives of SecureSession: a point-segment test that ORs
// into a secret per-query-point bit, a secret counter increment, and the
// final reveal of (count == length). Any backend providing these slots in
// unchanged.
//
// The shipped backend is SimulatedIdeal: a trusted evaluator living in the
// owner process. The client seals its points to the evaluator's public key
// (directly, or through a per-query secretbox key) so owner code only
// relays ciphertext. Its replies carry filler traffic sized by a CostModel
// so byte counts track what a circuit-based backend would send.

#include <array>
#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "ftm/bytes.h"
#include "ftm/geometry.h"
#include "ftm/transcript.h"
#include "ftm/wire.h"

namespace ftm {

// --- fixed point ----------------------------------------------------------

// Millimeters / milliseconds.
struct FixedPoint {
  std::int64_t ts = 0;
  std::int64_t x = 0;
  std::int64_t y = 0;
  friend bool operator==(const FixedPoint&, const FixedPoint&) = default;
};

struct FixedSegment {
  FixedPoint o;
  FixedPoint d;
};

// Largest magnitude accepted by to_fixed, in quanta (about 1.1e12 m or s).
inline constexpr std::int64_t kFixedLimit = std::int64_t{1} << 50;

// Rounds to the nearest quantum; DomainError outside +-kFixedLimit.
std::int64_t to_fixed(double v);
FixedPoint to_fixed(const Point& p);
FixedSegment to_fixed(const Segment& s);
// Thresholds round up so the secure test never rejects a pair the real
// threshold accepts. DomainError unless 0 < tau < 2^31 quanta.
std::int64_t threshold_to_fixed(double tau);

// The secure predicate in the clear, with exact integer arithmetic:
// q.ts inside the segment's window and |q - loc_s(q.ts)|^2 <= tau^2.
bool fixed_within(const FixedPoint& q, const FixedSegment& s, std::int64_t tau);

// --- backend interface ----------------------------------------------------

enum class VerifyRole : std::uint8_t { kReferencePrune = 0, kFinalValidate = 1 };

class SecureSession {
 public:
  struct Bit {
    std::uint32_t slot;
  };
  struct Counter {
    std::uint32_t slot;
  };

  virtual ~SecureSession() = default;

  // Number of client points held by the backend.
  virtual std::size_t query_length() const = 0;
  virtual Bit zero_bit() = 0;
  virtual Counter zero_counter() = 0;

  // match |= window(q, s) && dist2(q, loc_s(q.ts)) <= tau^2.
  // The owner supplies its segment in the clear; q stays secret.
  virtual void test_point_segment(std::size_t q, const FixedSegment& s,
                                  std::int64_t tau, Bit match) = 0;
  // counter += bit.
  virtual void accumulate(Counter counter, Bit bit) = 0;
  // Reveals counter == length and nothing else.
  virtual bool reveal_equals(Counter counter, std::uint32_t length) = 0;
};

// Verification logic shared by every backend. Evaluates every owner
// segment for every query point; nothing short-circuits.
bool secure_match(SecureSession& session, std::span<const FixedSegment> owner,
                  std::int64_t tau);

// --- SimulatedIdeal -------------------------------------------------------

// Bytes a circuit backend would exchange, charged per session.
struct CostModel {
  std::uint32_t session_overhead = 64;
  std::uint32_t per_comparison = 8;
  std::uint32_t per_increment = 2;
  std::uint32_t per_equality = 8;

  std::uint64_t traffic_bytes(std::uint64_t comparisons,
                              std::uint64_t increments) const;
};

inline constexpr std::size_t kQueryKeySize = 32;
struct QueryKey {
  std::array<std::uint8_t, kQueryKeySize> bytes{};
};

QueryKey generate_query_key();
// Seals a per-query key for the evaluator (anonymous sealed box).
Bytes seal_query_key(const QueryKey& key, const EvaluatorKey& evaluator);
// Session input under an established query key. The nonce is derived from
// (role, session id), so every session of a query uses a distinct one.
Bytes seal_session_input(const QueryKey& key, VerifyRole role,
                         std::uint32_t session_id,
                         std::span<const Point> points);
// Session input sealed straight to the evaluator, no query key needed.
Bytes seal_session_input(const EvaluatorKey& evaluator, VerifyRole role,
                         std::uint32_t session_id,
                         std::span<const Point> points);

class SimulatedSession;

class SimulatedIdealEvaluator {
 public:
  explicit SimulatedIdealEvaluator(CostModel cost = {});
  ~SimulatedIdealEvaluator();
  SimulatedIdealEvaluator(const SimulatedIdealEvaluator&) = delete;
  SimulatedIdealEvaluator& operator=(const SimulatedIdealEvaluator&) = delete;

  const EvaluatorKey& public_key() const { return public_key_; }
  const CostModel& cost_model() const { return cost_; }

  // Throws ProtocolError(kMalformed) when the box does not open.
  QueryKey open_query_key(std::span<const std::uint8_t> sealed) const;

  // Decrypts a client input. `key` may be null when only direct sealing
  // is expected. Throws ProtocolError: kMalformed (does not open),
  // kSessionMismatch (bound to another session or role), kLengthMismatch
  // (point count differs from `expected_length`).
  std::unique_ptr<SimulatedSession> open_session(
      std::span<const std::uint8_t> blob, const QueryKey* key, VerifyRole role,
      std::uint32_t session_id, std::uint32_t expected_length) const;

 private:
  CostModel cost_;
  EvaluatorKey public_key_{};
  std::array<std::uint8_t, 32> secret_key_{};
};

class SimulatedSession final : public SecureSession {
 public:
  SimulatedSession(std::vector<FixedPoint> query, CostModel cost,
                   std::uint32_t session_id, VerifyRole role);

  std::size_t query_length() const override { return query_.size(); }
  Bit zero_bit() override;
  Counter zero_counter() override;
  void test_point_segment(std::size_t q, const FixedSegment& s,
                          std::int64_t tau, Bit match) override;
  void accumulate(Counter counter, Bit bit) override;
  bool reveal_equals(Counter counter, std::uint32_t length) override;

  std::uint64_t comparisons() const { return comparisons_; }
  // Filler standing in for the circuit traffic of this session. Content
  // is pseudo-random and independent of any private input.
  Bytes traffic() const;

 private:
  std::vector<FixedPoint> query_;
  CostModel cost_;
  std::uint32_t session_id_;
  VerifyRole role_;
  std::vector<std::uint8_t> bits_;
  std::vector<std::uint64_t> counters_;
  std::uint64_t comparisons_ = 0;
  std::uint64_t increments_ = 0;
  std::uint64_t equalities_ = 0;
};

// --- one-shot verification ------------------------------------------------

struct VerifyRequest {
  VerifyRole role = VerifyRole::kFinalValidate;
  std::vector<Point> query;     // client side: T_Q or T_Q'
  std::vector<Segment> owner;   // owner side: candidate segments or rt
  double tau_eff = 0.0;
};

struct VerifyOutcome {
  bool match = false;
  std::uint64_t comparisons = 0;
  Transcript transcript;
};

// Runs one session (Open, Input, Result frames) through the evaluator and
// records the transcript and leakage ledger. Throws DomainError for an
// empty side or tau_eff <= 0.
VerifyOutcome secure_verify(const VerifyRequest& req,
                            const SimulatedIdealEvaluator& evaluator,
                            bool retain_frames = false);

// Message type carrying sessions of the given role.
MessageType session_message(VerifyRole role);

}  // namespace ftm

#endif  // FTM_SECURE_VERIFY_H_
