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

#include <cmath>

#include "ftm/audit.h"
#include "ftm/errors.h"
#include "ftm/secure_verify.h"
#include "ftm/transcript.h"
#include "ftm/wire.h"
#include "test_util.h"

namespace ftm {
namespace {

Trajectory t0() {
  return {"T0", {{0, {2, 1}}, {2, {1, 2}}, {5, {4, 5}}, {7, {6, 1}}}};
}
Trajectory tq() { return {"TQ", {{4, {3, 3}}, {6, {4, 2}}}}; }

VerifyRequest request(const Trajectory& t, const Trajectory& q, double tau) {
  return {VerifyRole::kFinalValidate, q.points, segments_of(t), tau};
}

class SecureVerify : public ::testing::Test {
 protected:
  SimulatedIdealEvaluator evaluator_;
};

TEST(FixedPoint, Conversions) {
  EXPECT_EQ(to_fixed(1.2346), 1235);
  EXPECT_EQ(to_fixed(-2.0005001), -2001);
  EXPECT_EQ(to_fixed(-0.0004), 0);
  EXPECT_EQ(to_fixed(Point{1.5, {2, -3}}), (FixedPoint{1500, 2000, -3000}));
  EXPECT_THROW(to_fixed(1e13), DomainError);
  EXPECT_EQ(threshold_to_fixed(1.5), 1500);
  EXPECT_EQ(threshold_to_fixed(1.50001), 1501);
  EXPECT_THROW(threshold_to_fixed(0), DomainError);
  EXPECT_THROW(threshold_to_fixed(3e6), DomainError);
}

TEST(FixedPoint, WithinIsExactAtTheBoundary) {
  const FixedSegment s{{0, 0, 0}, {1000, 1000, 0}};
  EXPECT_TRUE(fixed_within({500, 500, 300}, s, 300));
  EXPECT_FALSE(fixed_within({500, 500, 301}, s, 300));
  EXPECT_FALSE(fixed_within({1001, 1000, 0}, s, 300));  // outside the window
  // 3-4-5 triangle: distance exactly 5000.
  EXPECT_TRUE(fixed_within({0, 3000, 4000}, {{0, 0, 0}, {0, 0, 0}}, 5000));
  EXPECT_FALSE(fixed_within({0, 3000, 4000}, {{0, 0, 0}, {0, 0, 0}}, 4999));
  // Large magnitudes do not overflow.
  const std::int64_t big = kFixedLimit - 1;
  EXPECT_TRUE(fixed_within({big, big, -big}, {{0, big, -big}, {big, big, -big}}, 1));
  EXPECT_FALSE(fixed_within({big, -big, big}, {{0, big, -big}, {big, big, -big}}, (std::int64_t{1} << 31) - 1));
}

TEST_F(SecureVerify, WorkedExample) {
  const VerifyOutcome out = secure_verify(request(t0(), tq(), 1.5), evaluator_);
  EXPECT_TRUE(out.match);
  EXPECT_EQ(out.match, matches(t0(), tq(), 1.5));
  EXPECT_EQ(out.comparisons, 2u * 3u);  // every pair, no short circuit
  EXPECT_FALSE(secure_verify(request(t0(), tq(), 1.2), evaluator_).match);
}

TEST_F(SecureVerify, TemporalMiss) {
  const Trajectory q{"q", {{8, {6, 1}}}};
  EXPECT_FALSE(secure_verify(request(t0(), q, 1000), evaluator_).match);
}

TEST_F(SecureVerify, AgreesWithPlaintextPredicate) {
  Rng rng(31);
  int positives = 0;
  for (int i = 0; i < 10000; ++i) {
    const Trajectory t = testing::random_trajectory(rng, 1 + rng() % 6, 300, 40);
    const Trajectory q = testing::follower_query(rng, t, 1 + rng() % 4,
                                                 testing::uniform(rng, 0, 30), 1.0);
    const double tau = quantize(testing::uniform(rng, 1, 40));
    const bool expected = matches(t, q, tau);
    const VerifyOutcome out = secure_verify(request(t, q, tau), evaluator_);
    positives += expected;
    ASSERT_EQ(out.match, expected) << "case " << i;
    EXPECT_EQ(out.comparisons, q.size() * segments_of(t).size());
  }
  EXPECT_GT(positives, 1000);
  EXPECT_LT(positives, 9000);
}

TEST_F(SecureVerify, TranscriptShapeAndTrafficSize) {
  const VerifyOutcome out = secure_verify(request(t0(), tq(), 1.5), evaluator_, true);
  ASSERT_EQ(out.transcript.messages().size(), 3u);
  EXPECT_EQ(out.transcript.messages()[0].direction, Direction::kOwnerToClient);
  EXPECT_EQ(out.transcript.messages()[1].direction, Direction::kClientToOwner);
  EXPECT_EQ(out.transcript.messages()[0].type, MessageType::kValidateSession);
  std::size_t used = 0;
  const Frame f = decode_frame(out.transcript.messages()[2].raw, used);
  const SessionBatch result = decode_session_batch(f.body);
  ASSERT_EQ(result.results.size(), 1u);
  const CostModel cost;
  // 6 comparisons, 2 increments, one equality.
  EXPECT_EQ(result.results[0].traffic.size(), cost.traffic_bytes(6, 2));
  EXPECT_EQ(cost.traffic_bytes(6, 2), 64u + 8 * 6 + 2 * 2 + 8);
  EXPECT_EQ(meter(out.transcript), out.transcript.bytes(Direction::kClientToOwner) +
                                       out.transcript.bytes(Direction::kOwnerToClient));
  // Prune sessions travel in their own message type.
  VerifyRequest prune = request(t0(), tq(), 3);
  prune.role = VerifyRole::kReferencePrune;
  EXPECT_EQ(secure_verify(prune, evaluator_).transcript.messages()[0].type,
            MessageType::kPruneSession);
}

TEST_F(SecureVerify, RejectsEmptySides) {
  EXPECT_THROW(secure_verify({VerifyRole::kFinalValidate, {}, segments_of(t0()), 1}, evaluator_),
               DomainError);
  EXPECT_THROW(secure_verify({VerifyRole::kFinalValidate, tq().points, {}, 1}, evaluator_),
               DomainError);
  EXPECT_THROW(secure_verify(request(t0(), tq(), 0), evaluator_), DomainError);
}

ProtocolErrorCode open_error(const SimulatedIdealEvaluator& ev, const Bytes& blob,
                             const QueryKey* key, VerifyRole role, std::uint32_t sid,
                             std::uint32_t len) {
  try {
    ev.open_session(blob, key, role, sid, len);
  } catch (const ProtocolError& e) {
    return e.code();
  }
  ADD_FAILURE() << "session opened";
  return ProtocolErrorCode::kInternal;
}

TEST_F(SecureVerify, SessionInputBindings) {
  const auto pts = tq().points;
  const Bytes direct = seal_session_input(evaluator_.public_key(), VerifyRole::kFinalValidate, 7, pts);
  EXPECT_NO_THROW(evaluator_.open_session(direct, nullptr, VerifyRole::kFinalValidate, 7, 2));
  EXPECT_EQ(open_error(evaluator_, direct, nullptr, VerifyRole::kFinalValidate, 7, 3),
            ProtocolErrorCode::kLengthMismatch);
  EXPECT_EQ(open_error(evaluator_, direct, nullptr, VerifyRole::kFinalValidate, 8, 2),
            ProtocolErrorCode::kSessionMismatch);
  EXPECT_EQ(open_error(evaluator_, direct, nullptr, VerifyRole::kReferencePrune, 7, 2),
            ProtocolErrorCode::kSessionMismatch);
  Bytes tampered = direct;
  tampered.back() ^= 1;
  EXPECT_EQ(open_error(evaluator_, tampered, nullptr, VerifyRole::kFinalValidate, 7, 2),
            ProtocolErrorCode::kMalformed);

  // Through a per-query key.
  const QueryKey key = generate_query_key();
  const QueryKey opened = evaluator_.open_query_key(seal_query_key(key, evaluator_.public_key()));
  EXPECT_EQ(opened.bytes, key.bytes);
  const Bytes boxed = seal_session_input(key, VerifyRole::kReferencePrune, 3, pts);
  EXPECT_NO_THROW(evaluator_.open_session(boxed, &opened, VerifyRole::kReferencePrune, 3, 2));
  EXPECT_NE(open_error(evaluator_, boxed, &opened, VerifyRole::kReferencePrune, 4, 2),
            ProtocolErrorCode::kInternal);
  EXPECT_EQ(open_error(evaluator_, boxed, nullptr, VerifyRole::kReferencePrune, 3, 2),
            ProtocolErrorCode::kMalformed);
  // Another evaluator cannot open the key.
  SimulatedIdealEvaluator other;
  EXPECT_THROW(other.open_query_key(seal_query_key(key, evaluator_.public_key())), ProtocolError);
}

TEST(Meter, EmptyAndHandshake) {
  Transcript t;
  EXPECT_EQ(meter(t), 0u);
  const Bytes hello = encode_frame(MessageType::kHello, encode(Hello{{{0, 0}, 690.194}, 50}));
  t.record(Direction::kClientToOwner, MessageType::kHello, hello);
  EXPECT_EQ(meter(t), 46u);
  EXPECT_EQ(kHelloFrameSize, 46u);
  t.record(Direction::kOwnerToClient, MessageType::kHelloAck,
           encode_frame(MessageType::kHelloAck, encode(HelloAck{})));
  EXPECT_EQ(meter(t), 46u + 55u);
}

TEST_F(SecureVerify, AuditPassesOnHonestTranscript) {
  Rng rng(32);
  for (int i = 0; i < 50; ++i) {
    const Trajectory t = testing::random_trajectory(rng, 2 + rng() % 6, 3000, 200);
    const Trajectory q = testing::follower_query(rng, t, 3, 20);
    const VerifyOutcome out = secure_verify(request(t, q, 25), evaluator_, true);
    const AuditReport r = audit_transcript(out.transcript, {t.points, q.points});
    EXPECT_TRUE(r.passed()) << (r.violations.empty() ? "" : r.violations.front());
    EXPECT_EQ(r.recomputed, out.transcript.ledger());
  }
}

TEST_F(SecureVerify, AuditDetectsLeaks) {
  const Trajectory t{"t", {{1000.25, {5123.5, 777.125}}, {1100.5, {5200.75, 801.5}}}};
  const Trajectory q{"q", {{1050.125, {5150.375, 790.25}}}};
  VerifyOutcome out = secure_verify(request(t, q, 30), evaluator_, true);
  ASSERT_TRUE(audit_transcript(out.transcript, {t.points, q.points}).passed());

  // A query coordinate sent in the clear to the owner.
  Transcript leaky = out.transcript;
  Bytes body;
  ByteWriter w(body);
  w.put<std::uint8_t>(1);
  w.put<std::uint32_t>(1);
  w.put<std::uint32_t>(0);
  w.put<std::uint32_t>(8);
  w.put<std::int64_t>(to_fixed(q.points[0].loc.x));
  leaky.record(Direction::kClientToOwner, MessageType::kValidateSession,
               encode_frame(MessageType::kValidateSession, body));
  EXPECT_FALSE(audit_transcript(leaky, {t.points, q.points}).passed());

  // An owner coordinate in a result message.
  Transcript leaky2 = out.transcript;
  Bytes body2;
  ByteWriter w2(body2);
  w2.put<std::uint8_t>(2);
  w2.put<std::uint32_t>(1);
  w2.put<std::uint32_t>(0);
  w2.put<std::uint8_t>(0);
  w2.put<std::uint32_t>(8);
  w2.put<double>(t.points[1].loc.x);
  leaky2.record(Direction::kOwnerToClient, MessageType::kValidateSession,
                encode_frame(MessageType::kValidateSession, body2));
  EXPECT_FALSE(audit_transcript(leaky2, {t.points, q.points}).passed());

  // A disallowed fact: the owner disclosing |TD|.
  Transcript sized = out.transcript;
  sized.record(Direction::kOwnerToClient, MessageType::kHelloAck,
               encode_frame(MessageType::kHelloAck, encode(HelloAck{100, {}})));
  sized.ledger().client.insert(fact::kDatabaseSize);
  EXPECT_FALSE(audit_transcript(sized, {t.points, q.points}).passed());

  // A ledger that under-reports what the frames reveal.
  Transcript quiet = out.transcript;
  quiet.ledger().client.clear();
  EXPECT_FALSE(audit_transcript(quiet, {t.points, q.points}).passed());

  EXPECT_FALSE(audit_transcript(secure_verify(request(t, q, 30), evaluator_).transcript, {}).passed());
}

}  // namespace
}  // namespace ftm
