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
#ifndef FTM_WIRE_H_
#define FTM_WIRE_H_

// Framed client/owner protocol. Every frame is
//
//   "FTMP" | u8 version | u8 type | u32 body length | body | u32 CRC32
//
// little-endian, with the CRC taken over every preceding byte of the
// frame. One query runs over one reliable byte stream:
//
//   C->O Hello           grid spec and tau
//   O->C HelloAck        evaluator public key (optionally |TD|)
//   C->O PublishGrids    mode, tau, L, |T_Q|, |T_Q'|, sealed key, G_Q
//   O->C FilterStats     |TC|, partition count
//   O->C PruneSession    Open     (per partition: session id, |rt|)
//   C->O PruneSession    Input    (sealed T_Q' per session)
//   O->C PruneSession    Result   (match bit + simulated circuit traffic)
//   ...  ValidateSession Open / Input / Result, same shape with T_Q
//   O->C ResultSet       matched trajectory ids
//
// Either side may send Error and close.

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "ftm/bytes.h"
#include "ftm/errors.h"
#include "ftm/grid.h"

namespace ftm {

class ByteStream;

inline constexpr std::uint8_t kWireVersion = 1;
inline constexpr std::size_t kFrameHeaderSize = 10;
inline constexpr std::size_t kFrameTrailerSize = 4;
inline constexpr std::uint32_t kMaxFrameBody = 1u << 30;

enum class MessageType : std::uint8_t {
  kHello = 1,
  kHelloAck = 2,
  kPublishGrids = 3,
  kFilterStats = 4,
  kPruneSession = 5,
  kValidateSession = 6,
  kResultSet = 7,
  kError = 8,
};

const char* to_string(MessageType t);

struct Frame {
  MessageType type = MessageType::kError;
  Bytes body;
};

Bytes encode_frame(MessageType type, std::span<const std::uint8_t> body);

// Decodes one frame from the front of `bytes`; sets `consumed`. Throws
// ProtocolError (kTruncated, kBadMagic, kVersionMismatch, kChecksum,
// kFrameTooLarge).
Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed);

// Stream variants. read_frame also returns the raw frame bytes when
// `raw` is given (for transcripts).
void write_frame(ByteStream& out, MessageType type,
                 std::span<const std::uint8_t> body, Bytes* raw = nullptr);
Frame read_frame(ByteStream& in, Bytes* raw = nullptr);

// --- message bodies -------------------------------------------------------

struct Hello {
  GridSpec spec;
  double tau = 0.0;
};
inline constexpr std::size_t kHelloBodySize = 32;
inline constexpr std::size_t kHelloFrameSize =
    kFrameHeaderSize + kHelloBodySize + kFrameTrailerSize;

inline constexpr std::size_t kEvaluatorKeySize = 32;
using EvaluatorKey = std::array<std::uint8_t, kEvaluatorKeySize>;

// The database size is optional: owners disclose it only when configured
// to, and it is zero on the wire otherwise.
struct HelloAck {
  std::optional<std::uint64_t> database_size;
  EvaluatorKey evaluator_key{};
};
inline constexpr std::size_t kHelloAckBodySize = 1 + 8 + kEvaluatorKeySize;
inline constexpr std::size_t kHelloAckFrameSize =
    kFrameHeaderSize + kHelloAckBodySize + kFrameTrailerSize;

enum class QueryMode : std::uint8_t { kFiltered = 0, kNaive = 1 };

struct PublishGrids {
  QueryMode mode = QueryMode::kFiltered;
  double tau = 0.0;
  double cell_size = 0.0;
  std::uint32_t query_length = 0;     // |T_Q|
  std::uint32_t subquery_length = 0;  // |T_Q'|
  Bytes sealed_key;                   // u16 length-prefixed, opaque to the owner
  std::vector<GridId> grids;
};

struct FilterStats {
  std::uint64_t candidates = 0;
  std::uint32_t partitions = 0;
};

enum class SessionPhase : std::uint8_t { kOpen = 0, kInput = 1, kResult = 2 };

struct SessionOpen {
  std::uint32_t session_id = 0;
  std::uint32_t owner_length = 0;  // segments of rt or the candidate
  std::uint32_t query_length = 0;  // points the client must supply
};

struct SessionInput {
  std::uint32_t session_id = 0;
  Bytes blob;
};

struct SessionResult {
  std::uint32_t session_id = 0;
  bool match = false;
  Bytes traffic;  // simulated secure-computation transcript
};

struct SessionBatch {
  SessionPhase phase = SessionPhase::kOpen;
  std::vector<SessionOpen> opens;
  std::vector<SessionInput> inputs;
  std::vector<SessionResult> results;
};

struct ResultSet {
  std::vector<std::string> ids;
};

struct ErrorMessage {
  ProtocolErrorCode code = ProtocolErrorCode::kInternal;
  std::string text;
};

Bytes encode(const Hello& m);
Bytes encode(const HelloAck& m);
Bytes encode(const PublishGrids& m);
Bytes encode(const FilterStats& m);
Bytes encode(const SessionBatch& m);
Bytes encode(const ResultSet& m);
Bytes encode(const ErrorMessage& m);

// Decoders throw ProtocolError(kMalformed) on short or oversized bodies.
Hello decode_hello(std::span<const std::uint8_t> body);
HelloAck decode_hello_ack(std::span<const std::uint8_t> body);
PublishGrids decode_publish_grids(std::span<const std::uint8_t> body);
FilterStats decode_filter_stats(std::span<const std::uint8_t> body);
SessionBatch decode_session_batch(std::span<const std::uint8_t> body);
ResultSet decode_result_set(std::span<const std::uint8_t> body);
ErrorMessage decode_error(std::span<const std::uint8_t> body);

}  // namespace ftm

#endif  // FTM_WIRE_H_
