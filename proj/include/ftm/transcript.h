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
#ifndef FTM_TRANSCRIPT_H_
#define FTM_TRANSCRIPT_H_

#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "ftm/bytes.h"
#include "ftm/wire.h"

namespace ftm {

enum class Direction : std::uint8_t { kClientToOwner = 0, kOwnerToClient = 1 };

struct MessageRecord {
  Direction direction = Direction::kClientToOwner;
  MessageType type = MessageType::kError;
  std::uint64_t length = 0;  // full frame, header and CRC included
  std::uint32_t digest = 0;  // CRC32 of the frame
  Bytes raw;                 // kept only when the transcript retains frames
};

// Names of the plaintext facts each party learned during one exchange.
namespace fact {
inline constexpr const char* kGridOrigin = "grid_origin";
inline constexpr const char* kTau = "tau";
inline constexpr const char* kCellSize = "L";
inline constexpr const char* kQueryMode = "query_mode";
inline constexpr const char* kPublishedGrids = "G_Q";
inline constexpr const char* kQueryLength = "|T_Q|";
inline constexpr const char* kSubqueryLength = "|T_Q'|";
inline constexpr const char* kMatchBits = "match_bits";
inline constexpr const char* kCandidateCount = "|TC|";
inline constexpr const char* kPartitionCount = "partition_count";
inline constexpr const char* kReferenceLengths = "rt_lengths";
inline constexpr const char* kCandidateLengths = "candidate_lengths";
inline constexpr const char* kMatchedIds = "matched_ids";
inline constexpr const char* kDatabaseSize = "|TD|";
inline constexpr const char* kErrorText = "error_text";
}  // namespace fact

struct LeakageLedger {
  std::set<std::string> owner;   // learned by the data owner
  std::set<std::string> client;  // learned by the query user

  void merge(const LeakageLedger& other);
  bool operator==(const LeakageLedger&) const = default;
};

// Ordered record of every frame exchanged on one connection.
class Transcript {
 public:
  explicit Transcript(bool retain_frames = false) : retain_(retain_frames) {}

  void record(Direction d, MessageType type, std::span<const std::uint8_t> frame);

  const std::vector<MessageRecord>& messages() const { return messages_; }
  LeakageLedger& ledger() { return ledger_; }
  const LeakageLedger& ledger() const { return ledger_; }
  bool retains_frames() const { return retain_; }

  std::uint64_t bytes(Direction d) const;

 private:
  bool retain_;
  std::vector<MessageRecord> messages_;
  LeakageLedger ledger_;
};

// Total serialized bytes of all recorded messages.
std::uint64_t meter(const Transcript& t);

}  // namespace ftm

#endif  // FTM_TRANSCRIPT_H_
