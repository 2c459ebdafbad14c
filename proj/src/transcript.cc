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
#include "ftm/transcript.h"

namespace ftm {

void LeakageLedger::merge(const LeakageLedger& other) {
  owner.insert(other.owner.begin(), other.owner.end());
  client.insert(other.client.begin(), other.client.end());
}

void Transcript::record(Direction d, MessageType type,
                        std::span<const std::uint8_t> frame) {
  MessageRecord rec;
  rec.direction = d;
  rec.type = type;
  rec.length = frame.size();
  rec.digest = crc32_of(frame);
  if (retain_) rec.raw.assign(frame.begin(), frame.end());
  messages_.push_back(std::move(rec));
}

std::uint64_t Transcript::bytes(Direction d) const {
  std::uint64_t total = 0;
  for (const auto& m : messages_) {
    if (m.direction == d) total += m.length;
  }
  return total;
}

std::uint64_t meter(const Transcript& t) {
  return t.bytes(Direction::kClientToOwner) + t.bytes(Direction::kOwnerToClient);
}

}  // namespace ftm
