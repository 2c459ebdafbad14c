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
#ifndef FTM_SRC_FRAMED_CONNECTION_H_
#define FTM_SRC_FRAMED_CONNECTION_H_

#include <initializer_list>
#include <string>

#include "ftm/channel.h"
#include "ftm/errors.h"
#include "ftm/transcript.h"
#include "ftm/wire.h"

namespace ftm::internal {

// Frame I/O for one side of a query connection, feeding an optional
// transcript.
class FramedConnection {
 public:
  FramedConnection(ByteStream& stream, Transcript* transcript, bool is_owner)
      : stream_(stream), transcript_(transcript), is_owner_(is_owner) {}

  void send(MessageType type, const Bytes& body) {
    Bytes raw;
    write_frame(stream_, type, body, transcript_ != nullptr ? &raw : nullptr);
    if (transcript_ != nullptr) transcript_->record(outgoing(), type, raw);
  }

  Frame receive() {
    Bytes raw;
    Frame f = read_frame(stream_, transcript_ != nullptr ? &raw : nullptr);
    if (transcript_ != nullptr) transcript_->record(incoming(), f.type, raw);
    return f;
  }

  // Receives a frame of the given type. A peer Error becomes
  // ProtocolError(kRemote); anything else is kUnexpectedMessage.
  Frame expect(MessageType type) {
    Frame f = receive();
    if (f.type == type) return f;
    if (f.type == MessageType::kError) {
      learn(is_owner_, fact::kErrorText);
      const ErrorMessage e = decode_error(f.body);
      throw ProtocolError(ProtocolErrorCode::kRemote,
                          "peer error " + std::to_string(static_cast<int>(e.code)) +
                              ": " + e.text);
    }
    throw ProtocolError(ProtocolErrorCode::kUnexpectedMessage,
                        std::string("expected ") + to_string(type) + ", got " +
                            to_string(f.type));
  }

  void send_error(ProtocolErrorCode code, const std::string& text) noexcept {
    try {
      send(MessageType::kError, encode(ErrorMessage{code, text}));
      learn(!is_owner_, fact::kErrorText);
      stream_.close();
    } catch (...) {
      // The peer may already be gone; the caller rethrows the original.
    }
  }

  // Records a fact learned by the owner (to_owner) or by the client.
  void learn(bool to_owner, const char* f) {
    if (transcript_ == nullptr) return;
    auto& side = to_owner ? transcript_->ledger().owner : transcript_->ledger().client;
    side.insert(f);
  }
  void learn(bool to_owner, std::initializer_list<const char*> facts) {
    for (const char* f : facts) learn(to_owner, f);
  }

  ByteStream& stream() { return stream_; }

 private:
  Direction outgoing() const {
    return is_owner_ ? Direction::kOwnerToClient : Direction::kClientToOwner;
  }
  Direction incoming() const {
    return is_owner_ ? Direction::kClientToOwner : Direction::kOwnerToClient;
  }

  ByteStream& stream_;
  Transcript* transcript_;
  bool is_owner_;
};

}  // namespace ftm::internal

#endif  // FTM_SRC_FRAMED_CONNECTION_H_
