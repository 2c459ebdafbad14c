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
#include "ftm/wire.h"

#include <algorithm>
#include <array>
#include <cstring>

#include "ftm/channel.h"

namespace ftm {
namespace {

constexpr std::array<std::uint8_t, 4> kMagic = {'F', 'T', 'M', 'P'};

[[noreturn]] void malformed(const char* what) {
  throw ProtocolError(ProtocolErrorCode::kMalformed,
                      std::string("malformed message: ") + what);
}

// Reader that turns short reads into kMalformed.
class BodyReader {
 public:
  BodyReader(std::span<const std::uint8_t> body, const char* name)
      : r_(body), name_(name) {}

  template <typename T>
  T get() {
    T v{};
    if (!r_.get(v)) malformed(name_);
    return v;
  }
  Bytes bytes(std::size_t n) {
    std::span<const std::uint8_t> b;
    if (!r_.get_bytes(n, b)) malformed(name_);
    return {b.begin(), b.end()};
  }
  std::string string16() {
    std::string s;
    if (!r_.get_string16(s)) malformed(name_);
    return s;
  }
  // Guards count fields against absurd allocations.
  std::uint32_t count(std::size_t min_item_size) {
    const auto n = get<std::uint32_t>();
    if (min_item_size > 0 && n > r_.remaining() / min_item_size) malformed(name_);
    return n;
  }
  void finish() {
    if (r_.remaining() != 0) malformed(name_);
  }

 private:
  ByteReader r_;
  const char* name_;
};

bool known_type(std::uint8_t t) {
  return t >= static_cast<std::uint8_t>(MessageType::kHello) &&
         t <= static_cast<std::uint8_t>(MessageType::kError);
}

struct Header {
  MessageType type;
  std::uint32_t body_length;
};

Header check_header(std::span<const std::uint8_t> h) {
  if (!std::equal(kMagic.begin(), kMagic.end(), h.begin())) {
    throw ProtocolError(ProtocolErrorCode::kBadMagic, "frame: bad magic");
  }
  if (h[4] != kWireVersion) {
    throw ProtocolError(ProtocolErrorCode::kVersionMismatch,
                        "frame: protocol version " + std::to_string(h[4]) +
                            ", expected " + std::to_string(kWireVersion));
  }
  if (!known_type(h[5])) {
    throw ProtocolError(ProtocolErrorCode::kMalformed,
                        "frame: unknown message type " + std::to_string(h[5]));
  }
  std::uint32_t len = 0;
  std::memcpy(&len, h.data() + 6, 4);
  if (len > kMaxFrameBody) {
    throw ProtocolError(ProtocolErrorCode::kFrameTooLarge,
                        "frame: body of " + std::to_string(len) + " bytes");
  }
  return {static_cast<MessageType>(h[5]), len};
}

void check_crc(std::span<const std::uint8_t> frame) {
  const std::size_t covered = frame.size() - kFrameTrailerSize;
  std::uint32_t stored = 0;
  std::memcpy(&stored, frame.data() + covered, 4);
  if (crc32_of(frame.first(covered)) != stored) {
    throw ProtocolError(ProtocolErrorCode::kChecksum, "frame: CRC mismatch");
  }
}

}  // namespace

const char* to_string(MessageType t) {
  switch (t) {
    case MessageType::kHello: return "Hello";
    case MessageType::kHelloAck: return "HelloAck";
    case MessageType::kPublishGrids: return "PublishGrids";
    case MessageType::kFilterStats: return "FilterStats";
    case MessageType::kPruneSession: return "PruneSession";
    case MessageType::kValidateSession: return "ValidateSession";
    case MessageType::kResultSet: return "ResultSet";
    case MessageType::kError: return "Error";
  }
  return "?";
}

Bytes encode_frame(MessageType type, std::span<const std::uint8_t> body) {
  if (body.size() > kMaxFrameBody) {
    throw ProtocolError(ProtocolErrorCode::kFrameTooLarge,
                        "frame: body of " + std::to_string(body.size()) + " bytes");
  }
  Bytes out(kFrameHeaderSize + body.size() + kFrameTrailerSize);
  const auto body_length = static_cast<std::uint32_t>(body.size());
  std::copy(kMagic.begin(), kMagic.end(), out.begin());
  out[4] = kWireVersion;
  out[5] = static_cast<std::uint8_t>(type);
  std::memcpy(out.data() + 6, &body_length, 4);
  if (!body.empty()) std::memcpy(out.data() + kFrameHeaderSize, body.data(), body.size());
  const std::size_t covered = kFrameHeaderSize + body.size();
  const std::uint32_t crc = crc32_of(std::span(out).first(covered));
  std::memcpy(out.data() + covered, &crc, 4);
  return out;
}

Frame decode_frame(std::span<const std::uint8_t> bytes, std::size_t& consumed) {
  if (bytes.size() < kFrameHeaderSize) {
    throw ProtocolError(ProtocolErrorCode::kTruncated, "frame: short header");
  }
  const Header h = check_header(bytes.first(kFrameHeaderSize));
  const std::size_t total = kFrameHeaderSize + h.body_length + kFrameTrailerSize;
  if (bytes.size() < total) {
    throw ProtocolError(ProtocolErrorCode::kTruncated, "frame: short body");
  }
  check_crc(bytes.first(total));
  consumed = total;
  auto body = bytes.subspan(kFrameHeaderSize, h.body_length);
  return {h.type, Bytes(body.begin(), body.end())};
}

void write_frame(ByteStream& out, MessageType type,
                 std::span<const std::uint8_t> body, Bytes* raw) {
  Bytes frame = encode_frame(type, body);
  out.write_all(frame);
  if (raw != nullptr) *raw = std::move(frame);
}

Frame read_frame(ByteStream& in, Bytes* raw) {
  Bytes buf(kFrameHeaderSize);
  const std::size_t got = in.read_full(buf);
  if (got == 0) throw TransportError("peer closed the connection");
  if (got < kFrameHeaderSize) {
    throw ProtocolError(ProtocolErrorCode::kTruncated, "frame: short header");
  }
  const Header h = check_header(buf);
  buf.resize(kFrameHeaderSize + h.body_length + kFrameTrailerSize);
  const std::size_t rest = buf.size() - kFrameHeaderSize;
  if (in.read_full(std::span(buf).subspan(kFrameHeaderSize)) != rest) {
    throw ProtocolError(ProtocolErrorCode::kTruncated, "frame: short body");
  }
  check_crc(buf);
  Frame f{h.type, Bytes(buf.begin() + kFrameHeaderSize,
                        buf.end() - kFrameTrailerSize)};
  if (raw != nullptr) *raw = std::move(buf);
  return f;
}

// --- bodies ---------------------------------------------------------------

Bytes encode(const Hello& m) {
  Bytes out;
  ByteWriter w(out);
  w.put(m.spec.origin.x);
  w.put(m.spec.origin.y);
  w.put(m.spec.cell_size);
  w.put(m.tau);
  return out;
}

Hello decode_hello(std::span<const std::uint8_t> body) {
  BodyReader r(body, "Hello");
  Hello m;
  m.spec.origin.x = r.get<double>();
  m.spec.origin.y = r.get<double>();
  m.spec.cell_size = r.get<double>();
  m.tau = r.get<double>();
  r.finish();
  return m;
}

Bytes encode(const HelloAck& m) {
  Bytes out;
  ByteWriter w(out);
  w.put<std::uint8_t>(m.database_size ? 1 : 0);
  w.put<std::uint64_t>(m.database_size.value_or(0));
  w.put_bytes(m.evaluator_key);
  return out;
}

HelloAck decode_hello_ack(std::span<const std::uint8_t> body) {
  BodyReader r(body, "HelloAck");
  HelloAck m;
  const auto has_size = r.get<std::uint8_t>();
  const auto size = r.get<std::uint64_t>();
  if (has_size > 1) malformed("HelloAck");
  if (has_size == 1) m.database_size = size;
  const Bytes key = r.bytes(kEvaluatorKeySize);
  std::copy(key.begin(), key.end(), m.evaluator_key.begin());
  r.finish();
  return m;
}

Bytes encode(const PublishGrids& m) {
  Bytes out;
  ByteWriter w(out);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(m.mode));
  w.put(m.tau);
  w.put(m.cell_size);
  w.put(m.query_length);
  w.put(m.subquery_length);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(m.sealed_key.size()));
  w.put_bytes(m.sealed_key);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.grids.size()));
  for (const GridId& g : m.grids) {
    w.put(g.ix);
    w.put(g.iy);
  }
  return out;
}

PublishGrids decode_publish_grids(std::span<const std::uint8_t> body) {
  BodyReader r(body, "PublishGrids");
  PublishGrids m;
  const auto mode = r.get<std::uint8_t>();
  if (mode > static_cast<std::uint8_t>(QueryMode::kNaive)) malformed("PublishGrids");
  m.mode = static_cast<QueryMode>(mode);
  m.tau = r.get<double>();
  m.cell_size = r.get<double>();
  m.query_length = r.get<std::uint32_t>();
  m.subquery_length = r.get<std::uint32_t>();
  m.sealed_key = r.bytes(r.get<std::uint16_t>());
  const std::uint32_t n = r.count(8);
  m.grids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) {
    GridId g;
    g.ix = r.get<std::int32_t>();
    g.iy = r.get<std::int32_t>();
    m.grids.push_back(g);
  }
  r.finish();
  return m;
}

Bytes encode(const FilterStats& m) {
  Bytes out;
  ByteWriter w(out);
  w.put(m.candidates);
  w.put(m.partitions);
  return out;
}

FilterStats decode_filter_stats(std::span<const std::uint8_t> body) {
  BodyReader r(body, "FilterStats");
  FilterStats m;
  m.candidates = r.get<std::uint64_t>();
  m.partitions = r.get<std::uint32_t>();
  r.finish();
  return m;
}

Bytes encode(const SessionBatch& m) {
  Bytes out;
  ByteWriter w(out);
  w.put<std::uint8_t>(static_cast<std::uint8_t>(m.phase));
  switch (m.phase) {
    case SessionPhase::kOpen:
      w.put<std::uint32_t>(static_cast<std::uint32_t>(m.opens.size()));
      for (const auto& o : m.opens) {
        w.put(o.session_id);
        w.put(o.owner_length);
        w.put(o.query_length);
      }
      break;
    case SessionPhase::kInput:
      w.put<std::uint32_t>(static_cast<std::uint32_t>(m.inputs.size()));
      for (const auto& in : m.inputs) {
        w.put(in.session_id);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(in.blob.size()));
        w.put_bytes(in.blob);
      }
      break;
    case SessionPhase::kResult:
      w.put<std::uint32_t>(static_cast<std::uint32_t>(m.results.size()));
      for (const auto& res : m.results) {
        w.put(res.session_id);
        w.put<std::uint8_t>(res.match ? 1 : 0);
        w.put<std::uint32_t>(static_cast<std::uint32_t>(res.traffic.size()));
        w.put_bytes(res.traffic);
      }
      break;
  }
  return out;
}

SessionBatch decode_session_batch(std::span<const std::uint8_t> body) {
  BodyReader r(body, "session batch");
  SessionBatch m;
  const auto phase = r.get<std::uint8_t>();
  if (phase > static_cast<std::uint8_t>(SessionPhase::kResult)) {
    malformed("session batch phase");
  }
  m.phase = static_cast<SessionPhase>(phase);
  switch (m.phase) {
    case SessionPhase::kOpen: {
      const std::uint32_t n = r.count(12);
      m.opens.resize(n);
      for (auto& o : m.opens) {
        o.session_id = r.get<std::uint32_t>();
        o.owner_length = r.get<std::uint32_t>();
        o.query_length = r.get<std::uint32_t>();
      }
      break;
    }
    case SessionPhase::kInput: {
      const std::uint32_t n = r.count(8);
      m.inputs.resize(n);
      for (auto& in : m.inputs) {
        in.session_id = r.get<std::uint32_t>();
        in.blob = r.bytes(r.get<std::uint32_t>());
      }
      break;
    }
    case SessionPhase::kResult: {
      const std::uint32_t n = r.count(9);
      m.results.resize(n);
      for (auto& res : m.results) {
        res.session_id = r.get<std::uint32_t>();
        const auto bit = r.get<std::uint8_t>();
        if (bit > 1) malformed("session result bit");
        res.match = bit == 1;
        res.traffic = r.bytes(r.get<std::uint32_t>());
      }
      break;
    }
  }
  r.finish();
  return m;
}

Bytes encode(const ResultSet& m) {
  Bytes out;
  ByteWriter w(out);
  w.put<std::uint32_t>(static_cast<std::uint32_t>(m.ids.size()));
  for (const auto& id : m.ids) {
    if (id.size() > 0xffff) {
      throw ProtocolError(ProtocolErrorCode::kInternal, "trajectory id too long");
    }
    w.put_string16(id);
  }
  return out;
}

ResultSet decode_result_set(std::span<const std::uint8_t> body) {
  BodyReader r(body, "ResultSet");
  ResultSet m;
  const std::uint32_t n = r.count(2);
  m.ids.reserve(n);
  for (std::uint32_t i = 0; i < n; ++i) m.ids.push_back(r.string16());
  r.finish();
  return m;
}

Bytes encode(const ErrorMessage& m) {
  Bytes out;
  ByteWriter w(out);
  w.put<std::uint16_t>(static_cast<std::uint16_t>(m.code));
  w.put_string16(m.text.substr(0, 0xffff));
  return out;
}

ErrorMessage decode_error(std::span<const std::uint8_t> body) {
  BodyReader r(body, "Error");
  ErrorMessage m;
  m.code = static_cast<ProtocolErrorCode>(r.get<std::uint16_t>());
  m.text = r.string16();
  r.finish();
  return m;
}

}  // namespace ftm
