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
#ifndef FTM_CHANNEL_H_
#define FTM_CHANNEL_H_

#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <utility>

namespace ftm {

// Reliable, ordered byte stream with send/receive counters. Counters
// include every byte handed to or returned from the transport, so two
// ends of one connection agree on them.
class ByteStream {
 public:
  virtual ~ByteStream() = default;

  // Throws TransportError when the peer is gone.
  void write_all(std::span<const std::uint8_t> data);
  // Returns the number of bytes read; 0 only at end of stream.
  std::size_t read_some(std::span<std::uint8_t> buf);
  // Reads exactly buf.size() bytes; returns the count actually read,
  // which is smaller only when the stream ended.
  std::size_t read_full(std::span<std::uint8_t> buf);

  // Shuts down the sending direction; the peer then reads end of stream.
  virtual void close() = 0;

  std::uint64_t bytes_sent() const { return sent_; }
  std::uint64_t bytes_received() const { return received_; }

 protected:
  virtual void do_write(std::span<const std::uint8_t> data) = 0;
  virtual std::size_t do_read(std::span<std::uint8_t> buf) = 0;

 private:
  std::uint64_t sent_ = 0;
  std::uint64_t received_ = 0;
};

// Two connected in-memory endpoints (first = client side by convention).
std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>>
make_memory_pipe();

struct Endpoint {
  std::string host;
  std::uint16_t port = 0;
};

// "host:port"; throws ConfigError.
Endpoint parse_endpoint(const std::string& text);
std::string to_string(const Endpoint& e);

// TCP client connection. Throws TransportError.
std::unique_ptr<ByteStream> tcp_connect(const Endpoint& e);

class TcpListener {
 public:
  // Binds and listens; port 0 picks an ephemeral port. Throws
  // TransportError.
  explicit TcpListener(const Endpoint& e);
  ~TcpListener();
  TcpListener(const TcpListener&) = delete;
  TcpListener& operator=(const TcpListener&) = delete;

  std::uint16_t port() const { return port_; }
  // Blocks; returns nullptr once shutdown() was called.
  std::unique_ptr<ByteStream> accept();
  void shutdown();

 private:
  int fd_ = -1;
  std::uint16_t port_ = 0;
};

}  // namespace ftm

#endif  // FTM_CHANNEL_H_
