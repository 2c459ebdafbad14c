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
#include "ftm/channel.h"

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <algorithm>
#include <cerrno>
#include <charconv>
#include <condition_variable>
#include <cstring>
#include <mutex>
#include <vector>

#include "ftm/errors.h"

namespace ftm {

void ByteStream::write_all(std::span<const std::uint8_t> data) {
  do_write(data);
  sent_ += data.size();
}

std::size_t ByteStream::read_some(std::span<std::uint8_t> buf) {
  if (buf.empty()) return 0;
  const std::size_t n = do_read(buf);
  received_ += n;
  return n;
}

std::size_t ByteStream::read_full(std::span<std::uint8_t> buf) {
  std::size_t got = 0;
  while (got < buf.size()) {
    const std::size_t n = read_some(buf.subspan(got));
    if (n == 0) break;
    got += n;
  }
  return got;
}

namespace {

// One direction of an in-memory pipe.
struct PipeBuffer {
  std::mutex mu;
  std::condition_variable cv;
  std::vector<std::uint8_t> data;
  std::size_t head = 0;  // first unread byte of data
  bool closed = false;
};

class MemoryEnd : public ByteStream {
 public:
  MemoryEnd(std::shared_ptr<PipeBuffer> in, std::shared_ptr<PipeBuffer> out)
      : in_(std::move(in)), out_(std::move(out)) {}
  ~MemoryEnd() override { close(); }

  void close() override {
    std::lock_guard lock(out_->mu);
    out_->closed = true;
    out_->cv.notify_all();
  }

 protected:
  void do_write(std::span<const std::uint8_t> data) override {
    std::lock_guard lock(out_->mu);
    if (out_->closed) throw TransportError("write on closed pipe");
    out_->data.insert(out_->data.end(), data.begin(), data.end());
    out_->cv.notify_all();
  }

  std::size_t do_read(std::span<std::uint8_t> buf) override {
    std::unique_lock lock(in_->mu);
    auto& b = *in_;
    b.cv.wait(lock, [&] { return b.head < b.data.size() || b.closed; });
    const std::size_t n = std::min(buf.size(), b.data.size() - b.head);
    std::copy_n(b.data.begin() + static_cast<std::ptrdiff_t>(b.head), n,
                buf.begin());
    b.head += n;
    if (b.head == b.data.size()) {
      b.data.clear();
      b.head = 0;
    }
    return n;
  }

 private:
  std::shared_ptr<PipeBuffer> in_;
  std::shared_ptr<PipeBuffer> out_;
};

class TcpStream : public ByteStream {
 public:
  explicit TcpStream(int fd) : fd_(fd) {
    int one = 1;
    ::setsockopt(fd_, IPPROTO_TCP, TCP_NODELAY, &one, sizeof(one));
  }
  ~TcpStream() override {
    if (fd_ >= 0) ::close(fd_);
  }

  void close() override {
    if (fd_ >= 0) ::shutdown(fd_, SHUT_WR);
  }

 protected:
  void do_write(std::span<const std::uint8_t> data) override {
    std::size_t off = 0;
    while (off < data.size()) {
      const ssize_t n =
          ::send(fd_, data.data() + off, data.size() - off, MSG_NOSIGNAL);
      if (n < 0) {
        if (errno == EINTR) continue;
        throw TransportError(std::string("send: ") + std::strerror(errno));
      }
      off += static_cast<std::size_t>(n);
    }
  }

  std::size_t do_read(std::span<std::uint8_t> buf) override {
    for (;;) {
      const ssize_t n = ::recv(fd_, buf.data(), buf.size(), 0);
      if (n >= 0) return static_cast<std::size_t>(n);
      if (errno == EINTR) continue;
      if (errno == ECONNRESET) return 0;
      throw TransportError(std::string("recv: ") + std::strerror(errno));
    }
  }

 private:
  int fd_;
};

struct AddrInfoDeleter {
  void operator()(addrinfo* p) const { ::freeaddrinfo(p); }
};

std::unique_ptr<addrinfo, AddrInfoDeleter> resolve(const Endpoint& e,
                                                   bool passive) {
  addrinfo hints{};
  hints.ai_family = AF_UNSPEC;
  hints.ai_socktype = SOCK_STREAM;
  if (passive) hints.ai_flags = AI_PASSIVE;
  addrinfo* res = nullptr;
  const std::string port = std::to_string(e.port);
  const int rc = ::getaddrinfo(e.host.empty() ? nullptr : e.host.c_str(),
                               port.c_str(), &hints, &res);
  if (rc != 0) {
    throw TransportError("resolve " + to_string(e) + ": " + ::gai_strerror(rc));
  }
  return std::unique_ptr<addrinfo, AddrInfoDeleter>(res);
}

}  // namespace

std::pair<std::unique_ptr<ByteStream>, std::unique_ptr<ByteStream>>
make_memory_pipe() {
  auto a_to_b = std::make_shared<PipeBuffer>();
  auto b_to_a = std::make_shared<PipeBuffer>();
  return {std::make_unique<MemoryEnd>(b_to_a, a_to_b),
          std::make_unique<MemoryEnd>(a_to_b, b_to_a)};
}

Endpoint parse_endpoint(const std::string& text) {
  const auto colon = text.rfind(':');
  if (colon == std::string::npos) {
    throw ConfigError("address '" + text + "' is not host:port");
  }
  Endpoint e;
  e.host = text.substr(0, colon);
  if (e.host.size() >= 2 && e.host.front() == '[' && e.host.back() == ']') {
    e.host = e.host.substr(1, e.host.size() - 2);
  }
  const char* first = text.data() + colon + 1;
  const char* last = text.data() + text.size();
  unsigned value = 0;
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last || first == last || value > 65535) {
    throw ConfigError("address '" + text + "' has an invalid port");
  }
  e.port = static_cast<std::uint16_t>(value);
  return e;
}

std::string to_string(const Endpoint& e) {
  return e.host + ":" + std::to_string(e.port);
}

std::unique_ptr<ByteStream> tcp_connect(const Endpoint& e) {
  auto res = resolve(e, false);
  std::string last_error = "no addresses";
  for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0) {
      return std::make_unique<TcpStream>(fd);
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  throw TransportError("connect " + to_string(e) + ": " + last_error);
}

TcpListener::TcpListener(const Endpoint& e) {
  auto res = resolve(e, true);
  std::string last_error = "no addresses";
  for (addrinfo* ai = res.get(); ai != nullptr; ai = ai->ai_next) {
    const int fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
    if (fd < 0) {
      last_error = std::strerror(errno);
      continue;
    }
    int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof(one));
    if (::bind(fd, ai->ai_addr, ai->ai_addrlen) == 0 && ::listen(fd, 64) == 0) {
      fd_ = fd;
      break;
    }
    last_error = std::strerror(errno);
    ::close(fd);
  }
  if (fd_ < 0) throw TransportError("listen " + to_string(e) + ": " + last_error);
  sockaddr_storage addr{};
  socklen_t len = sizeof(addr);
  ::getsockname(fd_, reinterpret_cast<sockaddr*>(&addr), &len);
  if (addr.ss_family == AF_INET) {
    port_ = ntohs(reinterpret_cast<sockaddr_in*>(&addr)->sin_port);
  } else {
    port_ = ntohs(reinterpret_cast<sockaddr_in6*>(&addr)->sin6_port);
  }
}

TcpListener::~TcpListener() {
  shutdown();
  if (fd_ >= 0) ::close(fd_);
}

std::unique_ptr<ByteStream> TcpListener::accept() {
  for (;;) {
    const int fd = ::accept(fd_, nullptr, nullptr);
    if (fd >= 0) return std::make_unique<TcpStream>(fd);
    if (errno == EINTR || errno == ECONNABORTED) continue;
    return nullptr;  // shut down or fatal
  }
}

void TcpListener::shutdown() {
  if (fd_ >= 0) ::shutdown(fd_, SHUT_RDWR);
}

}  // namespace ftm
