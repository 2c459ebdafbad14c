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
#ifndef FTM_ERRORS_H_
#define FTM_ERRORS_H_

#include <cstddef>
#include <stdexcept>
#include <string>
#include <vector>

namespace ftm {

// Root of every error the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the mathematical domain of an operation.
class DomainError : public Error {
 public:
  using Error::Error;
};

// Parameter combination that cannot be run (no Delta root, L <= tau, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A trajectory record violating the data model. line() is 1-based, 0 when
// the record did not come from a file.
class IngestionError : public Error {
 public:
  IngestionError(std::size_t line, const std::string& what)
      : Error(line == 0 ? what
                        : "line " + std::to_string(line) + ": " + what),
        line_(line) {}
  std::size_t line() const { return line_; }

 private:
  std::size_t line_;
};

enum class IndexFormatErrorCode { kTruncated, kBadMagic, kVersionMismatch, kChecksum };

class IndexFormatError : public Error {
 public:
  IndexFormatError(IndexFormatErrorCode code, const std::string& what)
      : Error(what), code_(code) {}
  IndexFormatErrorCode code() const { return code_; }

 private:
  IndexFormatErrorCode code_;
};

// Wire-level and protocol-level failures. The numeric values travel in
// Error frames, so they are stable.
enum class ProtocolErrorCode : unsigned short {
  kBadMagic = 1,
  kVersionMismatch = 2,
  kChecksum = 3,
  kTruncated = 4,
  kFrameTooLarge = 5,
  kUnexpectedMessage = 6,
  kMalformed = 7,
  kTessellationMismatch = 8,
  kEmptyGrids = 9,
  kLengthMismatch = 10,
  kSessionMismatch = 11,
  kInternal = 12,
  kRemote = 13,
};

class ProtocolError : public Error {
 public:
  ProtocolError(ProtocolErrorCode code, const std::string& what)
      : Error(what), code_(code) {}
  ProtocolErrorCode code() const { return code_; }

 private:
  ProtocolErrorCode code_;
};

// Socket level problems: connect refused, peer vanished, ...
class TransportError : public Error {
 public:
  using Error::Error;
};

// Raised by publish() when no perturbed location stayed in its cell. The
// caller decides whether to spend fresh randomness on a retry.
class PublishFailure : public Error {
 public:
  using Error::Error;
};

// Some owners of a federation query failed. No partial union is returned.
class FederationError : public Error {
 public:
  FederationError(std::vector<std::string> failed, const std::string& what)
      : Error(what), failed_(std::move(failed)) {}
  const std::vector<std::string>& failed_owners() const { return failed_; }

 private:
  std::vector<std::string> failed_;
};

}  // namespace ftm

#endif  // FTM_ERRORS_H_
