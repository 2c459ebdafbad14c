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
#include "ftm/log.h"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace ftm {
namespace {

std::mutex& log_mutex() {
  static std::mutex m;
  return m;
}

bool quiet() {
  static const bool q = [] {
    const char* v = std::getenv("FTM_QUIET");
    return v != nullptr && v[0] == '1';
  }();
  return q;
}

}  // namespace

void log_warning(std::string_view message) {
  if (quiet()) return;
  std::lock_guard<std::mutex> lock(log_mutex());
  std::clog << "[ftm] WARNING " << message << '\n';
}

void log_info(std::string_view message) {
  if (quiet()) return;
  std::lock_guard<std::mutex> lock(log_mutex());
  std::clog << "[ftm] " << message << '\n';
}

}  // namespace ftm
