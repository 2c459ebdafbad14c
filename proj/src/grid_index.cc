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
#include "ftm/grid_index.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <map>
#include <thread>
#include <unordered_set>

#include "ftm/errors.h"

namespace ftm {
namespace {

constexpr char kMagic[4] = {'F', 'T', 'M', 'I'};
constexpr std::size_t kPreambleSize = 6;  // magic + version

[[noreturn]] void truncated(const std::string& what) {
  throw IndexFormatError(IndexFormatErrorCode::kTruncated,
                         "index file truncated: " + what);
}

}  // namespace

GridIndex build_index(std::span<const Trajectory> db, double tau,
                      const GridSpec& spec, unsigned parallelism) {
  {
    std::unordered_set<std::string_view> seen;
    for (std::size_t i = 0; i < db.size(); ++i) {
      if (!seen.insert(db[i].id).second) {
        throw IngestionError(0, "duplicate trajectory id '" + db[i].id + "'");
      }
    }
  }
  std::vector<std::vector<GridId>> grids(db.size());
  const unsigned workers =
      std::max(1u, std::min<unsigned>(parallelism, db.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < db.size(); ++i) {
      grids[i] = traversal_grids(db[i], tau, spec);
    }
  } else {
    std::vector<std::jthread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t i = w; i < db.size(); i += workers) {
          grids[i] = traversal_grids(db[i], tau, spec);
        }
      });
    }
  }
  GridIndex index;
  index.spec = spec;
  index.tau = tau;
  // Ids are appended in increasing order, so lists come out sorted.
  for (std::size_t i = 0; i < db.size(); ++i) {
    for (const GridId& g : grids[i]) {
      index.entries[g].push_back(static_cast<TrajId>(i));
    }
  }
  return index;
}

std::vector<TrajId> intersect_sorted(std::span<const TrajId> a,
                                     std::span<const TrajId> b) {
  if (a.size() > b.size()) std::swap(a, b);
  std::vector<TrajId> out;
  std::size_t lo = 0;
  for (TrajId x : a) {
    // Gallop: double the step until we pass x, then binary search.
    std::size_t step = 1;
    std::size_t hi = lo;
    while (hi < b.size() && b[hi] < x) {
      lo = hi;
      hi += step;
      step <<= 1;
    }
    hi = std::min(hi + 1, b.size());
    auto it = std::lower_bound(b.begin() + lo, b.begin() + hi, x);
    lo = static_cast<std::size_t>(it - b.begin());
    if (lo == b.size()) break;
    if (b[lo] == x) out.push_back(x);
  }
  return out;
}

std::vector<TrajId> filter(const GridIndex& index,
                           std::span<const GridId> grids) {
  if (grids.empty()) {
    throw ProtocolError(ProtocolErrorCode::kEmptyGrids,
                        "filter needs at least one published grid");
  }
  std::vector<const std::vector<TrajId>*> lists;
  lists.reserve(grids.size());
  for (const GridId& g : grids) {
    const auto* p = index.postings(g);
    if (p == nullptr) return {};
    lists.push_back(p);
  }
  std::sort(lists.begin(), lists.end(),
            [](const auto* a, const auto* b) { return a->size() < b->size(); });
  std::vector<TrajId> result = *lists.front();
  for (std::size_t i = 1; i < lists.size() && !result.empty(); ++i) {
    result = intersect_sorted(result, *lists[i]);
  }
  return result;
}

Bytes serialize_index(const GridIndex& index) {
  Bytes out;
  ByteWriter w(out);
  w.put_bytes({reinterpret_cast<const std::uint8_t*>(kMagic), 4});
  w.put<std::uint16_t>(kIndexFormatVersion);
  w.put<double>(index.spec.origin.x);
  w.put<double>(index.spec.origin.y);
  w.put<double>(index.spec.cell_size);
  w.put<double>(index.tau);
  w.put<std::uint64_t>(index.entries.size());
  // Ordered output so the file is a function of the index content.
  std::map<GridId, const std::vector<TrajId>*> ordered;
  for (const auto& [g, ids] : index.entries) ordered.emplace(g, &ids);
  for (const auto& [g, ids] : ordered) {
    w.put<std::int32_t>(g.ix);
    w.put<std::int32_t>(g.iy);
    w.put<std::uint32_t>(static_cast<std::uint32_t>(ids->size()));
    TrajId prev = 0;
    for (TrajId id : *ids) {
      w.put_varint(id - prev);
      prev = id;
    }
  }
  const std::uint32_t crc = crc32_of(
      std::span<const std::uint8_t>(out).subspan(kPreambleSize));
  w.put<std::uint32_t>(crc);
  return out;
}

GridIndex deserialize_index(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kPreambleSize) truncated("missing header");
  if (!std::equal(kMagic, kMagic + 4, bytes.begin())) {
    throw IndexFormatError(IndexFormatErrorCode::kBadMagic,
                           "not an index file (bad magic)");
  }
  std::uint16_t version = 0;
  std::memcpy(&version, bytes.data() + 4, sizeof(version));
  if (version != kIndexFormatVersion) {
    throw IndexFormatError(IndexFormatErrorCode::kVersionMismatch,
                           "index format version " + std::to_string(version) +
                               ", expected " +
                               std::to_string(kIndexFormatVersion));
  }
  constexpr std::size_t kFixedBody = 4 * sizeof(double) + sizeof(std::uint64_t);
  if (bytes.size() < kPreambleSize + kFixedBody + sizeof(std::uint32_t)) {
    truncated("header incomplete");
  }
  const auto body = bytes.subspan(kPreambleSize,
                                  bytes.size() - kPreambleSize - 4);
  std::uint32_t stored = 0;
  std::memcpy(&stored, bytes.data() + bytes.size() - 4, sizeof(stored));
  if (crc32_of(body) != stored) {
    throw IndexFormatError(IndexFormatErrorCode::kChecksum,
                           "index checksum mismatch");
  }
  ByteReader r(body);
  GridIndex index;
  std::uint64_t count = 0;
  if (!r.get(index.spec.origin.x) || !r.get(index.spec.origin.y) ||
      !r.get(index.spec.cell_size) || !r.get(index.tau) || !r.get(count)) {
    truncated("header incomplete");
  }
  index.entries.reserve(count);
  for (std::uint64_t e = 0; e < count; ++e) {
    GridId g;
    std::uint32_t n = 0;
    if (!r.get(g.ix) || !r.get(g.iy) || !r.get(n)) truncated("entry header");
    std::vector<TrajId> ids;
    ids.reserve(n);
    std::uint64_t acc = 0;
    for (std::uint32_t k = 0; k < n; ++k) {
      std::uint64_t d = 0;
      if (!r.get_varint(d)) truncated("posting list");
      acc += d;
      ids.push_back(static_cast<TrajId>(acc));
    }
    index.entries.emplace(g, std::move(ids));
  }
  if (r.remaining() != 0) truncated("trailing bytes before checksum");
  return index;
}

void persist_index(const GridIndex& index, const std::string& path) {
  const Bytes bytes = serialize_index(index);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot write index file " + path);
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error("failed writing index file " + path);
}

GridIndex load_index(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open index file " + path);
  const Bytes bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  return deserialize_index(bytes);
}

}  // namespace ftm
