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
#ifndef FTM_AUDIT_H_
#define FTM_AUDIT_H_

#include <set>
#include <string>
#include <vector>

#include "ftm/geometry.h"
#include "ftm/transcript.h"

namespace ftm {

// Facts each party may learn.
struct AuditPolicy {
  std::set<std::string> owner_allowed;
  std::set<std::string> client_allowed;

  // Owner: grid origin, tau, L, mode flag, G_Q, |T_Q|, |T_Q'|, match bits.
  // Client: match bits and matched ids, |TC|, partition count, rt and
  // candidate lengths.
  static AuditPolicy strict();
};

// Private values that must never appear in the other party's view.
struct AuditSecrets {
  std::vector<Point> owner_private;  // e.g. points of unmatched trajectories
  std::vector<Point> query_private;  // raw query points
};

struct AuditReport {
  LeakageLedger recomputed;
  std::vector<std::string> violations;

  bool passed() const { return violations.empty(); }
};

// Re-derives the ledger from the retained raw frames, then checks that
// (a) it agrees with the ledger the protocol recorded, (b) it stays within
// the policy, and (c) no secret value shows up in a frame sent to the
// other side. Secrets are searched for as 8-byte little-endian patterns
// (fixed-point i64 and raw f64); patterns with fewer than three non-zero
// bytes are skipped because they collide with ordinary length fields.
AuditReport audit_transcript(const Transcript& transcript,
                             const AuditSecrets& secrets,
                             const AuditPolicy& policy = AuditPolicy::strict());

}  // namespace ftm

#endif  // FTM_AUDIT_H_
