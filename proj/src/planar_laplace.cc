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
#include "ftm/planar_laplace.h"

#include <cmath>
#include <numbers>
#include <string>

#include "ftm/errors.h"

namespace ftm {
namespace {

constexpr double kInvE = 1.0 / std::numbers::e;
constexpr double kTolerance = 1e-13;
constexpr int kMaxIterations = 64;

// Initial guess for W_{-1}(z). s = sqrt(2 (1 + e z)) is passed separately
// so callers that know 1 + e z exactly avoid the cancellation.
double initial_guess(double z, double s) {
  if (s < 0.6) {
    // Branch-point series around z = -1/e.
    return -1.0 - s - s * s / 3.0 - 11.0 / 72.0 * s * s * s;
  }
  const double l1 = std::log(-z);
  const double l2 = std::log(-l1);
  return l1 - l2 + l2 / l1;
}

double halley(double z, double w) {
  for (int i = 0; i < kMaxIterations; ++i) {
    const double ew = std::exp(w);
    const double f = w * ew - z;
    const double wp1 = w + 1.0;
    if (wp1 == 0.0) break;
    const double step = f / (ew * wp1 - (w + 2.0) * f / (2.0 * wp1));
    const double next = w - step;
    if (std::fabs(next - w) <= kTolerance * std::fabs(next)) return next;
    w = next;
  }
  return w;
}

// W_{-1}(-(1 - p)/e) with 1 + e z = p known exactly.
double lambert_w_minus1_from_offset(double p) {
  if (p == 0.0) return -1.0;
  const double z = -(1.0 - p) * kInvE;
  const double s = std::sqrt(2.0 * p);
  double w = initial_guess(z, s);
  if (s < 1e-7) return w;  // series is exact to double precision here
  return halley(z, w);
}

}  // namespace

double lambert_w_minus1(double z) {
  if (!(z >= -kInvE - 1e-17 && z < 0.0)) {
    throw DomainError("lambert_w_minus1: z = " + std::to_string(z) +
                      " outside [-1/e, 0)");
  }
  const double offset = std::fma(std::numbers::e, z, 1.0);
  if (offset <= 0.0) return -1.0;
  const double s = std::sqrt(2.0 * offset);
  if (s < 1e-7) return initial_guess(z, s);
  return halley(z, initial_guess(z, s));
}

double laplace_cdf(double epsilon, double r) {
  if (!(epsilon > 0.0)) throw DomainError("laplace_cdf: epsilon must be > 0");
  if (!(r >= 0.0)) throw DomainError("laplace_cdf: radius must be >= 0");
  const double er = epsilon * r;
  return 1.0 - (1.0 + er) * std::exp(-er);
}

double laplace_cdf_inverse(double epsilon, double p) {
  if (!(epsilon > 0.0)) {
    throw DomainError("laplace_cdf_inverse: epsilon must be > 0");
  }
  if (!(p >= 0.0 && p < 1.0)) {
    throw DomainError("laplace_cdf_inverse: p = " + std::to_string(p) +
                      " outside [0, 1)");
  }
  const double w = lambert_w_minus1_from_offset(p);
  const double r = -(w + 1.0) / epsilon;
  return r < 0.0 ? 0.0 : r;
}

}  // namespace ftm
