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
#ifndef FTM_PLANAR_LAPLACE_H_
#define FTM_PLANAR_LAPLACE_H_

namespace ftm {

// Lower branch W_{-1} of the Lambert W function, z in [-1/e, 0).
// Halley iteration from the branch-point series (near -1/e) or the
// logarithmic asymptote (near 0), to 1e-13 relative tolerance.
double lambert_w_minus1(double z);

// Radial CDF of the planar Laplace distribution: 1 - (1 + eps r) e^{-eps r}.
double laplace_cdf(double epsilon, double r);

// Radius r with laplace_cdf(epsilon, r) == p, for p in [0, 1):
//   r = -(W_{-1}((p - 1) / e) + 1) / epsilon.
double laplace_cdf_inverse(double epsilon, double p);

}  // namespace ftm

#endif  // FTM_PLANAR_LAPLACE_H_
