// Copyright 2026 The chainfactor authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef CHAINFACTOR_TOLERANCES_HPP
#define CHAINFACTOR_TOLERANCES_HPP

namespace chainfactor {
namespace tol {

// Validation thresholds used uniformly across the library. Rank decisions
// never use these: spectral rank cutoffs are relative (dim * eps * max|eig|),
// see SpectralDecomposition.
inline constexpr double herm = 1e-10;    // ||M - M^dag|| tolerated on Hermitian inputs
inline constexpr double psd = 1e-10;     // eigenvalues down to -psd count as zero
inline constexpr double trace = 1e-9;    // |Tr rho - 1| tolerated on states
inline constexpr double kernel = 1e-9;   // mass outside a support that still counts as contained

// Dense-only regime: anything larger is refused rather than silently slow.
inline constexpr long max_total_dim = 4096;

// Reported divergences are clipped here when a kernel violation makes the
// true value +infinity; keeps CSV sweeps rectangular.
inline constexpr double divergence_clip = 1e6;

}  // namespace tol
}  // namespace chainfactor

#endif  // CHAINFACTOR_TOLERANCES_HPP
