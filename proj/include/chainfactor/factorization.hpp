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

#ifndef CHAINFACTOR_FACTORIZATION_HPP
#define CHAINFACTOR_FACTORIZATION_HPP

#include "chainfactor/chain.hpp"
#include "chainfactor/density_matrix.hpp"

namespace chainfactor {

// || rho_ABC rho_BC^-1 rho_B rho_AB^-1 - 1 ||_infty with marginals lifted by
// identity factors on the missing blocks and inverted on their supports.
// p must partition rho's space into blocks named A, B, C.
double approx_factorization_norm(const DensityMatrix& rho_abc, const ChainPartition& p);

// Operator norms controlling how far the tripartite marginals are from
// commuting-product behavior. The last entry is the condition number of
// rho_B, always >= 1.
struct GibbsNormDiagnostics {
  double a_b_over_ab = 0.0;    // || rho_A rho_B rho_AB^-1 ||
  double ab_over_a_b = 0.0;    // || rho_AB rho_A^-1 rho_B^-1 ||
  double abc_over_b = 0.0;     // || rho_ABC rho_B^-1 ||
  double b_condition = 0.0;    // || rho_B^-1 || * || rho_B ||
};

GibbsNormDiagnostics gibbs_norm_diagnostics(const DensityMatrix& rho_abc,
                                            const ChainPartition& p);

}  // namespace chainfactor

#endif  // CHAINFACTOR_FACTORIZATION_HPP
