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

#ifndef CHAINFACTOR_DIVERGENCES_HPP
#define CHAINFACTOR_DIVERGENCES_HPP

#include <string>
#include <vector>

#include "chainfactor/chain.hpp"
#include "chainfactor/density_matrix.hpp"
#include "chainfactor/operator.hpp"

namespace chainfactor {

// A divergence evaluation. When the second argument's kernel sticks out of
// the first argument's kernel the value is +infinity; CSV emission uses
// clipped() so downstream parsing never sees "inf".
struct DivergenceValue {
  double value = 0.0;
  bool finite = true;
  bool kernel_violation = false;

  double clipped() const;

  static DivergenceValue infinite();
};

// -Tr[rho log rho] over the support; accepts any PSD matrix
double von_neumann(const Matrix& rho);

// Tr[rho (log rho - log sigma)], +inf unless ker sigma is inside ker rho
DivergenceValue umegaki(const Matrix& rho, const Matrix& sigma);

// Tr[rho log(rho^1/2 sigma^-1 rho^1/2)] with the inverse and log taken on
// supports; accepts general PSD arguments without renormalizing. Never below
// umegaki, equal to it when the arguments commute.
DivergenceValue bs_entropy(const Matrix& rho, const Matrix& sigma);

// log of the smallest lambda with rho <= lambda sigma
DivergenceValue d_max(const Matrix& rho, const Matrix& sigma);

// ---------------------------------------------------------------------------
// Block-structured measures. Roles are lists of partition block names; each
// role's union must be a contiguous window (empty roles are allowed and act
// as trivial factors).
// ---------------------------------------------------------------------------

struct TripartiteSplit {
  std::vector<std::string> a{"A"};
  std::vector<std::string> b{"B"};
  std::vector<std::string> c{"C"};
};

// -D^(rho_AB || 1_A x rho_B); log d_A on the maximally mixed state
DivergenceValue bs_cond_entropy(const DensityMatrix& rho, const ChainPartition& p,
                                const std::vector<std::string>& a_blocks,
                                const std::vector<std::string>& b_blocks);

// D^(rho_AB || rho_A x rho_B)
DivergenceValue bs_mutual_info(const DensityMatrix& rho, const ChainPartition& p,
                               const std::vector<std::string>& a_blocks,
                               const std::vector<std::string>& b_blocks);

// d_max(rho_AB || rho_A x rho_B)
DivergenceValue max_mutual_info(const DensityMatrix& rho, const ChainPartition& p,
                                const std::vector<std::string>& a_blocks,
                                const std::vector<std::string>& b_blocks);

// S(AB) + S(BC) - S(B) - S(ABC)
DivergenceValue cmi(const DensityMatrix& rho, const ChainPartition& p,
                    const TripartiteSplit& split = {});

// Differences of extended divergences against the lifted marginals. All three
// are nonnegative and vanish when A is in a product with BC.
//   os:  D^(rho_ABC || pi_A x rho_BC) - D^(rho_AB || pi_A x rho_B)
//   ts:  D^(rho_ABC || rho_A x rho_BC) - D^(rho_AB || rho_A x rho_B)
//   rev: D^(pi_A x rho_BC || rho_ABC) - D^(pi_A x rho_B || rho_AB)
DivergenceValue bs_cmi_os(const DensityMatrix& rho, const ChainPartition& p,
                          const TripartiteSplit& split = {});
DivergenceValue bs_cmi_ts(const DensityMatrix& rho, const ChainPartition& p,
                          const TripartiteSplit& split = {});
DivergenceValue bs_cmi_rev(const DensityMatrix& rho, const ChainPartition& p,
                           const TripartiteSplit& split = {});

// Tr[rho_AB^2] Tr[rho_BC^2] / (Tr[rho_ABC^2] Tr[rho_B^2]); exactly 1 when A
// is in a product with BC
double purity_ratio(const DensityMatrix& rho, const ChainPartition& p,
                    const TripartiteSplit& split = {});

// S2(AB) + S2(BC) - S2(B) - S2(ABC) = -log purity_ratio; sign-indefinite
double renyi2_cmi(const DensityMatrix& rho, const ChainPartition& p,
                  const TripartiteSplit& split = {});

// Trace distance between the window starting at `first` and its one-site
// translate; a soft translation-invariance probe for bulk windows.
double translation_defect(const DensityMatrix& rho, int first, int window);

}  // namespace chainfactor

#endif  // CHAINFACTOR_DIVERGENCES_HPP
