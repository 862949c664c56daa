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

#ifndef CHAINFACTOR_GIBBS_HPP
#define CHAINFACTOR_GIBBS_HPP

#include <string>
#include <vector>

#include "chainfactor/chain.hpp"
#include "chainfactor/density_matrix.hpp"
#include "chainfactor/interaction.hpp"
#include "chainfactor/operator.hpp"

namespace chainfactor {

// A thermal state together with the data needed to reason about it exactly.
// energies holds the Hamiltonian spectrum (ascending); eigenvectors are not
// retained beyond state construction.
struct GibbsInstance {
  Interaction interaction;
  SiteSpace space;
  double beta = 0.0;
  Operator hamiltonian;
  DensityMatrix state;
  double log_partition = 0.0;  // log Tr exp(-beta H), overflow-safe
  RealVector energies;
};

// Open-boundary sum of all term translates that fit in [0, n).
Operator build_hamiltonian(const Interaction& interaction, int n);

// exp(-beta H)/Z via the spectrum, shifted by the ground energy before
// exponentiating so no weight overflows.
GibbsInstance gibbs_state(const Interaction& interaction, int n, double beta);

// Tr rho^2 from the stored spectrum alone
double exact_purity(const GibbsInstance& g);

// von Neumann entropy from the stored spectrum alone
double exact_entropy(const GibbsInstance& g);

// Marginal on the union of the named blocks, which must form a contiguous
// window of sites.
DensityMatrix marginal(const DensityMatrix& rho, const ChainPartition& p,
                       const std::vector<std::string>& names);
DensityMatrix marginal(const GibbsInstance& g, const ChainPartition& p,
                       const std::vector<std::string>& names);

}  // namespace chainfactor

#endif  // CHAINFACTOR_GIBBS_HPP
