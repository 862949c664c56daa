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

#include "chainfactor/gibbs.hpp"

#include <cmath>

#include "chainfactor/errors.hpp"

namespace chainfactor {

namespace {

// Boltzmann weights relative to the extremal energy, so nothing overflows.
// Returns normalized probabilities; log_z gets log Tr exp(-beta H).
RealVector boltzmann_probs(const RealVector& energies, double beta, double* log_z) {
  const double shift = (beta >= 0.0) ? energies.minCoeff() : energies.maxCoeff();
  RealVector w = (-beta * (energies.array() - shift)).exp();
  const double total = w.sum();
  if (log_z != nullptr) *log_z = std::log(total) - beta * shift;
  return w / total;
}

}  // namespace

Operator build_hamiltonian(const Interaction& interaction, int n) {
  if (n < 1) throw ArgumentError("chain length must be positive");
  SiteSpace space = SiteSpace::uniform(n, interaction.local_dim());
  const long d = space.total_dim();
  Matrix h = Matrix::Zero(d, d);
  for (const InteractionTerm& t : interaction.terms()) {
    const int width = t.offsets.back();
    for (int anchor = 0; anchor + width < n; ++anchor) {
      std::vector<int> sites(t.offsets.size());
      for (size_t i = 0; i < t.offsets.size(); ++i) sites[i] = anchor + t.offsets[i];
      h += embed_matrix(t.block, space.dims(), sites);
    }
  }
  return Operator(std::move(space), std::move(h));
}

GibbsInstance gibbs_state(const Interaction& interaction, int n, double beta) {
  Operator h = build_hamiltonian(interaction, n);
  SpectralDecomposition spec = herm_eig(h.matrix());
  double log_z = 0.0;
  RealVector probs = boltzmann_probs(spec.eigenvalues, beta, &log_z);
  DensityMatrix state = DensityMatrix::from_spectrum(h.space(), spec.eigenvectors, probs);
  return GibbsInstance{interaction, h.space(),          beta,
                       std::move(h), std::move(state),  log_z,
                       std::move(spec.eigenvalues)};
}

double exact_purity(const GibbsInstance& g) {
  RealVector p = boltzmann_probs(g.energies, g.beta, nullptr);
  return p.squaredNorm();
}

double exact_entropy(const GibbsInstance& g) {
  RealVector p = boltzmann_probs(g.energies, g.beta, nullptr);
  double s = 0.0;
  for (long i = 0; i < p.size(); ++i) {
    if (p(i) > 0.0) s -= p(i) * std::log(p(i));
  }
  return s;
}

DensityMatrix marginal(const DensityMatrix& rho, const ChainPartition& p,
                       const std::vector<std::string>& names) {
  if (p.space() != rho.space()) throw ArgumentError("partition does not match the state's space");
  std::vector<int> keep = p.sites(names);
  for (size_t i = 1; i < keep.size(); ++i) {
    if (keep[i] != keep[i - 1] + 1) {
      throw ArgumentError("marginal blocks must form a contiguous window");
    }
  }
  return reduce(rho, keep);
}

DensityMatrix marginal(const GibbsInstance& g, const ChainPartition& p,
                       const std::vector<std::string>& names) {
  return marginal(g.state, p, names);
}

}  // namespace chainfactor
