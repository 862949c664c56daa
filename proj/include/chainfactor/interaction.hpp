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

#ifndef CHAINFACTOR_INTERACTION_HPP
#define CHAINFACTOR_INTERACTION_HPP

#include <cstdint>
#include <vector>

#include "chainfactor/operator.hpp"

namespace chainfactor {

// One translation-invariant term pattern: a Hermitian block acting on the
// sites {anchor + o : o in offsets}. Offsets start at 0 and are strictly
// increasing; the block dimension is local_dim^offsets.size().
struct InteractionTerm {
  std::vector<int> offsets;
  Matrix block;
};

// Finite-range translation-invariant interaction on a uniform chain. The
// inverse temperature is not part of the interaction; it enters only when a
// state is built.
class Interaction {
 public:
  Interaction(int local_dim, std::vector<InteractionTerm> terms);

  int local_dim() const { return local_dim_; }
  const std::vector<InteractionTerm>& terms() const { return terms_; }

  // largest offset appearing in any term (diameter of the widest pattern)
  int range() const;

  // sum over all term translates that contain a fixed bulk site:
  // each pattern contributes offsets.size() * ||block||_infty
  double strength() const;

 private:
  int local_dim_;
  std::vector<InteractionTerm> terms_;
};

// -J sum Z.Z - g sum X
Interaction tfim(double coupling, double field);

// Jxy sum (X.X + Y.Y) + Jz sum Z.Z - h sum Z
Interaction xxz(double jxy, double jz, double field);

// -J sum Z.Z - h sum Z; all blocks diagonal
Interaction classical_ising(double coupling, double field);

// One Gaussian Hermitian block per contiguous pattern {0..k}, k = 0..range,
// each normalized to unit operator norm. Bit-identical for equal seeds.
Interaction random_ti(std::uint64_t seed, int range, int local_dim);

// Z.Z coupling across distance k with norm exactly exp(-lambda*k), plus no
// field. Distances with weight below `truncation` are dropped. lambda > 0.
Interaction exp_ising(double lambda, double truncation = 1e-14);

}  // namespace chainfactor

#endif  // CHAINFACTOR_INTERACTION_HPP
