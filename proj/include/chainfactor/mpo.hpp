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

#ifndef CHAINFACTOR_MPO_HPP
#define CHAINFACTOR_MPO_HPP

#include <iosfwd>
#include <vector>

#include "chainfactor/density_matrix.hpp"
#include "chainfactor/operator.hpp"
#include "chainfactor/recovery.hpp"

namespace chainfactor {

// Matrix product operator over chain blocks. Site tensor i is stored as a
// matrix with the left bond as row index and (block row, block column, right
// bond) flattened row-major as column index; the outer bonds are size 1.
// bond_dims lists the internal cuts, so it has one entry fewer than tensors.
struct MpoState {
  std::vector<Matrix> tensors;
  std::vector<int> block_dims;
  std::vector<int> bond_dims;

  int blocks() const { return static_cast<int>(tensors.size()); }
};

// Kernel chain folded into site tensors. The cut between blocks i and i+1
// carries the attached-block row and column of kernel i (its internal
// contraction index closes inside the site), then a singular value sweep
// with relative cutoff 1e-12 drops the directions the chain never populates;
// product-state kernels collapse to bond 1. Every reported bond stays at or
// below the cube of the adjacent block dimension.
MpoState mpo_export(const std::vector<RecoveryKernel>& kernels,
                    const DensityMatrix& rho_first);

// Dense contraction; matches the sequential reconstruction of the same
// kernels. The result carries one site per block.
DensityMatrix mpo_contract(const MpoState& mpo);

// Text round trip: a header with block and bond dimensions followed by
// row-major "re im" entry pairs per tensor.
void write_mpo(std::ostream& out, const MpoState& mpo);
MpoState read_mpo(std::istream& in);

}  // namespace chainfactor

#endif  // CHAINFACTOR_MPO_HPP
