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

#ifndef CHAINFACTOR_RECOVERY_HPP
#define CHAINFACTOR_RECOVERY_HPP

#include <vector>

#include "chainfactor/chain.hpp"
#include "chainfactor/conditional_expectation.hpp"
#include "chainfactor/density_matrix.hpp"
#include "chainfactor/divergences.hpp"
#include "chainfactor/operator.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

// rho E(rho)^-1 E(sigma): the map whose fixed point characterizes a
// vanishing divergence gap under E. Generally non-Hermitian; its trace
// always equals Tr sigma. Throws ContractViolation when sigma's support
// sticks out of rho's, where the condition is meaningless.
Matrix bs_recovery_asym(const Matrix& rho, const Matrix& sigma,
                        const ConditionalExpectation& e);

// Product-of-norms upper bound on the divergence gap
// D^(X||Y) - D^(E(X)||E(Y)) for positive definite X, Y. Both variants share
// the prefix ||X^-1/2 Y X^-1/2|| ||X||_1 ||E(X)^1/2|| ||E(X)^-1/2|| and end
// in
//   variant 1: ||E(Y)^-1 E(X)|| ||X Y^-1 E(Y) E(X)^-1 - 1||
//   variant 2: ||Y^-1 X||      ||Y X^-1 E(X) E(Y)^-1 - 1||
// Rank-deficient inputs take the pseudo-inverse path; audit_dpi flags that.
double dpi_upper_bound(const Matrix& x, const Matrix& y,
                       const ConditionalExpectation& e, int variant);

// Same bound lifted to a channel T through its Stinespring dilation; the
// trailing factor becomes ||X Y^-1 T*(T(Y) T(X)^-1) - 1||. Channel validity
// is enforced by the QuantumChannel constructor.
double dpi_upper_bound_channel(const Matrix& x, const Matrix& y,
                               const QuantumChannel& t);

// (pi/8)^4 ||rho^-1/2 sigma rho^-1/2||^-4 ||E(rho)^-1||^-2 ||B - sigma||_2^4
// with B = rho E(rho)^-1 E(sigma); a lower bound on the same gap for states.
double strengthened_lower_bound(const Matrix& rho, const Matrix& sigma,
                                const ConditionalExpectation& e);

// One evaluation of the full bound sandwich around the divergence gap.
// Whenever every entry is finite,
//   lower_bound - slack <= gap <= min(upper_bound_1, upper_bound_2) + slack.
struct DpiAudit {
  double gap = 0.0;
  double upper_bound_1 = 0.0;
  double upper_bound_2 = 0.0;
  double lower_bound = 0.0;
  double residual_hs = 0.0;  // ||rho E(rho)^-1 E(sigma) - sigma||_2
  double residual_op = 0.0;  // same residual in operator norm
  bool gap_finite = true;
  bool rank_deficient = false;  // a pseudo-inverse stood in for an inverse
};

DpiAudit audit_dpi(const Matrix& rho, const Matrix& sigma,
                   const ConditionalExpectation& e);

// Which side of the base block the new block is attached to. Chains grow to
// the right; the single-step error bound recovers the leftmost block of a
// tripartite window from the middle one.
enum class AttachSide { right, left };

// Completely positive single-Kraus extension map X -> K (X (x) 1) K^dag from
// the base block to the two-block pair space, with
//   K = rho_base^1/2 G^1/2 rho_base^-1/2,  G = rho_base^-1/2 rho_pair rho_base^-1/2
// and every base factor lifted with an identity on the attached block.
// Applying it to rho_base returns rho_pair exactly; it is not trace
// preserving on anything else.
struct RecoveryKernel {
  Matrix kraus;  // on the pair space
  Matrix base;   // defining one-block marginal (after any regularization)
  Matrix pair;   // defining two-block marginal
  int base_dim = 0;
  int attached_dim = 0;
  AttachSide side = AttachSide::right;
  // trace-norm gap between the stored base and the pair's own reduction;
  // zero for chains cut from one state, O(delta) for estimated marginals
  double base_mismatch = 0.0;

  // x lives on the base block
  Matrix apply(const Matrix& x) const;
};

// Builds the kernel for one cut. rho_pair's partial trace over the attached
// block must reproduce rho_base within consistency_tol (ContractViolation
// otherwise). eps_reg > 0 mixes both marginals toward maximally mixed before
// inverting, for estimated inputs with poor smallest eigenvalues; the mixing
// preserves their marginal consistency.
RecoveryKernel symmetric_recovery_kernel(const Matrix& rho_base,
                                         const Matrix& rho_pair,
                                         AttachSide side = AttachSide::right,
                                         double eps_reg = 0.0,
                                         double consistency_tol = tol::kernel);

// Kernels for every cut of `blocks`, one per adjacent pair of blocks. Pair
// marginals are taken from rho; each base is the partial trace of its own
// pair, so exact inputs give the exact marginals and estimated pairs stay
// self-consistent.
std::vector<RecoveryKernel> kernel_chain(const DensityMatrix& rho,
                                         const ChainPartition& blocks,
                                         double eps_reg = 0.0);

// Same from externally supplied pair marginals; pairs[i] couples block i to
// block i+1 and must agree with pairs[i+1] only through the theorems, not by
// precondition.
std::vector<RecoveryKernel> kernel_chain_from_pairs(
    const std::vector<Matrix>& pairs, const std::vector<int>& block_dims,
    double eps_reg = 0.0);

// (R_{N-1} o ... o R_{first_kernel})(x) as a raw matrix; x lives on the base
// block of kernels[first_kernel]. Total dimension above tol::max_total_dim
// throws ResourceError.
Matrix sequential_apply(const std::vector<RecoveryKernel>& kernels,
                        const Matrix& x, int first_kernel = 0);

// Full-chain reconstruction from the first block's marginal. The result
// carries rho_first's sites plus one site per attached block.
DensityMatrix sequential_reconstruct(const std::vector<RecoveryKernel>& kernels,
                                     const DensityMatrix& rho_first);

// One evaluation of the concatenated-map Lipschitz chain for PSD x on the
// base block of kernels[j]:
//   lhs = ||(o R_i)(x)||_1, mid = ||rho_j^-1/2 x rho_j^-1/2||_1,
//   rhs = ||rho_j^-1|| ||x||_1.
// mid_op records the operator-norm middle term; both readings sit between
// lhs and rhs.
struct LipschitzRecord {
  double lhs = 0.0;
  double mid = 0.0;
  double mid_op = 0.0;
  double rhs = 0.0;
};

LipschitzRecord lipschitz_check(const std::vector<RecoveryKernel>& kernels,
                                const Matrix& x, int j);

// Single-step recovery error against the reversed conditional measure on a
// tripartite window: recover A from B, compare with the joint state, and
// evaluate
//   i_rev >= (pi/8)^4 gamma_norm^-2 residual_1norm^4 = lower_bound
// with gamma_norm = ||rho_BC^-1/2 rho_ABC rho_BC^-1/2||.
struct RecoveryErrorBound {
  double i_rev = 0.0;
  double gamma_norm = 0.0;
  double residual_1norm = 0.0;
  double lower_bound = 0.0;
  bool i_rev_finite = true;
};

RecoveryErrorBound single_recovery_error_bound(const DensityMatrix& rho,
                                               const ChainPartition& p,
                                               const TripartiteSplit& split = {});

// Right-hand side of the chain reconstruction error bound,
//   16 (N-1) / pi * max_i ||rho_i^-1|| exp(i_max_i / 2) i_rev_i^{1/4},
// where for step i >= 2: i_max_i is the max-divergence mutual information
// between blocks 1..i-1 and block i, and i_rev_i the reversed conditional
// measure of block i against blocks 1..i-2 conditioned on block i-1. The
// per-step factors are recorded in block order starting at i = 2.
struct ReconstructionBound {
  double bound = 0.0;
  std::vector<double> inverse_norms;
  std::vector<double> max_info;
  std::vector<double> reversed_cmi;
  bool finite = true;
};

ReconstructionBound reconstruction_error_bound(const DensityMatrix& rho,
                                               const ChainPartition& blocks);

}  // namespace chainfactor

#endif  // CHAINFACTOR_RECOVERY_HPP
