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

// Simulated marginal tomography and the pipelines built on it: learning a
// chain state as a kernel chain / tensor chain from estimated pair
// marginals, and estimating the global purity from local purities.

#ifndef CHAINFACTOR_TOMOGRAPHY_HPP
#define CHAINFACTOR_TOMOGRAPHY_HPP

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "chainfactor/gibbs.hpp"
#include "chainfactor/mpo.hpp"
#include "chainfactor/recovery.hpp"

namespace chainfactor {

// delta_ball is the deterministic idealization: it returns the true marginal
// pushed toward maximally mixed by exactly the requested 1-norm error, so
// pipeline error propagation can be studied without sampling noise.
// pauli_sampling simulates uniformly random single-site Pauli-basis
// measurements with exact Born outcome statistics and reconstructs by linear
// inversion of the measurement frame.
enum class TomographyScheme { delta_ball, pauli_sampling };

struct TomographyConfig {
  TomographyScheme scheme = TomographyScheme::delta_ball;
  long samples_per_marginal = 100000;  // per marginal, before union scaling
  double delta = 0.0;                  // delta_ball 1-norm error; >= 0
  double confidence = 0.05;            // total failure budget c, in (0, 1)
  std::uint64_t seed = 0;
  // reuse one bulk estimate for every marginal of equal shape, as
  // translation invariance suggests; boundary blocks are not special-cased,
  // so reports carry the flag instead of a guarantee
  bool share_marginals = false;
};

// ceil(base * log(marginals / c) / log(1 / c)): the per-marginal sample
// count after splitting the failure budget c across `marginals` estimates;
// equals base when marginals == 1.
long union_scaled_samples(long base, int marginals, double confidence);

// One (basis string, outcome string) measurement cell. basis uses X/Y/Z per
// site, outcomes uses +/- per site, both with site 0 leftmost.
struct MeasurementRecord {
  std::string basis;
  std::string outcomes;
  long count = 0;
};

struct MarginalEstimate {
  DensityMatrix estimate;
  double true_error_1norm = 0.0;
  long samples_used = 0;  // 0 for the deterministic scheme
  std::vector<MeasurementRecord> records;  // pauli_sampling only
};

// Estimates one marginal. substream_index separates random streams of
// different marginals under one seed, so a sweep gives the same estimates in
// any evaluation order. Marginals above 8 qubits are refused (ResourceError)
// and pauli_sampling requires qubit sites.
MarginalEstimate simulate_marginal_estimate(const DensityMatrix& true_marginal,
                                            const TomographyConfig& config,
                                            int substream_index = 0);

// records_by_block[i] holds the cells of block i. Header plus one row per
// nonzero cell, in (block, basis, outcome) order.
void write_measurement_csv(
    std::ostream& out,
    const std::vector<std::vector<MeasurementRecord>>& records_by_block);

struct LearnedMpo {
  MpoState mpo;
  DensityMatrix reconstructed;
  double trace_distance_to_truth = 0.0;  // (1/2) ||rec - rho||_1
  long samples_used = 0;
  // largest per-kernel gap between the stored base and its own pair's
  // reduction; zero when estimates are exact
  double max_base_mismatch = 0.0;
  bool shared_marginals = false;
};

// Estimates every adjacent pair marginal of the chain cut into blocks of
// block_size sites, builds the recovery kernel chain from them, and
// reconstructs. With delta = 0 under delta_ball this is the exact pipeline.
LearnedMpo learn_mpo(const GibbsInstance& g, int block_size,
                     const TomographyConfig& config);

// prod Tr[pair_j^2] / prod Tr[single_j^2], the pair-over-interior-block
// purity product. singles must hold exactly the interior blocks, one fewer
// than pairs; for consistent marginals of a chain whose Renyi-2 conditional
// correlations vanish across every cut this equals the global purity.
double purity_p2(const std::vector<Matrix>& pair_marginals,
                 const std::vector<Matrix>& single_marginals);

struct PurityReport {
  double p2_estimate = 0.0;
  double true_purity = 0.0;  // exact Tr[rho^2] from the spectrum
  double multiplicative_error = 0.0;  // |p2_estimate / true_purity - 1|
  std::vector<double> pair_purities;
  std::vector<double> single_purities;
  long samples_used = 0;
  bool shared_marginals = false;
};

// Estimates the pair and interior-block marginals of the chain cut into
// blocks of block_size sites and applies purity_p2.
PurityReport estimate_purity(const GibbsInstance& g, int block_size,
                             const TomographyConfig& config);

// Smallest block size l with l >= ceil(log2(blocks(l) / epsilon)), the size
// at which the purity product's bias stays below epsilon; capped by the
// largest l whose pair marginals fit the measurement limit.
int purity_block_size(int n, double epsilon, int max_marginal_sites = 8);

}  // namespace chainfactor

#endif  // CHAINFACTOR_TOMOGRAPHY_HPP
