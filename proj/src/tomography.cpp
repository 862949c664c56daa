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

#include "chainfactor/tomography.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <ostream>
#include <random>
#include <utility>

#include "chainfactor/errors.hpp"
#include "chainfactor/rng.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

constexpr std::uint64_t kStreamLabel = 0x746f6d6f67ULL;
constexpr long kMaxMarginalDim = 256;  // 8 qubits
constexpr double kFloorMix = 1e-12;

void check_config(const TomographyConfig& c) {
  if (c.samples_per_marginal < 1)
    throw ArgumentError("need at least one sample per marginal");
  if (c.delta < 0.0) throw ArgumentError("delta must be nonnegative");
  if (!(c.confidence > 0.0) || !(c.confidence < 1.0))
    throw ArgumentError("confidence must lie strictly between 0 and 1");
}

// basis index 0/1/2 = X/Y/Z, outcome index 0/1 = +/- eigenvector
struct PauliFrame {
  Eigen::Matrix2cd rot[3];      // columns are the basis eigenvectors
  Eigen::Matrix2cd snap[3][2];  // 3 |v><v| - 1 per (basis, outcome)
};

const PauliFrame& pauli_frame() {
  static const PauliFrame f = [] {
    PauliFrame out;
    const double r = 1.0 / std::sqrt(2.0);
    const Complex i01(0.0, 1.0);
    out.rot[0] << r, r, r, -r;
    out.rot[1] << r, r, r * i01, -r * i01;
    out.rot[2] = Eigen::Matrix2cd::Identity();
    for (int b = 0; b < 3; ++b)
      for (int o = 0; o < 2; ++o) {
        const Eigen::Vector2cd v = out.rot[b].col(o);
        out.snap[b][o] =
            3.0 * (v * v.adjoint()) - Eigen::Matrix2cd::Identity();
      }
    return out;
  }();
  return f;
}

// m <- (u^dag at site) m (u at site); stride is the bit weight of the site
void rotate_site(Matrix& m, long stride, const Eigen::Matrix2cd& u) {
  const long dim = m.rows();
  for (long r = 0; r < dim; ++r) {
    if (r & stride) continue;
    for (long c = 0; c < dim; ++c) {
      const Complex a = m(r, c), b = m(r + stride, c);
      m(r, c) = std::conj(u(0, 0)) * a + std::conj(u(1, 0)) * b;
      m(r + stride, c) = std::conj(u(0, 1)) * a + std::conj(u(1, 1)) * b;
    }
  }
  for (long c = 0; c < dim; ++c) {
    if (c & stride) continue;
    for (long r = 0; r < dim; ++r) {
      const Complex a = m(r, c), b = m(r, c + stride);
      m(r, c) = a * u(0, 0) + b * u(1, 0);
      m(r, c + stride) = a * u(0, 1) + b * u(1, 1);
    }
  }
}

// sum_o w[o] kron_i snap[digit_i][o_i], folded site by site from the right
Matrix snapshot_sum(const std::vector<double>& w, const std::vector<int>& dig) {
  const PauliFrame& f = pauli_frame();
  const int k = static_cast<int>(dig.size());
  std::vector<Matrix> cur(w.size());
  for (size_t o = 0; o < w.size(); ++o)
    cur[o] = Matrix::Constant(1, 1, w[o]);
  for (int site = k - 1; site >= 0; --site) {
    const long sub = cur[0].rows();
    std::vector<Matrix> nxt(cur.size() / 2);
    for (size_t p = 0; p < nxt.size(); ++p) {
      Matrix m = Matrix::Zero(2 * sub, 2 * sub);
      for (int bit = 0; bit < 2; ++bit) {
        const Eigen::Matrix2cd& s = f.snap[dig[site]][bit];
        const Matrix& a = cur[2 * p + bit];
        m.topLeftCorner(sub, sub) += s(0, 0) * a;
        m.topRightCorner(sub, sub) += s(0, 1) * a;
        m.bottomLeftCorner(sub, sub) += s(1, 0) * a;
        m.bottomRightCorner(sub, sub) += s(1, 1) * a;
      }
      nxt[p] = std::move(m);
    }
    cur = std::move(nxt);
  }
  return std::move(cur[0]);
}

MarginalEstimate delta_ball_estimate(const DensityMatrix& truth,
                                     const TomographyConfig& c) {
  const long d = truth.space().total_dim();
  const Matrix& rho = truth.matrix();
  double mix = 0.0;
  if (c.delta > 0.0) {
    const Matrix pi = Matrix::Identity(d, d) / static_cast<double>(d);
    const double dist = trace_norm(rho - pi);
    mix = dist <= c.delta ? 1.0 : c.delta / dist;
  }
  if (mix == 0.0) return MarginalEstimate{truth, 0.0, 0, {}};
  Matrix m = (1.0 - mix) * rho;
  m += (mix / static_cast<double>(d)) * Matrix::Identity(d, d);
  const double err = trace_norm(m - rho);
  return MarginalEstimate{DensityMatrix(truth.space(), std::move(m)), err, 0,
                          {}};
}

MarginalEstimate pauli_estimate(const DensityMatrix& truth,
                                const TomographyConfig& c,
                                int substream_index) {
  const SiteSpace& sp = truth.space();
  const int k = sp.sites();
  for (int s = 0; s < k; ++s)
    if (sp.dim(s) != 2)
      throw ArgumentError("pauli sampling is defined for qubit sites");
  const long dim = sp.total_dim();
  const long samples = c.samples_per_marginal;
  long nbases = 1;
  for (int s = 0; s < k; ++s) nbases *= 3;

  Gaussian source(substream_seed(c.seed, kStreamLabel,
                                 static_cast<std::uint64_t>(substream_index)));
  std::mt19937_64& eng = source.engine();

  // uniform multinomial over basis strings, by conditional binomials
  std::vector<long> per_basis(nbases, 0);
  long left = samples;
  for (long b = 0; b < nbases && left > 0; ++b) {
    if (b + 1 == nbases) {
      per_basis[b] = left;
      break;
    }
    std::binomial_distribution<long> bin(left,
                                         1.0 / static_cast<double>(nbases - b));
    per_basis[b] = bin(eng);
    left -= per_basis[b];
  }

  std::vector<MeasurementRecord> records;
  Matrix est = Matrix::Zero(dim, dim);
  std::vector<int> dig(k, 0);
  std::vector<double> probs(dim), weights(dim);
  std::vector<long> counts(dim);
  for (long b = 0; b < nbases; ++b) {
    const long nb = per_basis[b];
    if (nb == 0) continue;
    long rest = b;
    for (int s = k - 1; s >= 0; --s) {
      dig[s] = static_cast<int>(rest % 3);
      rest /= 3;
    }

    // exact outcome distribution in this basis
    Matrix rot = truth.matrix();
    for (int s = 0; s < k; ++s)
      if (dig[s] != 2)
        rotate_site(rot, 1L << (k - 1 - s), pauli_frame().rot[dig[s]]);
    double total = 0.0;
    for (long o = 0; o < dim; ++o) {
      probs[o] = std::max(0.0, rot(o, o).real());
      total += probs[o];
    }
    for (long o = 0; o < dim; ++o) probs[o] /= total;

    double tail = 1.0;
    long open = nb;
    for (long o = 0; o < dim; ++o) {
      if (o + 1 == dim || tail <= 0.0) {
        counts[o] = open;
        open = 0;
        continue;
      }
      const double p = std::clamp(probs[o] / tail, 0.0, 1.0);
      std::binomial_distribution<long> bin(open, p);
      counts[o] = open > 0 ? bin(eng) : 0;
      open -= counts[o];
      tail -= probs[o];
    }

    for (long o = 0; o < dim; ++o) {
      weights[o] = static_cast<double>(counts[o]) / samples;
      if (counts[o] == 0) continue;
      MeasurementRecord rec;
      rec.count = counts[o];
      for (int s = 0; s < k; ++s) {
        rec.basis.push_back("XYZ"[dig[s]]);
        rec.outcomes.push_back("+-"[(o >> (k - 1 - s)) & 1]);
      }
      records.push_back(std::move(rec));
    }
    est += snapshot_sum(weights, dig);
  }

  // project back to a state: clip, renormalize, keep strictly full rank
  est = 0.5 * (est + Matrix(est.adjoint()));
  const SpectralDecomposition spec = herm_eig(est);
  RealVector clipped = spec.eigenvalues.cwiseMax(0.0);
  Matrix psd = spec.eigenvectors *
               clipped.cast<Complex>().asDiagonal() *
               spec.eigenvectors.adjoint();
  const double tr = psd.trace().real();
  if (tr <= 0.0)
    psd = Matrix::Identity(dim, dim) / static_cast<double>(dim);
  else
    psd /= tr;
  psd = (1.0 - kFloorMix) * psd +
        (kFloorMix / static_cast<double>(dim)) * Matrix::Identity(dim, dim);

  const double err = trace_norm(psd - truth.matrix());
  return MarginalEstimate{DensityMatrix(sp, std::move(psd)), err, samples,
                          std::move(records)};
}

// shared-marginal bookkeeping: estimate one template per distinct shape and
// hand out copies, or estimate each index on its own stream
class EstimatePool {
 public:
  EstimatePool(const TomographyConfig& base, bool share)
      : config_(base), share_(share) {}

  int planned(const std::vector<SiteSpace>& shapes) {
    int distinct = 0;
    std::map<std::vector<int>, int> seen;
    for (const SiteSpace& s : shapes)
      if (seen.emplace(s.dims(), 1).second) ++distinct;
    return share_ ? distinct : static_cast<int>(shapes.size());
  }

  void set_samples(long scaled) { config_.samples_per_marginal = scaled; }

  const MarginalEstimate& get(const DensityMatrix& truth, int index) {
    if (!share_) {
      own_.emplace(index, simulate_marginal_estimate(truth, config_, index));
      return own_.at(index);
    }
    const std::vector<int> key = truth.space().dims();
    auto it = templates_.find(key);
    if (it == templates_.end())
      it = templates_
               .emplace(key, simulate_marginal_estimate(truth, config_, index))
               .first;
    return it->second;
  }

  long samples_used() const {
    long total = 0;
    for (const auto& [k, e] : templates_) total += e.samples_used;
    for (const auto& [k, e] : own_) total += e.samples_used;
    return total;
  }

 private:
  TomographyConfig config_;
  bool share_ = false;
  std::map<std::vector<int>, MarginalEstimate> templates_;
  std::map<int, MarginalEstimate> own_;
};

}  // namespace

long union_scaled_samples(long base, int marginals, double confidence) {
  if (base < 1) throw ArgumentError("sample budget must be positive");
  if (marginals < 1) throw ArgumentError("need at least one marginal");
  if (!(confidence > 0.0) || !(confidence < 1.0))
    throw ArgumentError("confidence must lie strictly between 0 and 1");
  if (marginals == 1) return base;
  const double grown = std::ceil(
      static_cast<double>(base) *
      std::log(static_cast<double>(marginals) / confidence) /
      std::log(1.0 / confidence));
  return static_cast<long>(grown);
}

MarginalEstimate simulate_marginal_estimate(const DensityMatrix& true_marginal,
                                            const TomographyConfig& config,
                                            int substream_index) {
  check_config(config);
  if (true_marginal.space().total_dim() > kMaxMarginalDim)
    throw ResourceError(
        "marginal estimation is limited to dimension " +
        std::to_string(kMaxMarginalDim) + ", got " +
        std::to_string(true_marginal.space().total_dim()));
  switch (config.scheme) {
    case TomographyScheme::delta_ball:
      return delta_ball_estimate(true_marginal, config);
    case TomographyScheme::pauli_sampling:
      return pauli_estimate(true_marginal, config, substream_index);
  }
  throw ArgumentError("unknown tomography scheme");
}

void write_measurement_csv(
    std::ostream& out,
    const std::vector<std::vector<MeasurementRecord>>& records_by_block) {
  out << "block_index,basis_string,outcome_string,count\n";
  for (size_t b = 0; b < records_by_block.size(); ++b)
    for (const MeasurementRecord& r : records_by_block[b])
      out << b << ',' << r.basis << ',' << r.outcomes << ',' << r.count
          << '\n';
}

LearnedMpo learn_mpo(const GibbsInstance& g, int block_size,
                     const TomographyConfig& config) {
  check_config(config);
  const ChainPartition blocks =
      ChainPartition::uniform_blocks(g.space, block_size);
  const std::vector<Block>& bl = blocks.blocks();
  const int nblocks = static_cast<int>(bl.size());
  if (nblocks < 2) throw ArgumentError("learning needs at least two blocks");

  std::vector<DensityMatrix> truth;
  std::vector<SiteSpace> shapes;
  std::vector<int> dims;
  for (int j = 0; j + 1 < nblocks; ++j) {
    truth.push_back(marginal(g, blocks, {bl[j].name, bl[j + 1].name}));
    shapes.push_back(truth.back().space());
  }
  for (const Block& b : bl)
    dims.push_back(static_cast<int>(
        g.space.subspace(blocks.sites({b.name})).total_dim()));

  EstimatePool pool(config, config.share_marginals);
  pool.set_samples(union_scaled_samples(config.samples_per_marginal,
                                        pool.planned(shapes),
                                        config.confidence));
  std::vector<Matrix> pairs;
  for (int j = 0; j + 1 < nblocks; ++j)
    pairs.push_back(pool.get(truth[j], j).estimate.matrix());

  const std::vector<RecoveryKernel> kernels =
      kernel_chain_from_pairs(pairs, dims);
  const DensityMatrix rho1(g.space.subspace(blocks.sites({bl[0].name})),
                           kernels[0].base);

  // estimated chains are not exactly trace preserving; fold the deficit back
  // in unless the state already passes validation untouched, so the exact
  // pipeline stays bit-identical
  Matrix raw = sequential_apply(kernels, rho1.matrix());
  const double tr = raw.trace().real();
  if (std::abs(tr - 1.0) > tol::trace) raw /= tr;

  LearnedMpo out{mpo_export(kernels, rho1),
                 DensityMatrix(g.space, std::move(raw)),
                 0.0,
                 pool.samples_used(),
                 0.0,
                 config.share_marginals};
  out.trace_distance_to_truth =
      0.5 * trace_norm(out.reconstructed.matrix() - g.state.matrix());
  for (const RecoveryKernel& k : kernels)
    out.max_base_mismatch = std::max(out.max_base_mismatch, k.base_mismatch);
  return out;
}

double purity_p2(const std::vector<Matrix>& pair_marginals,
                 const std::vector<Matrix>& single_marginals) {
  if (pair_marginals.empty())
    throw ArgumentError("purity product needs at least one pair marginal");
  if (single_marginals.size() + 1 != pair_marginals.size())
    throw ArgumentError(
        "need exactly one interior single-block marginal per inner cut");
  double num = 1.0;
  for (const Matrix& m : pair_marginals) {
    if (m.rows() != m.cols()) throw ArgumentError("marginals must be square");
    num *= m.squaredNorm();
  }
  double den = 1.0;
  for (const Matrix& m : single_marginals) {
    if (m.rows() != m.cols()) throw ArgumentError("marginals must be square");
    den *= m.squaredNorm();
  }
  if (den <= 0.0) throw ArgumentError("vanishing single-block purity");
  return num / den;
}

PurityReport estimate_purity(const GibbsInstance& g, int block_size,
                             const TomographyConfig& config) {
  check_config(config);
  const ChainPartition blocks =
      ChainPartition::uniform_blocks(g.space, block_size);
  const std::vector<Block>& bl = blocks.blocks();
  const int nblocks = static_cast<int>(bl.size());
  if (nblocks < 2)
    throw ArgumentError("purity estimation needs at least two blocks");

  std::vector<DensityMatrix> truth;
  std::vector<SiteSpace> shapes;
  for (int j = 0; j + 1 < nblocks; ++j) {
    truth.push_back(marginal(g, blocks, {bl[j].name, bl[j + 1].name}));
    shapes.push_back(truth.back().space());
  }
  const int npairs = nblocks - 1;
  for (int j = 1; j + 1 < nblocks; ++j) {
    truth.push_back(marginal(g, blocks, {bl[j].name}));
    shapes.push_back(truth.back().space());
  }

  EstimatePool pool(config, config.share_marginals);
  pool.set_samples(union_scaled_samples(config.samples_per_marginal,
                                        pool.planned(shapes),
                                        config.confidence));

  PurityReport out;
  std::vector<Matrix> pairs, singles;
  for (int j = 0; j < npairs; ++j) {
    pairs.push_back(pool.get(truth[j], j).estimate.matrix());
    out.pair_purities.push_back(pairs.back().squaredNorm());
  }
  for (size_t j = npairs; j < truth.size(); ++j) {
    singles.push_back(
        pool.get(truth[j], static_cast<int>(j)).estimate.matrix());
    out.single_purities.push_back(singles.back().squaredNorm());
  }

  out.p2_estimate = purity_p2(pairs, singles);
  out.true_purity = exact_purity(g);
  out.multiplicative_error = std::abs(out.p2_estimate / out.true_purity - 1.0);
  out.samples_used = pool.samples_used();
  out.shared_marginals = config.share_marginals;
  return out;
}

int purity_block_size(int n, double epsilon, int max_marginal_sites) {
  if (n < 2) throw ArgumentError("need at least two sites");
  if (!(epsilon > 0.0)) throw ArgumentError("target error must be positive");
  if (max_marginal_sites < 2)
    throw ArgumentError("measurement limit below a single pair");

  auto feasible = [&](int l) {
    const int full = n / l;
    return full >= 2 && 2 * l + (n - l * full) <= max_marginal_sites;
  };
  auto deep_enough = [&](int l) {
    const double need =
        std::ceil(std::log2(static_cast<double>(n / l) / epsilon));
    return static_cast<double>(l) >= need;
  };

  int fallback = 0;
  for (int l = 1; 2 * l <= n; ++l) {
    if (!feasible(l)) continue;
    fallback = l;
    if (deep_enough(l)) return l;
  }
  return fallback;  // >= 1: single-site blocks always fit the limit
}

}  // namespace chainfactor
