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

#include "chainfactor/divergences.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "chainfactor/gibbs.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_psd(const SpectralDecomposition& s, const char* what) {
  if (s.eigenvalues.size() > 0 && s.eigenvalues.minCoeff() < -tol::psd) {
    throw ContractViolation(std::string(what) + ": argument is not PSD within tolerance");
  }
}

// diagonal of U^dag rho U, which is real for Hermitian rho
RealVector basis_weights(const Matrix& rho, const Matrix& u) {
  const Matrix ru = detail::prod(rho, u);
  RealVector w(u.cols());
  for (long k = 0; k < u.cols(); ++k) w(k) = u.col(k).dot(ru.col(k)).real();
  return w;
}

double sqrt_clip(double x) { return x > 0.0 ? std::sqrt(x) : 0.0; }
double inv_clip(double x) { return x > 0.0 ? 1.0 / x : 0.0; }
double inv_sqrt_clip(double x) { return x > 0.0 ? 1.0 / std::sqrt(x) : 0.0; }

DivergenceValue finite_value(double v) { return {v, true, false}; }

}  // namespace

double DivergenceValue::clipped() const {
  return std::min(value, tol::divergence_clip);
}

DivergenceValue DivergenceValue::infinite() { return {kInf, false, true}; }

double von_neumann(const Matrix& rho) {
  const SpectralDecomposition s = herm_eig(rho);
  require_psd(s, "von_neumann");
  double acc = 0.0;
  for (long i = 0; i < s.eigenvalues.size(); ++i) {
    const double lam = s.eigenvalues(i);
    if (lam > s.cutoff) acc -= lam * std::log(lam);
  }
  return acc;
}

DivergenceValue umegaki(const Matrix& rho, const Matrix& sigma) {
  const SpectralDecomposition sr = herm_eig(rho);
  const SpectralDecomposition ss = herm_eig(sigma);
  require_psd(sr, "umegaki");
  require_psd(ss, "umegaki");
  if (!kernel_contained(ss, rho)) return DivergenceValue::infinite();

  double t1 = 0.0;
  for (long i = 0; i < sr.eigenvalues.size(); ++i) {
    const double lam = sr.eigenvalues(i);
    if (lam > sr.cutoff) t1 += lam * std::log(lam);
  }
  const RealVector w = basis_weights(rho, ss.eigenvectors);
  double t2 = 0.0;
  for (long j = 0; j < ss.eigenvalues.size(); ++j) {
    const double lam = ss.eigenvalues(j);
    if (lam > ss.cutoff) t2 += w(j) * std::log(lam);
  }
  return finite_value(t1 - t2);
}

DivergenceValue bs_entropy(const Matrix& rho, const Matrix& sigma) {
  const SpectralDecomposition sr = herm_eig(rho);
  const SpectralDecomposition ss = herm_eig(sigma);
  require_psd(sr, "bs_entropy");
  require_psd(ss, "bs_entropy");
  if (!kernel_contained(ss, rho)) return DivergenceValue::infinite();

  const Matrix root = herm_apply(sr, sqrt_clip, KernelPolicy::skip_kernel);
  const Matrix inv = herm_apply(ss, inv_clip, KernelPolicy::skip_kernel);
  Matrix m = detail::prod3(root, inv, root);
  m = ((m + m.adjoint()) / 2.0).eval();
  const SpectralDecomposition sm = herm_eig(m);

  // supp(m) = supp(rho) under the kernel condition, so weights on the
  // discarded kernel directions vanish
  const RealVector w = basis_weights(rho, sm.eigenvectors);
  double acc = 0.0;
  for (long k = 0; k < sm.eigenvalues.size(); ++k) {
    const double lam = sm.eigenvalues(k);
    if (lam > sm.cutoff) acc += w(k) * std::log(lam);
  }
  return finite_value(acc);
}

DivergenceValue d_max(const Matrix& rho, const Matrix& sigma) {
  const SpectralDecomposition sr = herm_eig(rho);
  const SpectralDecomposition ss = herm_eig(sigma);
  require_psd(sr, "d_max");
  require_psd(ss, "d_max");
  if (!kernel_contained(ss, rho)) return DivergenceValue::infinite();

  const Matrix isq = herm_apply(ss, inv_sqrt_clip, KernelPolicy::skip_kernel);
  Matrix t = detail::prod3(isq, rho, isq);
  t = ((t + t.adjoint()) / 2.0).eval();
  const SpectralDecomposition st = herm_eig(t);
  return finite_value(std::log(st.eigenvalues.maxCoeff()));
}

// ---------------------------------------------------------------------------
// Block-structured measures
// ---------------------------------------------------------------------------

namespace {

// Marginals and lifts shared by the conditional measures. All matrices live
// on the two windows ABC and AB; role unions must be contiguous, which the
// marginal construction enforces.
struct WindowData {
  Matrix abc, ab, a;
  Matrix bc_in_abc, b_in_ab, a_in_abc, a_in_ab;
  double dim_a = 1.0;
};

std::vector<std::string> concat(const std::vector<std::string>& x,
                                const std::vector<std::string>& y,
                                const std::vector<std::string>& z = {}) {
  std::vector<std::string> out = x;
  out.insert(out.end(), y.begin(), y.end());
  out.insert(out.end(), z.begin(), z.end());
  return out;
}

void require_disjoint(const TripartiteSplit& split) {
  std::set<std::string> seen;
  for (const auto& role : {split.a, split.b, split.c}) {
    for (const std::string& name : role) {
      if (!seen.insert(name).second) {
        throw ArgumentError("role lists must name disjoint blocks");
      }
    }
  }
}

// local positions of `role` sites within the (contiguous, sorted) window
std::vector<int> local_sites(const ChainPartition& p, const std::vector<std::string>& role,
                             const std::vector<int>& window) {
  std::vector<int> out;
  if (window.empty()) return out;
  for (int s : p.sites(role)) out.push_back(s - window.front());
  std::sort(out.begin(), out.end());
  return out;
}

Matrix lift(const Matrix& part, const SiteSpace& window_space, const std::vector<int>& where) {
  return embed_matrix(part, window_space.dims(), where);
}

WindowData gather_windows(const DensityMatrix& rho, const ChainPartition& p,
                          const TripartiteSplit& split) {
  require_disjoint(split);
  WindowData w;
  const auto abc_names = concat(split.a, split.b, split.c);
  const auto ab_names = concat(split.a, split.b);

  const std::vector<int> abc_sites = p.sites(abc_names);
  const std::vector<int> ab_sites = p.sites(ab_names);
  const SiteSpace abc_space = rho.space().subspace(abc_sites);
  const SiteSpace ab_space = rho.space().subspace(ab_sites);

  w.abc = marginal(rho, p, abc_names).matrix();
  w.ab = marginal(rho, p, ab_names).matrix();
  w.a = marginal(rho, p, split.a).matrix();
  const Matrix bc = marginal(rho, p, concat(split.b, split.c)).matrix();
  const Matrix b = marginal(rho, p, split.b).matrix();

  w.bc_in_abc = lift(bc, abc_space, local_sites(p, concat(split.b, split.c), abc_sites));
  w.b_in_ab = lift(b, ab_space, local_sites(p, split.b, ab_sites));
  w.a_in_abc = lift(w.a, abc_space, local_sites(p, split.a, abc_sites));
  w.a_in_ab = lift(w.a, ab_space, local_sites(p, split.a, ab_sites));
  w.dim_a = static_cast<double>(rho.space().subspace(p.sites(split.a)).total_dim());
  return w;
}

DivergenceValue difference(const DivergenceValue& t1, const DivergenceValue& t2) {
  if (!t1.finite || !t2.finite) {
    DivergenceValue out = DivergenceValue::infinite();
    out.kernel_violation = t1.kernel_violation || t2.kernel_violation;
    return out;
  }
  return finite_value(t1.value - t2.value);
}

}  // namespace

DivergenceValue bs_cond_entropy(const DensityMatrix& rho, const ChainPartition& p,
                                const std::vector<std::string>& a_blocks,
                                const std::vector<std::string>& b_blocks) {
  TripartiteSplit split{a_blocks, b_blocks, {}};
  require_disjoint(split);
  const auto ab_names = concat(a_blocks, b_blocks);
  const std::vector<int> ab_sites = p.sites(ab_names);
  const SiteSpace ab_space = rho.space().subspace(ab_sites);
  const Matrix ab = marginal(rho, p, ab_names).matrix();
  const Matrix b = marginal(rho, p, b_blocks).matrix();
  const Matrix one_a_b = lift(b, ab_space, local_sites(p, b_blocks, ab_sites));
  DivergenceValue d = bs_entropy(ab, one_a_b);
  d.value = -d.value;
  return d;
}

DivergenceValue bs_mutual_info(const DensityMatrix& rho, const ChainPartition& p,
                               const std::vector<std::string>& a_blocks,
                               const std::vector<std::string>& b_blocks) {
  TripartiteSplit split{a_blocks, b_blocks, {}};
  WindowData w = gather_windows(rho, p, split);
  return bs_entropy(w.ab, detail::prod(w.a_in_ab, w.b_in_ab));
}

DivergenceValue max_mutual_info(const DensityMatrix& rho, const ChainPartition& p,
                                const std::vector<std::string>& a_blocks,
                                const std::vector<std::string>& b_blocks) {
  TripartiteSplit split{a_blocks, b_blocks, {}};
  WindowData w = gather_windows(rho, p, split);
  return d_max(w.ab, detail::prod(w.a_in_ab, w.b_in_ab));
}

DivergenceValue cmi(const DensityMatrix& rho, const ChainPartition& p,
                    const TripartiteSplit& split) {
  require_disjoint(split);
  const Matrix abc = marginal(rho, p, concat(split.a, split.b, split.c)).matrix();
  const Matrix ab = marginal(rho, p, concat(split.a, split.b)).matrix();
  const Matrix bc = marginal(rho, p, concat(split.b, split.c)).matrix();
  const Matrix b = marginal(rho, p, split.b).matrix();
  return finite_value(von_neumann(ab) + von_neumann(bc) - von_neumann(b) - von_neumann(abc));
}

DivergenceValue bs_cmi_os(const DensityMatrix& rho, const ChainPartition& p,
                          const TripartiteSplit& split) {
  WindowData w = gather_windows(rho, p, split);
  return difference(bs_entropy(w.abc, w.bc_in_abc / w.dim_a),
                    bs_entropy(w.ab, w.b_in_ab / w.dim_a));
}

DivergenceValue bs_cmi_ts(const DensityMatrix& rho, const ChainPartition& p,
                          const TripartiteSplit& split) {
  WindowData w = gather_windows(rho, p, split);
  return difference(bs_entropy(w.abc, detail::prod(w.a_in_abc, w.bc_in_abc)),
                    bs_entropy(w.ab, detail::prod(w.a_in_ab, w.b_in_ab)));
}

DivergenceValue bs_cmi_rev(const DensityMatrix& rho, const ChainPartition& p,
                           const TripartiteSplit& split) {
  WindowData w = gather_windows(rho, p, split);
  return difference(bs_entropy(w.bc_in_abc / w.dim_a, w.abc),
                    bs_entropy(w.b_in_ab / w.dim_a, w.ab));
}

double purity_ratio(const DensityMatrix& rho, const ChainPartition& p,
                    const TripartiteSplit& split) {
  require_disjoint(split);
  const double p_abc = marginal(rho, p, concat(split.a, split.b, split.c)).matrix().squaredNorm();
  const double p_ab = marginal(rho, p, concat(split.a, split.b)).matrix().squaredNorm();
  const double p_bc = marginal(rho, p, concat(split.b, split.c)).matrix().squaredNorm();
  const double p_b = marginal(rho, p, split.b).matrix().squaredNorm();
  return (p_ab * p_bc) / (p_abc * p_b);
}

double renyi2_cmi(const DensityMatrix& rho, const ChainPartition& p,
                  const TripartiteSplit& split) {
  return -std::log(purity_ratio(rho, p, split));
}

double translation_defect(const DensityMatrix& rho, int first, int window) {
  if (window < 1) throw ArgumentError("window must be positive");
  if (first < 0 || first + window + 1 > rho.space().sites()) {
    throw ArgumentError("translated window does not fit the chain");
  }
  std::vector<int> left(window), right(window);
  for (int i = 0; i < window; ++i) {
    left[i] = first + i;
    right[i] = first + 1 + i;
  }
  const Matrix a = reduce(rho, left).matrix();
  const Matrix b = reduce(rho, right).matrix();
  return 0.5 * trace_norm(a - b);
}

}  // namespace chainfactor
