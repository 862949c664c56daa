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

#include "chainfactor/recovery.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "chainfactor/errors.hpp"
#include "chainfactor/gibbs.hpp"

namespace chainfactor {

namespace {

double safe_inv(double v) { return v > 0.0 ? 1.0 / v : 0.0; }
double safe_sqrt(double v) { return v > 0.0 ? std::sqrt(v) : 0.0; }
double safe_inv_sqrt(double v) { return v > 0.0 ? 1.0 / std::sqrt(v) : 0.0; }

// ||m^-1|| on the support: one over the smallest retained eigenvalue
double op_norm_pinv(const SpectralDecomposition& s) {
  for (long i = 0; i < s.eigenvalues.size(); ++i)
    if (s.eigenvalues(i) > s.cutoff) return 1.0 / s.eigenvalues(i);
  return 0.0;
}

Matrix spec_fn(const SpectralDecomposition& s, double (*f)(double)) {
  return herm_apply(s, f, KernelPolicy::skip_kernel);
}

// Everything both gap bounds share; eigendecompositions are done once.
struct GapPieces {
  Matrix ex, ey;
  SpectralDecomposition sx, sy, sex, sey;
  bool rank_deficient = false;
};

GapPieces make_pieces(const Matrix& x, const Matrix& y,
                      const ConditionalExpectation& e) {
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw ArgumentError("gap bound needs operators of equal dimension");
  GapPieces p;
  p.ex = e.apply(x);
  p.ey = e.apply(y);
  p.sx = herm_eig(x);
  p.sy = herm_eig(y);
  p.sex = herm_eig(p.ex);
  p.sey = herm_eig(p.ey);
  const long n = x.rows();
  p.rank_deficient = p.sx.rank < n || p.sy.rank < n || p.sex.rank < n ||
                     p.sey.rank < n;
  return p;
}

double bound_from_pieces(const Matrix& x, const Matrix& y, const GapPieces& p,
                         int variant) {
  if (variant != 1 && variant != 2)
    throw ArgumentError("gap bound variant must be 1 or 2");
  const long n = x.rows();
  const Matrix x_inv_sqrt = spec_fn(p.sx, safe_inv_sqrt);
  const double head = operator_norm(detail::prod3(x_inv_sqrt, y, x_inv_sqrt)) *
                      trace_norm(x) *
                      safe_sqrt(p.sex.eigenvalues(p.sex.eigenvalues.size() - 1)) *
                      std::sqrt(op_norm_pinv(p.sex));
  const Matrix one = Matrix::Identity(n, n);
  if (variant == 1) {
    const double mid =
        operator_norm(detail::prod(spec_fn(p.sey, safe_inv), p.ex));
    const Matrix twist =
        detail::prod(detail::prod(x, spec_fn(p.sy, safe_inv)),
                     detail::prod(p.ey, spec_fn(p.sex, safe_inv)));
    return head * mid * operator_norm(twist - one);
  }
  const double mid = operator_norm(detail::prod(spec_fn(p.sy, safe_inv), x));
  const Matrix twist =
      detail::prod(detail::prod(y, spec_fn(p.sx, safe_inv)),
                   detail::prod(p.ex, spec_fn(p.sey, safe_inv)));
  return head * mid * operator_norm(twist - one);
}

// (I_left (x) k) x (I_left (x) k)^dag without materializing the lifted
// operator; the slice products keep the top chain step inside the memory
// budget and stay in real arithmetic when the chain is real.
Matrix lifted_sandwich(const Matrix& k, const Matrix& x, long left) {
  const long p = k.rows();
  if (detail::is_numerically_real(k) && detail::is_numerically_real(x)) {
    const Eigen::MatrixXd kr = k.real();
    const Eigen::MatrixXd xr = x.real();
    Eigen::MatrixXd t(xr.rows(), xr.cols());
    for (long r = 0; r < left; ++r)
      t.middleRows(r * p, p).noalias() = kr * xr.middleRows(r * p, p);
    Eigen::MatrixXd out(xr.rows(), xr.cols());
    for (long c = 0; c < left; ++c)
      out.middleCols(c * p, p).noalias() = t.middleCols(c * p, p) * kr.transpose();
    return out.cast<Complex>();
  }
  Matrix t(x.rows(), x.cols());
  for (long r = 0; r < left; ++r)
    t.middleRows(r * p, p).noalias() = k * x.middleRows(r * p, p);
  Matrix out(x.rows(), x.cols());
  for (long c = 0; c < left; ++c)
    out.middleCols(c * p, p).noalias() = t.middleCols(c * p, p) * k.adjoint();
  return out;
}

void require_right_chain(const std::vector<RecoveryKernel>& kernels,
                         long start_dim, int first_kernel) {
  long total = start_dim;
  for (size_t i = first_kernel; i < kernels.size(); ++i) {
    const RecoveryKernel& k = kernels[i];
    if (k.side != AttachSide::right)
      throw ArgumentError("sequential chains extend to the right");
    const long expect = i == static_cast<size_t>(first_kernel)
                            ? start_dim
                            : kernels[i - 1].attached_dim;
    if (k.base_dim != expect)
      throw ArgumentError("kernel " + std::to_string(i) +
                          " does not extend the block before it");
    total *= k.attached_dim;
    if (total > tol::max_total_dim)
      throw ResourceError("chain dimension " + std::to_string(total) +
                          " exceeds the dense limit " +
                          std::to_string(tol::max_total_dim));
  }
}

// product of the local dimensions a role occupies
long role_dim(const ChainPartition& p, const std::vector<std::string>& names) {
  long d = 1;
  for (int s : p.sites(names)) d *= p.space().dim(s);
  return d;
}

}  // namespace

Matrix bs_recovery_asym(const Matrix& rho, const Matrix& sigma,
                        const ConditionalExpectation& e) {
  if (sigma.rows() != rho.rows() || sigma.cols() != rho.cols())
    throw ArgumentError("recovery composition needs states of equal dimension");
  const Matrix erho = e.apply(rho);
  const Matrix esigma = e.apply(sigma);
  const SpectralDecomposition srho = herm_eig(rho);
  const SpectralDecomposition serho = herm_eig(erho);
  if (!kernel_contained(srho, sigma) || !kernel_contained(serho, esigma))
    throw ContractViolation(
        "recovery composition needs sigma supported inside rho");
  return detail::prod3(rho, spec_fn(serho, safe_inv), esigma);
}

double dpi_upper_bound(const Matrix& x, const Matrix& y,
                       const ConditionalExpectation& e, int variant) {
  return bound_from_pieces(x, y, make_pieces(x, y, e), variant);
}

double dpi_upper_bound_channel(const Matrix& x, const Matrix& y,
                               const QuantumChannel& t) {
  if (y.rows() != x.rows() || y.cols() != x.cols())
    throw ArgumentError("gap bound needs operators of equal dimension");
  // images through the dilation, so the bound follows the same isometry
  // that defines the channel's environment
  const Matrix v = t.stinespring_isometry();
  const int env = static_cast<int>(t.kraus().size());
  const Matrix big_x = v * x * v.adjoint();
  const Matrix big_y = v * y * v.adjoint();
  const std::vector<int> dims = {t.output_dim(), env};
  const Matrix tx = partial_trace_matrix(big_x, dims, {0});
  const Matrix ty = partial_trace_matrix(big_y, dims, {0});

  const SpectralDecomposition sx = herm_eig(x);
  const SpectralDecomposition stx = herm_eig(tx);
  const SpectralDecomposition sty = herm_eig(ty);
  const Matrix x_inv_sqrt = spec_fn(sx, safe_inv_sqrt);
  const double head = operator_norm(detail::prod3(x_inv_sqrt, y, x_inv_sqrt)) *
                      trace_norm(x) *
                      safe_sqrt(stx.eigenvalues(stx.eigenvalues.size() - 1)) *
                      std::sqrt(op_norm_pinv(stx)) *
                      operator_norm(detail::prod(spec_fn(sty, safe_inv), tx));
  const Matrix pulled =
      t.apply_adjoint(detail::prod(ty, spec_fn(stx, safe_inv)));
  const Matrix twist =
      detail::prod(detail::prod(x, pseudo_inverse(y)), pulled);
  const long n = x.rows();
  return head * operator_norm(twist - Matrix::Identity(n, n));
}

double strengthened_lower_bound(const Matrix& rho, const Matrix& sigma,
                                const ConditionalExpectation& e) {
  const Matrix back = bs_recovery_asym(rho, sigma, e);
  const double residual = schatten_norm(back - sigma, 2.0);
  const Matrix rho_inv_sqrt = pseudo_inv_sqrt(rho);
  const double twist =
      operator_norm(detail::prod3(rho_inv_sqrt, sigma, rho_inv_sqrt));
  const double e_inv = op_norm_pinv(herm_eig(e.apply(rho)));
  if (twist <= 0.0 || e_inv <= 0.0) return 0.0;
  return std::pow(M_PI / 8.0, 4.0) * std::pow(twist, -4.0) *
         std::pow(e_inv, -2.0) * std::pow(residual, 4.0);
}

DpiAudit audit_dpi(const Matrix& rho, const Matrix& sigma,
                   const ConditionalExpectation& e) {
  DpiAudit a;
  const GapPieces p = make_pieces(rho, sigma, e);
  a.rank_deficient = p.rank_deficient;

  const DivergenceValue fine = bs_entropy(rho, sigma);
  const DivergenceValue coarse = bs_entropy(p.ex, p.ey);
  a.gap_finite = fine.finite && coarse.finite;
  a.gap = a.gap_finite ? fine.value - coarse.value
                       : std::numeric_limits<double>::infinity();
  a.upper_bound_1 = bound_from_pieces(rho, sigma, p, 1);
  a.upper_bound_2 = bound_from_pieces(rho, sigma, p, 2);

  if (kernel_contained(p.sx, sigma) && kernel_contained(p.sex, p.ey)) {
    const Matrix back =
        detail::prod3(rho, spec_fn(p.sex, safe_inv), p.ey);
    a.residual_hs = schatten_norm(back - sigma, 2.0);
    a.residual_op = operator_norm(back - sigma);
    const Matrix rho_inv_sqrt = spec_fn(p.sx, safe_inv_sqrt);
    const double twist =
        operator_norm(detail::prod3(rho_inv_sqrt, sigma, rho_inv_sqrt));
    const double e_inv = op_norm_pinv(p.sex);
    if (twist > 0.0 && e_inv > 0.0)
      a.lower_bound = std::pow(M_PI / 8.0, 4.0) * std::pow(twist, -4.0) *
                      std::pow(e_inv, -2.0) * std::pow(a.residual_hs, 4.0);
  }
  return a;
}

Matrix RecoveryKernel::apply(const Matrix& x) const {
  if (x.rows() != base_dim || x.cols() != base_dim)
    throw ArgumentError("kernel input lives on the base block");
  const Matrix one = Matrix::Identity(attached_dim, attached_dim);
  const Matrix lifted =
      side == AttachSide::right ? kron(x, one) : kron(one, x);
  return detail::prod3(kraus, lifted, Matrix(kraus.adjoint()));
}

RecoveryKernel symmetric_recovery_kernel(const Matrix& rho_base,
                                         const Matrix& rho_pair,
                                         AttachSide side, double eps_reg,
                                         double consistency_tol) {
  if (rho_base.rows() != rho_base.cols() || rho_pair.rows() != rho_pair.cols())
    throw ArgumentError("kernel marginals must be square");
  const long bd = rho_base.rows();
  const long pd = rho_pair.rows();
  if (bd < 1 || pd < bd || pd % bd != 0)
    throw ArgumentError("pair dimension is not a multiple of the base");
  const long ad = pd / bd;

  const int b = static_cast<int>(bd), at = static_cast<int>(ad);
  const std::vector<int> dims =
      side == AttachSide::right ? std::vector<int>{b, at}
                                : std::vector<int>{at, b};
  const int base_slot = side == AttachSide::right ? 0 : 1;
  const Matrix traced = partial_trace_matrix(rho_pair, dims, {base_slot});
  const double mismatch = trace_norm(traced - rho_base);
  if (mismatch > consistency_tol)
    throw ContractViolation("pair marginal does not reduce to the base");

  Matrix base = rho_base;
  Matrix pair = rho_pair;
  if (eps_reg > 0.0) {
    // mix toward maximally mixed at fixed trace; the reduction property of
    // the pair onto the base survives the mixing
    base = (1.0 - eps_reg) * base +
           (eps_reg * base.trace() / static_cast<double>(bd)) *
               Matrix::Identity(bd, bd);
    pair = (1.0 - eps_reg) * pair +
           (eps_reg * pair.trace() / static_cast<double>(pd)) *
               Matrix::Identity(pd, pd);
  }

  const SpectralDecomposition sb = herm_eig(base);
  if (sb.eigenvalues.size() > 0 && sb.eigenvalues.minCoeff() < -tol::psd)
    throw ArgumentError("base marginal is not positive semidefinite");
  const Matrix base_sqrt = spec_fn(sb, safe_sqrt);
  const Matrix base_inv_sqrt = spec_fn(sb, safe_inv_sqrt);
  const Matrix one = Matrix::Identity(ad, ad);
  auto lift = [&](const Matrix& m) {
    return side == AttachSide::right ? kron(m, one) : kron(one, m);
  };

  const Matrix lifted_inv_sqrt = lift(base_inv_sqrt);
  Matrix g = detail::prod3(lifted_inv_sqrt, pair, lifted_inv_sqrt);
  g = 0.5 * (g + Matrix(g.adjoint()));
  const SpectralDecomposition sg = herm_eig(g);
  if (sg.eigenvalues.size() > 0 && sg.eigenvalues.minCoeff() < -tol::psd)
    throw ArgumentError("pair marginal is not positive semidefinite");

  RecoveryKernel k;
  k.kraus = detail::prod3(lift(base_sqrt), spec_fn(sg, safe_sqrt),
                          lifted_inv_sqrt);
  k.base = std::move(base);
  k.pair = std::move(pair);
  k.base_dim = b;
  k.attached_dim = at;
  k.side = side;
  k.base_mismatch = mismatch;
  return k;
}

std::vector<RecoveryKernel> kernel_chain(const DensityMatrix& rho,
                                         const ChainPartition& blocks,
                                         double eps_reg) {
  const std::vector<Block>& bl = blocks.blocks();
  std::vector<RecoveryKernel> out;
  for (size_t i = 0; i + 1 < bl.size(); ++i) {
    const DensityMatrix pair =
        marginal(rho, blocks, {bl[i].name, bl[i + 1].name});
    const long d0 = role_dim(blocks, {bl[i].name});
    const long d1 = role_dim(blocks, {bl[i + 1].name});
    const Matrix base = partial_trace_matrix(
        pair.matrix(), {static_cast<int>(d0), static_cast<int>(d1)}, {0});
    out.push_back(symmetric_recovery_kernel(base, pair.matrix(),
                                            AttachSide::right, eps_reg));
  }
  return out;
}

std::vector<RecoveryKernel> kernel_chain_from_pairs(
    const std::vector<Matrix>& pairs, const std::vector<int>& block_dims,
    double eps_reg) {
  if (block_dims.size() < 2 || pairs.size() + 1 != block_dims.size())
    throw ArgumentError("need one pair marginal per adjacent block pair");
  for (size_t i = 0; i < pairs.size(); ++i) {
    const long want =
        static_cast<long>(block_dims[i]) * block_dims[i + 1];
    if (pairs[i].rows() != want || pairs[i].cols() != want)
      throw ArgumentError("pair marginal " + std::to_string(i) +
                          " does not match its block dimensions");
  }
  // single-block marginals are taken as reductions of the pair to their
  // left, so estimated pairs that disagree on the shared block still feed
  // each kernel the block state the previous step actually produced; the
  // residual disagreement is kept on the kernel as base_mismatch
  std::vector<RecoveryKernel> out;
  Matrix base =
      partial_trace_matrix(pairs[0], {block_dims[0], block_dims[1]}, {0});
  for (size_t i = 0; i < pairs.size(); ++i) {
    out.push_back(symmetric_recovery_kernel(
        base, pairs[i], AttachSide::right, eps_reg,
        std::numeric_limits<double>::infinity()));
    const SpectralDecomposition sb = herm_eig(out.back().base);
    if (sb.rank < out.back().base_dim)
      throw ContractViolation(
          "estimated marginal for block " + std::to_string(i) +
          " is singular beyond the regularization (rank " +
          std::to_string(sb.rank) + " of " +
          std::to_string(out.back().base_dim) + ")");
    if (i + 1 < pairs.size())
      base = partial_trace_matrix(
          pairs[i], {block_dims[i], block_dims[i + 1]}, {1});
  }
  return out;
}

Matrix sequential_apply(const std::vector<RecoveryKernel>& kernels,
                        const Matrix& x, int first_kernel) {
  if (x.rows() != x.cols())
    throw ArgumentError("chain input must be square");
  if (first_kernel < 0 ||
      first_kernel > static_cast<int>(kernels.size()))
    throw ArgumentError("first kernel index out of range");
  require_right_chain(kernels, x.rows(), first_kernel);

  Matrix cur = x;
  for (size_t i = first_kernel; i < kernels.size(); ++i) {
    const RecoveryKernel& k = kernels[i];
    const long left = cur.rows() / k.base_dim;
    const Matrix grown =
        kron(cur, Matrix(Matrix::Identity(k.attached_dim, k.attached_dim)));
    cur = lifted_sandwich(k.kraus, grown, left);
  }
  return cur;
}

DensityMatrix sequential_reconstruct(const std::vector<RecoveryKernel>& kernels,
                                     const DensityMatrix& rho_first) {
  const Matrix m = sequential_apply(kernels, rho_first.matrix(), 0);
  std::vector<int> dims = rho_first.space().dims();
  for (const RecoveryKernel& k : kernels) dims.push_back(k.attached_dim);
  return DensityMatrix(SiteSpace(dims), m);
}

LipschitzRecord lipschitz_check(const std::vector<RecoveryKernel>& kernels,
                                const Matrix& x, int j) {
  if (j < 0 || j >= static_cast<int>(kernels.size()))
    throw ArgumentError("kernel index out of range");
  if (x.rows() != x.cols())
    throw ArgumentError("chain input must be square");
  const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
  if ((x - Matrix(x.adjoint())).cwiseAbs().maxCoeff() > tol::herm * scale)
    throw ArgumentError("Lipschitz input must be positive semidefinite");
  const SpectralDecomposition sx = herm_eig(x);
  if (sx.eigenvalues.minCoeff() < -tol::psd)
    throw ArgumentError("Lipschitz input must be positive semidefinite");

  LipschitzRecord r;
  r.lhs = trace_norm(sequential_apply(kernels, x, j));
  const SpectralDecomposition sb = herm_eig(kernels[j].base);
  const Matrix base_inv_sqrt = spec_fn(sb, safe_inv_sqrt);
  const Matrix pulled = detail::prod3(base_inv_sqrt, x, base_inv_sqrt);
  r.mid = trace_norm(pulled);
  r.mid_op = operator_norm(pulled);
  r.rhs = op_norm_pinv(sb) * trace_norm(x);
  return r;
}

RecoveryErrorBound single_recovery_error_bound(const DensityMatrix& rho,
                                               const ChainPartition& p,
                                               const TripartiteSplit& split) {
  // window laid out A|B|C along the chain: the map rebuilds the left block
  // from the middle one
  const std::vector<int> sa = p.sites(split.a);
  const std::vector<int> sb = p.sites(split.b);
  const std::vector<int> sc = p.sites(split.c);
  if (sb.empty()) throw ArgumentError("middle role must be nonempty");
  if (!sa.empty() && sa.back() >= sb.front())
    throw ArgumentError("left role must precede the middle role");
  if (!sc.empty() && sc.front() <= sb.back())
    throw ArgumentError("right role must follow the middle role");

  RecoveryErrorBound out;
  const DivergenceValue rev = bs_cmi_rev(rho, p, split);
  out.i_rev = rev.value;
  out.i_rev_finite = rev.finite;

  std::vector<std::string> names = split.a;
  names.insert(names.end(), split.b.begin(), split.b.end());
  names.insert(names.end(), split.c.begin(), split.c.end());
  const Matrix abc = marginal(rho, p, names).matrix();
  const int da = static_cast<int>(role_dim(p, split.a));
  const int db = static_cast<int>(role_dim(p, split.b));
  const int dc = static_cast<int>(role_dim(p, split.c));
  const Matrix bc = partial_trace_matrix(abc, {da, db, dc}, {1, 2});
  const Matrix ab = partial_trace_matrix(abc, {da, db, dc}, {0, 1});
  const Matrix mid = partial_trace_matrix(ab, {da, db}, {1});

  const Matrix bc_inv_sqrt = pseudo_inv_sqrt(bc);
  const Matrix lifted = kron(Matrix(Matrix::Identity(da, da)), bc_inv_sqrt);
  out.gamma_norm = operator_norm(detail::prod3(lifted, abc, lifted));

  const RecoveryKernel k =
      symmetric_recovery_kernel(mid, ab, AttachSide::left);
  const Matrix one_c = Matrix::Identity(dc, dc);
  const Matrix grown = kron(k.kraus, one_c);
  const Matrix in = kron(Matrix(Matrix::Identity(da, da)), bc);
  const Matrix rebuilt = detail::prod3(grown, in, Matrix(grown.adjoint()));
  out.residual_1norm = trace_norm(rebuilt - abc);
  if (out.gamma_norm > 0.0)
    out.lower_bound = std::pow(M_PI / 8.0, 4.0) *
                      std::pow(out.gamma_norm, -2.0) *
                      std::pow(out.residual_1norm, 4.0);
  return out;
}

ReconstructionBound reconstruction_error_bound(const DensityMatrix& rho,
                                               const ChainPartition& blocks) {
  ReconstructionBound out;
  const std::vector<Block>& bl = blocks.blocks();
  const int n = static_cast<int>(bl.size());
  if (n < 2) return out;  // one block reconstructs as itself

  double worst = 0.0;
  for (int i = 1; i < n; ++i) {
    std::vector<std::string> window;
    for (int j = 0; j <= i; ++j) window.push_back(bl[j].name);
    const DensityMatrix w = marginal(rho, blocks, window);
    const ChainPartition pw = restrict_partition(blocks, window);

    const double inv =
        op_norm_pinv(herm_eig(marginal(rho, blocks, {bl[i].name}).matrix()));
    const std::vector<std::string> prefix(window.begin(), window.end() - 1);
    const DivergenceValue info =
        max_mutual_info(w, pw, prefix, {bl[i].name});
    TripartiteSplit split;
    split.a = {bl[i].name};
    split.b = {bl[i - 1].name};
    split.c = std::vector<std::string>(window.begin(), window.end() - 2);
    const DivergenceValue rev = bs_cmi_rev(w, pw, split);

    out.inverse_norms.push_back(inv);
    out.max_info.push_back(info.value);
    out.reversed_cmi.push_back(rev.value);
    if (!info.finite || !rev.finite) out.finite = false;
    const double term = inv * std::exp(0.5 * info.value) *
                        std::pow(std::max(0.0, rev.value), 0.25);
    worst = std::max(worst, term);
  }
  out.bound = out.finite
                  ? 16.0 * static_cast<double>(n - 1) / M_PI * worst
                  : std::numeric_limits<double>::infinity();
  return out;
}

}  // namespace chainfactor
