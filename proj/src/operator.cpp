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

#include "chainfactor/operator.hpp"

#include <cmath>
#include <limits>
#include <string>

namespace chainfactor {

namespace {

std::vector<int> complement_sites(int n, const std::vector<int>& sites) {
  std::vector<bool> taken(static_cast<size_t>(n), false);
  for (int s : sites) taken[static_cast<size_t>(s)] = true;
  std::vector<int> rest;
  for (int i = 0; i < n; ++i)
    if (!taken[static_cast<size_t>(i)]) rest.push_back(i);
  return rest;
}

void check_site_list(const std::vector<int>& sites, int n, const char* what) {
  int prev = -1;
  for (int s : sites) {
    if (s < 0 || s >= n) throw ArgumentError(std::string(what) + ": site index out of range");
    if (s <= prev) throw ArgumentError(std::string(what) + ": sites must be strictly increasing");
    prev = s;
  }
}

// offsets of all multi-indices over `sites` within the full flat index
std::vector<long> site_offsets(const std::vector<int>& dims, const std::vector<int>& sites) {
  const int n = static_cast<int>(dims.size());
  std::vector<long> stride(static_cast<size_t>(n), 1);
  for (int i = n - 2; i >= 0; --i)
    stride[static_cast<size_t>(i)] = stride[static_cast<size_t>(i + 1)] * dims[static_cast<size_t>(i + 1)];
  long count = 1;
  for (int s : sites) count *= dims[static_cast<size_t>(s)];
  std::vector<long> off(static_cast<size_t>(count), 0);
  long repeat = 1;  // build offsets digit by digit, last listed site fastest
  for (int k = static_cast<int>(sites.size()) - 1; k >= 0; --k) {
    const int s = sites[static_cast<size_t>(k)];
    const int d = dims[static_cast<size_t>(s)];
    const long block = repeat * d;
    for (long i = 0; i < count; ++i) {
      const long digit = (i / repeat) % d;
      off[static_cast<size_t>(i)] += digit * stride[static_cast<size_t>(s)];
    }
    repeat = block;
  }
  return off;
}

long dims_product(const std::vector<int>& dims) {
  long p = 1;
  for (int d : dims) p *= d;
  return p;
}

}  // namespace

Matrix kron_all(const std::vector<Matrix>& factors) {
  Matrix acc = Matrix::Identity(1, 1);
  for (const Matrix& f : factors) acc = kron(acc, f);
  return acc;
}

Matrix partial_trace_matrix(const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep) {
  const long total = dims_product(dims);
  if (m.rows() != total || m.cols() != total)
    throw ArgumentError("partial trace: matrix side does not match site dimensions");
  check_site_list(keep, static_cast<int>(dims.size()), "partial trace");
  const std::vector<int> traced = complement_sites(static_cast<int>(dims.size()), keep);
  const std::vector<long> off_k = site_offsets(dims, keep);
  const std::vector<long> off_t = site_offsets(dims, traced);
  const long dk = static_cast<long>(off_k.size());

  Matrix out = Matrix::Zero(dk, dk);
  for (long c = 0; c < dk; ++c)
    for (long r = 0; r < dk; ++r) {
      Complex acc(0, 0);
      for (long t : off_t) acc += m(off_k[static_cast<size_t>(r)] + t, off_k[static_cast<size_t>(c)] + t);
      out(r, c) = acc;
    }
  return out;
}

Matrix embed_matrix(const Matrix& op, const std::vector<int>& dims,
                    const std::vector<int>& sites) {
  check_site_list(sites, static_cast<int>(dims.size()), "embed");
  long dop = 1;
  for (int s : sites) dop *= dims[static_cast<size_t>(s)];
  if (op.rows() != dop || op.cols() != dop)
    throw ArgumentError("embed: operator side does not match the listed sites");
  const std::vector<int> rest = complement_sites(static_cast<int>(dims.size()), sites);
  const std::vector<long> off_s = site_offsets(dims, sites);
  const std::vector<long> off_r = site_offsets(dims, rest);
  const long total = dims_product(dims);

  Matrix out = Matrix::Zero(total, total);
  for (long j = 0; j < dop; ++j)
    for (long i = 0; i < dop; ++i) {
      const Complex v = op(i, j);
      if (v == Complex(0, 0)) continue;
      for (long r : off_r) out(off_s[static_cast<size_t>(i)] + r, off_s[static_cast<size_t>(j)] + r) = v;
    }
  return out;
}

namespace detail {

bool is_numerically_real(const Matrix& m, double rel) {
  if (m.size() == 0) return true;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  return m.imag().cwiseAbs().maxCoeff() <= rel * scale;
}

Matrix prod(const Matrix& a, const Matrix& b) {
  if (is_numerically_real(a) && is_numerically_real(b)) {
    const RealMatrix r = a.real() * b.real();
    return r.cast<Complex>();
  }
  return a * b;
}

Matrix prod3(const Matrix& a, const Matrix& b, const Matrix& c) {
  return prod(prod(a, b), c);
}

}  // namespace detail

SpectralDecomposition herm_eig(const Matrix& m) {
  SpectralDecomposition s;
  if (m.rows() != m.cols()) throw ArgumentError("herm_eig: matrix must be square");
  if (m.size() == 0) return s;
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol::herm * scale)
    throw ContractViolation("herm_eig: input is not Hermitian within tolerance");

  const Matrix h = (m + m.adjoint()) / 2.0;
  if (detail::is_numerically_real(h)) {
    Eigen::SelfAdjointEigenSolver<RealMatrix> es(h.real());
    if (es.info() != Eigen::Success) throw ContractViolation("herm_eig: real solver failed");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors().cast<Complex>();
    s.numerically_real = true;
  } else {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h);
    if (es.info() != Eigen::Success) throw ContractViolation("herm_eig: solver failed");
    s.eigenvalues = es.eigenvalues();
    s.eigenvectors = es.eigenvectors();
  }
  const double top = s.eigenvalues.size() ? s.eigenvalues.cwiseAbs().maxCoeff() : 0.0;
  s.cutoff = static_cast<double>(m.rows()) * std::numeric_limits<double>::epsilon() * top;
  s.rank = 0;
  for (long i = 0; i < s.eigenvalues.size(); ++i)
    if (std::abs(s.eigenvalues(i)) > s.cutoff) ++s.rank;
  return s;
}

Matrix herm_apply(const SpectralDecomposition& s, const std::function<double(double)>& f,
                  KernelPolicy policy) {
  const long n = s.eigenvalues.size();
  RealVector mapped(n);
  for (long i = 0; i < n; ++i) {
    const double lam = s.eigenvalues(i);
    if (policy == KernelPolicy::skip_kernel && std::abs(lam) <= s.cutoff)
      mapped(i) = 0.0;
    else
      mapped(i) = f(lam);
  }
  if (s.numerically_real) {
    const RealMatrix u = s.eigenvectors.real();
    RealMatrix w = u * mapped.asDiagonal() * u.transpose();
    w = ((w + w.transpose()) / 2.0).eval();
    return w.cast<Complex>();
  }
  Matrix w = s.eigenvectors * mapped.asDiagonal() * s.eigenvectors.adjoint();
  return ((w + w.adjoint()) / 2.0).eval();
}

Matrix herm_apply(const Matrix& m, const std::function<double(double)>& f, KernelPolicy policy) {
  return herm_apply(herm_eig(m), f, policy);
}

namespace {

SpectralDecomposition psd_eig(const Matrix& m, const char* what) {
  SpectralDecomposition s = herm_eig(m);
  if (s.eigenvalues.size() && s.eigenvalues(0) < -tol::psd)
    throw ContractViolation(std::string(what) + ": eigenvalue " + std::to_string(s.eigenvalues(0)) +
                            " below PSD tolerance");
  return s;
}

}  // namespace

Matrix pseudo_inverse(const Matrix& m) {
  return herm_apply(psd_eig(m, "pseudo_inverse"), [](double x) { return 1.0 / x; },
                    KernelPolicy::skip_kernel);
}

Matrix pseudo_inv_sqrt(const Matrix& m) {
  return herm_apply(psd_eig(m, "pseudo_inv_sqrt"),
                    [](double x) { return 1.0 / std::sqrt(std::abs(x)); },
                    KernelPolicy::skip_kernel);
}

Matrix pseudo_sqrt(const Matrix& m) {
  return herm_apply(psd_eig(m, "pseudo_sqrt"), [](double x) { return std::sqrt(std::abs(x)); },
                    KernelPolicy::skip_kernel);
}

Matrix support_projector(const SpectralDecomposition& s) {
  const long n = s.eigenvalues.size();
  Matrix p = Matrix::Zero(n, n);
  for (long i = 0; i < n; ++i)
    if (std::abs(s.eigenvalues(i)) > s.cutoff)
      p += s.eigenvectors.col(i) * s.eigenvectors.col(i).adjoint();
  return ((p + p.adjoint()) / 2.0).eval();
}

namespace {

RealVector singular_values(const Matrix& m) {
  const double scale = std::max(1.0, m.cwiseAbs().maxCoeff());
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() <= 1e-12 * scale) {
    // Hermitian: singular values are |eigenvalues|; much cheaper at large dim
    return herm_eig(m).eigenvalues.cwiseAbs();
  }
  if (detail::is_numerically_real(m)) {
    Eigen::BDCSVD<RealMatrix> svd(m.real());
    return svd.singularValues();
  }
  Eigen::BDCSVD<Matrix> svd(m);
  return svd.singularValues();
}

}  // namespace

double schatten_norm(const Matrix& m, double p) {
  if (!(p >= 1.0)) throw ArgumentError("schatten norm needs p >= 1");
  if (m.size() == 0) return 0.0;
  if (p == 2.0) return m.norm();  // Frobenius, exact shortcut
  const RealVector sv = singular_values(m);
  if (std::isinf(p)) return sv.size() ? sv.maxCoeff() : 0.0;
  if (p == 1.0) return sv.sum();
  double acc = 0.0;
  for (long i = 0; i < sv.size(); ++i) acc += std::pow(sv(i), p);
  return std::pow(acc, 1.0 / p);
}

double trace_norm(const Matrix& m) { return schatten_norm(m, 1.0); }

double operator_norm(const Matrix& m) {
  return schatten_norm(m, std::numeric_limits<double>::infinity());
}

bool kernel_contained(const Matrix& sigma, const Matrix& rho, double tolerance) {
  if (sigma.rows() != rho.rows() || sigma.cols() != rho.cols())
    throw ArgumentError("kernel_contained: shape mismatch");
  return kernel_contained(herm_eig(sigma), rho, tolerance);
}

bool kernel_contained(const SpectralDecomposition& s, const Matrix& rho, double tolerance) {
  if (s.eigenvectors.rows() != rho.rows())
    throw ArgumentError("kernel_contained: shape mismatch");
  const long n = s.eigenvalues.size();
  std::vector<long> kernel_cols;
  for (long i = 0; i < n; ++i)
    if (std::abs(s.eigenvalues(i)) <= s.cutoff) kernel_cols.push_back(i);
  if (kernel_cols.empty()) return true;
  // (1-P) rho (1-P) compressed onto the kernel basis has the same trace norm
  Matrix u(n, static_cast<long>(kernel_cols.size()));
  for (size_t k = 0; k < kernel_cols.size(); ++k) u.col(static_cast<long>(k)) = s.eigenvectors.col(kernel_cols[k]);
  const Matrix b = u.adjoint() * rho * u;
  return trace_norm(b) <= tolerance;
}

Operator::Operator(SiteSpace space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
  if (m_.rows() != space_.total_dim() || m_.cols() != space_.total_dim())
    throw ArgumentError("operator matrix side does not match its site space");
}

Operator Operator::identity(const SiteSpace& space) {
  return Operator(space, Matrix::Identity(space.total_dim(), space.total_dim()));
}

Operator Operator::maximally_mixed(const SiteSpace& space) {
  const long d = space.total_dim();
  return Operator(space, Matrix::Identity(d, d) / static_cast<double>(d));
}

Operator partial_trace(const Operator& op, const std::vector<int>& keep_sites) {
  return Operator(op.space().subspace(keep_sites),
                  partial_trace_matrix(op.matrix(), op.space().dims(), keep_sites));
}

Operator embed(const Operator& op, const SiteSpace& target, const std::vector<int>& sites) {
  return Operator(target, embed_matrix(op.matrix(), target.dims(), sites));
}

}  // namespace chainfactor
