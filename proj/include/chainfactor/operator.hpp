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

#ifndef CHAINFACTOR_OPERATOR_HPP
#define CHAINFACTOR_OPERATOR_HPP

#include <complex>
#include <functional>
#include <vector>

#include <Eigen/Dense>
#include <unsupported/Eigen/KroneckerProduct>

#include "chainfactor/errors.hpp"
#include "chainfactor/site_space.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// ---------------------------------------------------------------------------
// Tensor-layout helpers. Scalar-generic and expression-friendly; everything
// else in the library funnels through these three.
// ---------------------------------------------------------------------------

template <class DerivedA, class DerivedB>
auto kron(const Eigen::MatrixBase<DerivedA>& a, const Eigen::MatrixBase<DerivedB>& b) {
  return Eigen::kroneckerProduct(a, b).eval();
}

Matrix kron_all(const std::vector<Matrix>& factors);

// Trace out every site not in `keep` (indices into dims, strictly increasing).
// Site order of the result follows `keep`. Tr(result) = Tr(m).
Matrix partial_trace_matrix(const Matrix& m, const std::vector<int>& dims,
                            const std::vector<int>& keep);

// Place op (whose tensor slots are the listed sites, strictly increasing)
// into the space described by dims, identity on all other sites.
Matrix embed_matrix(const Matrix& op, const std::vector<int>& dims,
                    const std::vector<int>& sites);

// ---------------------------------------------------------------------------
// Audited Hermitian spectral path. Every matrix function in the library is
// computed through herm_eig / herm_apply; no second eigendecomposition code
// path exists.
// ---------------------------------------------------------------------------

struct SpectralDecomposition {
  RealVector eigenvalues;  // ascending
  Matrix eigenvectors;     // orthonormal columns
  double cutoff = 0.0;     // dim * machine_eps * max|eigenvalue|
  int rank = 0;            // eigenvalues with |lambda| > cutoff
  bool numerically_real = false;
};

// Requires ||m - m^dag||_max within tol::herm (relative to scale). The input
// is re-symmetrized before factorization; if it is numerically real the real
// solver is used, which matters at dim 4096.
SpectralDecomposition herm_eig(const Matrix& m);

enum class KernelPolicy {
  // f is applied only to eigenvalues with |lambda| > cutoff, the rest map to
  // 0. This is the support-restricted reading used for log, inverse, roots.
  skip_kernel,
  // f is applied to every eigenvalue as-is (exp, bounded functions).
  value_on_kernel,
};

Matrix herm_apply(const SpectralDecomposition& s, const std::function<double(double)>& f,
                  KernelPolicy policy);
Matrix herm_apply(const Matrix& m, const std::function<double(double)>& f,
                  KernelPolicy policy);

// Moore-Penrose pieces on the support. Inputs must be PSD: an eigenvalue
// below -tol::psd is a contract violation; small negatives are clipped to 0.
Matrix pseudo_inverse(const Matrix& m);
Matrix pseudo_inv_sqrt(const Matrix& m);
Matrix pseudo_sqrt(const Matrix& m);

Matrix support_projector(const SpectralDecomposition& s);

// Schatten p-norm, p in [1, inf]. p = inf is the operator norm. Hermitian
// inputs go through eigenvalues, general ones through singular values.
double schatten_norm(const Matrix& m, double p);
double trace_norm(const Matrix& m);     // Schatten-1
double operator_norm(const Matrix& m);  // Schatten-inf

// True iff ker(sigma) is contained in ker(rho), decided as
// ||(1 - P_sigma) rho (1 - P_sigma)||_1 <= tolerance.
bool kernel_contained(const Matrix& sigma, const Matrix& rho,
                      double tolerance = tol::kernel);
bool kernel_contained(const SpectralDecomposition& sigma_spec, const Matrix& rho,
                      double tolerance = tol::kernel);

namespace detail {

bool is_numerically_real(const Matrix& m, double rel = 1e-13);

// Product with a real fast path; falls back to complex GEMM otherwise.
Matrix prod(const Matrix& a, const Matrix& b);
Matrix prod3(const Matrix& a, const Matrix& b, const Matrix& c);

}  // namespace detail

// ---------------------------------------------------------------------------
// Operator: a dense matrix tied to a SiteSpace.
// ---------------------------------------------------------------------------

class Operator {
 public:
  Operator(SiteSpace space, Matrix m);

  static Operator identity(const SiteSpace& space);
  static Operator maximally_mixed(const SiteSpace& space);  // 1 / total_dim

  const SiteSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }
  Matrix& matrix() { return m_; }

 private:
  SiteSpace space_;
  Matrix m_;
};

Operator partial_trace(const Operator& op, const std::vector<int>& keep_sites);
Operator embed(const Operator& op, const SiteSpace& target, const std::vector<int>& sites);

}  // namespace chainfactor

#endif  // CHAINFACTOR_OPERATOR_HPP
