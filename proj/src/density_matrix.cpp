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

#include "chainfactor/density_matrix.hpp"

#include <Eigen/Cholesky>

#include "chainfactor/errors.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

void check_shape(const SiteSpace& space, const Matrix& m) {
  if (m.rows() != space.total_dim() || m.cols() != space.total_dim()) {
    throw ArgumentError("density matrix shape does not match the site space");
  }
}

// Positivity gate. Small matrices get exact eigenvalues; large ones use a
// pivoted LDLT of m + psd_tol, which rejects anything indefinite beyond the
// tolerance at a third of the eigensolver cost.
bool psd_within_tolerance(const Matrix& m) {
  const long d = m.rows();
  if (d <= 512) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff() >= -tol::psd;
  }
  Matrix shifted = m + tol::psd * Matrix::Identity(d, d);
  if (detail::is_numerically_real(shifted)) {
    Eigen::LDLT<RealMatrix> ldlt(shifted.real());
    return ldlt.isPositive();
  }
  Eigen::LDLT<Matrix> ldlt(shifted);
  return ldlt.isPositive();
}

}  // namespace

DensityMatrix::DensityMatrix(SiteSpace space, Matrix m) : space_(std::move(space)), m_(std::move(m)) {
  check_shape(space_, m_);
  const double scale = std::max(1.0, m_.cwiseAbs().maxCoeff());
  if ((m_ - m_.adjoint()).cwiseAbs().maxCoeff() > tol::herm * scale) {
    throw ContractViolation("density matrix is not Hermitian within tolerance");
  }
  m_ = ((m_ + m_.adjoint()) / 2.0).eval();
  if (std::abs(m_.trace().real() - 1.0) > tol::trace || std::abs(m_.trace().imag()) > tol::trace) {
    throw ContractViolation("density matrix trace is not 1 within tolerance");
  }
  if (!psd_within_tolerance(m_)) {
    throw ContractViolation("density matrix is not positive semidefinite within tolerance");
  }
}

DensityMatrix::DensityMatrix(Trusted, SiteSpace space, Matrix m)
    : space_(std::move(space)), m_(std::move(m)) {
  check_shape(space_, m_);
}

DensityMatrix DensityMatrix::maximally_mixed(const SiteSpace& space) {
  const long d = space.total_dim();
  return DensityMatrix(Trusted{}, space, Matrix::Identity(d, d) / static_cast<double>(d));
}

DensityMatrix DensityMatrix::pure(const SiteSpace& space, const Vector& psi) {
  if (psi.size() != space.total_dim()) throw ArgumentError("state vector dimension mismatch");
  const double n2 = psi.squaredNorm();
  if (n2 <= 0.0) throw ArgumentError("state vector is zero");
  return DensityMatrix(Trusted{}, space, (psi * psi.adjoint()) / n2);
}

DensityMatrix DensityMatrix::from_spectrum(const SiteSpace& space, const Matrix& eigenvectors,
                                           const RealVector& eigenvalues) {
  if (eigenvectors.rows() != space.total_dim() || eigenvectors.cols() != eigenvalues.size()) {
    throw ArgumentError("spectrum shape mismatch");
  }
  RealVector clamped = eigenvalues.cwiseMax(0.0);
  const double total = clamped.sum();
  if (total <= 0.0) throw ArgumentError("spectrum has no positive weight");
  clamped /= total;
  Matrix m = detail::prod(eigenvectors * clamped.asDiagonal(), eigenvectors.adjoint());
  m = ((m + m.adjoint()) / 2.0).eval();
  return DensityMatrix(Trusted{}, space, std::move(m));
}

DensityMatrix reduce(const DensityMatrix& rho, const std::vector<int>& keep_sites) {
  Matrix out = partial_trace_matrix(rho.matrix(), rho.space().dims(), keep_sites);
  out = ((out + out.adjoint()) / 2.0).eval();
  // a partial trace of a state is a state; skip the positivity recheck
  return DensityMatrix(DensityMatrix::Trusted{}, rho.space().subspace(keep_sites), std::move(out));
}

}  // namespace chainfactor
