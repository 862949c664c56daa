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

#ifndef CHAINFACTOR_DENSITY_MATRIX_HPP
#define CHAINFACTOR_DENSITY_MATRIX_HPP

#include "chainfactor/operator.hpp"
#include "chainfactor/site_space.hpp"

namespace chainfactor {

// A state: Hermitian within tol::herm, PSD within tol::psd, unit trace within
// tol::trace. Construction validates; states produced internally from clamped
// spectra use the trusted path to avoid a redundant factorization at dim 4096.
class DensityMatrix {
 public:
  DensityMatrix(SiteSpace space, Matrix m);

  static DensityMatrix maximally_mixed(const SiteSpace& space);
  static DensityMatrix pure(const SiteSpace& space, const Vector& psi);
  // eigenvalues are clamped to >= 0 and renormalized; no PSD re-check
  static DensityMatrix from_spectrum(const SiteSpace& space, const Matrix& eigenvectors,
                                     const RealVector& eigenvalues);

  const SiteSpace& space() const { return space_; }
  const Matrix& matrix() const { return m_; }

  double purity() const { return m_.squaredNorm(); }  // Tr rho^2 for Hermitian rho

 private:
  struct Trusted {};
  DensityMatrix(Trusted, SiteSpace space, Matrix m);

  friend DensityMatrix reduce(const DensityMatrix&, const std::vector<int>&);

  SiteSpace space_;
  Matrix m_;
};

// Partial trace onto the listed sites (strictly increasing).
DensityMatrix reduce(const DensityMatrix& rho, const std::vector<int>& keep_sites);

}  // namespace chainfactor

#endif  // CHAINFACTOR_DENSITY_MATRIX_HPP
