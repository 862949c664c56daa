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

#include "chainfactor/interaction.hpp"

#include <cmath>

#include "chainfactor/errors.hpp"
#include "chainfactor/rng.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

const Matrix kX = (Matrix(2, 2) << 0, 1, 1, 0).finished();
const Matrix kY = (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished();
const Matrix kZ = (Matrix(2, 2) << 1, 0, 0, -1).finished();

long int_pow(long base, int e) {
  long out = 1;
  for (int i = 0; i < e; ++i) out *= base;
  return out;
}

}  // namespace

Interaction::Interaction(int local_dim, std::vector<InteractionTerm> terms)
    : local_dim_(local_dim), terms_(std::move(terms)) {
  if (local_dim_ < 2) throw ArgumentError("local dimension must be at least 2");
  for (const InteractionTerm& t : terms_) {
    if (t.offsets.empty() || t.offsets.front() != 0) {
      throw ArgumentError("term offsets must start at 0");
    }
    for (size_t i = 1; i < t.offsets.size(); ++i) {
      if (t.offsets[i] <= t.offsets[i - 1]) {
        throw ArgumentError("term offsets must be strictly increasing");
      }
    }
    const long d = int_pow(local_dim_, static_cast<int>(t.offsets.size()));
    if (t.block.rows() != d || t.block.cols() != d) {
      throw ArgumentError("term block dimension does not match its offsets");
    }
    const double scale = std::max(1.0, t.block.cwiseAbs().maxCoeff());
    if ((t.block - t.block.adjoint()).cwiseAbs().maxCoeff() > tol::herm * scale) {
      throw ArgumentError("term block must be Hermitian");
    }
  }
}

int Interaction::range() const {
  int r = 0;
  for (const InteractionTerm& t : terms_) r = std::max(r, t.offsets.back());
  return r;
}

double Interaction::strength() const {
  double j = 0.0;
  for (const InteractionTerm& t : terms_) {
    j += static_cast<double>(t.offsets.size()) * operator_norm(t.block);
  }
  return j;
}

Interaction tfim(double coupling, double field) {
  std::vector<InteractionTerm> terms;
  terms.push_back({{0, 1}, -coupling * kron(kZ, kZ)});
  terms.push_back({{0}, -field * kX});
  return Interaction(2, std::move(terms));
}

Interaction xxz(double jxy, double jz, double field) {
  std::vector<InteractionTerm> terms;
  terms.push_back({{0, 1}, jxy * (kron(kX, kX) + kron(kY, kY)) + jz * kron(kZ, kZ)});
  terms.push_back({{0}, -field * kZ});
  return Interaction(2, std::move(terms));
}

Interaction classical_ising(double coupling, double field) {
  std::vector<InteractionTerm> terms;
  terms.push_back({{0, 1}, -coupling * kron(kZ, kZ)});
  terms.push_back({{0}, -field * kZ});
  return Interaction(2, std::move(terms));
}

Interaction random_ti(std::uint64_t seed, int range, int local_dim) {
  if (range < 0) throw ArgumentError("range must be nonnegative");
  if (local_dim < 2) throw ArgumentError("local dimension must be at least 2");
  std::vector<InteractionTerm> terms;
  for (int k = 0; k <= range; ++k) {
    const long d = int_pow(local_dim, k + 1);
    Gaussian rng(substream_seed(seed, 0x7469726eu, static_cast<std::uint64_t>(k)));
    Matrix g(d, d);
    for (long c = 0; c < d; ++c)
      for (long r = 0; r < d; ++r) g(r, c) = Complex(rng(), rng());
    Matrix block = ((g + g.adjoint()) / 2.0).eval();
    block /= operator_norm(block);
    std::vector<int> offsets(k + 1);
    for (int i = 0; i <= k; ++i) offsets[i] = i;
    terms.push_back({std::move(offsets), std::move(block)});
  }
  return Interaction(local_dim, std::move(terms));
}

Interaction exp_ising(double lambda, double truncation) {
  if (lambda <= 0.0) throw ArgumentError("decay rate must be positive");
  if (truncation <= 0.0) throw ArgumentError("truncation must be positive");
  std::vector<InteractionTerm> terms;
  // distances beyond 64 sites are dropped regardless; dense chains are far
  // shorter than that
  for (int k = 1; k <= 64; ++k) {
    const double w = std::exp(-lambda * k);
    if (w < truncation) break;
    terms.push_back({{0, k}, -w * kron(kZ, kZ)});
  }
  if (terms.empty()) throw ArgumentError("all couplings fall below the truncation");
  return Interaction(2, std::move(terms));
}

}  // namespace chainfactor
