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

#include "chainfactor/conditional_expectation.hpp"

#include <algorithm>
#include <string>
#include <utility>

#include "chainfactor/errors.hpp"
#include "chainfactor/rng.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

namespace {

void check_square(const Matrix& op, long dim, const char* what) {
  if (op.rows() != dim || op.cols() != dim)
    throw ArgumentError(std::string(what) + ": operator is " +
                        std::to_string(op.rows()) + "x" +
                        std::to_string(op.cols()) + ", space dimension is " +
                        std::to_string(dim));
}

}  // namespace

ConditionalExpectation::ConditionalExpectation(Kind kind, SiteSpace space,
                                               std::vector<int> sites,
                                               Matrix basis)
    : kind_(kind),
      space_(std::move(space)),
      sites_(std::move(sites)),
      basis_(std::move(basis)) {}

ConditionalExpectation ConditionalExpectation::trace_out_and_mix(
    SiteSpace space, std::vector<int> sites) {
  std::sort(sites.begin(), sites.end());
  if (std::unique(sites.begin(), sites.end()) != sites.end())
    throw ArgumentError("mixed sites repeat");
  for (int s : sites)
    if (s < 0 || s >= space.sites())
      throw ArgumentError("mixed site " + std::to_string(s) +
                          " outside the chain");
  if (static_cast<int>(sites.size()) == space.sites())
    throw ArgumentError("mixing every site leaves no subalgebra");
  return ConditionalExpectation(Kind::trace_out_and_mix, std::move(space),
                                std::move(sites), Matrix());
}

ConditionalExpectation ConditionalExpectation::pinching(SiteSpace space,
                                                        Matrix basis) {
  if (basis.size() != 0) {
    const long d = space.total_dim();
    check_square(basis, d, "pinching basis");
    const Matrix gram = basis.adjoint() * basis;
    if ((gram - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol::herm * 1e2)
      throw ArgumentError("pinching basis is not unitary");
  }
  return ConditionalExpectation(Kind::pinching, std::move(space), {},
                                std::move(basis));
}

Matrix ConditionalExpectation::apply(const Matrix& op) const {
  check_square(op, space_.total_dim(), "conditional expectation");
  if (kind_ == Kind::trace_out_and_mix) {
    if (sites_.empty()) return op;
    std::vector<int> keep;
    long mixed_dim = 1;
    for (int s = 0; s < space_.sites(); ++s) {
      if (std::find(sites_.begin(), sites_.end(), s) == sites_.end())
        keep.push_back(s);
      else
        mixed_dim *= space_.dim(s);
    }
    const Matrix reduced = partial_trace_matrix(op, space_.dims(), keep);
    return embed_matrix(reduced, space_.dims(), keep) /
           static_cast<double>(mixed_dim);
  }
  if (basis_.size() == 0) {
    Matrix out = Matrix::Zero(op.rows(), op.cols());
    out.diagonal() = op.diagonal();
    return out;
  }
  Matrix rotated = basis_.adjoint() * op * basis_;
  Matrix diag = Matrix::Zero(op.rows(), op.cols());
  diag.diagonal() = rotated.diagonal();
  return basis_ * diag * basis_.adjoint();
}

Matrix apply_conditional_expectation(const ConditionalExpectation& e,
                                     const Matrix& op) {
  return e.apply(op);
}

QuantumChannel::QuantumChannel(std::vector<Matrix> kraus)
    : kraus_(std::move(kraus)) {
  if (kraus_.empty()) throw ArgumentError("channel needs Kraus operators");
  out_dim_ = static_cast<int>(kraus_.front().rows());
  in_dim_ = static_cast<int>(kraus_.front().cols());
  for (const Matrix& k : kraus_)
    if (k.rows() != out_dim_ || k.cols() != in_dim_)
      throw ArgumentError("Kraus operators disagree on dimensions");
  Matrix sum = Matrix::Zero(in_dim_, in_dim_);
  for (const Matrix& k : kraus_) sum += k.adjoint() * k;
  if ((sum - Matrix::Identity(in_dim_, in_dim_)).cwiseAbs().maxCoeff() >
      tol::kernel)
    throw ArgumentError("Kraus operators do not preserve the trace");
}

QuantumChannel QuantumChannel::identity(int dim) {
  return QuantumChannel({Matrix(Matrix::Identity(dim, dim))});
}

QuantumChannel QuantumChannel::trace_out(const SiteSpace& space,
                                         std::vector<int> sites) {
  std::sort(sites.begin(), sites.end());
  if (std::unique(sites.begin(), sites.end()) != sites.end())
    throw ArgumentError("traced sites repeat");
  for (int s : sites)
    if (s < 0 || s >= space.sites())
      throw ArgumentError("traced site outside the chain");
  if (sites.empty()) return identity(static_cast<int>(space.total_dim()));
  if (static_cast<int>(sites.size()) == space.sites())
    throw ArgumentError("tracing every site leaves no output");

  std::vector<int> keep;
  for (int s = 0; s < space.sites(); ++s)
    if (std::find(sites.begin(), sites.end(), s) == sites.end())
      keep.push_back(s);

  long keep_dim = 1, gone_dim = 1;
  for (int s : keep) keep_dim *= space.dim(s);
  for (int s : sites) gone_dim *= space.dim(s);

  // one Kraus operator per basis state of the traced factor; each entry of
  // the full index splits into its kept and traced digits
  std::vector<Matrix> kraus(gone_dim, Matrix::Zero(keep_dim, space.total_dim()));
  const std::vector<int>& dims = space.dims();
  for (long f = 0; f < space.total_dim(); ++f) {
    long rest = f, k_idx = 0, g_idx = 0;
    std::vector<int> digit(dims.size());
    for (int s = space.sites() - 1; s >= 0; --s) {
      digit[s] = static_cast<int>(rest % dims[s]);
      rest /= dims[s];
    }
    for (int s : keep) k_idx = k_idx * dims[s] + digit[s];
    for (int s : sites) g_idx = g_idx * dims[s] + digit[s];
    kraus[g_idx](k_idx, f) = 1.0;
  }
  return QuantumChannel(std::move(kraus));
}

QuantumChannel QuantumChannel::random(int dim, int kraus_count,
                                      std::uint64_t seed) {
  if (dim < 1 || kraus_count < 1)
    throw ArgumentError("channel dimensions must be positive");
  Gaussian g(substream_seed(seed, 0x6368616eULL));
  Matrix raw(dim * kraus_count, dim);
  for (long r = 0; r < raw.rows(); ++r)
    for (long c = 0; c < raw.cols(); ++c) raw(r, c) = Complex(g(), g());
  const Eigen::HouseholderQR<Matrix> qr(raw);
  const Matrix v =
      qr.householderQ() * Matrix::Identity(dim * kraus_count, dim);
  std::vector<Matrix> kraus;
  for (int e = 0; e < kraus_count; ++e)
    kraus.push_back(v.middleRows(static_cast<long>(e) * dim, dim));
  return QuantumChannel(std::move(kraus));
}

Matrix QuantumChannel::apply(const Matrix& x) const {
  check_square(x, in_dim_, "channel input");
  Matrix out = Matrix::Zero(out_dim_, out_dim_);
  for (const Matrix& k : kraus_) out += k * x * k.adjoint();
  return out;
}

Matrix QuantumChannel::apply_adjoint(const Matrix& y) const {
  check_square(y, out_dim_, "channel adjoint input");
  Matrix out = Matrix::Zero(in_dim_, in_dim_);
  for (const Matrix& k : kraus_) out += k.adjoint() * y * k;
  return out;
}

Matrix QuantumChannel::stinespring_isometry() const {
  const int env = static_cast<int>(kraus_.size());
  Matrix v = Matrix::Zero(static_cast<long>(out_dim_) * env, in_dim_);
  for (int e = 0; e < env; ++e)
    for (int o = 0; o < out_dim_; ++o)
      v.row(static_cast<long>(o) * env + e) = kraus_[e].row(o);
  return v;
}

}  // namespace chainfactor
