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

#include "chainfactor/factorization.hpp"

#include "chainfactor/errors.hpp"
#include "chainfactor/gibbs.hpp"

namespace chainfactor {

namespace {

Matrix identity_of(long d) { return Matrix::Identity(d, d); }

void require_abc(const DensityMatrix& rho, const ChainPartition& p) {
  if (p.space() != rho.space()) throw ArgumentError("partition does not match the state's space");
  for (const char* name : {"A", "B", "C"}) {
    if (!p.has_block(name)) throw ArgumentError("partition must have blocks A, B, C");
  }
}

}  // namespace

double approx_factorization_norm(const DensityMatrix& rho_abc, const ChainPartition& p) {
  require_abc(rho_abc, p);
  const long da = rho_abc.space().subspace(p.sites({"A"})).total_dim();
  const long dc = rho_abc.space().subspace(p.sites({"C"})).total_dim();

  const Matrix ab = marginal(rho_abc, p, {"A", "B"}).matrix();
  const Matrix bc = marginal(rho_abc, p, {"B", "C"}).matrix();
  const Matrix b = marginal(rho_abc, p, {"B"}).matrix();

  // inverses act on the marginal supports; identity factors fill the rest
  const Matrix bc_inv_lift = kron(identity_of(da), pseudo_inverse(bc));
  const Matrix b_lift = kron(kron(identity_of(da), b), identity_of(dc));
  const Matrix ab_inv_lift = kron(pseudo_inverse(ab), identity_of(dc));

  const Matrix chain =
      detail::prod(detail::prod(rho_abc.matrix(), bc_inv_lift), detail::prod(b_lift, ab_inv_lift));
  const long d = chain.rows();
  return operator_norm((chain - identity_of(d)).eval());
}

GibbsNormDiagnostics gibbs_norm_diagnostics(const DensityMatrix& rho_abc,
                                            const ChainPartition& p) {
  require_abc(rho_abc, p);
  const Matrix a = marginal(rho_abc, p, {"A"}).matrix();
  const Matrix b = marginal(rho_abc, p, {"B"}).matrix();
  const Matrix ab = marginal(rho_abc, p, {"A", "B"}).matrix();
  const long da = a.rows(), dc = rho_abc.space().total_dim() / ab.rows();

  GibbsNormDiagnostics out;
  out.a_b_over_ab = operator_norm(detail::prod(kron(a, b), pseudo_inverse(ab)).eval());
  out.ab_over_a_b =
      operator_norm(detail::prod(ab, kron(pseudo_inverse(a), pseudo_inverse(b))).eval());
  const Matrix b_inv_lift = kron(kron(identity_of(da), pseudo_inverse(b)), identity_of(dc));
  out.abc_over_b = operator_norm(detail::prod(rho_abc.matrix(), b_inv_lift).eval());
  out.b_condition = operator_norm(pseudo_inverse(b).eval()) * operator_norm(b);
  return out;
}

}  // namespace chainfactor
