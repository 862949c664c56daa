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

#ifndef CHAINFACTOR_CONDITIONAL_EXPECTATION_HPP
#define CHAINFACTOR_CONDITIONAL_EXPECTATION_HPP

#include <cstdint>
#include <vector>

#include "chainfactor/operator.hpp"
#include "chainfactor/site_space.hpp"

namespace chainfactor {

// Unital, trace-preserving, idempotent, self-adjoint projection onto a
// subalgebra. Two kinds are provided: tracing out a set of sites and
// refilling them maximally mixed, and pinching onto the operators diagonal
// in a fixed orthonormal basis.
class ConditionalExpectation {
 public:
  enum class Kind { trace_out_and_mix, pinching };

  // E(X) = pi_S (x) tr_S[X] with S the listed sites (site order preserved)
  static ConditionalExpectation trace_out_and_mix(SiteSpace space,
                                                  std::vector<int> sites);
  // E(X) = sum_i |b_i><b_i| X |b_i><b_i| for the columns b_i of `basis`
  // (must be unitary); an empty matrix means the computational basis
  static ConditionalExpectation pinching(SiteSpace space, Matrix basis = {});

  Kind kind() const { return kind_; }
  const SiteSpace& space() const { return space_; }
  const std::vector<int>& mixed_sites() const { return sites_; }

  Matrix apply(const Matrix& op) const;

 private:
  ConditionalExpectation(Kind kind, SiteSpace space, std::vector<int> sites,
                         Matrix basis);

  Kind kind_;
  SiteSpace space_;
  std::vector<int> sites_;  // trace_out_and_mix only
  Matrix basis_;            // pinching only; empty means computational
};

// Free-function spelling of E(op); dimension mismatch throws ArgumentError.
Matrix apply_conditional_expectation(const ConditionalExpectation& e,
                                     const Matrix& op);

// Completely positive trace-preserving map in Kraus form. Construction
// checks sum K^dag K = 1 within tol::kernel.
class QuantumChannel {
 public:
  explicit QuantumChannel(std::vector<Matrix> kraus);

  static QuantumChannel identity(int dim);
  // T(X) = tr_S[X] for sites S of `space`; Kraus rank = dim of S
  static QuantumChannel trace_out(const SiteSpace& space, std::vector<int> sites);
  // Haar-style random channel: slices of a random isometry into kraus_count
  // blocks; reproducible in the given seed
  static QuantumChannel random(int dim, int kraus_count, std::uint64_t seed);

  const std::vector<Matrix>& kraus() const { return kraus_; }
  int input_dim() const { return in_dim_; }
  int output_dim() const { return out_dim_; }

  Matrix apply(const Matrix& x) const;          // sum K X K^dag
  Matrix apply_adjoint(const Matrix& y) const;  // sum K^dag Y K

  // V = sum_k K_k (x) |k>_env stacked into an (out*env x in) isometry with
  // env dimension = number of Kraus operators; apply() agrees with
  // tr_env[V X V^dag].
  Matrix stinespring_isometry() const;

 private:
  std::vector<Matrix> kraus_;
  int in_dim_ = 0;
  int out_dim_ = 0;
};

}  // namespace chainfactor

#endif  // CHAINFACTOR_CONDITIONAL_EXPECTATION_HPP
