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

#ifndef CHAINFACTOR_SITE_SPACE_HPP
#define CHAINFACTOR_SITE_SPACE_HPP

#include <vector>

namespace chainfactor {

// Ordered list of local dimensions for a finite chain segment.
//
// Index convention, fixed project-wide: site 0 is the slowest-varying
// (leftmost) tensor factor of a basis index, i.e. a basis state |i0 i1 ... >
// has flat index i0*d1*d2*... + i1*d2*... + ... Matrices over a SiteSpace are
// square with side total_dim().
class SiteSpace {
 public:
  explicit SiteSpace(std::vector<int> dims);

  static SiteSpace qubits(int n);
  static SiteSpace uniform(int n, int local_dim);

  int sites() const { return static_cast<int>(dims_.size()); }
  int dim(int site) const;
  const std::vector<int>& dims() const { return dims_; }
  long total_dim() const { return total_; }

  // Space formed by the listed sites, in the given order.
  SiteSpace subspace(const std::vector<int>& sites) const;

  // Flat index <-> per-site digits, site 0 slowest.
  long flat_index(const std::vector<int>& digits) const;
  std::vector<int> digits(long flat) const;

  // stride(i) = product of dims of sites right of i
  long stride(int site) const;

  bool operator==(const SiteSpace& o) const { return dims_ == o.dims_; }
  bool operator!=(const SiteSpace& o) const { return !(*this == o); }

 private:
  std::vector<int> dims_;
  std::vector<long> strides_;
  long total_ = 1;
};

}  // namespace chainfactor

#endif  // CHAINFACTOR_SITE_SPACE_HPP
