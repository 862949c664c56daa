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

#include "chainfactor/site_space.hpp"

#include <string>

#include "chainfactor/errors.hpp"
#include "chainfactor/tolerances.hpp"

namespace chainfactor {

SiteSpace::SiteSpace(std::vector<int> dims) : dims_(std::move(dims)) {
  if (dims_.empty()) {
    // the empty segment: a one-dimensional space; shows up as an empty block
    total_ = 1;
    return;
  }
  for (int d : dims_) {
    if (d < 2) throw ArgumentError("site dimension must be >= 2, got " + std::to_string(d));
  }
  strides_.assign(dims_.size(), 1);
  for (int i = static_cast<int>(dims_.size()) - 2; i >= 0; --i)
    strides_[i] = strides_[i + 1] * dims_[i + 1];
  total_ = strides_[0] * dims_[0];
  if (total_ > tol::max_total_dim)
    throw ResourceError("total dimension " + std::to_string(total_) + " exceeds dense cap " +
                        std::to_string(tol::max_total_dim));
}

SiteSpace SiteSpace::qubits(int n) { return uniform(n, 2); }

SiteSpace SiteSpace::uniform(int n, int local_dim) {
  if (n < 0) throw ArgumentError("negative site count");
  return SiteSpace(std::vector<int>(static_cast<size_t>(n), local_dim));
}

int SiteSpace::dim(int site) const {
  if (site < 0 || site >= sites()) throw ArgumentError("site index out of range");
  return dims_[static_cast<size_t>(site)];
}

SiteSpace SiteSpace::subspace(const std::vector<int>& sites) const {
  std::vector<int> d;
  d.reserve(sites.size());
  for (int s : sites) d.push_back(dim(s));
  return SiteSpace(d);
}

long SiteSpace::flat_index(const std::vector<int>& digits) const {
  if (static_cast<int>(digits.size()) != sites())
    throw ArgumentError("digit count does not match site count");
  long flat = 0;
  for (int i = 0; i < sites(); ++i) {
    if (digits[i] < 0 || digits[i] >= dims_[static_cast<size_t>(i)])
      throw ArgumentError("digit out of range");
    flat += digits[i] * strides_[static_cast<size_t>(i)];
  }
  return flat;
}

std::vector<int> SiteSpace::digits(long flat) const {
  if (flat < 0 || flat >= total_) throw ArgumentError("flat index out of range");
  std::vector<int> out(static_cast<size_t>(sites()));
  for (int i = 0; i < sites(); ++i) {
    out[static_cast<size_t>(i)] = static_cast<int>(flat / strides_[static_cast<size_t>(i)]);
    flat %= strides_[static_cast<size_t>(i)];
  }
  return out;
}

long SiteSpace::stride(int site) const {
  if (site < 0 || site >= sites()) throw ArgumentError("site index out of range");
  return strides_[static_cast<size_t>(site)];
}

}  // namespace chainfactor
