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

#ifndef CHAINFACTOR_ERRORS_HPP
#define CHAINFACTOR_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chainfactor {

// Caller passed something malformed (wrong shape, bad parameter value).
class ArgumentError : public std::invalid_argument {
 public:
  explicit ArgumentError(const std::string& what) : std::invalid_argument(what) {}
};

// Input violates a mathematical precondition (not Hermitian, not PSD,
// kernel inclusion fails where required, inconsistent marginals).
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// Request exceeds what dense linear algebra can honor here
// (total dimension cap, marginal too large to simulate measurements on).
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace chainfactor

#endif  // CHAINFACTOR_ERRORS_HPP
