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

#ifndef CHAINFACTOR_DECAY_FIT_HPP
#define CHAINFACTOR_DECAY_FIT_HPP

#include <vector>

namespace chainfactor {

// Least-squares line through (x, log y) restricted to points with y above the
// noise floor. Second differences of log y (uniform x spacing assumed for
// them) discriminate plain exponential decay from faster-than-exponential:
// log-concave series have non-positive second differences.
struct DecayFitReport {
  static constexpr double kFloor = 1e-12;

  std::vector<double> x;
  std::vector<double> y;
  int points_used = 0;

  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;

  std::vector<double> log_second_differences;
  bool log_concave = false;          // all second differences <= 1e-9
  bool strictly_decreasing = false;  // raw y, every consecutive pair
};

DecayFitReport fit_exponential_decay(const std::vector<double>& x,
                                     const std::vector<double>& y);

}  // namespace chainfactor

#endif  // CHAINFACTOR_DECAY_FIT_HPP
