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

#include "chainfactor/decay_fit.hpp"

#include <cmath>

#include "chainfactor/errors.hpp"

namespace chainfactor {

DecayFitReport fit_exponential_decay(const std::vector<double>& x,
                                     const std::vector<double>& y) {
  if (x.size() != y.size()) throw ArgumentError("x and y must have equal length");
  DecayFitReport r;
  r.x = x;
  r.y = y;

  r.strictly_decreasing = y.size() >= 2;
  for (size_t i = 0; i + 1 < y.size(); ++i) {
    if (!(y[i + 1] < y[i])) r.strictly_decreasing = false;
  }

  std::vector<double> fx, fy;
  for (size_t i = 0; i < y.size(); ++i) {
    if (y[i] > DecayFitReport::kFloor) {
      fx.push_back(x[i]);
      fy.push_back(std::log(y[i]));
    }
  }
  r.points_used = static_cast<int>(fx.size());

  if (r.points_used >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < r.points_used; ++i) {
      sx += fx[i];
      sy += fy[i];
      sxx += fx[i] * fx[i];
      sxy += fx[i] * fy[i];
    }
    const double n = r.points_used;
    const double denom = n * sxx - sx * sx;
    if (denom > 0) {
      r.slope = (n * sxy - sx * sy) / denom;
      r.intercept = (sy - r.slope * sx) / n;
      double ss_res = 0, ss_tot = 0;
      const double mean = sy / n;
      for (int i = 0; i < r.points_used; ++i) {
        const double fit = r.slope * fx[i] + r.intercept;
        ss_res += (fy[i] - fit) * (fy[i] - fit);
        ss_tot += (fy[i] - mean) * (fy[i] - mean);
      }
      r.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : (ss_res < 1e-18 ? 1.0 : 0.0);
    }
  }

  // curvature over consecutive retained points; callers sample on a uniform
  // grid so the plain second difference is the right discriminator
  r.log_concave = true;
  for (int i = 1; i + 1 < r.points_used; ++i) {
    const double d2 = fy[i + 1] - 2.0 * fy[i] + fy[i - 1];
    r.log_second_differences.push_back(d2);
    if (d2 > 1e-9) r.log_concave = false;
  }
  return r;
}

}  // namespace chainfactor
