// Copyright 2026 The uptomo authors
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

#include "uptomo/fringe.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <numbers>

#include "uptomo/errors.hpp"

namespace uptomo {

double wrap_angle(double a) {
  double y = std::remainder(a, 2.0 * std::numbers::pi);
  if (y <= -std::numbers::pi) {
    y += 2.0 * std::numbers::pi;
  }
  return y;
}

double angular_distance(double a, double b) {
  return std::abs(wrap_angle(a - b));
}

FringeFit fit_fringe(const std::vector<Sample>& samples) {
  const auto m = static_cast<Eigen::Index>(samples.size());
  if (m < 3) {
    throw FitError("fringe fit needs at least 3 samples, got " +
                   std::to_string(samples.size()));
  }

  Eigen::MatrixXd x(m, 3);
  Eigen::VectorXd y(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double phi = samples[static_cast<std::size_t>(i)].phi;
    x(i, 0) = 1.0;
    x(i, 1) = std::sin(phi);
    x(i, 2) = std::cos(phi);
    y(i) = samples[static_cast<std::size_t>(i)].value;
  }

  Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(x);
  if (qr.rank() < 3) {
    throw FitError("rank-deficient phase grid: the sampled phases cannot "
                   "separate offset, sine and cosine components");
  }
  const Eigen::Vector3d coef = qr.solve(y);
  const double a0 = coef(0);
  const double a1 = coef(1);
  const double a2 = coef(2);

  if (!(a0 > 0.0)) {
    throw FitError("fitted mean level is not positive; visibility undefined");
  }

  FringeFit fit;
  fit.mean_level = a0;
  fit.amplitude = std::hypot(a1, a2);
  // Flat fringe: the phase is pure numerical noise, pin it to zero.
  constexpr double kFlatTol = 1e-12;
  fit.phase = fit.amplitude < kFlatTol * a0 ? 0.0 : wrap_angle(std::atan2(a2, a1));
  fit.visibility = fit.amplitude / a0;
  fit.residual_rms = std::sqrt((y - x * coef).squaredNorm() / static_cast<double>(m));
  return fit;
}

double visibility_minmax(const std::vector<Sample>& samples) {
  if (samples.empty()) {
    throw FitError("cannot compute visibility of an empty pattern");
  }
  auto [lo_it, hi_it] = std::minmax_element(
      samples.begin(), samples.end(),
      [](const Sample& a, const Sample& b) { return a.value < b.value; });
  const double lo = lo_it->value;
  const double hi = hi_it->value;
  if (!(hi + lo > 0.0)) {
    throw FitError("visibility undefined: max + min of the pattern is not positive");
  }
  return (hi - lo) / (hi + lo);
}

}  // namespace uptomo
