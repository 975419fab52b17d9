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

#pragma once

#include <vector>

#include "uptomo/interferometer.hpp"

namespace uptomo {

/// Sinusoidal fringe parameters for the model
///   value(phi) = mean_level + amplitude * sin(phi + phase)
/// with amplitude >= 0 and phase in (-pi, pi].
struct FringeFit {
  double mean_level = 0.0;
  double amplitude = 0.0;
  double phase = 0.0;
  double visibility = 0.0;   // amplitude / mean_level
  double residual_rms = 0.0; // rms misfit over the samples
};

/// Least-squares fringe fit over the basis {1, sin phi, cos phi}.
///
/// Requires at least three samples whose phases make the basis full rank
/// (FitError otherwise) and a positive fitted mean level (FitError
/// otherwise, since visibility is undefined). A fit whose amplitude is
/// negligible against the mean reports phase = 0 by convention: the phase of
/// a flat fringe carries no information.
FringeFit fit_fringe(const std::vector<Sample>& samples);

inline FringeFit fit_fringe(const InterferencePattern& p) {
  return fit_fringe(p.samples);
}

/// Model-free visibility (max - min) / (max + min) over the sampled values.
/// Throws FitError when max + min is not positive.
double visibility_minmax(const std::vector<Sample>& samples);

/// Wraps an angle into (-pi, pi].
double wrap_angle(double a);

/// Shortest angular distance |a - b| on the circle, in [0, pi].
double angular_distance(double a, double b);

}  // namespace uptomo
