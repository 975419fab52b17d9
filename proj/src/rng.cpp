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

#include "uptomo/rng.hpp"

#include <cmath>
#include <numbers>

#include "uptomo/errors.hpp"

namespace uptomo {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

namespace {

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream_id) {
  // Fold the stream id into the master seed, then mix twice so that nearby
  // (master, stream) pairs land far apart in seed space.
  std::uint64_t state = master ^ (0x9e3779b97f4a7c15ULL * (stream_id + 1));
  splitmix64(state);
  return splitmix64(state);
}

}  // namespace

Rng::Rng(std::uint64_t seed) : engine_(seed) {}

Rng::Rng(std::uint64_t master, std::uint64_t stream_id)
    : engine_(derive_seed(master, stream_id)) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::uniform(double lo, double hi) {
  return lo + (hi - lo) * uniform01();
}

double Rng::normal() {
  if (have_spare_) {
    have_spare_ = false;
    return spare_;
  }
  // Box-Muller. u1 is mapped into (0, 1] so the log argument never vanishes.
  const double u1 = 1.0 - uniform01();
  const double u2 = uniform01();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  have_spare_ = true;
  return radius * std::cos(angle);
}

std::int64_t Rng::poisson(double mean) {
  if (!(mean >= 0.0)) {
    throw ValidationError("poisson: mean must be >= 0");
  }
  if (mean == 0.0) {
    return 0;
  }
  if (mean < 10.0) {
    // Inversion by sequential search on the product of uniforms.
    const double limit = std::exp(-mean);
    std::int64_t k = 0;
    double product = uniform01();
    while (product > limit) {
      ++k;
      product *= uniform01();
    }
    return k;
  }

  // PTRD: transformed rejection with a uniform hat (W. Hormann, 1993).
  const double smu = std::sqrt(mean);
  const double b = 0.931 + 2.53 * smu;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  const double log_mu = std::log(mean);

  for (;;) {
    double u = uniform01() - 0.5;
    double v = uniform01();
    const double us = 0.5 - std::abs(u);
    const auto k = static_cast<std::int64_t>(
        std::floor((2.0 * a / us + b) * u + mean + 0.43));
    if (us >= 0.07 && v <= v_r) {
      return k;
    }
    if (k < 0 || (us < 0.013 && v > us)) {
      continue;
    }
    const double lhs =
        std::log(v * inv_alpha / (a / (us * us) + b));
    const double rhs =
        -mean + static_cast<double>(k) * log_mu - std::lgamma(static_cast<double>(k) + 1.0);
    if (lhs <= rhs) {
      return k;
    }
  }
}

}  // namespace uptomo
