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

#include <cstdint>
#include <random>

namespace uptomo {

/// One step of the splitmix64 sequence; advances `state` and returns the
/// mixed output. Used to derive engine seeds from (master, stream) pairs.
std::uint64_t splitmix64(std::uint64_t& state);

/// Deterministic random stream.
///
/// The engine is std::mt19937_64, whose raw output sequence is fixed by the
/// C++ standard; all distribution transforms (uniform, normal, Poisson) are
/// implemented here rather than via std:: distributions so that draws are
/// bit-identical across platforms and standard libraries.
///
/// A stream constructed from (master, stream_id) depends only on those two
/// values, never on the order in which streams are created or consumed, so
/// per-setting noise is reproducible regardless of execution order.
class Rng {
 public:
  explicit Rng(std::uint64_t seed);
  Rng(std::uint64_t master, std::uint64_t stream_id);

  std::uint64_t next_u64();

  /// Uniform in [0, 1), 53-bit resolution.
  double uniform01();

  /// Uniform in [lo, hi).
  double uniform(double lo, double hi);

  /// Standard normal deviate (Box-Muller; pairs are cached).
  double normal();

  /// Poisson deviate with the given mean (>= 0). Exact sampling for any
  /// mean: sequential inversion below 10, Hormann's PTRD transformed
  /// rejection at 10 and above.
  std::int64_t poisson(double mean);

 private:
  std::mt19937_64 engine_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace uptomo
