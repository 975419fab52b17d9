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

#include <stdexcept>
#include <string>

namespace uptomo {

/// Base class for all errors raised by this library.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Mismatched or out-of-range dimensions / mode indices.
struct DimensionError : Error {
  using Error::Error;
};

/// A domain invariant was violated (overlapping pairs, bad angles, ...).
struct ValidationError : Error {
  using Error::Error;
};

/// Singular or near-singular input to the nearest-unitary projection.
struct ProjectionError : Error {
  using Error::Error;
};

/// Fringe fitting failed (rank-deficient grid, nonphysical pattern).
struct FitError : Error {
  using Error::Error;
};

/// Config file parsing or validation failed. Maps to CLI exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// File I/O or artifact format problem.
struct IoError : Error {
  using Error::Error;
};

}  // namespace uptomo
