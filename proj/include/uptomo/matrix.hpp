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

#include <Eigen/Dense>
#include <complex>
#include <cstdint>
#include <filesystem>
#include <string>

#include <json.hpp>

namespace uptomo {

using Complex = std::complex<double>;
using Cmat = Eigen::MatrixXcd;

/// Default certification tolerance for constructed gates.
inline constexpr double kGateTol = 1e-10;

/// Square N x N complex matrix over the OAM mode space, N >= 2.
///
/// Index convention, used everywhere in this project: entry (l, l') is the
/// amplitude taking *input* mode l' to *output* mode l — row = output mode,
/// column = input mode.
class ComplexMatrix {
 public:
  /// Wraps an Eigen matrix. Throws DimensionError unless square with dim >= 2.
  explicit ComplexMatrix(Cmat entries);

  static ComplexMatrix identity(int dim);
  static ComplexMatrix zero(int dim);

  int dim() const { return static_cast<int>(entries_.rows()); }
  const Cmat& mat() const { return entries_; }
  Complex operator()(int row, int col) const { return entries_(row, col); }

 private:
  Cmat entries_;
};

struct UnitarityCheck {
  double deviation = 0.0;  // max entry modulus of M^dag M - I
  bool ok = false;
};

/// deviation = max-entry-norm of M^dag M - I; ok iff deviation <= tol.
/// Throws DimensionError for non-square input.
UnitarityCheck check_unitarity(const Cmat& m, double tol);
UnitarityCheck check_unitarity(const ComplexMatrix& m, double tol);

/// A ComplexMatrix certified unitary at construction time.
///
/// Certification checks both the max-entry deviation of M^dag M - I and the
/// squared-magnitude sums of every row and column; the constructor throws
/// ValidationError if either exceeds `certified_tol`.
class UnitaryMatrix {
 public:
  explicit UnitaryMatrix(ComplexMatrix m, double certified_tol = kGateTol);

  int dim() const { return matrix_.dim(); }
  const ComplexMatrix& matrix() const { return matrix_; }
  const Cmat& mat() const { return matrix_.mat(); }
  Complex operator()(int row, int col) const { return matrix_(row, col); }
  double certified_tol() const { return certified_tol_; }

 private:
  ComplexMatrix matrix_;
  double certified_tol_;
};

/// Gate library. Known names:
///   identity   — I_dim, any dim >= 2
///   fourier    — entries exp(2*pi*i*l*m/dim) / sqrt(dim)
///   hadamard4  — the four-dimensional Hadamard gate (requires dim == 4)
UnitaryMatrix named_gate(const std::string& name, int dim);

/// Haar-distributed random unitary, deterministic per (dim, seed):
/// QR orthonormalization of a complex Gaussian matrix with the R diagonal
/// phase-corrected so the factorization is unique.
UnitaryMatrix haar_random(int dim, std::uint64_t seed);

/// |trace(A^dag B)| / N, clamped into [0, 1]. Invariant under a global
/// phase on either argument. Throws DimensionError on dim mismatch.
double fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b);

/// Same overlap figure for not-necessarily-unitary estimates; unclamped.
double overlap_fidelity(const ComplexMatrix& a, const ComplexMatrix& b);

/// Unitary factor W of the polar decomposition M = W P; the closest unitary
/// to M in Frobenius distance. Throws ProjectionError when the smallest
/// singular value is below 1e-12.
UnitaryMatrix nearest_unitary(const ComplexMatrix& m);

// --- serialization -------------------------------------------------------
//
// Matrix files are JSON objects {"dim": N, "entries": [[re, im], ...]} with
// N*N entries in row-major order; doubles round-trip exactly.

nlohmann::json matrix_to_json(const ComplexMatrix& m);
ComplexMatrix matrix_from_json(const nlohmann::json& j);
void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m);
ComplexMatrix read_matrix_file(const std::filesystem::path& path);

}  // namespace uptomo
