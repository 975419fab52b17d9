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

#include "uptomo/matrix.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "uptomo/errors.hpp"
#include "uptomo/io_util.hpp"
#include "uptomo/rng.hpp"

namespace uptomo {

ComplexMatrix::ComplexMatrix(Cmat entries) : entries_(std::move(entries)) {
  if (entries_.rows() != entries_.cols()) {
    throw DimensionError("ComplexMatrix: input is not square (" +
                         std::to_string(entries_.rows()) + "x" +
                         std::to_string(entries_.cols()) + ")");
  }
  if (entries_.rows() < 2) {
    throw DimensionError("ComplexMatrix: dim must be >= 2");
  }
}

ComplexMatrix ComplexMatrix::identity(int dim) {
  return ComplexMatrix(Cmat::Identity(dim, dim));
}

ComplexMatrix ComplexMatrix::zero(int dim) {
  return ComplexMatrix(Cmat::Zero(dim, dim));
}

UnitarityCheck check_unitarity(const Cmat& m, double tol) {
  if (m.rows() != m.cols()) {
    throw DimensionError("check_unitarity: input is not square");
  }
  const Cmat gram = m.adjoint() * m - Cmat::Identity(m.rows(), m.cols());
  const double deviation = gram.cwiseAbs().maxCoeff();
  return {deviation, deviation <= tol};
}

UnitarityCheck check_unitarity(const ComplexMatrix& m, double tol) {
  return check_unitarity(m.mat(), tol);
}

UnitaryMatrix::UnitaryMatrix(ComplexMatrix m, double certified_tol)
    : matrix_(std::move(m)), certified_tol_(certified_tol) {
  if (certified_tol_ < 0.0) {
    throw ValidationError("UnitaryMatrix: certification tolerance must be >= 0");
  }
  const auto check = check_unitarity(matrix_, certified_tol_);
  if (!check.ok) {
    throw ValidationError("UnitaryMatrix: deviation from unitarity " +
                          std::to_string(check.deviation) + " exceeds tolerance " +
                          std::to_string(certified_tol_));
  }
  // Row/column squared-magnitude sums must individually sit at 1.
  const Eigen::VectorXd row_norms = matrix_.mat().rowwise().squaredNorm();
  const Eigen::VectorXd col_norms = matrix_.mat().colwise().squaredNorm();
  const double worst = std::max((row_norms.array() - 1.0).abs().maxCoeff(),
                                (col_norms.array() - 1.0).abs().maxCoeff());
  if (worst > certified_tol_) {
    throw ValidationError("UnitaryMatrix: row/column norm deviation " +
                          std::to_string(worst) + " exceeds tolerance");
  }
}

namespace {

Cmat hadamard4_entries() {
  const Complex i{0.0, 1.0};
  Cmat h(4, 4);
  h << 1, 1, 1, 1,
       1, i, -1, -i,
       1, -1, 1, -1,
       1, -i, -1, i;
  return 0.5 * h;
}

Cmat fourier_entries(int dim) {
  Cmat f(dim, dim);
  const double norm = 1.0 / std::sqrt(static_cast<double>(dim));
  for (int l = 0; l < dim; ++l) {
    for (int m = 0; m < dim; ++m) {
      const double angle = 2.0 * std::numbers::pi * l * m / dim;
      f(l, m) = norm * Complex{std::cos(angle), std::sin(angle)};
    }
  }
  return f;
}

}  // namespace

UnitaryMatrix named_gate(const std::string& name, int dim) {
  if (dim < 2) {
    throw DimensionError("named_gate: dim must be >= 2");
  }
  if (name == "identity") {
    return UnitaryMatrix(ComplexMatrix::identity(dim));
  }
  if (name == "fourier") {
    return UnitaryMatrix(ComplexMatrix(fourier_entries(dim)));
  }
  if (name == "hadamard4") {
    if (dim != 4) {
      throw DimensionError("named_gate: hadamard4 requires dim == 4, got " +
                           std::to_string(dim));
    }
    return UnitaryMatrix(ComplexMatrix(hadamard4_entries()));
  }
  throw ValidationError("named_gate: unknown gate name '" + name + "'");
}

UnitaryMatrix haar_random(int dim, std::uint64_t seed) {
  if (dim < 2) {
    throw DimensionError("haar_random: dim must be >= 2");
  }
  Rng rng(seed, /*stream_id=*/static_cast<std::uint64_t>(dim));
  Cmat ginibre(dim, dim);
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c) {
      ginibre(r, c) = Complex{rng.normal(), rng.normal()};
    }
  }
  Eigen::HouseholderQR<Cmat> qr(ginibre);
  Cmat q = qr.householderQ();
  const Cmat r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fix the gauge: rescale columns so the R diagonal is real positive. This
  // makes the QR factorization unique and the Q factor Haar-distributed.
  for (int c = 0; c < dim; ++c) {
    const Complex d = r(c, c);
    const double mag = std::abs(d);
    if (mag > 0.0) {
      q.col(c) *= d / mag;
    }
  }
  return UnitaryMatrix(ComplexMatrix(std::move(q)));
}

double overlap_fidelity(const ComplexMatrix& a, const ComplexMatrix& b) {
  if (a.dim() != b.dim()) {
    throw DimensionError("fidelity: dimension mismatch");
  }
  const Complex trace = (a.mat().adjoint() * b.mat()).trace();
  return std::abs(trace) / static_cast<double>(a.dim());
}

double fidelity(const UnitaryMatrix& a, const UnitaryMatrix& b) {
  return std::min(overlap_fidelity(a.matrix(), b.matrix()), 1.0);
}

UnitaryMatrix nearest_unitary(const ComplexMatrix& m) {
  Eigen::JacobiSVD<Cmat> svd(m.mat(), Eigen::ComputeFullU | Eigen::ComputeFullV);
  const double sigma_min = svd.singularValues().minCoeff();
  if (sigma_min < 1e-12) {
    throw ProjectionError(
        "nearest_unitary: matrix is singular or near-singular (sigma_min = " +
        std::to_string(sigma_min) + ")");
  }
  Cmat w = svd.matrixU() * svd.matrixV().adjoint();
  return UnitaryMatrix(ComplexMatrix(std::move(w)), 1e-12);
}

nlohmann::json matrix_to_json(const ComplexMatrix& m) {
  nlohmann::json entries = nlohmann::json::array();
  for (int r = 0; r < m.dim(); ++r) {
    for (int c = 0; c < m.dim(); ++c) {
      const Complex v = m(r, c);
      entries.push_back({v.real(), v.imag()});
    }
  }
  return nlohmann::json{{"dim", m.dim()}, {"entries", std::move(entries)}};
}

ComplexMatrix matrix_from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("dim") || !j.contains("entries")) {
    throw IoError("matrix: expected object with 'dim' and 'entries'");
  }
  const int dim = j.at("dim").get<int>();
  const auto& entries = j.at("entries");
  if (dim < 2) {
    throw IoError("matrix: dim must be >= 2");
  }
  if (!entries.is_array() ||
      entries.size() != static_cast<std::size_t>(dim) * static_cast<std::size_t>(dim)) {
    throw IoError("matrix: 'entries' must hold exactly dim*dim [re, im] pairs");
  }
  Cmat m(dim, dim);
  std::size_t k = 0;
  for (int r = 0; r < dim; ++r) {
    for (int c = 0; c < dim; ++c, ++k) {
      const auto& e = entries[k];
      if (!e.is_array() || e.size() != 2) {
        throw IoError("matrix: entry " + std::to_string(k) + " is not an [re, im] pair");
      }
      m(r, c) = Complex{e[0].get<double>(), e[1].get<double>()};
    }
  }
  return ComplexMatrix(std::move(m));
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
  write_file_atomic(path, matrix_to_json(m).dump(2) + "\n");
}

ComplexMatrix read_matrix_file(const std::filesystem::path& path) {
  return matrix_from_json(read_json_file(path));
}

}  // namespace uptomo
