// Copyright 2026 The qsprep Authors
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

#include "qsprep/grid.hpp"
#include "qsprep/types.hpp"

namespace qsprep {

/// Diagonal potential chosen so that the sampled target is annihilated by
/// T + V:  V_i = (psi_{i+1} - 2 psi_i + psi_{i-1}) / (h^2 psi_i), with
/// psi_0 = psi_{N+1} = 0.
struct Potential {
  RealVector values;
  double max_abs = 0.0;
};

Potential build_potential(const TargetFunction& target);

/// Eigenvalues (2 - 2 cos(k pi/(N+1))) / h^2 of the Dirichlet second
/// difference operator, k = 1..N, ascending.
RealVector kinetic_eigenvalues(const GridSpec& grid);

/// H = T + V with T = tridiag(-1, 2, -1) / h^2.
class Hamiltonian {
 public:
  Hamiltonian(GridSpec grid, Potential potential);

  [[nodiscard]] const GridSpec& grid() const noexcept { return grid_; }
  [[nodiscard]] const Potential& potential() const noexcept { return potential_; }
  /// lambda_max(T) + max|V|; an upper bound on ||H||.
  [[nodiscard]] double norm_bound() const noexcept { return norm_bound_; }
  /// Smallest integer p with 2^(2n+p) >= norm_bound().
  [[nodiscard]] int p() const noexcept { return p_; }
  [[nodiscard]] double off_diagonal() const noexcept { return off_diagonal_; }
  /// Main diagonal 2/h^2 + V_i.
  [[nodiscard]] RealVector diagonal() const;

  /// O(N) matrix-free product.
  template <typename Scalar>
  [[nodiscard]] Eigen::Matrix<Scalar, Eigen::Dynamic, 1> apply(
      const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const;

  /// Throws TooLarge above kMaxDenseQubits.
  [[nodiscard]] RealMatrix dense() const;

 private:
  GridSpec grid_;
  Potential potential_;
  double off_diagonal_;
  double norm_bound_;
  int p_;
};

Hamiltonian assemble_hamiltonian(const Potential& potential, const GridSpec& grid);

/// Smallest integer p with 2^(2n+p) >= bound.
int norm_exponent(double bound, int qubits);

template <typename Scalar>
Eigen::Matrix<Scalar, Eigen::Dynamic, 1> Hamiltonian::apply(
    const Eigen::Matrix<Scalar, Eigen::Dynamic, 1>& x) const {
  const Eigen::Index n = grid_.size();
  const double diag0 = -2.0 * off_diagonal_;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    Scalar acc = (diag0 + potential_.values[i]) * x[i];
    if (i > 0) acc += off_diagonal_ * x[i - 1];
    if (i + 1 < n) acc += off_diagonal_ * x[i + 1];
    y[i] = acc;
  }
  return y;
}

}  // namespace qsprep
