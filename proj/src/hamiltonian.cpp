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

#include "qsprep/hamiltonian.hpp"

#include <cmath>
#include <numbers>
#include <utility>

#include "qsprep/error.hpp"

namespace qsprep {

Potential build_potential(const TargetFunction& target) {
  const RealVector& psi = target.samples;
  const Eigen::Index n = psi.size();
  const double h = target.grid.spacing();
  const double inv_h2 = 1.0 / (h * h);
  Potential v;
  v.values.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(psi[i] > 0.0)) {
      throw Error(Errc::NonPositiveSample, "potential needs psi > 0 at node " + std::to_string(i + 1));
    }
    const double left = i > 0 ? psi[i - 1] : 0.0;
    const double right = i + 1 < n ? psi[i + 1] : 0.0;
    // Ratios first: keeps the stencil well scaled when psi spans many decades.
    v.values[i] = ((left / psi[i] - 1.0) + (right / psi[i] - 1.0)) * inv_h2;
  }
  v.max_abs = v.values.cwiseAbs().maxCoeff();
  return v;
}

RealVector kinetic_eigenvalues(const GridSpec& grid) {
  const Eigen::Index n = grid.size();
  const double h = grid.spacing();
  RealVector mu(n);
  for (Eigen::Index k = 1; k <= n; ++k) {
    // 2 - 2cos(a) = 4 sin^2(a/2), accurate for small a.
    const double s = std::sin(0.5 * static_cast<double>(k) * std::numbers::pi * h);
    mu[k - 1] = 4.0 * s * s / (h * h);
  }
  return mu;
}

int norm_exponent(double bound, int qubits) {
  if (!(bound > 0.0) || !std::isfinite(bound)) {
    throw Error(Errc::InvalidArgument, "norm bound must be positive and finite");
  }
  int e = 0;
  const double mantissa = std::frexp(bound, &e);  // bound = mantissa * 2^e, mantissa in [0.5, 1)
  const int ceil_log2 = mantissa == 0.5 ? e - 1 : e;
  return ceil_log2 - 2 * qubits;
}

Hamiltonian::Hamiltonian(GridSpec grid, Potential potential)
    : grid_(std::move(grid)), potential_(std::move(potential)) {
  if (potential_.values.size() != grid_.size()) {
    throw Error(Errc::InvalidArgument, "potential length does not match grid");
  }
  const double h = grid_.spacing();
  off_diagonal_ = -1.0 / (h * h);
  norm_bound_ = kinetic_eigenvalues(grid_)[grid_.size() - 1] + potential_.max_abs;
  p_ = norm_exponent(norm_bound_, grid_.qubits());
}

RealVector Hamiltonian::diagonal() const {
  return potential_.values.array() - 2.0 * off_diagonal_;
}

RealMatrix Hamiltonian::dense() const {
  if (grid_.qubits() > kMaxDenseQubits) {
    throw Error(Errc::TooLarge, "dense Hamiltonian limited to n <= " + std::to_string(kMaxDenseQubits));
  }
  const Eigen::Index n = grid_.size();
  RealMatrix m = RealMatrix::Zero(n, n);
  m.diagonal() = diagonal();
  m.diagonal(1).setConstant(off_diagonal_);
  m.diagonal(-1).setConstant(off_diagonal_);
  return m;
}

Hamiltonian assemble_hamiltonian(const Potential& potential, const GridSpec& grid) {
  return Hamiltonian(grid, potential);
}

}  // namespace qsprep
