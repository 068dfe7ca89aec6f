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

#include "qsprep/hamiltonian.hpp"
#include "qsprep/types.hpp"

namespace qsprep {

/// Full eigendecomposition of a Hamiltonian. Eigenvalues ascend; each
/// eigenvector's largest-magnitude entry is positive.
struct SpectralData {
  RealVector eigenvalues;
  RealMatrix eigenvectors;  // column l is psi_l
  double gap = 0.0;         // min over l != 0 of lambda_l

  [[nodiscard]] Eigen::Index size() const noexcept { return eigenvalues.size(); }
  [[nodiscard]] auto ground_state() const { return eigenvectors.col(0); }
};

/// Throws TooLarge for n > kMaxDenseQubits.
SpectralData diagonalize(const Hamiltonian& h);

/// d_l = <psi_l | state>. Throws NotNormalized unless ||state|| = 1.
ComplexVector eigen_overlaps(const SpectralData& spec, const ComplexVector& state);

/// Fractional part of lambda t / (2 pi), in [0, 1).
double phase_of(double lambda, double t);

/// sum_l exp(i lambda_l t) d_l psi_l.
ComplexVector apply_exact_U(const SpectralData& spec, double t, const ComplexVector& state);

/// Dense exp(i H t) from the eigendecomposition.
ComplexMatrix exact_U_matrix(const SpectralData& spec, double t);

/// Tolerance used for the unit-norm preconditions throughout the library.
inline constexpr double kNormTolerance = 1e-9;

void require_unit_norm(const ComplexVector& v, const char* what);

}  // namespace qsprep
