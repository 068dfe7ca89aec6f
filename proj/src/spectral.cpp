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

#include "qsprep/spectral.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/Eigenvalues>

#include "qsprep/error.hpp"

namespace qsprep {

SpectralData diagonalize(const Hamiltonian& h) {
  if (h.grid().qubits() > kMaxDenseQubits) {
    throw Error(Errc::TooLarge, "dense diagonalization limited to n <= " + std::to_string(kMaxDenseQubits));
  }
  const Eigen::Index n = h.grid().size();
  const RealVector diag = h.diagonal();
  const RealVector sub = RealVector::Constant(n - 1, h.off_diagonal());
  Eigen::SelfAdjointEigenSolver<RealMatrix> solver;
  solver.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw Error(Errc::InvalidArgument, "tridiagonal eigensolver did not converge");
  }
  SpectralData spec;
  spec.eigenvalues = solver.eigenvalues();
  spec.eigenvectors = solver.eigenvectors();
  for (Eigen::Index l = 0; l < n; ++l) {
    Eigen::Index at = 0;
    spec.eigenvectors.col(l).cwiseAbs().maxCoeff(&at);
    if (spec.eigenvectors(at, l) < 0.0) spec.eigenvectors.col(l) *= -1.0;
  }
  spec.gap = spec.eigenvalues.tail(n - 1).minCoeff();
  return spec;
}

namespace {

// W^T x and W x for real W and complex x without materializing a complex W.
ComplexVector real_transpose_times(const RealMatrix& w, const ComplexVector& x) {
  ComplexVector y(w.cols());
  y.real() = w.transpose() * x.real();
  y.imag() = w.transpose() * x.imag();
  return y;
}

ComplexVector real_times(const RealMatrix& w, const ComplexVector& x) {
  ComplexVector y(w.rows());
  y.real() = w * x.real();
  y.imag() = w * x.imag();
  return y;
}

}  // namespace

void require_unit_norm(const ComplexVector& v, const char* what) {
  const double norm = v.norm();
  if (!(std::abs(norm - 1.0) <= kNormTolerance)) {
    throw Error(Errc::NotNormalized, std::string(what) + " has norm " + std::to_string(norm));
  }
}

ComplexVector eigen_overlaps(const SpectralData& spec, const ComplexVector& state) {
  if (state.size() != spec.size()) throw Error(Errc::InvalidArgument, "state length does not match spectrum");
  require_unit_norm(state, "state");
  return real_transpose_times(spec.eigenvectors, state);
}

double phase_of(double lambda, double t) {
  const double turns = lambda * t / (2.0 * std::numbers::pi);
  double frac = turns - std::floor(turns);
  // floor can leave exactly 1.0 after rounding of tiny negative inputs.
  if (frac >= 1.0) frac = 0.0;
  return frac;
}

ComplexVector apply_exact_U(const SpectralData& spec, double t, const ComplexVector& state) {
  if (state.size() != spec.size()) throw Error(Errc::InvalidArgument, "state length does not match spectrum");
  ComplexVector d = real_transpose_times(spec.eigenvectors, state);
  for (Eigen::Index l = 0; l < d.size(); ++l) d[l] *= std::polar(1.0, spec.eigenvalues[l] * t);
  return real_times(spec.eigenvectors, d);
}

ComplexMatrix exact_U_matrix(const SpectralData& spec, double t) {
  const Eigen::Index n = spec.size();
  ComplexVector phases(n);
  for (Eigen::Index l = 0; l < n; ++l) phases[l] = std::polar(1.0, spec.eigenvalues[l] * t);
  const ComplexMatrix w = spec.eigenvectors.cast<Complex>();
  return w * phases.asDiagonal() * w.transpose();
}

}  // namespace qsprep
