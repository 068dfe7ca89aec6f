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

#include <memory>
#include <vector>

#include "qsprep/hamiltonian.hpp"
#include "qsprep/spectral.hpp"
#include "qsprep/types.hpp"

namespace qsprep {

enum class Generator { Kinetic, Potential };

struct SplittingStage {
  Generator generator;
  double weight;

  friend bool operator==(const SplittingStage&, const SplittingStage&) = default;
};

/// Ordered product of exp(i w_j G_j tau); stages[0] acts first.
struct SplittingScheme {
  int order = 2;
  std::vector<SplittingStage> stages;

  [[nodiscard]] double total_weight(Generator g) const;
  [[nodiscard]] bool is_palindromic(double tol = 1e-15) const;
};

/// m = 1: V then T.  m = 2: Strang (V/2, T, V/2).  m = 4: triple-jump
/// composition of Strang steps with coefficients 1/(2 - 2^{1/3}) and
/// -2^{1/3}/(2 - 2^{1/3}); adjacent potential half-steps are merged.
SplittingScheme make_splitting(int order);

/// Triple-jump coefficients (outer, inner) used by the order-4 scheme.
struct TripleJump {
  double outer;
  double inner;
};
TripleJump triple_jump_coefficients();

enum class EvolutionMode { Exact, Split };

/// U^(s) = exp(i H 2^s t_step). In split mode the product formula is
/// applied `substeps` times with duration/substeps each.
struct EvolutionOperator {
  EvolutionMode mode = EvolutionMode::Exact;
  SplittingScheme scheme;
  double t_step = 0.0;
  int stage = 0;
  int substeps = 1;

  [[nodiscard]] double duration() const;
};

/// Entrywise exp(i V_j tau).
ComplexVector apply_potential_phase(const Potential& v, double tau, const ComplexVector& state);

/// exp(i T tau) applied exactly in the sine eigenbasis of T.
ComplexVector apply_kinetic_phase(const GridSpec& grid, double tau, const ComplexVector& state);

/// Applies the splitting product of `op` (split mode only).
ComplexVector apply_split_U(const EvolutionOperator& op, const Hamiltonian& h, const ComplexVector& state);

/// Dense matrix of the split operator (all substeps). Limited to n <= 8.
ComplexMatrix split_U_matrix(const EvolutionOperator& op, const Hamiltonian& h);

/// Largest singular value of a dense matrix.
double operator_norm(const ComplexMatrix& m);

/// || product formula - exp(i H duration) ||_2 for a single product.
double splitting_defect(const SplittingScheme& scheme, const Hamiltonian& h, double duration);
double splitting_defect(const SplittingScheme& scheme, const Hamiltonian& h, const SpectralData& spec,
                        double duration);

/// || U_split(op) - exp(i H op.duration()) ||_2, including substeps.
double block_defect(const EvolutionOperator& op, const Hamiltonian& h, const SpectralData& spec);

inline constexpr int kMaxDefectQubits = 8;

/// Binds an evolution mode to the data it needs and hands out the
/// per-stage operators used by the filter.
class Propagator {
 public:
  static Propagator exact(std::shared_ptr<const SpectralData> spec);
  /// step_phase bounds duration * norm_bound per substep; a non-positive
  /// or infinite value keeps a single product per block.
  static Propagator split(Hamiltonian h, SplittingScheme scheme, double step_phase = 1.0);

  [[nodiscard]] EvolutionMode mode() const noexcept { return mode_; }
  [[nodiscard]] EvolutionOperator at(double t_step, int stage) const;
  [[nodiscard]] ComplexVector apply(const EvolutionOperator& op, const ComplexVector& state) const;
  [[nodiscard]] Eigen::Index size() const noexcept;
  [[nodiscard]] const SpectralData* spectral() const noexcept { return spec_.get(); }
  [[nodiscard]] const Hamiltonian* hamiltonian() const noexcept { return h_.get(); }

 private:
  EvolutionMode mode_ = EvolutionMode::Exact;
  std::shared_ptr<const SpectralData> spec_;
  std::shared_ptr<const Hamiltonian> h_;
  SplittingScheme scheme_;
  double step_phase_ = 0.0;
};

}  // namespace qsprep
