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

#include "qsprep/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <utility>

#include <Eigen/SVD>

#include "qsprep/error.hpp"
#include "qsprep/sine_transform.hpp"

namespace qsprep {

double SplittingScheme::total_weight(Generator g) const {
  double sum = 0.0;
  for (const auto& st : stages) {
    if (st.generator == g) sum += st.weight;
  }
  return sum;
}

bool SplittingScheme::is_palindromic(double tol) const {
  for (std::size_t i = 0, j = stages.size(); i < j--; ++i) {
    if (stages[i].generator != stages[j].generator) return false;
    if (std::abs(stages[i].weight - stages[j].weight) > tol) return false;
  }
  return true;
}

TripleJump triple_jump_coefficients() {
  const double cbrt2 = std::cbrt(2.0);
  return {1.0 / (2.0 - cbrt2), -cbrt2 / (2.0 - cbrt2)};
}

namespace {

void push_merged(std::vector<SplittingStage>& stages, SplittingStage st) {
  if (!stages.empty() && stages.back().generator == st.generator) {
    stages.back().weight += st.weight;
  } else {
    stages.push_back(st);
  }
}

void push_strang(std::vector<SplittingStage>& stages, double w) {
  push_merged(stages, {Generator::Potential, 0.5 * w});
  push_merged(stages, {Generator::Kinetic, w});
  push_merged(stages, {Generator::Potential, 0.5 * w});
}

}  // namespace

SplittingScheme make_splitting(int order) {
  SplittingScheme scheme;
  scheme.order = order;
  switch (order) {
    case 1:
      scheme.stages = {{Generator::Potential, 1.0}, {Generator::Kinetic, 1.0}};
      break;
    case 2:
      push_strang(scheme.stages, 1.0);
      break;
    case 4: {
      const auto [outer, inner] = triple_jump_coefficients();
      push_strang(scheme.stages, outer);
      push_strang(scheme.stages, inner);
      push_strang(scheme.stages, outer);
      break;
    }
    default:
      throw Error(Errc::UnsupportedOrder, "splitting order must be 1, 2 or 4, got " + std::to_string(order));
  }
  return scheme;
}

double EvolutionOperator::duration() const { return std::ldexp(t_step, stage); }

ComplexVector apply_potential_phase(const Potential& v, double tau, const ComplexVector& state) {
  if (state.size() != v.values.size()) throw Error(Errc::InvalidArgument, "state length does not match potential");
  ComplexVector out(state.size());
  for (Eigen::Index i = 0; i < state.size(); ++i) out[i] = std::polar(1.0, v.values[i] * tau) * state[i];
  return out;
}

namespace {

// Product-formula application with the kinetic spectrum computed once.
class SplitKernel {
 public:
  explicit SplitKernel(const Hamiltonian& h) : h_(h), mu_(kinetic_eigenvalues(h.grid())) {}

  // Stage phase factors are shared by all substeps, so build them once.
  void product(const SplittingScheme& scheme, double tau, int substeps, ComplexVector& x) const {
    const double sub_tau = tau / substeps;
    const Eigen::Index n = x.size();
    const RealVector& v = h_.potential().values;
    std::vector<ComplexVector> factors;
    factors.reserve(scheme.stages.size());
    for (const auto& st : scheme.stages) {
      const RealVector& rate = st.generator == Generator::Kinetic ? mu_ : v;
      ComplexVector f(n);
      for (Eigen::Index i = 0; i < n; ++i) f[i] = std::polar(1.0, rate[i] * st.weight * sub_tau);
      factors.push_back(std::move(f));
    }
    for (int r = 0; r < substeps; ++r) {
      for (std::size_t j = 0; j < factors.size(); ++j) {
        if (scheme.stages[j].generator == Generator::Kinetic) {
          sine_transform_inplace(x);
          x.array() *= factors[j].array();
          sine_transform_inplace(x);
        } else {
          x.array() *= factors[j].array();
        }
      }
    }
  }

 private:
  const Hamiltonian& h_;
  RealVector mu_;
};

void require_split(const EvolutionOperator& op) {
  if (op.mode != EvolutionMode::Split) throw Error(Errc::InvalidArgument, "operator is not in split mode");
  if (op.substeps < 1) throw Error(Errc::InvalidArgument, "substeps must be >= 1");
}

void require_defect_size(const Hamiltonian& h) {
  if (h.grid().qubits() > kMaxDefectQubits) {
    throw Error(Errc::TooLarge, "dense defect limited to n <= " + std::to_string(kMaxDefectQubits));
  }
}

ComplexMatrix matrix_power(ComplexMatrix base, int exponent) {
  ComplexMatrix result = ComplexMatrix::Identity(base.rows(), base.cols());
  while (exponent > 0) {
    if (exponent & 1) result = result * base;
    exponent >>= 1;
    if (exponent > 0) base = base * base;
  }
  return result;
}

}  // namespace

ComplexVector apply_kinetic_phase(const GridSpec& grid, double tau, const ComplexVector& state) {
  if (state.size() != grid.size()) throw Error(Errc::InvalidArgument, "state length does not match grid");
  const RealVector mu = kinetic_eigenvalues(grid);
  ComplexVector x = state;
  sine_transform_inplace(x);
  for (Eigen::Index k = 0; k < x.size(); ++k) x[k] *= std::polar(1.0, mu[k] * tau);
  sine_transform_inplace(x);
  return x;
}

ComplexVector apply_split_U(const EvolutionOperator& op, const Hamiltonian& h, const ComplexVector& state) {
  require_split(op);
  if (state.size() != h.grid().size()) throw Error(Errc::InvalidArgument, "state length does not match grid");
  ComplexVector x = state;
  SplitKernel(h).product(op.scheme, op.duration(), op.substeps, x);
  return x;
}

ComplexMatrix split_U_matrix(const EvolutionOperator& op, const Hamiltonian& h) {
  require_split(op);
  require_defect_size(h);
  const Eigen::Index n = h.grid().size();
  const SplitKernel kernel(h);
  ComplexMatrix single(n, n);
  ComplexVector col(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    col.setZero();
    col[j] = 1.0;
    kernel.product(op.scheme, op.duration() / op.substeps, 1, col);
    single.col(j) = col;
  }
  return matrix_power(std::move(single), op.substeps);
}

double operator_norm(const ComplexMatrix& m) {
  Eigen::JacobiSVD<ComplexMatrix> svd(m);
  return svd.singularValues()(0);
}

double splitting_defect(const SplittingScheme& scheme, const Hamiltonian& h, const SpectralData& spec,
                        double duration) {
  EvolutionOperator op{EvolutionMode::Split, scheme, duration, 0, 1};
  return block_defect(op, h, spec);
}

double splitting_defect(const SplittingScheme& scheme, const Hamiltonian& h, double duration) {
  require_defect_size(h);
  return splitting_defect(scheme, h, diagonalize(h), duration);
}

double block_defect(const EvolutionOperator& op, const Hamiltonian& h, const SpectralData& spec) {
  if (op.duration() == 0.0) return 0.0;
  return operator_norm(split_U_matrix(op, h) - exact_U_matrix(spec, op.duration()));
}

Propagator Propagator::exact(std::shared_ptr<const SpectralData> spec) {
  if (!spec) throw Error(Errc::InvalidArgument, "exact propagator needs spectral data");
  Propagator p;
  p.mode_ = EvolutionMode::Exact;
  p.spec_ = std::move(spec);
  return p;
}

Propagator Propagator::split(Hamiltonian h, SplittingScheme scheme, double step_phase) {
  Propagator p;
  p.mode_ = EvolutionMode::Split;
  p.h_ = std::make_shared<const Hamiltonian>(std::move(h));
  p.scheme_ = std::move(scheme);
  p.step_phase_ = step_phase;
  return p;
}

Eigen::Index Propagator::size() const noexcept {
  return mode_ == EvolutionMode::Exact ? spec_->size() : h_->grid().size();
}

EvolutionOperator Propagator::at(double t_step, int stage) const {
  EvolutionOperator op;
  op.mode = mode_;
  op.t_step = t_step;
  op.stage = stage;
  if (mode_ == EvolutionMode::Split) {
    op.scheme = scheme_;
    if (step_phase_ > 0.0 && std::isfinite(step_phase_)) {
      const double want = std::ceil(op.duration() * h_->norm_bound() / step_phase_);
      if (want > static_cast<double>(std::numeric_limits<int>::max())) {
        throw Error(Errc::TooLarge, "substep count overflows");
      }
      op.substeps = std::max(1, static_cast<int>(want));
    }
  }
  return op;
}

ComplexVector Propagator::apply(const EvolutionOperator& op, const ComplexVector& state) const {
  if (op.mode == EvolutionMode::Exact) {
    if (!spec_) throw Error(Errc::InvalidArgument, "exact operator on a split propagator");
    return apply_exact_U(*spec_, op.duration(), state);
  }
  if (!h_) throw Error(Errc::InvalidArgument, "split operator on an exact propagator");
  return apply_split_U(op, *h_, state);
}

}  // namespace qsprep
