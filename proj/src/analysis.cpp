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

#include "qsprep/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "json.hpp"
#include "qsprep/error.hpp"

namespace qsprep {

using nlohmann::json;

double sin_pi(double x) {
  double sign = 1.0;
  if (x < 0.0) {
    x = -x;
    sign = -1.0;
  }
  double r = std::fmod(x, 2.0);
  if (r >= 1.0) {
    r -= 1.0;
    sign = -sign;
  }
  if (r > 0.5) r = 1.0 - r;
  if (r == 0.0) return 0.0;
  return sign * std::sin(std::numbers::pi * r);
}

double cos_pi(double x) {
  double r = std::fmod(std::abs(x), 2.0);
  double sign = 1.0;
  if (r >= 1.0) {
    r -= 1.0;
    sign = -1.0;
  }
  if (r <= 0.25) return sign * std::cos(std::numbers::pi * r);
  if (r <= 0.75) return sign * std::sin(std::numbers::pi * (0.5 - r));
  return -sign * std::cos(std::numbers::pi * (1.0 - r));
}

Complex g_function(double phi, int j) {
  if (j != 0 && j != 1) throw Error(Errc::InvalidArgument, "g_function: j must be 0 or 1");
  // sin(2 pi h) / (2 sin(pi h)) = cos(pi h) with h = phi - j/2.
  const double half = phi - 0.5 * j;
  const double magnitude = cos_pi(half);
  return magnitude * Complex(cos_pi(half), sin_pi(half));
}

AttenuationPrediction predict_amplitudes(const ComplexVector& d, const SpectralData& spec,
                                         const FilterSchedule& schedule) {
  if (d.size() != spec.size()) throw Error(Errc::InvalidArgument, "overlap vector length does not match spectrum");
  require_unit_norm(d, "overlap vector");
  ComplexVector raw = d;
  for (Eigen::Index l = 0; l < d.size(); ++l) {
    Complex factor{1.0, 0.0};
    for (int s = 0; s <= schedule.s_max; ++s) {
      const Complex g = g_function(phase_of(spec.eigenvalues[l], schedule.duration(s)), 0);
      for (int q = 0; q < schedule.k; ++q) factor *= g;
    }
    raw[l] *= factor;
  }
  AttenuationPrediction out;
  out.success = raw.squaredNorm();
  out.amplitudes = raw / std::sqrt(out.success);
  return out;
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
  std::uint64_t z = master + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

namespace {

void require_perturbation_size(Eigen::Index n) {
  if (n > (Eigen::Index{1} << kMaxDefectQubits)) {
    throw Error(Errc::TooLarge, "perturbation checks limited to n <= " + std::to_string(kMaxDefectQubits));
  }
}

struct Trial {
  ComplexMatrix delta;  // U~ - U = U (exp(i eps K) - I)
  double delta_norm;
  ComplexVector psi;
};

// exp(i theta) - 1 without cancellation.
Complex expm1_i(double theta) {
  const double s = std::sin(0.5 * theta);
  return {-2.0 * s * s, std::sin(theta)};
}

Trial make_trial(const ComplexMatrix& u, double eps, std::uint64_t seed) {
  const Eigen::Index n = u.rows();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  RealMatrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  }
  const RealMatrix k = 0.5 * (a + a.transpose());
  Eigen::SelfAdjointEigenSolver<RealMatrix> eig(k);
  const double scale = eig.eigenvalues().cwiseAbs().maxCoeff();
  ComplexVector shifted(n);
  for (Eigen::Index i = 0; i < n; ++i) shifted[i] = expm1_i(eps * eig.eigenvalues()[i] / scale);
  const ComplexMatrix q = eig.eigenvectors().cast<Complex>();
  Trial trial;
  trial.delta = u * (q * shifted.asDiagonal() * q.transpose());
  trial.delta_norm = eps == 0.0 ? 0.0 : operator_norm(trial.delta);
  trial.psi.resize(n);
  for (auto& z : trial.psi) z = Complex(normal(rng), normal(rng));
  trial.psi.normalize();
  return trial;
}

}  // namespace

ProbabilityPerturbationReport verify_probability_perturbation(const SpectralData& spec, double t, int trials,
                                                              double eps, std::uint64_t seed) {
  require_perturbation_size(spec.size());
  const ComplexMatrix u = exact_U_matrix(spec, t);
  ProbabilityPerturbationReport r;
  r.trials = trials;
  r.eps = eps;
  r.min_delta_over_eps = std::numeric_limits<double>::infinity();
  for (int i = 0; i < trials; ++i) {
    const Trial trial = make_trial(u, eps, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const ComplexVector up = u * trial.psi;
    const ComplexVector plus = trial.psi + up;
    const ComplexVector plus_tilde = plus + trial.delta * trial.psi;
    const double sqrt_p = 0.5 * plus.norm();
    const double sqrt_pt = 0.5 * plus_tilde.norm();
    const double dsqrt = std::abs(sqrt_pt - sqrt_p);
    const double dp = std::abs(sqrt_pt * sqrt_pt - sqrt_p * sqrt_p);
    const double dn = trial.delta_norm;
    if (dsqrt > 0.5 * dn) ++r.sqrt_violations;
    if (dn > 0.0 ? dp >= dn : dp > 0.0) ++r.prob_violations;
    if (dn > 0.0) {
      r.max_sqrt_ratio = std::max(r.max_sqrt_ratio, dsqrt / (0.5 * dn));
      r.max_prob_ratio = std::max(r.max_prob_ratio, dp / dn);
    }
    r.max_delta = std::max(r.max_delta, dn);
    if (eps > 0.0) {
      r.min_delta_over_eps = std::min(r.min_delta_over_eps, dn / eps);
      r.max_delta_over_eps = std::max(r.max_delta_over_eps, dn / eps);
    }
  }
  if (!(eps > 0.0) || trials == 0) r.min_delta_over_eps = 0.0;
  return r;
}

ProbabilityPerturbationReport verify_probability_perturbation(const Hamiltonian& h, double t, int trials,
                                                              double eps, std::uint64_t seed) {
  require_perturbation_size(h.grid().size());
  return verify_probability_perturbation(diagonalize(h), t, trials, eps, seed);
}

StatePerturbationReport verify_state_perturbation(const SpectralData& spec, double t, int trials, double eps,
                                                  std::uint64_t seed) {
  require_perturbation_size(spec.size());
  const ComplexMatrix u = exact_U_matrix(spec, t);
  StatePerturbationReport r;
  r.trials = trials;
  r.eps = eps;
  double sum = 0.0;
  for (int i = 0; i < trials; ++i) {
    const Trial trial = make_trial(u, eps, derive_seed(seed, static_cast<std::uint64_t>(i)));
    const ComplexVector plus = trial.psi + u * trial.psi;
    const ComplexVector plus_tilde = plus + trial.delta * trial.psi;
    const double sqrt_p = 0.5 * plus.norm();
    const double sqrt_pt = 0.5 * plus_tilde.norm();
    const ComplexVector collapsed = plus / (2.0 * sqrt_p);
    const ComplexVector collapsed_tilde = plus_tilde / (2.0 * sqrt_pt);
    const double dev = (collapsed_tilde - collapsed).norm();
    const double envelope = 2.0 * trial.delta_norm / sqrt_pt;
    if (dev > envelope) ++r.violations;
    if (envelope > 0.0) r.max_envelope_ratio = std::max(r.max_envelope_ratio, dev / envelope);
    r.max_deviation = std::max(r.max_deviation, dev);
    sum += dev;
  }
  r.mean_deviation = trials > 0 ? sum / trials : 0.0;
  return r;
}

StatePerturbationReport verify_state_perturbation(const Hamiltonian& h, double t, int trials, double eps,
                                                  std::uint64_t seed) {
  require_perturbation_size(h.grid().size());
  return verify_state_perturbation(diagonalize(h), t, trials, eps, seed);
}

double loglog_slope(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size() || xs.size() < 2) throw Error(Errc::InvalidArgument, "slope needs >= 2 paired points");
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double lx = std::log(xs[i]);
    const double ly = std::log(ys[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

TotalErrorReport total_error_experiment(const TotalErrorConfig& config) {
  const TargetFunction& target = config.target;
  if (target.grid.qubits() > kMaxDefectQubits) {
    throw Error(Errc::TooLarge, "total error experiment limited to n <= " + std::to_string(kMaxDefectQubits));
  }
  const Hamiltonian h = assemble_hamiltonian(build_potential(target), target.grid);
  auto spec = std::make_shared<const SpectralData>(diagonalize(h));
  const InitialState init = initial_approximation(target, *spec, config.init);
  const FilterSchedule& sched = config.schedule;

  const Propagator exact = Propagator::exact(spec);
  const Propagator compared = config.evolution == EvolutionMode::Exact
                                  ? exact
                                  : Propagator::split(h, make_splitting(config.order), config.step_phase);

  TotalErrorReport report;
  for (int s = 0; s <= sched.s_max; ++s) {
    const EvolutionOperator op = compared.at(sched.t_base, s);
    report.stage_defects.push_back(op.mode == EvolutionMode::Exact ? 0.0 : block_defect(op, h, *spec));
  }
  const double max_defect = *std::max_element(report.stage_defects.begin(), report.stage_defects.end());
  report.envelope = 2.0 * (sched.s_max + 1) * sched.k * max_defect;

  const Measurement post{MeasureMode::PostSelect, 0};
  const FilterResult exact_run = run_filter(init.state, sched, exact, post, target.samples, spec.get());
  const FilterResult compared_run = run_filter(init.state, sched, compared, post, target.samples, spec.get());

  ErrorBudget& budget = report.budget;
  budget.delta_norm = max_defect;
  ComplexVector psi = init.state.amplitudes;
  for (int s = 0; s <= sched.s_max; ++s) {
    const EvolutionOperator op_exact = exact.at(sched.t_base, s);
    const EvolutionOperator op_cmp = compared.at(sched.t_base, s);
    for (int q = 1; q <= sched.k; ++q) {
      const ComplexVector plus = 0.5 * (psi + exact.apply(op_exact, psi));
      const ComplexVector plus_tilde = 0.5 * (psi + compared.apply(op_cmp, psi));
      const double p = plus.squaredNorm();
      const double pt = plus_tilde.squaredNorm();
      const ComplexVector next = plus / std::sqrt(p);
      budget.probability_deviations.push_back(std::abs(pt - p));
      budget.state_deviations.push_back((plus_tilde / std::sqrt(pt) - next).norm());
      budget.block_delta.push_back(report.stage_defects[static_cast<std::size_t>(s)]);
      if (std::abs(pt - p) > report.stage_defects[static_cast<std::size_t>(s)]) ++budget.probability_violations;
      psi = next;
    }
  }
  budget.total_deviation = (compared_run.state.amplitudes - exact_run.state.amplitudes).norm();

  report.exact_fidelity = exact_run.ledger.final_fidelity;
  report.compared_fidelity = compared_run.ledger.final_fidelity;
  report.exact_success = exact_run.ledger.cumulative_success;
  report.compared_success = compared_run.ledger.cumulative_success;
  report.within_envelope = budget.total_deviation <= report.envelope;
  return report;
}

std::string to_json(const ProbabilityPerturbationReport& r) {
  return json{{"trials", r.trials},
              {"eps", r.eps},
              {"sqrt_violations", r.sqrt_violations},
              {"prob_violations", r.prob_violations},
              {"max_sqrt_ratio", r.max_sqrt_ratio},
              {"max_prob_ratio", r.max_prob_ratio},
              {"max_delta", r.max_delta},
              {"min_delta_over_eps", r.min_delta_over_eps},
              {"max_delta_over_eps", r.max_delta_over_eps}}
      .dump();
}

std::string to_json(const StatePerturbationReport& r) {
  return json{{"trials", r.trials},
              {"eps", r.eps},
              {"violations", r.violations},
              {"max_envelope_ratio", r.max_envelope_ratio},
              {"max_deviation", r.max_deviation},
              {"mean_deviation", r.mean_deviation}}
      .dump();
}

std::string to_json(const TotalErrorReport& r) {
  const auto max_of = [](const std::vector<double>& v) {
    return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  };
  return json{{"total_deviation", r.budget.total_deviation},
              {"envelope", r.envelope},
              {"within_envelope", r.within_envelope},
              {"delta_norm", r.budget.delta_norm},
              {"stage_defects", r.stage_defects},
              {"max_probability_deviation", max_of(r.budget.probability_deviations)},
              {"max_state_deviation", max_of(r.budget.state_deviations)},
              {"probability_violations", r.budget.probability_violations},
              {"exact_fidelity", r.exact_fidelity},
              {"compared_fidelity", r.compared_fidelity},
              {"exact_success", r.exact_success},
              {"compared_success", r.compared_success}}
      .dump();
}

}  // namespace qsprep
