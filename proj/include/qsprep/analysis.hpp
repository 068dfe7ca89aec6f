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

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "qsprep/evolution.hpp"
#include "qsprep/filter.hpp"
#include "qsprep/hamiltonian.hpp"
#include "qsprep/spectral.hpp"
#include "qsprep/types.hpp"

namespace qsprep {

/// sin(pi x) and cos(pi x) with exact argument reduction, so values near
/// integer and half-integer x keep full relative accuracy.
double sin_pi(double x);
double cos_pi(double x);

/// Amplitude factor picked up by an eigencomponent of phase phi when the
/// ancilla reads j:
///   g(phi, j) = sin(pi(2 phi - j)) e^{i pi (phi - j/2)} / (2 sin(pi (phi - j/2))),
/// and 1 when 2 phi = j. For j = 0 this equals cos(pi phi) e^{i pi phi}.
Complex g_function(double phi, int j);

struct AttenuationPrediction {
  ComplexVector amplitudes;  // normalized final eigen-overlaps
  double success = 0.0;      // predicted cumulative success probability
};

/// Multiplies d_l by prod_s g(phase_of(lambda_l, 2^s t_base), 0)^k.
AttenuationPrediction predict_amplitudes(const ComplexVector& d, const SpectralData& spec,
                                         const FilterSchedule& schedule);

struct ProbabilityPerturbationReport {
  int trials = 0;
  double eps = 0.0;
  int sqrt_violations = 0;      // |sqrt(P~) - sqrt(P)| > ||Delta||/2
  int prob_violations = 0;      // |P~ - P| >= ||Delta||   (strict bound)
  double max_sqrt_ratio = 0.0;  // max |sqrt(P~) - sqrt(P)| / (||Delta||/2)
  double max_prob_ratio = 0.0;  // max |P~ - P| / ||Delta||
  double max_delta = 0.0;
  double min_delta_over_eps = 0.0;  // ||Delta|| / (eps ||K||), K has unit norm
  double max_delta_over_eps = 0.0;
};

struct StatePerturbationReport {
  int trials = 0;
  double eps = 0.0;
  int violations = 0;               // ||Psi~' - Psi'|| > 2 ||Delta|| / sqrt(P~)
  double max_envelope_ratio = 0.0;  // max deviation / envelope
  double max_deviation = 0.0;
  double mean_deviation = 0.0;
};

/// Randomized check of the single-block probability bounds for
/// U~ = U exp(i eps K), K random real symmetric with ||K|| = 1. Limited to
/// n <= 8. Trial i draws from a generator seeded by mixing `seed` and i.
ProbabilityPerturbationReport verify_probability_perturbation(const Hamiltonian& h, double t, int trials,
                                                              double eps, std::uint64_t seed);
ProbabilityPerturbationReport verify_probability_perturbation(const SpectralData& spec, double t, int trials,
                                                              double eps, std::uint64_t seed);

/// Same trials, comparing the collapsed post-block states.
StatePerturbationReport verify_state_perturbation(const Hamiltonian& h, double t, int trials, double eps,
                                                  std::uint64_t seed);
StatePerturbationReport verify_state_perturbation(const SpectralData& spec, double t, int trials, double eps,
                                                  std::uint64_t seed);

/// Least-squares slope of log(ys) against log(xs).
double loglog_slope(std::span<const double> xs, std::span<const double> ys);

/// Per-block deviations of the split operator from the exact one, both
/// applied to the exact run's state at that block.
struct ErrorBudget {
  double delta_norm = 0.0;  // max over stages of ||U~^(s) - U^(s)||
  std::vector<double> probability_deviations;
  std::vector<double> state_deviations;
  std::vector<double> block_delta;  // ||Delta|| of the block's stage
  double total_deviation = 0.0;     // final-state distance between the two runs
  int probability_violations = 0;   // blocks with |P~ - P| > ||Delta_s||
};

struct TotalErrorConfig {
  TargetFunction target;
  InitialApproximation init;
  FilterSchedule schedule;
  EvolutionMode evolution = EvolutionMode::Split;
  int order = 4;
  double step_phase = 1.0;
};

struct TotalErrorReport {
  ErrorBudget budget;
  std::vector<double> stage_defects;
  double envelope = 0.0;  // 2 (s_max+1) k max_s defect_s
  double exact_fidelity = 0.0;
  double compared_fidelity = 0.0;
  double exact_success = 0.0;
  double compared_success = 0.0;
  bool within_envelope = false;
};

/// Runs the filter with exact evolution and with `config.evolution`
/// (postselect), then compares final states against the linear error
/// accumulation envelope. Limited to n <= 8.
TotalErrorReport total_error_experiment(const TotalErrorConfig& config);

std::string to_json(const ProbabilityPerturbationReport& r);
std::string to_json(const StatePerturbationReport& r);
std::string to_json(const TotalErrorReport& r);

/// Deterministic per-trial seed derivation (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

}  // namespace qsprep
