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
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "qsprep/evolution.hpp"
#include "qsprep/grid.hpp"
#include "qsprep/spectral.hpp"
#include "qsprep/types.hpp"

namespace qsprep {

/// System-register amplitudes; the ancilla is never stored.
struct SimState {
  ComplexVector amplitudes;

  static SimState from_real(const RealVector& v) { return SimState{v.cast<Complex>()}; }
  [[nodiscard]] Eigen::Index size() const noexcept { return amplitudes.size(); }
};

enum class ScheduleMode { Basic, Refined };

/// Stage s = 0..s_max uses U^(s) = exp(i H 2^s t_base), repeated k times.
struct FilterSchedule {
  int k = 1;
  int s_max = 0;
  double t_base = 0.0;
  double B = 1.0;
  ScheduleMode mode = ScheduleMode::Basic;

  [[nodiscard]] int blocks() const noexcept { return k * (s_max + 1); }
  [[nodiscard]] double duration(int stage) const;
};

/// t = 2^-(2n+p), stages 0..2n+p, k = 2n.
FilterSchedule basic_schedule(int n, int p, std::optional<int> k = std::nullopt,
                              std::optional<int> s_max = std::nullopt);

/// t = 1/(B 2^(n+p)), k = -ceil(n / log2(pi/(4B))), stages run until the
/// duration first reaches 1 (s_max = n + p + ceil(log2 B)). Requires B >= 1.
FilterSchedule refined_schedule(int n, int p, double B, std::optional<int> k = std::nullopt,
                                std::optional<int> s_max = std::nullopt);

int refined_repetitions(int n, double B);

enum class MeasureMode { PostSelect, Sample };

struct Measurement {
  MeasureMode mode = MeasureMode::PostSelect;
  std::uint64_t seed = 0;
};

struct InitialApproximation {
  enum class Kind { Exact, Coarse, Noisy };
  Kind kind = Kind::Exact;
  int level = 0;         // coarse: 2^level sample points
  double epsilon = 0.0;  // noisy: relative perturbation size
  std::uint64_t seed = 0;

  static InitialApproximation exact() { return {}; }
  static InitialApproximation coarse(int level) { return {Kind::Coarse, level, 0.0, 0}; }
  static InitialApproximation noisy(double epsilon, std::uint64_t seed) { return {Kind::Noisy, 0, epsilon, seed}; }
};

struct InitialState {
  SimState state;
  double ground_overlap_sq = 0.0;  // |d_0|^2
};

/// Builds the starting state without checking the overlap precondition.
SimState make_initial_state(const TargetFunction& target, const InitialApproximation& kind);

/// Throws OverlapTooSmall when |d_0|^2 <= 1/2.
InitialState initial_approximation(const TargetFunction& target, const SpectralData& spec,
                                   const InitialApproximation& kind);

struct BlockResult {
  SimState state;
  int outcome = 0;
  double probability = 0.0;  // probability of the returned outcome
  double p0 = 0.0;           // probability of outcome 0
};

/// One Hadamard / controlled-U / Hadamard block followed by an ancilla
/// measurement. Outcome b leaves (I + (-1)^b U) psi / 2, renormalized.
/// `rng` is required in sample mode.
BlockResult filter_block(const SimState& state, const Propagator& propagator, const EvolutionOperator& op,
                         MeasureMode measure, std::mt19937_64* rng = nullptr);

struct BlockRecord {
  int s = 0;
  int q = 0;
  double p0 = 0.0;
  int outcome = 0;
  double cum_success = 1.0;
  double fidelity = 0.0;

  friend bool operator==(const BlockRecord&, const BlockRecord&) = default;
};

enum class RunStatus { Completed, Aborted };

struct RunLedger {
  std::vector<BlockRecord> blocks;
  double cumulative_success = 1.0;
  double final_fidelity = 0.0;
  RunStatus status = RunStatus::Completed;
};

struct FilterResult {
  SimState state;
  RunLedger ledger;
};

/// Runs the staged schedule. Fidelity is tracked against `reference`
/// (unit norm). In sample mode an outcome 1 stops the run with status
/// Aborted. The overlap precondition is checked against `oracle`, or the
/// propagator's spectral data when `oracle` is null and it has one.
FilterResult run_filter(const SimState& initial, const FilterSchedule& schedule, const Propagator& propagator,
                        const Measurement& measure, const RealVector& reference,
                        const SpectralData* oracle = nullptr);

struct TailMeasurement {
  SimState state;
  int outcome = 0;  // two bits, 0b01 is the body
  double probability = 0.0;
};

/// Measures the two leading qubits of an extended register.
TailMeasurement measure_tail_qubits(const SimState& extended, MeasureMode measure, std::mt19937_64* rng = nullptr);

/// |<a|b>|^2; throws NotNormalized unless both have unit norm.
double fidelity(const ComplexVector& a, const ComplexVector& b);

struct LedgerSummary {
  int n = 0;
  int k = 0;
  int p = 0;
  ScheduleMode mode = ScheduleMode::Basic;
  std::optional<std::uint64_t> seed;
};

/// One JSON object per block, then a summary object; '\n'-terminated lines.
std::string ledger_to_jsonl(const RunLedger& ledger, const LedgerSummary& summary);

std::string to_string(ScheduleMode mode);
std::string to_string(MeasureMode mode);
std::string to_string(RunStatus status);

}  // namespace qsprep
