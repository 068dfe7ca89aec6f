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

#include "qsprep/filter.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <span>
#include <utility>

#include "json.hpp"

#include "qsprep/error.hpp"

namespace qsprep {

using nlohmann::json;

double FilterSchedule::duration(int stage) const { return std::ldexp(t_base, stage); }

FilterSchedule basic_schedule(int n, int p, std::optional<int> k, std::optional<int> s_max) {
  FilterSchedule sched;
  sched.mode = ScheduleMode::Basic;
  sched.k = k.value_or(2 * n);
  sched.s_max = s_max.value_or(2 * n + p);
  sched.t_base = std::ldexp(1.0, -(2 * n + p));
  if (sched.k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (sched.s_max < 0) throw Error(Errc::InvalidArgument, "s_max must be >= 0");
  return sched;
}

int refined_repetitions(int n, double B) {
  if (!(B >= 1.0)) throw Error(Errc::InvalidArgument, "B must be >= 1");
  // log2(pi/(4B)) < 0 for B >= 1.
  return -static_cast<int>(std::ceil(n / std::log2(std::numbers::pi / (4.0 * B))));
}

FilterSchedule refined_schedule(int n, int p, double B, std::optional<int> k, std::optional<int> s_max) {
  FilterSchedule sched;
  sched.mode = ScheduleMode::Refined;
  sched.B = B;
  sched.k = k.value_or(refined_repetitions(n, B));
  sched.t_base = 1.0 / (B * std::ldexp(1.0, n + p));
  sched.s_max = s_max.value_or(n + p + static_cast<int>(std::ceil(std::log2(B))));
  if (sched.k < 1) throw Error(Errc::InvalidArgument, "k must be >= 1");
  if (sched.s_max < 0) throw Error(Errc::InvalidArgument, "s_max must be >= 0");
  return sched;
}

namespace {

// Linear interpolation of samples at (j+1)/(M+1) with zeros at 0 and 1.
double interpolate(std::span<const double> table, double x) {
  const auto m = table.size();
  const double pos = x * static_cast<double>(m + 1);
  auto left = static_cast<std::size_t>(std::floor(pos));
  if (left > m) left = m;
  const double frac = pos - static_cast<double>(left);
  auto at = [&](std::size_t knot) { return (knot == 0 || knot == m + 1) ? 0.0 : table[knot - 1]; };
  return (1.0 - frac) * at(left) + frac * at(left + 1);
}

}  // namespace

SimState make_initial_state(const TargetFunction& target, const InitialApproximation& kind) {
  const int n = target.grid.qubits();
  switch (kind.kind) {
    case InitialApproximation::Kind::Exact:
      return SimState::from_real(target.samples);
    case InitialApproximation::Kind::Coarse: {
      if (kind.level < 1 || kind.level >= n) {
        throw Error(Errc::InvalidArgument, "coarse level must lie in [1, n)");
      }
      const std::span<const double> fine(target.samples.data(), static_cast<std::size_t>(target.samples.size()));
      const std::size_t points = std::size_t{1} << kind.level;
      std::vector<double> coarse(points);
      for (std::size_t j = 0; j < points; ++j) {
        coarse[j] = interpolate(fine, static_cast<double>(j + 1) / static_cast<double>(points + 1));
      }
      return SimState::from_real(sample_table(coarse, target.grid, target.name).samples);
    }
    case InitialApproximation::Kind::Noisy: {
      if (!(kind.epsilon >= 0.0)) throw Error(Errc::InvalidArgument, "epsilon must be >= 0");
      if (kind.epsilon == 0.0) return SimState::from_real(target.samples);
      std::mt19937_64 rng(kind.seed);
      std::normal_distribution<double> normal;
      RealVector z(target.samples.size());
      for (auto& v : z) v = normal(rng);
      RealVector perturbed = target.samples + kind.epsilon * z / z.norm();
      perturbed.normalize();
      return SimState::from_real(perturbed);
    }
  }
  throw Error(Errc::InvalidArgument, "unknown initial approximation");
}

InitialState initial_approximation(const TargetFunction& target, const SpectralData& spec,
                                   const InitialApproximation& kind) {
  InitialState out{make_initial_state(target, kind), 0.0};
  const ComplexVector d = eigen_overlaps(spec, out.state.amplitudes);
  out.ground_overlap_sq = std::norm(d[0]);
  if (!(out.ground_overlap_sq > 0.5)) {
    throw Error(Errc::OverlapTooSmall, "|d_0|^2 = " + std::to_string(out.ground_overlap_sq) + " <= 1/2");
  }
  return out;
}

BlockResult filter_block(const SimState& state, const Propagator& propagator, const EvolutionOperator& op,
                         MeasureMode measure, std::mt19937_64* rng) {
  require_unit_norm(state.amplitudes, "block input");
  const ComplexVector u = propagator.apply(op, state.amplitudes);
  ComplexVector plus = 0.5 * (state.amplitudes + u);
  // Rounding can push ||(I+U)psi||^2/4 a few ulps above 1.
  const double p0 = std::min(1.0, plus.squaredNorm());

  int outcome = 0;
  if (measure == MeasureMode::Sample) {
    if (rng == nullptr) throw Error(Errc::InvalidArgument, "sample mode needs a random generator");
    const double p1 = (0.5 * (state.amplitudes - u)).squaredNorm();
    std::uniform_real_distribution<double> uniform(0.0, 1.0);
    outcome = uniform(*rng) < p0 / (p0 + p1) ? 0 : 1;
  }

  BlockResult result;
  result.outcome = outcome;
  result.p0 = p0;
  ComplexVector branch = outcome == 0 ? std::move(plus) : ComplexVector(0.5 * (state.amplitudes - u));
  const double norm = branch.norm();
  if (norm < 1e-14) throw Error(Errc::ZeroBranch, "collapse onto an outcome of vanishing probability");
  result.probability = norm * norm;
  result.state.amplitudes = branch / norm;
  return result;
}

namespace {

double fidelity_to(const RealVector& reference, const ComplexVector& state) {
  Complex overlap{0.0, 0.0};
  for (Eigen::Index i = 0; i < state.size(); ++i) overlap += reference[i] * state[i];
  return std::min(1.0, std::norm(overlap));
}

}  // namespace

FilterResult run_filter(const SimState& initial, const FilterSchedule& schedule, const Propagator& propagator,
                        const Measurement& measure, const RealVector& reference, const SpectralData* oracle) {
  if (initial.size() != propagator.size() || reference.size() != initial.size()) {
    throw Error(Errc::InvalidArgument, "initial state, reference and propagator sizes differ");
  }
  require_unit_norm(initial.amplitudes, "initial state");
  if (oracle == nullptr) oracle = propagator.spectral();
  if (oracle != nullptr) {
    const double d0 = std::norm(eigen_overlaps(*oracle, initial.amplitudes)[0]);
    if (!(d0 > 0.5)) throw Error(Errc::OverlapTooSmall, "|d_0|^2 = " + std::to_string(d0) + " <= 1/2");
  }

  std::mt19937_64 rng(measure.seed);
  FilterResult out{initial, {}};
  RunLedger& ledger = out.ledger;
  ledger.blocks.reserve(static_cast<std::size_t>(schedule.blocks()));
  for (int s = 0; s <= schedule.s_max; ++s) {
    const EvolutionOperator op = propagator.at(schedule.t_base, s);
    for (int q = 1; q <= schedule.k; ++q) {
      BlockResult block = filter_block(out.state, propagator, op, measure.mode, &rng);
      BlockRecord rec;
      rec.s = s;
      rec.q = q;
      rec.p0 = block.p0;
      rec.outcome = block.outcome;
      if (block.outcome == 0) ledger.cumulative_success *= block.p0;
      rec.cum_success = ledger.cumulative_success;
      rec.fidelity = fidelity_to(reference, block.state.amplitudes);
      ledger.blocks.push_back(rec);
      out.state = std::move(block.state);
      if (rec.outcome == 1) {
        ledger.status = RunStatus::Aborted;
        ledger.final_fidelity = rec.fidelity;
        return out;
      }
    }
  }
  ledger.final_fidelity = fidelity_to(reference, out.state.amplitudes);
  return out;
}

TailMeasurement measure_tail_qubits(const SimState& extended, MeasureMode measure, std::mt19937_64* rng) {
  const Eigen::Index total = extended.size();
  if (total < 4 || total % 4 != 0) throw Error(Errc::InvalidArgument, "extended register length must be 4N");
  require_unit_norm(extended.amplitudes, "extended state");
  const Eigen::Index n = total / 4;
  std::array<double, 4> weights{};
  for (int b = 0; b < 4; ++b) weights[b] = extended.amplitudes.segment(b * n, n).squaredNorm();

  int outcome = static_cast<int>(TailBlock::Body);
  if (measure == MeasureMode::Sample) {
    if (rng == nullptr) throw Error(Errc::InvalidArgument, "sample mode needs a random generator");
    std::discrete_distribution<int> pick(weights.begin(), weights.end());
    outcome = pick(*rng);
  }
  const double norm = std::sqrt(weights[outcome]);
  if (norm < 1e-14) throw Error(Errc::ZeroBranch, "tail measurement outcome has vanishing probability");
  TailMeasurement out;
  out.outcome = outcome;
  out.probability = weights[outcome];
  out.state.amplitudes = extended.amplitudes.segment(outcome * n, n) / norm;
  return out;
}

double fidelity(const ComplexVector& a, const ComplexVector& b) {
  if (a.size() != b.size()) throw Error(Errc::InvalidArgument, "fidelity of vectors with different lengths");
  require_unit_norm(a, "first argument");
  require_unit_norm(b, "second argument");
  return std::min(1.0, std::norm(a.dot(b)));
}

std::string to_string(ScheduleMode mode) { return mode == ScheduleMode::Basic ? "basic" : "refined"; }
std::string to_string(MeasureMode mode) { return mode == MeasureMode::PostSelect ? "postselect" : "sample"; }
std::string to_string(RunStatus status) { return status == RunStatus::Completed ? "completed" : "aborted"; }

std::string ledger_to_jsonl(const RunLedger& ledger, const LedgerSummary& summary) {
  std::string out;
  for (const auto& b : ledger.blocks) {
    json rec = {{"s", b.s},
                {"q", b.q},
                {"p0", b.p0},
                {"outcome", b.outcome},
                {"cum_success", b.cum_success},
                {"fidelity", b.fidelity}};
    out += rec.dump();
    out += '\n';
  }
  json tail = {{"final_fidelity", ledger.final_fidelity},
               {"cum_success", ledger.cumulative_success},
               {"n", summary.n},
               {"k", summary.k},
               {"p", summary.p},
               {"mode", to_string(summary.mode)},
               {"seed", summary.seed ? json(*summary.seed) : json(nullptr)},
               {"status", to_string(ledger.status)}};
  out += tail.dump();
  out += '\n';
  return out;
}

}  // namespace qsprep
