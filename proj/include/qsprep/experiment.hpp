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
#include <string>
#include <string_view>
#include <vector>

#include "qsprep/evolution.hpp"
#include "qsprep/filter.hpp"

namespace qsprep {

/// Everything needed to reproduce one end-to-end run.
struct RunConfig {
  std::string function = "gaussian";  // sine | gaussian | path to a table file
  double sigma = 0.1;
  double center = 0.5;
  int n = 6;
  std::optional<int> p;  // overrides the computed norm exponent
  ScheduleMode schedule = ScheduleMode::Basic;
  double B = 1.0;
  std::optional<int> k;
  EvolutionMode evolution = EvolutionMode::Exact;
  int order = 4;
  double step_phase = 1.0;  // 0 keeps one product per block
  MeasureMode measure = MeasureMode::PostSelect;
  std::optional<std::uint64_t> seed;
  std::optional<double> tails;  // decay ratio; empty means off
  std::string init = "coarse";  // exact | coarse[:level] | noisy:eps
  std::string out;              // JSON-lines ledger path; empty means none

  friend bool operator==(const RunConfig&, const RunConfig&) = default;
};

/// Parses whitespace- or newline-separated key=value settings. '#' starts
/// a comment. Unknown keys and malformed tokens raise ParseError with the
/// line number; out-of-range values raise ValidationError naming the key.
RunConfig parse_config(std::string_view text);

/// Single line of key=value settings; parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig& config);

/// Throws ValidationError on the first invalid field.
void validate(const RunConfig& config);

InitialApproximation parse_init(const RunConfig& config);

struct RunRecord {
  RunConfig config;
  std::string status = "completed";
  double final_fidelity = 0.0;
  double cum_success = 0.0;
  int blocks = 0;
  int k = 0;
  int s_max = 0;
  int p = 0;
  double t_base = 0.0;
  double norm_bound = 0.0;
  double gap = 0.0;
  double d0_sq = 0.0;
  std::optional<int> tail_outcome;
  std::optional<double> tail_probability;
  std::optional<double> recovered_fidelity;

  friend bool operator==(const RunRecord&, const RunRecord&) = default;
};

struct ExperimentResult {
  RunRecord record;
  RunLedger ledger;
  LedgerSummary summary;
  SimState final_state;  // after tail post-selection when tails are on
};

/// sample -> (tails) -> potential -> H -> diagonalize -> initial state ->
/// filter -> (tail measurement). Deterministic for a fixed config.
ExperimentResult run_experiment(const RunConfig& config);

std::string record_to_json(const RunRecord& record);
RunRecord record_from_json(std::string_view text);

struct SweepRow {
  std::optional<RunRecord> record;
  std::string error;
  double wall_time = 0.0;
};

/// Runs configs concurrently (up to `threads`, 0 = hardware concurrency);
/// rows come back in input order.
std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, unsigned threads = 0);

/// Header plus one row per sweep entry:
/// n,k,p,mode,d0_sq,cum_success,final_fidelity,wall_time,status,error
std::string sweep_csv(const std::vector<RunConfig>& configs, const std::vector<SweepRow>& rows);

}  // namespace qsprep
