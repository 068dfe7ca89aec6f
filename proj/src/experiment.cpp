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

#include "qsprep/experiment.hpp"

#include <atomic>
#include <charconv>
#include <chrono>
#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <sstream>
#include <thread>

#include "json.hpp"
#include "qsprep/analysis.hpp"
#include "qsprep/error.hpp"
#include "qsprep/hamiltonian.hpp"
#include "qsprep/spectral.hpp"

namespace qsprep {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& why) {
  throw Error(Errc::ValidationError, field + ": " + why);
}

std::string format_double(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, ptr);
}

template <typename T>
std::optional<T> parse_number(std::string_view text) {
  T v{};
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size()) return std::nullopt;
  return v;
}

template <typename T>
T require_number(const std::string& key, std::string_view value) {
  auto v = parse_number<T>(value);
  if (!v) invalid(key, "not a valid number: '" + std::string(value) + "'");
  return *v;
}

using Setter = std::function<void(RunConfig&, const std::string&, std::string_view)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  static const std::map<std::string, Setter, std::less<>> table = {
      {"function", [](RunConfig& c, const std::string&, std::string_view v) { c.function = std::string(v); }},
      {"sigma", [](RunConfig& c, const std::string& k, std::string_view v) { c.sigma = require_number<double>(k, v); }},
      {"center",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.center = require_number<double>(k, v); }},
      {"n", [](RunConfig& c, const std::string& k, std::string_view v) { c.n = require_number<int>(k, v); }},
      {"p", [](RunConfig& c, const std::string& k, std::string_view v) { c.p = require_number<int>(k, v); }},
      {"schedule",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "basic") {
           c.schedule = ScheduleMode::Basic;
         } else if (v == "refined") {
           c.schedule = ScheduleMode::Refined;
         } else {
           invalid(k, "expected basic or refined");
         }
       }},
      {"B", [](RunConfig& c, const std::string& k, std::string_view v) { c.B = require_number<double>(k, v); }},
      {"k", [](RunConfig& c, const std::string& k, std::string_view v) { c.k = require_number<int>(k, v); }},
      {"evolution",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "exact") {
           c.evolution = EvolutionMode::Exact;
         } else if (v == "split") {
           c.evolution = EvolutionMode::Split;
         } else {
           invalid(k, "expected exact or split");
         }
       }},
      {"order", [](RunConfig& c, const std::string& k, std::string_view v) { c.order = require_number<int>(k, v); }},
      {"step_phase",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.step_phase = require_number<double>(k, v); }},
      {"measure",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "postselect") {
           c.measure = MeasureMode::PostSelect;
         } else if (v == "sample") {
           c.measure = MeasureMode::Sample;
         } else {
           invalid(k, "expected postselect or sample");
         }
       }},
      {"seed",
       [](RunConfig& c, const std::string& k, std::string_view v) { c.seed = require_number<std::uint64_t>(k, v); }},
      {"tails",
       [](RunConfig& c, const std::string& k, std::string_view v) {
         if (v == "off") {
           c.tails.reset();
         } else {
           c.tails = require_number<double>(k, v);
         }
       }},
      {"init", [](RunConfig& c, const std::string&, std::string_view v) { c.init = std::string(v); }},
      {"out", [](RunConfig& c, const std::string&, std::string_view v) { c.out = std::string(v); }},
  };
  return table;
}

}  // namespace

InitialApproximation parse_init(const RunConfig& config) {
  const std::string_view spec = config.init;
  const auto colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  const std::string_view arg = colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);
  // Tail extension adds two qubits to the register the initializer sees.
  const int qubits = config.n + (config.tails ? 2 : 0);
  if (kind == "exact" && arg.empty()) return InitialApproximation::exact();
  if (kind == "coarse") {
    const int level = arg.empty() ? std::max(1, qubits - 2) : require_number<int>("init", arg);
    if (level < 1 || level >= qubits) invalid("init", "coarse level must lie in [1, n)");
    return InitialApproximation::coarse(level);
  }
  if (kind == "noisy" && !arg.empty()) {
    const double eps = require_number<double>("init", arg);
    if (!(eps >= 0.0) || !std::isfinite(eps)) invalid("init", "noise level must be finite and >= 0");
    return InitialApproximation::noisy(eps, config.seed.value_or(0));
  }
  invalid("init", "expected exact, coarse[:level] or noisy:eps");
}

void validate(const RunConfig& c) {
  if (c.function.empty()) invalid("function", "must not be empty");
  if (!(c.sigma > 0.0) || !std::isfinite(c.sigma)) invalid("sigma", "must be positive");
  if (!std::isfinite(c.center)) invalid("center", "must be finite");
  if (c.n < 2 || c.n > kMaxDenseQubits) {
    invalid("n", "must lie in [2, " + std::to_string(kMaxDenseQubits) + "] (dense oracle cap)");
  }
  if (c.p && (*c.p < -2 * c.n || *c.p > 64)) invalid("p", "out of range");
  if (!(c.B >= 1.0) || !std::isfinite(c.B)) invalid("B", "must be >= 1");
  if (c.k && *c.k < 1) invalid("k", "must be >= 1");
  if (c.order != 1 && c.order != 2 && c.order != 4) invalid("order", "must be 1, 2 or 4");
  if (!(c.step_phase >= 0.0) || !std::isfinite(c.step_phase)) invalid("step_phase", "must be finite and >= 0");
  if (c.measure == MeasureMode::Sample && !c.seed) invalid("seed", "required when measure=sample");
  if (c.tails) {
    if (!(*c.tails > 0.0 && *c.tails < 1.0)) invalid("tails", "decay ratio must lie in (0,1)");
    if (c.n + 2 > kMaxDenseQubits) invalid("tails", "extended register exceeds the dense oracle cap");
  }
  parse_init(c);
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::map<std::string, int, std::less<>> seen;
  int line_no = 1;
  std::size_t pos = 0;
  while (pos < text.size()) {
    const char ch = text[pos];
    if (ch == '\n') {
      ++line_no;
      ++pos;
      continue;
    }
    if (ch == ' ' || ch == '\t' || ch == '\r') {
      ++pos;
      continue;
    }
    if (ch == '#') {
      while (pos < text.size() && text[pos] != '\n') ++pos;
      continue;
    }
    std::size_t end = pos;
    while (end < text.size() && text[end] != ' ' && text[end] != '\t' && text[end] != '\r' && text[end] != '\n') {
      ++end;
    }
    const std::string_view token = text.substr(pos, end - pos);
    pos = end;
    const auto eq = token.find('=');
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (eq == std::string_view::npos || eq == 0) {
      throw Error(Errc::ParseError, where + "expected key=value, got '" + std::string(token) + "'");
    }
    const std::string key(token.substr(0, eq));
    const std::string_view value = token.substr(eq + 1);
    const auto it = setters().find(key);
    if (it == setters().end()) throw Error(Errc::ParseError, where + "unknown key '" + key + "'");
    if (auto [dup, inserted] = seen.emplace(key, line_no); !inserted) {
      throw Error(Errc::ParseError, where + "duplicate key '" + key + "'");
    }
    it->second(config, key, value);
  }
  validate(config);
  return config;
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream out;
  out << "function=" << c.function << " sigma=" << format_double(c.sigma) << " center=" << format_double(c.center)
      << " n=" << c.n;
  if (c.p) out << " p=" << *c.p;
  out << " schedule=" << to_string(c.schedule) << " B=" << format_double(c.B);
  if (c.k) out << " k=" << *c.k;
  out << " evolution=" << (c.evolution == EvolutionMode::Exact ? "exact" : "split") << " order=" << c.order
      << " step_phase=" << format_double(c.step_phase) << " measure=" << to_string(c.measure);
  if (c.seed) out << " seed=" << *c.seed;
  out << " tails=" << (c.tails ? format_double(*c.tails) : std::string("off")) << " init=" << c.init;
  if (!c.out.empty()) out << " out=" << c.out;
  return out.str();
}

namespace {

TargetFunction make_target(const RunConfig& c) {
  const GridSpec grid(c.n);
  if (c.function == "sine") return sample_function(sine_mode(), grid, "sine");
  if (c.function == "gaussian") return sample_function(gaussian(c.center, c.sigma), grid, "gaussian");
  const std::vector<double> table = read_table_file(c.function);
  return sample_table(table, grid, c.function);
}

}  // namespace

ExperimentResult run_experiment(const RunConfig& config) {
  validate(config);
  const TargetFunction target = make_target(config);
  const TargetFunction work = config.tails ? extend_with_tails(target, *config.tails) : target;
  const int qubits = work.grid.qubits();

  const Hamiltonian h = assemble_hamiltonian(build_potential(work), work.grid);
  auto spec = std::make_shared<const SpectralData>(diagonalize(h));
  const int p = config.p.value_or(h.p());
  const FilterSchedule sched = config.schedule == ScheduleMode::Basic
                                   ? basic_schedule(qubits, p, config.k)
                                   : refined_schedule(qubits, p, config.B, config.k);
  const InitialState init = initial_approximation(work, *spec, parse_init(config));

  const Propagator propagator = config.evolution == EvolutionMode::Exact
                                    ? Propagator::exact(spec)
                                    : Propagator::split(h, make_splitting(config.order), config.step_phase);
  const Measurement measure{config.measure, config.seed.value_or(0)};
  FilterResult run = run_filter(init.state, sched, propagator, measure, work.samples, spec.get());

  ExperimentResult result;
  RunRecord& rec = result.record;
  rec.config = config;
  rec.status = to_string(run.ledger.status);
  rec.final_fidelity = run.ledger.final_fidelity;
  rec.cum_success = run.ledger.cumulative_success;
  rec.blocks = static_cast<int>(run.ledger.blocks.size());
  rec.k = sched.k;
  rec.s_max = sched.s_max;
  rec.p = p;
  rec.t_base = sched.t_base;
  rec.norm_bound = h.norm_bound();
  rec.gap = spec->gap;
  rec.d0_sq = init.ground_overlap_sq;

  result.final_state = run.state;
  if (config.tails && run.ledger.status == RunStatus::Completed) {
    std::mt19937_64 rng(derive_seed(measure.seed, 1));
    const TailMeasurement tm = measure_tail_qubits(run.state, config.measure, &rng);
    rec.tail_outcome = tm.outcome;
    rec.tail_probability = tm.probability;
    if (tm.outcome == static_cast<int>(TailBlock::Body)) {
      rec.recovered_fidelity = fidelity(tm.state.amplitudes, target.samples.cast<Complex>());
    } else {
      rec.status = "tail_rejected";
    }
    result.final_state = tm.state;
  }

  result.ledger = std::move(run.ledger);
  result.summary = LedgerSummary{qubits, sched.k, p, sched.mode,
                                 config.measure == MeasureMode::Sample ? config.seed : std::nullopt};
  return result;
}

namespace {

template <typename T>
json optional_json(const std::optional<T>& v) {
  return v ? json(*v) : json(nullptr);
}

template <typename T>
std::optional<T> optional_from(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<T>();
}

}  // namespace

std::string record_to_json(const RunRecord& r) {
  const RunConfig& c = r.config;
  json config = {{"function", c.function},
                 {"sigma", c.sigma},
                 {"center", c.center},
                 {"n", c.n},
                 {"p", optional_json(c.p)},
                 {"schedule", to_string(c.schedule)},
                 {"B", c.B},
                 {"k", optional_json(c.k)},
                 {"evolution", c.evolution == EvolutionMode::Exact ? "exact" : "split"},
                 {"order", c.order},
                 {"step_phase", c.step_phase},
                 {"measure", to_string(c.measure)},
                 {"seed", optional_json(c.seed)},
                 {"tails", optional_json(c.tails)},
                 {"init", c.init},
                 {"out", c.out}};
  json j = {{"config", config},
            {"status", r.status},
            {"final_fidelity", r.final_fidelity},
            {"cum_success", r.cum_success},
            {"blocks", r.blocks},
            {"k", r.k},
            {"s_max", r.s_max},
            {"p", r.p},
            {"t_base", r.t_base},
            {"norm_bound", r.norm_bound},
            {"gap", r.gap},
            {"d0_sq", r.d0_sq},
            {"tail_outcome", optional_json(r.tail_outcome)},
            {"tail_probability", optional_json(r.tail_probability)},
            {"recovered_fidelity", optional_json(r.recovered_fidelity)}};
  return j.dump();
}

RunRecord record_from_json(std::string_view text) {
  json j;
  try {
    j = json::parse(text);
    RunRecord r;
    const json& c = j.at("config");
    RunConfig& cfg = r.config;
    cfg.function = c.at("function").get<std::string>();
    cfg.sigma = c.at("sigma").get<double>();
    cfg.center = c.at("center").get<double>();
    cfg.n = c.at("n").get<int>();
    cfg.p = optional_from<int>(c, "p");
    cfg.schedule = c.at("schedule").get<std::string>() == "refined" ? ScheduleMode::Refined : ScheduleMode::Basic;
    cfg.B = c.at("B").get<double>();
    cfg.k = optional_from<int>(c, "k");
    cfg.evolution = c.at("evolution").get<std::string>() == "split" ? EvolutionMode::Split : EvolutionMode::Exact;
    cfg.order = c.at("order").get<int>();
    cfg.step_phase = c.at("step_phase").get<double>();
    cfg.measure = c.at("measure").get<std::string>() == "sample" ? MeasureMode::Sample : MeasureMode::PostSelect;
    cfg.seed = optional_from<std::uint64_t>(c, "seed");
    cfg.tails = optional_from<double>(c, "tails");
    cfg.init = c.at("init").get<std::string>();
    cfg.out = c.at("out").get<std::string>();
    r.status = j.at("status").get<std::string>();
    r.final_fidelity = j.at("final_fidelity").get<double>();
    r.cum_success = j.at("cum_success").get<double>();
    r.blocks = j.at("blocks").get<int>();
    r.k = j.at("k").get<int>();
    r.s_max = j.at("s_max").get<int>();
    r.p = j.at("p").get<int>();
    r.t_base = j.at("t_base").get<double>();
    r.norm_bound = j.at("norm_bound").get<double>();
    r.gap = j.at("gap").get<double>();
    r.d0_sq = j.at("d0_sq").get<double>();
    r.tail_outcome = optional_from<int>(j, "tail_outcome");
    r.tail_probability = optional_from<double>(j, "tail_probability");
    r.recovered_fidelity = optional_from<double>(j, "recovered_fidelity");
    return r;
  } catch (const json::exception& e) {
    throw Error(Errc::ParseError, std::string("run record: ") + e.what());
  }
}

std::vector<SweepRow> sweep(const std::vector<RunConfig>& configs, unsigned threads) {
  std::vector<SweepRow> rows(configs.size());
  if (configs.empty()) return rows;
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min<unsigned>(threads, static_cast<unsigned>(configs.size()));
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < configs.size(); i = next++) {
      const auto start = std::chrono::steady_clock::now();
      try {
        rows[i].record = run_experiment(configs[i]).record;
      } catch (const std::exception& e) {
        rows[i].error = e.what();
      }
      rows[i].wall_time = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
    worker();
  }
  return rows;
}

std::string sweep_csv(const std::vector<RunConfig>& configs, const std::vector<SweepRow>& rows) {
  std::ostringstream out;
  out << "n,k,p,mode,d0_sq,cum_success,final_fidelity,wall_time,status,error\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const SweepRow& row = rows[i];
    const RunConfig& c = configs[i];
    if (row.record) {
      const RunRecord& r = *row.record;
      out << c.n << ',' << r.k << ',' << r.p << ',' << to_string(c.schedule) << ',' << format_double(r.d0_sq) << ','
          << format_double(r.cum_success) << ',' << format_double(r.final_fidelity) << ','
          << format_double(row.wall_time) << ',' << r.status << ",\n";
    } else {
      std::string msg = row.error;
      for (char& ch : msg) {
        if (ch == '"') ch = '\'';
      }
      out << c.n << ",,," << to_string(c.schedule) << ",,,," << format_double(row.wall_time) << ",failed,\"" << msg
          << "\"\n";
    }
  }
  return out.str();
}

}  // namespace qsprep
