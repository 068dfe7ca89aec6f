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

// Command-line front end: single runs, sweeps, and the verification suites.

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "qsprep/analysis.hpp"
#include "qsprep/error.hpp"
#include "qsprep/experiment.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitError = 1;
constexpr int kExitAborted = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw qsprep::Error(qsprep::Errc::IoError, "cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw qsprep::Error(qsprep::Errc::IoError, "cannot write " + path);
  out << text;
}

// Settings given as flags, keyed like the config file.
struct FlagSet {
  std::map<std::string, std::string> values;

  void bind(CLI::App* app, const std::string& flag, const std::string& key, const std::string& help) {
    app->add_option_function<std::string>(
        "--" + flag, [this, key](const std::string& v) { values[key] = v; }, help);
  }
};

// Flags override the config file; everything goes through parse_config.
qsprep::RunConfig resolve_config(const std::string& config_path, const FlagSet& flags) {
  std::map<std::string, std::string> merged;
  if (!config_path.empty()) {
    const qsprep::RunConfig base = qsprep::parse_config(read_file(config_path));
    std::istringstream tokens(qsprep::emit_config(base));
    std::string tok;
    while (tokens >> tok) {
      const auto eq = tok.find('=');
      merged[tok.substr(0, eq)] = tok.substr(eq + 1);
    }
  }
  for (const auto& [k, v] : flags.values) merged[k] = v;
  std::string text;
  for (const auto& [k, v] : merged) text += k + "=" + v + "\n";
  return qsprep::parse_config(text);
}

int cmd_run(const std::string& config_path, const FlagSet& flags, bool print_ledger) {
  const qsprep::RunConfig config = resolve_config(config_path, flags);
  const qsprep::ExperimentResult result = qsprep::run_experiment(config);
  const std::string ledger = qsprep::ledger_to_jsonl(result.ledger, result.summary);
  if (!config.out.empty()) write_file(config.out, ledger);
  if (print_ledger) std::cout << ledger;
  std::cout << qsprep::record_to_json(result.record) << '\n';
  return result.ledger.status == qsprep::RunStatus::Aborted ? kExitAborted : kExitOk;
}

int cmd_sweep(const std::string& path, const std::string& csv_path, unsigned threads) {
  std::vector<qsprep::RunConfig> configs;
  std::istringstream lines(read_file(path));
  std::string line;
  int line_no = 0;
  while (std::getline(lines, line)) {
    ++line_no;
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos || line[first] == '#') continue;
    try {
      configs.push_back(qsprep::parse_config(line));
    } catch (const qsprep::Error& e) {
      throw qsprep::Error(e.code(), path + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  const auto rows = qsprep::sweep(configs, threads);
  const std::string csv = qsprep::sweep_csv(configs, rows);
  if (csv_path.empty()) {
    std::cout << csv;
  } else {
    write_file(csv_path, csv);
  }
  bool failed = false;
  for (const auto& row : rows) failed = failed || !row.record || row.record->status != "completed";
  return failed ? kExitError : kExitOk;
}

struct VerifyOptions {
  std::string function = "gaussian";
  double sigma = 0.1;
  double center = 0.5;
  int n = 5;
  int trials = 1000;
  double eps = 1e-6;
  double t = 0.0;
  std::uint64_t seed = 1;
};

qsprep::TargetFunction verify_target(const VerifyOptions& o) {
  const qsprep::GridSpec grid(o.n);
  if (o.function == "sine") return qsprep::sample_function(qsprep::sine_mode(), grid, "sine");
  if (o.function == "gaussian") return qsprep::sample_function(qsprep::gaussian(o.center, o.sigma), grid, "gaussian");
  return qsprep::sample_table(qsprep::read_table_file(o.function), grid, o.function);
}

int cmd_verify(const VerifyOptions& o) {
  const auto target = verify_target(o);
  const auto h = qsprep::assemble_hamiltonian(qsprep::build_potential(target), target.grid);
  const auto spec = qsprep::diagonalize(h);
  // Default duration: one unit of the slowest non-trivial phase.
  const double t = o.t > 0.0 ? o.t : 1.0 / spec.gap;
  const auto prob = qsprep::verify_probability_perturbation(spec, t, o.trials, o.eps, o.seed);
  const auto state = qsprep::verify_state_perturbation(spec, t, o.trials, o.eps, o.seed);
  std::cout << "{\"probability\":" << qsprep::to_json(prob) << ",\"state\":" << qsprep::to_json(state) << "}\n";
  return (prob.sqrt_violations + prob.prob_violations + state.violations) == 0 ? kExitOk : kExitError;
}

int cmd_defect(const VerifyOptions& o, int order, const std::vector<double>& durations) {
  const auto target = verify_target(o);
  const auto h = qsprep::assemble_hamiltonian(qsprep::build_potential(target), target.grid);
  const auto spec = qsprep::diagonalize(h);
  const auto scheme = qsprep::make_splitting(order);
  std::cout << "duration,defect\n";
  for (double d : durations) std::cout << d << ',' << qsprep::splitting_defect(scheme, h, spec, d) << '\n';
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"qsprep: eigenvalue-filtering state preparation simulator"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "Run one end-to-end preparation and print its record as JSON");
  std::string config_path;
  bool print_ledger = false;
  FlagSet flags;
  run->add_option("--config", config_path, "File of key=value settings (flags override it)");
  run->add_flag("--print-ledger", print_ledger, "Also print the JSON-lines ledger to stdout");
  flags.bind(run, "function", "function", "sine | gaussian | path to a table file");
  flags.bind(run, "sigma", "sigma", "Gaussian width");
  flags.bind(run, "center", "center", "Gaussian center");
  flags.bind(run, "n", "n", "System qubits (2..12)");
  flags.bind(run, "p", "p", "Override the norm exponent p");
  flags.bind(run, "schedule", "schedule", "basic | refined");
  flags.bind(run, "B", "B", "Bound parameter for the refined schedule");
  flags.bind(run, "k", "k", "Repetitions per stage");
  flags.bind(run, "evolution", "evolution", "exact | split");
  flags.bind(run, "order", "order", "Splitting order 1, 2 or 4");
  flags.bind(run, "step-phase", "step_phase", "Max duration*norm_bound per split substep (0: one product)");
  flags.bind(run, "measure", "measure", "postselect | sample");
  flags.bind(run, "seed", "seed", "Seed for sampling and noisy initial states");
  flags.bind(run, "tails", "tails", "off | decay ratio in (0,1)");
  flags.bind(run, "init", "init", "exact | coarse[:level] | noisy:eps");
  flags.bind(run, "out", "out", "Write the JSON-lines ledger here");

  auto* sw = app.add_subcommand("sweep", "Run one config per line and emit a CSV summary");
  std::string sweep_path;
  std::string csv_path;
  unsigned threads = 0;
  sw->add_option("configs", sweep_path, "File with one key=value config per line")->required();
  sw->add_option("--csv", csv_path, "Write the CSV here instead of stdout");
  sw->add_option("--threads", threads, "Worker threads (0: hardware concurrency)");

  VerifyOptions vo;
  auto add_target_opts = [&vo](CLI::App* cmd) {
    cmd->add_option("--function", vo.function, "sine | gaussian | table file");
    cmd->add_option("--sigma", vo.sigma);
    cmd->add_option("--center", vo.center);
    cmd->add_option("--n", vo.n)->check(CLI::Range(2, 8));
  };
  auto* verify = app.add_subcommand("verify", "Randomized single-block perturbation bound checks");
  add_target_opts(verify);
  verify->add_option("--trials", vo.trials);
  verify->add_option("--eps", vo.eps);
  verify->add_option("--t", vo.t, "Block duration (default 1/gap)");
  verify->add_option("--seed", vo.seed);

  auto* defect = app.add_subcommand("defect", "Operator-norm splitting defect against exact evolution");
  add_target_opts(defect);
  int order = 2;
  std::vector<double> durations;
  defect->add_option("--order", order)->check(CLI::IsMember({1, 2, 4}));
  defect->add_option("--duration", durations, "One or more durations")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitError;
  }

  try {
    if (*run) return cmd_run(config_path, flags, print_ledger);
    if (*sw) return cmd_sweep(sweep_path, csv_path, threads);
    if (*verify) return cmd_verify(vo);
    if (*defect) return cmd_defect(vo, order, durations);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
