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

#include <cmath>
#include <memory>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "doctest.h"
#include "json.hpp"
#include "oracles.hpp"
#include "qsprep/analysis.hpp"
#include "qsprep/error.hpp"
#include "qsprep/filter.hpp"

using namespace qsprep;

namespace {

struct Setup {
  TargetFunction target;
  Hamiltonian h;
  std::shared_ptr<const SpectralData> spec;
  Propagator prop;
};

Setup make_setup(const TargetFunction& t) {
  Hamiltonian h = assemble_hamiltonian(build_potential(t), t.grid);
  auto spec = std::make_shared<const SpectralData>(diagonalize(h));
  return Setup{t, h, spec, Propagator::exact(spec)};
}

Setup gaussian_setup(int n) { return make_setup(sample_function(gaussian(0.5, 0.1), GridSpec(n), "gaussian")); }

SimState mixture(const SpectralData& spec, double w0, Eigen::Index excited = 1) {
  ComplexVector v = std::sqrt(w0) * spec.eigenvectors.col(0).cast<Complex>() +
                    std::sqrt(1.0 - w0) * spec.eigenvectors.col(excited).cast<Complex>();
  return SimState{v};
}

template <typename F>
void check_code(Errc code, F&& f) {
  try {
    f();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == code);
  }
}

}  // namespace

TEST_SUITE("filter") {
  TEST_CASE("schedules") {
    const auto b = basic_schedule(6, 3);
    CHECK(b.k == 12);
    CHECK(b.s_max == 15);
    CHECK(b.t_base == std::ldexp(1.0, -15));
    CHECK(b.blocks() == 12 * 16);
    CHECK(b.duration(15) == 1.0);

    const auto r = refined_schedule(6, 3, 1.0);
    CHECK(r.mode == ScheduleMode::Refined);
    // -ceil(6 / log2(pi/4)) with log2(pi/4) ~ -0.3485.
    CHECK(r.k == 17);
    CHECK(r.s_max == 9);
    CHECK(r.t_base == doctest::Approx(std::ldexp(1.0, -9)));
    const auto r2 = refined_schedule(6, 3, 2.0);
    CHECK(r2.s_max == 10);
    CHECK(r2.t_base == doctest::Approx(std::ldexp(1.0, -10)));
    CHECK(refined_repetitions(6, 2.0) == 4);

    CHECK(basic_schedule(4, 1, 3, 2).blocks() == 9);
    CHECK_THROWS_AS(basic_schedule(4, 1, 0), Error);
    CHECK_THROWS_AS(refined_schedule(4, 1, 0.5), Error);
  }

  TEST_CASE("initial approximations") {
    const auto s = gaussian_setup(6);
    const auto exact = initial_approximation(s.target, *s.spec, InitialApproximation::exact());
    CHECK(exact.ground_overlap_sq >= 1.0 - 1e-12);

    const auto coarse = initial_approximation(s.target, *s.spec, InitialApproximation::coarse(4));
    CHECK(std::abs(coarse.state.amplitudes.norm() - 1.0) < 1e-12);
    CHECK(coarse.ground_overlap_sq > 0.9);
    CHECK(coarse.ground_overlap_sq < 1.0);
    CHECK_THROWS_AS(make_initial_state(s.target, InitialApproximation::coarse(6)), Error);
    CHECK_THROWS_AS(make_initial_state(s.target, InitialApproximation::coarse(0)), Error);

    const auto noisy = initial_approximation(s.target, *s.spec, InitialApproximation::noisy(0.1, 3));
    CHECK(noisy.ground_overlap_sq > 0.98);
    const auto again = make_initial_state(s.target, InitialApproximation::noisy(0.1, 3));
    CHECK(again.amplitudes == noisy.state.amplitudes);

    check_code(Errc::OverlapTooSmall,
               [&] { (void)initial_approximation(s.target, *s.spec, InitialApproximation::noisy(10.0, 1)); });
  }

  TEST_CASE("identity evolution leaves the state and the probability untouched") {
    const auto s = gaussian_setup(5);
    std::mt19937_64 rng(3);
    const SimState in{oracle::random_state(s.spec->size(), rng)};
    const auto r = filter_block(in, s.prop, s.prop.at(0.0, 0), MeasureMode::PostSelect);
    CHECK(r.outcome == 0);
    CHECK(r.p0 == doctest::Approx(1.0).epsilon(1e-15));
    CHECK((r.state.amplitudes - in.amplitudes).norm() < 1e-14);
  }

  TEST_CASE("eigenvector input") {
    const auto s = gaussian_setup(5);
    const double t = 3.7e-4;
    for (Eigen::Index l : {0, 1, 5, 20}) {
      const SimState in = SimState::from_real(s.spec->eigenvectors.col(l));
      const auto r = filter_block(in, s.prop, EvolutionOperator{EvolutionMode::Exact, {}, t, 0, 1},
                                  MeasureMode::PostSelect);
      const double c = std::cos(s.spec->eigenvalues[l] * t / 2.0);
      CHECK(std::abs(r.p0 - c * c) <= 1e-13);
      CHECK(fidelity(r.state.amplitudes, in.amplitudes) >= 1.0 - 1e-12);
    }
  }

  TEST_CASE("branch overlaps follow the g factor") {
    const auto s = gaussian_setup(5);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 10; ++trial) {
      const ComplexVector d = oracle::random_state(s.spec->size(), rng);
      const SimState in{s.spec->eigenvectors.cast<Complex>() * d};
      const double t = 1e-3 * (1 + trial);
      const auto r = filter_block(in, s.prop, EvolutionOperator{EvolutionMode::Exact, {}, t, 0, 1},
                                  MeasureMode::PostSelect);
      ComplexVector expected(d.size());
      for (Eigen::Index l = 0; l < d.size(); ++l) {
        expected[l] = d[l] * g_function(phase_of(s.spec->eigenvalues[l], t), 0);
      }
      CHECK(std::abs(r.p0 - expected.squaredNorm()) <= 1e-12);
      const ComplexVector got = eigen_overlaps(*s.spec, r.state.amplitudes) * std::sqrt(r.probability);
      CHECK((got - expected).cwiseAbs().maxCoeff() <= 1e-12);
    }
  }

  TEST_CASE("explicit ancilla register agrees with the implicit block") {
    for (int n : {3, 5}) {
      const auto s = gaussian_setup(n);
      std::mt19937_64 rng(n);
      const double t = 2e-3;
      const ComplexMatrix u = exact_U_matrix(*s.spec, t);
      for (int trial = 0; trial < 5; ++trial) {
        const SimState in{oracle::random_state(s.spec->size(), rng)};
        const auto r = filter_block(in, s.prop, EvolutionOperator{EvolutionMode::Exact, {}, t, 0, 1},
                                    MeasureMode::PostSelect);
        const auto ref0 = oracle::explicit_block(u, in.amplitudes, 0);
        const auto ref1 = oracle::explicit_block(u, in.amplitudes, 1);
        CHECK(std::abs(r.p0 - ref0.probability) <= 1e-12);
        CHECK(std::abs(1.0 - r.p0 - ref1.probability) <= 1e-12);
        CHECK((r.state.amplitudes - ref0.branch).norm() <= 1e-12);
      }
    }
  }

  TEST_CASE("vanishing branch") {
    const auto s = gaussian_setup(4);
    const SimState in = SimState::from_real(s.spec->eigenvectors.col(2));
    const double t = std::numbers::pi / s.spec->eigenvalues[2];
    check_code(Errc::ZeroBranch, [&] {
      (void)filter_block(in, s.prop, EvolutionOperator{EvolutionMode::Exact, {}, t, 0, 1}, MeasureMode::PostSelect);
    });
    const SimState bad{ComplexVector::Constant(s.spec->size(), 1.0)};
    check_code(Errc::NotNormalized,
               [&] { (void)filter_block(bad, s.prop, s.prop.at(0.0, 0), MeasureMode::PostSelect); });
    CHECK_THROWS_AS(filter_block(in, s.prop, s.prop.at(0.0, 0), MeasureMode::Sample), Error);
  }

  TEST_CASE("exact target is a fixed point") {
    const auto s = make_setup(sample_function(sine_mode(), GridSpec(4), "sine"));
    const auto sched = basic_schedule(4, s.h.p());
    const auto res = run_filter(SimState::from_real(s.target.samples), sched, s.prop, {}, s.target.samples);
    REQUIRE(res.ledger.blocks.size() == static_cast<std::size_t>(sched.blocks()));
    for (const auto& b : res.ledger.blocks) {
      CHECK(b.p0 >= 1.0 - 1e-12);
      CHECK(b.fidelity >= 1.0 - 1e-12);
    }
    CHECK(res.ledger.status == RunStatus::Completed);
  }

  TEST_CASE("two-level mixture follows the prediction") {
    const auto s = gaussian_setup(5);
    const SimState in = mixture(*s.spec, 0.6);
    const auto sched = basic_schedule(5, s.h.p());
    const auto res = run_filter(in, sched, s.prop, {}, s.target.samples);
    const auto pred = predict_amplitudes(eigen_overlaps(*s.spec, in.amplitudes), *s.spec, sched);
    CHECK(std::abs(res.ledger.cumulative_success - pred.success) <= 1e-10);
    const ComplexVector want = s.spec->eigenvectors.cast<Complex>() * pred.amplitudes;
    CHECK(fidelity(res.state.amplitudes, want) >= 1.0 - 1e-10);
    CHECK(res.ledger.cumulative_success >= 0.6 - 1e-12);
  }

  TEST_CASE("single stage success telescopes") {
    const auto s = gaussian_setup(5);
    std::mt19937_64 rng(5);
    const ComplexVector d = oracle::random_admissible_overlaps(s.spec->size(), rng);
    const SimState in{s.spec->eigenvectors.cast<Complex>() * d};
    for (int k : {1, 3, 7}) {
      const auto sched = basic_schedule(5, s.h.p(), k, 0);
      const auto res = run_filter(in, sched, s.prop, {}, s.target.samples);
      double expected = 0.0;
      for (Eigen::Index l = 0; l < d.size(); ++l) {
        const double c = std::cos(std::numbers::pi * phase_of(s.spec->eigenvalues[l], sched.t_base));
        expected += std::norm(d[l]) * std::pow(c, 2 * k);
      }
      CHECK(std::abs(res.ledger.cumulative_success - expected) <= 1e-12);
    }
  }

  TEST_CASE("fidelity never decreases under post-selection") {
    const auto s = gaussian_setup(6);
    const auto init = initial_approximation(s.target, *s.spec, InitialApproximation::coarse(3));
    const auto res = run_filter(init.state, basic_schedule(6, s.h.p()), s.prop, {}, s.target.samples);
    double prev = 0.0;
    for (const auto& b : res.ledger.blocks) {
      CHECK(b.fidelity >= prev - 1e-12);
      prev = b.fidelity;
    }
    CHECK(res.ledger.final_fidelity >= 1.0 - 1e-10);
    CHECK(res.ledger.cumulative_success >= init.ground_overlap_sq - 1e-12);
  }

  TEST_CASE("excited components are attenuated by at least 2^n") {
    for (int n : {4, 6, 8}) {
      const auto s = gaussian_setup(n);
      const auto init = initial_approximation(s.target, *s.spec, InitialApproximation::coarse(n - 2));
      const auto res = run_filter(init.state, basic_schedule(n, s.h.p()), s.prop, {}, s.target.samples);
      const ComplexVector before = eigen_overlaps(*s.spec, init.state.amplitudes);
      const ComplexVector after = eigen_overlaps(*s.spec, res.state.amplitudes);
      const double bound = std::ldexp(1.0, -n);
      for (Eigen::Index l = 1; l < before.size(); ++l) {
        const double r0 = std::abs(before[l]) / std::abs(before[0]);
        const double r1 = std::abs(after[l]) / std::abs(after[0]);
        CHECK(r1 <= bound * r0 + 1e-13);
      }
      CHECK(res.ledger.final_fidelity >= 1.0 - bound);
    }
  }

  TEST_CASE("sampled runs") {
    const auto s = gaussian_setup(5);
    const SimState in = mixture(*s.spec, 0.6, 3);
    const auto sched = basic_schedule(5, s.h.p());
    const auto a = run_filter(in, sched, s.prop, {MeasureMode::Sample, 42}, s.target.samples);
    const auto b = run_filter(in, sched, s.prop, {MeasureMode::Sample, 42}, s.target.samples);
    CHECK(a.ledger.blocks == b.ledger.blocks);
    CHECK(a.state.amplitudes == b.state.amplitudes);

    int aborted = 0;
    int completed = 0;
    for (std::uint64_t seed = 0; seed < 64; ++seed) {
      const auto r = run_filter(in, sched, s.prop, {MeasureMode::Sample, seed}, s.target.samples);
      if (r.ledger.status == RunStatus::Aborted) {
        ++aborted;
        CHECK(r.ledger.blocks.back().outcome == 1);
        CHECK(r.ledger.blocks.size() < static_cast<std::size_t>(sched.blocks()));
        for (std::size_t i = 0; i + 1 < r.ledger.blocks.size(); ++i) CHECK(r.ledger.blocks[i].outcome == 0);
      } else {
        ++completed;
        CHECK(r.ledger.final_fidelity >= 1.0 - 1e-10);
      }
    }
    CHECK(aborted > 0);
    CHECK(completed > 0);
  }

  TEST_CASE("tail measurement") {
    const auto body = sample_function(gaussian(0.5, 0.1), GridSpec(4));
    const auto ext = extend_with_tails(body, 0.5);
    const SimState state = SimState::from_real(ext.samples);
    const auto n = body.grid.size();
    double w[4];
    for (int b = 0; b < 4; ++b) w[b] = ext.samples.segment(b * n, n).squaredNorm();

    const auto post = measure_tail_qubits(state, MeasureMode::PostSelect);
    CHECK(post.outcome == static_cast<int>(TailBlock::Body));
    CHECK(post.probability == doctest::Approx(w[1]).epsilon(1e-14));
    CHECK((post.state.amplitudes.real() - body.samples).norm() < 1e-12);

    std::mt19937_64 rng(7);
    int counts[4] = {0, 0, 0, 0};
    for (int i = 0; i < 4000; ++i) ++counts[measure_tail_qubits(state, MeasureMode::Sample, &rng).outcome];
    for (int b = 0; b < 4; ++b) CHECK(std::abs(counts[b] / 4000.0 - w[b]) < 0.03);

    CHECK_THROWS_AS(measure_tail_qubits(SimState{ComplexVector::Ones(6) / std::sqrt(6.0)}, MeasureMode::PostSelect),
                    Error);
    CHECK_THROWS_AS(measure_tail_qubits(state, MeasureMode::Sample), Error);
  }

  TEST_CASE("fidelity") {
    std::mt19937_64 rng(1);
    const ComplexVector a = oracle::random_state(16, rng);
    const ComplexVector b = oracle::random_state(16, rng);
    CHECK(fidelity(a, a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(a, std::polar(1.0, 0.9) * a) == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(fidelity(a, b) == doctest::Approx(std::norm(a.dot(b))));
    ComplexVector e0 = ComplexVector::Zero(4);
    ComplexVector e1 = ComplexVector::Zero(4);
    e0[0] = 1.0;
    e1[1] = 1.0;
    CHECK(fidelity(e0, e1) == 0.0);
    check_code(Errc::NotNormalized, [&] { (void)fidelity(2.0 * a, b); });
    check_code(Errc::InvalidArgument, [&] { (void)fidelity(a, e0); });
  }

  TEST_CASE("ledger serialization") {
    const auto s = gaussian_setup(4);
    const auto sched = basic_schedule(4, s.h.p(), 2, 3);
    const auto res = run_filter(mixture(*s.spec, 0.8), sched, s.prop, {MeasureMode::Sample, 9}, s.target.samples);
    const std::string text = ledger_to_jsonl(res.ledger, {4, sched.k, s.h.p(), sched.mode, 9});
    std::istringstream in(text);
    std::string line;
    std::vector<nlohmann::json> rows;
    while (std::getline(in, line)) rows.push_back(nlohmann::json::parse(line));
    REQUIRE(rows.size() == res.ledger.blocks.size() + 1);
    for (std::size_t i = 0; i + 1 < rows.size(); ++i) {
      const auto& r = rows[i];
      CHECK(r.size() == 6);
      CHECK(r.at("s").get<int>() == res.ledger.blocks[i].s);
      CHECK(r.at("q").get<int>() == res.ledger.blocks[i].q);
      CHECK(r.at("p0").get<double>() == res.ledger.blocks[i].p0);
      CHECK(r.at("outcome").get<int>() == res.ledger.blocks[i].outcome);
      CHECK(r.contains("cum_success"));
      CHECK(r.contains("fidelity"));
    }
    const auto& tail = rows.back();
    for (const char* key : {"final_fidelity", "cum_success", "n", "k", "p", "mode", "seed", "status"}) {
      CHECK(tail.contains(key));
    }
    CHECK(tail.at("seed").get<std::uint64_t>() == 9);
    CHECK(tail.at("mode").get<std::string>() == "basic");
    CHECK(tail.at("status").get<std::string>() == to_string(res.ledger.status));

    const std::string unseeded = ledger_to_jsonl(res.ledger, {4, 2, 1, ScheduleMode::Refined, std::nullopt});
    const auto last = nlohmann::json::parse(unseeded.substr(unseeded.rfind('\n', unseeded.size() - 2) + 1));
    CHECK(last.at("seed").is_null());
    CHECK(last.at("mode").get<std::string>() == "refined");
  }
}
