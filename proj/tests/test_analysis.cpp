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
#include <numbers>
#include <random>
#include <vector>

#include "doctest.h"
#include "oracles.hpp"
#include "qsprep/analysis.hpp"
#include "qsprep/error.hpp"

using namespace qsprep;

namespace {

Complex g_reference(double phi, int j) {
  const Complex e = std::polar(1.0, 2.0 * std::numbers::pi * phi);
  return 0.5 * (1.0 + (j == 0 ? e : -e));
}

TargetFunction gauss(int n) { return sample_function(gaussian(0.5, 0.1), GridSpec(n), "gaussian"); }

Hamiltonian hamiltonian_for(const TargetFunction& t) { return assemble_hamiltonian(build_potential(t), t.grid); }

}  // namespace

TEST_SUITE("analysis") {
  TEST_CASE("g function worked values") {
    CHECK(std::abs(g_function(0.0, 0) - Complex(1.0, 0.0)) == 0.0);
    CHECK(std::abs(g_function(0.5, 0)) <= 1e-16);
    CHECK(std::abs(g_function(0.25, 0) - Complex(0.5, 0.5)) <= 1e-15);
    CHECK(std::abs(g_function(0.5, 1) - Complex(1.0, 0.0)) <= 1e-15);
    CHECK(std::abs(g_function(0.0, 1)) <= 1e-16);
    CHECK(std::abs(g_function(0.75, 0) - Complex(0.5, -0.5)) <= 1e-15);
    CHECK_THROWS_AS(g_function(0.1, 2), Error);
  }

  TEST_CASE("g function against the ancilla amplitude") {
    for (int i = 0; i <= 2000; ++i) {
      const double phi = i / 2000.0;
      for (int j : {0, 1}) {
        const Complex g = g_function(phi, j);
        CHECK(std::abs(g - g_reference(phi, j)) <= 1e-14);
        CHECK(std::abs(g) <= 1.0 + 1e-15);
      }
      CHECK(std::norm(g_function(phi, 0)) + std::norm(g_function(phi, 1)) == doctest::Approx(1.0).epsilon(1e-14));
    }
  }

  TEST_CASE("exact trigonometric reductions") {
    for (int k = -8; k <= 8; ++k) {
      CHECK(sin_pi(k) == 0.0);
      CHECK(std::abs(cos_pi(k)) == 1.0);
      CHECK(cos_pi(k + 0.5) == 0.0);
      CHECK(std::abs(sin_pi(k + 0.5)) == 1.0);
    }
    CHECK(sin_pi(0.5) == 1.0);
    CHECK(sin_pi(1.5) == -1.0);
    CHECK(sin_pi(-0.5) == -1.0);
    CHECK(cos_pi(1.0) == -1.0);
    std::mt19937_64 rng(2);
    std::uniform_real_distribution<double> uni(-20.0, 20.0);
    for (int i = 0; i < 1000; ++i) {
      const double x = uni(rng);
      CHECK(std::abs(sin_pi(x) - std::sin(std::numbers::pi * x)) <= 1e-13);
      CHECK(std::abs(cos_pi(x) - std::cos(std::numbers::pi * x)) <= 1e-13);
    }
    CHECK(sin_pi(1e-300) == doctest::Approx(std::numbers::pi * 1e-300));
  }

  TEST_CASE("prediction") {
    const auto t = gauss(5);
    const auto spec = diagonalize(hamiltonian_for(t));
    const auto sched = basic_schedule(5, hamiltonian_for(t).p());

    ComplexVector ground = ComplexVector::Zero(spec.size());
    ground[0] = 1.0;
    const auto p0 = predict_amplitudes(ground, spec, sched);
    CHECK(p0.success >= 1.0 - 1e-10);
    CHECK(std::abs(p0.amplitudes[0]) >= 1.0 - 1e-12);

    ComplexVector d = ComplexVector::Zero(spec.size());
    d[0] = std::sqrt(0.6);
    d[4] = std::sqrt(0.4);
    const auto p = predict_amplitudes(d, spec, sched);
    double factor = 1.0;
    for (int s = 0; s <= sched.s_max; ++s) {
      factor *= std::pow(std::abs(std::cos(spec.eigenvalues[4] * sched.duration(s) / 2.0)), sched.k);
    }
    CHECK(p.success >= 0.6 - 1e-9);
    CHECK(p.success <= 0.6 + 0.4 * factor * factor + 1e-12);
    CHECK(std::abs(p.amplitudes[4]) / std::abs(p.amplitudes[0]) <=
          factor * std::sqrt(0.4 / 0.6) * (1.0 + 1e-9) + 1e-300);
    CHECK(std::abs(p.amplitudes.norm() - 1.0) <= 1e-14);

    CHECK_THROWS_AS(predict_amplitudes(2.0 * d, spec, sched), Error);
    CHECK_THROWS_AS(predict_amplitudes(ComplexVector::Ones(3) / std::sqrt(3.0), spec, sched), Error);
  }

  TEST_CASE("perturbation with eps = 0") {
    const auto h = hamiltonian_for(gauss(4));
    const auto spec = diagonalize(h);
    const auto r = verify_probability_perturbation(spec, 1.0 / spec.gap, 50, 0.0, 1);
    CHECK(r.sqrt_violations == 0);
    CHECK(r.prob_violations == 0);
    CHECK(r.max_delta == 0.0);
    const auto s = verify_state_perturbation(spec, 1.0 / spec.gap, 50, 0.0, 1);
    CHECK(s.violations == 0);
    CHECK(s.max_deviation == 0.0);
  }

  TEST_CASE("probability perturbation bounds") {
    const auto h = hamiltonian_for(gauss(5));
    const auto spec = diagonalize(h);
    for (double eps : {1e-8, 1e-6, 1e-3}) {
      const auto r = verify_probability_perturbation(spec, 1.0 / spec.gap, 300, eps, 17);
      CHECK(r.trials == 300);
      CHECK(r.sqrt_violations == 0);
      CHECK(r.prob_violations == 0);
      CHECK(r.max_sqrt_ratio <= 1.0);
      CHECK(r.max_prob_ratio < 1.0);
      // ||U (e^{i eps K} - I)|| = 2 sin(eps/2) for a unit-norm K.
      CHECK(r.min_delta_over_eps >= 1.0 / 1.01);
      CHECK(r.max_delta_over_eps <= 1.01);
    }
  }

  TEST_CASE("state perturbation is first order") {
    const auto h = hamiltonian_for(gauss(5));
    const auto spec = diagonalize(h);
    std::vector<double> eps;
    std::vector<double> dev;
    for (double e : {1e-7, 1e-6, 1e-5, 1e-4}) {
      const auto r = verify_state_perturbation(spec, 1.0 / spec.gap, 200, e, 23);
      CHECK(r.violations == 0);
      CHECK(r.max_envelope_ratio <= 1.0);
      eps.push_back(e);
      dev.push_back(r.mean_deviation);
    }
    CHECK(loglog_slope(eps, dev) == doctest::Approx(1.0).epsilon(0.05));
  }

  TEST_CASE("perturbation runs are reproducible and size limited") {
    const auto h = hamiltonian_for(gauss(4));
    const auto a = verify_state_perturbation(h, 0.01, 20, 1e-5, 99);
    const auto b = verify_state_perturbation(h, 0.01, 20, 1e-5, 99);
    CHECK(a.max_deviation == b.max_deviation);
    CHECK(a.mean_deviation == b.mean_deviation);
    CHECK(to_json(a) == to_json(b));
    try {
      (void)verify_probability_perturbation(hamiltonian_for(gauss(9)), 0.01, 1, 1e-5, 1);
      FAIL("expected TooLarge");
    } catch (const Error& e) {
      CHECK(e.code() == Errc::TooLarge);
    }
  }

  TEST_CASE("log-log slope") {
    const std::vector<double> x{1.0, 2.0, 4.0, 8.0};
    std::vector<double> y;
    for (double v : x) y.push_back(3.0 * v * v * v);
    CHECK(loglog_slope(x, y) == doctest::Approx(3.0).epsilon(1e-12));
    CHECK_THROWS_AS(loglog_slope(std::vector<double>{1.0}, std::vector<double>{1.0}), Error);
  }

  TEST_CASE("total error: exact against exact") {
    TotalErrorConfig cfg{gauss(4), InitialApproximation::coarse(2), basic_schedule(4, 1), EvolutionMode::Exact, 4, 1.0};
    const auto h = hamiltonian_for(cfg.target);
    cfg.schedule = basic_schedule(4, h.p());
    const auto r = total_error_experiment(cfg);
    CHECK(r.budget.total_deviation == 0.0);
    CHECK(r.envelope == 0.0);
    CHECK(r.within_envelope);
    CHECK(r.exact_fidelity == r.compared_fidelity);
  }

  TEST_CASE("total error shrinks with the splitting duration") {
    const auto t = gauss(4);
    const auto h = hamiltonian_for(t);
    auto run = [&](int shift) {
      FilterSchedule sched = basic_schedule(4, h.p(), 2, 4);
      sched.t_base = std::ldexp(1.0, -(8 + h.p() + shift));
      return total_error_experiment({t, InitialApproximation::coarse(2), sched, EvolutionMode::Split, 1, 0.0});
    };
    const auto coarse = run(4);
    const auto fine = run(8);
    CHECK(coarse.within_envelope);
    CHECK(fine.within_envelope);
    CHECK(coarse.budget.total_deviation > 0.0);
    CHECK(fine.budget.total_deviation * 10.0 <= coarse.budget.total_deviation);
    CHECK(fine.budget.probability_violations == 0);
    CHECK(fine.stage_defects.size() == 5);
  }

  TEST_CASE("seed derivation") {
    CHECK(derive_seed(1, 0) != derive_seed(1, 1));
    CHECK(derive_seed(1, 0) != derive_seed(2, 0));
    CHECK(derive_seed(5, 7) == derive_seed(5, 7));
  }
}
