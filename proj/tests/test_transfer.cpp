#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nadyn/frobenius_perron.hpp"
#include "nadyn/interval_maps.hpp"
#include "nadyn/step_density.hpp"
#include "nadyn/ulam.hpp"
#include "oracles.hpp"

using namespace nadyn;
using doctest::Approx;

namespace {

const StepDensity kHalf = StepDensity::indicator(0.0, 0.5);
const std::vector<double> kThirds = {0.0, 1.0 / 3.0, 1.0};
const StepDensity kOracle({0.0, 1.0 / 3.0, 1.0}, {0.75, 1.125});

bool is_uniform(const StepDensity& f, double tol) {
  for (double v : f.values())
    if (std::abs(v - 1.0) > tol) return false;
  return true;
}

}  // namespace

TEST_CASE("step density construction") {
  CHECK(kHalf.values()[0] == 2.0);
  CHECK(kHalf.integral() == 1.0);
  CHECK_THROWS(StepDensity({0.0, 1.0}, {2.0}));
  CHECK_THROWS(StepDensity({0.0, 0.5, 1.0}, {3.0, -1.0}));
  CHECK_THROWS(StepDensity({0.0, 0.6, 0.5, 1.0}, {1.0, 1.0, 1.0}));
  CHECK(kHalf(0.5) == 0.0);
  CHECK(kHalf(0.49) == 2.0);
  CHECK(kHalf.integral_over(0.25, 0.75) == 0.5);
  CHECK(StepDensity::from_json(kOracle.to_json()).values()[1] == 1.125);
}

TEST_CASE("fp_step examples") {
  CHECK(is_uniform(fp_step(doubling_map(), StepDensity::uniform()), 1e-15));
  CHECK(is_uniform(fp_step(doubling_map(), kHalf), 1e-15));
  const StepDensity fixed = fp_step(example33_limit_map(), kHalf);
  CHECK(l1_distance(fixed, kHalf) <= 1e-15);
  CHECK_THROWS_WITH_AS(fp_step(perturbed_tripling_map(2), kHalf), doctest::Contains("Ulam"), std::invalid_argument);
}

TEST_CASE("fp_step matches the pointwise transfer formula") {
  std::mt19937_64 rng(21);
  for (const auto& map : {doubling_map(), tripling_map(), markov_oracle_map(), example33_map(4), example33_limit_map()}) {
    for (int c = 0; c < 25; ++c) {
      const StepDensity f = random_step_density(rng, 12);
      const StepDensity g = fp_step(map, f);
      for (int i = 0; i < 400; ++i) {
        const double y = (i + 0.5) / 400.0;
        if (oracle::near_any(g.breakpoints(), y, 1e-9)) continue;
        REQUIRE(g(y) == Approx(oracle::fp_pointwise(map, f, y)).epsilon(1e-11));
      }
    }
  }
}

TEST_CASE("variation") {
  CHECK(variation(StepDensity::uniform()) == 0.0);
  CHECK(variation(kHalf) == 2.0);
  CHECK(variation(kOracle) == 0.375);
}

TEST_CASE("Ulam operator examples") {
  const UlamOperator d = build_ulam(doubling_map(), 4);
  CHECK(d.at(0, 0) == 0.5);
  CHECK(d.at(0, 1) == 0.5);
  CHECK(d.at(0, 2) == 0.0);
  CHECK(d.at(2, 0) == 0.5);
  const UlamOperator id = build_ulam(PiecewiseMap::identity(), 17);
  for (std::size_t i = 0; i < 17; ++i)
    for (std::size_t j = 0; j < 17; ++j) CHECK(id.at(i, j) == (i == j ? 1.0 : 0.0));
  for (const auto& name : builtin_map_names()) {
    const UlamOperator op = build_ulam(builtin_map(name), 256);
    for (std::size_t i = 0; i < 256; ++i) {
      double sum = 0.0;
      for (double v : op.values(i)) {
        CHECK(v >= 0.0);
        sum += v;
      }
      REQUIRE(std::abs(sum - 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS(build_ulam(doubling_map(), 1));
}

TEST_CASE("Ulam entries agree with forward sampling") {
  for (const auto& map : {tripling_map(), markov_oracle_map(), example33_map(5), perturbed_tripling_map(2)}) {
    const std::size_t bins = 24;
    const UlamOperator op = build_ulam(map, bins);
    const auto sampled = oracle::ulam_by_sampling(map, bins, 20000);
    for (std::size_t i = 0; i < bins; ++i)
      for (std::size_t j = 0; j < bins; ++j) REQUIRE(std::abs(op.at(i, j) - sampled[i][j]) <= 2e-4);
  }
}

TEST_CASE("Ulam rows do not depend on the thread split") {
  const UlamOperator big = build_ulam(perturbed_tripling_map(3), 4096);
  const UlamOperator again = build_ulam(perturbed_tripling_map(3), 4096);
  for (std::size_t i = 0; i < 4096; i += 7) {
    const auto a = big.values(i);
    const auto b = again.values(i);
    REQUIRE(a.size() == b.size());
    for (std::size_t k = 0; k < a.size(); ++k) REQUIRE(a[k] == b[k]);
  }
}

TEST_CASE("ulam_apply") {
  const BinnedMeasure u = BinnedMeasure::uniform(32);
  const BinnedMeasure same = ulam_apply(build_ulam(PiecewiseMap::identity(), 32), u);
  CHECK(l1_distance(same, u) == 0.0);
  const BinnedMeasure pushed = ulam_apply(build_ulam(doubling_map(), 32), u);
  CHECK(l1_distance(pushed, u) <= 1e-15);
  const BinnedMeasure point = ulam_apply(build_ulam(doubling_map(), 32), BinnedMeasure::point(32, 0));
  CHECK(point.binned()[0] == 1.0);
  CHECK_THROWS(ulam_apply(build_ulam(doubling_map(), 16), u));
}

TEST_CASE("invariant_density_ulam examples") {
  const StationaryResult d = invariant_density_ulam(build_ulam(doubling_map(), 64));
  CHECK(d.converged);
  CHECK(d.residual < 1e-10);
  CHECK(l1_distance(d.measure, BinnedMeasure::uniform(64)) <= 1e-10);
  const StationaryResult id = invariant_density_ulam(build_ulam(PiecewiseMap::identity(), 10));
  CHECK(l1_distance(id.measure, BinnedMeasure::uniform(10)) <= 1e-15);
  const StationaryResult m = invariant_density_ulam(build_ulam(markov_oracle_map(), 96));
  CHECK(l1_distance(m.measure.to_density(), kOracle) <= 1e-10);
}

TEST_CASE("property: Ulam invariant vector of the Markov map matches the exact density") {
  const StepDensity exact = markov_exact_invariant(markov_oracle_map(), kThirds);
  for (std::size_t k = 1; k <= 64; ++k) {
    const StationaryResult r = invariant_density_ulam(build_ulam(markov_oracle_map(), 3 * k));
    REQUIRE(l1_distance(r.measure.to_density(), exact) <= 1e-9);
  }
}

TEST_CASE("property: Ulam invariant vector of doubling is uniform") {
  for (std::size_t bins : {2, 3, 5, 8, 10, 64, 100, 257, 1024}) {
    const StationaryResult r = invariant_density_ulam(build_ulam(doubling_map(), bins));
    REQUIRE(l1_distance(r.measure, BinnedMeasure::uniform(bins)) <= 1e-10);
  }
}

TEST_CASE("markov_exact_invariant") {
  const StepDensity m = markov_exact_invariant(markov_oracle_map(), kThirds);
  // Hand solution: u = 2v/3 and u/3 + 2v/3 = 1.
  CHECK(m.values()[0] == Approx(0.75).epsilon(1e-14));
  CHECK(m.values()[1] == Approx(1.125).epsilon(1e-14));
  const std::vector<double> halves = {0.0, 0.5, 1.0};
  CHECK(is_uniform(markov_exact_invariant(doubling_map(), halves), 1e-14));
  const std::vector<double> thirds = {0.0, 1.0 / 3.0, 2.0 / 3.0, 1.0};
  CHECK(is_uniform(markov_exact_invariant(tripling_map(), thirds), 1e-14));
  const std::vector<double> coarse = {0.0, 1.0};
  CHECK_THROWS_AS(markov_exact_invariant(markov_oracle_map(), coarse), std::invalid_argument);
  const std::vector<double> bad = {0.0, 0.2, 1.0 / 3.0, 1.0};
  CHECK_THROWS_AS(markov_exact_invariant(markov_oracle_map(), bad), std::invalid_argument);
  CHECK_THROWS_AS(markov_exact_invariant(PiecewiseMap::identity(), halves), std::domain_error);
}

TEST_CASE("l1_distance examples") {
  CHECK(l1_distance(kHalf, kHalf) == 0.0);
  CHECK(l1_distance(StepDensity::uniform(), kHalf) == 1.0);
  CHECK(l1_distance(kOracle, StepDensity::uniform()) == Approx(1.0 / 6.0).epsilon(1e-15));
}

TEST_CASE("property: l1_distance against quadrature and metric axioms") {
  std::mt19937_64 rng(22);
  for (int c = 0; c < 200; ++c) {
    const StepDensity f = random_step_density(rng, 8);
    const StepDensity g = random_step_density(rng, 8);
    const StepDensity h = random_step_density(rng, 8);
    const double fg = l1_distance(f, g);
    CHECK(fg >= 0.0);
    CHECK(fg == l1_distance(g, f));
    CHECK(fg <= l1_distance(f, h) + l1_distance(h, g) + 1e-12);
    if (c < 20) CHECK(fg == Approx(oracle::l1_numeric([&](double x) { return f(x) - g(x); })).epsilon(1e-3));
  }
}

TEST_CASE("cdf_distance is the Wasserstein-1 distance") {
  // Two point masses at a and b are |a - b| apart.
  const BinnedMeasure a = BinnedMeasure::point(8, 1);
  const BinnedMeasure b = BinnedMeasure::point(8, 5);
  CHECK(cdf_distance(a, b) == Approx(0.5).epsilon(1e-15));
  // Point mass at 0 versus uniform: integral of 1 - x over [0, 1].
  CHECK(cdf_distance(BinnedMeasure::point(8, 0), BinnedMeasure::uniform(8)) == Approx(0.5).epsilon(1e-15));
  std::mt19937_64 rng(23);
  for (int c = 0; c < 20; ++c) {
    const StepDensity f = random_step_density(rng, 6);
    const StepDensity g = random_step_density(rng, 6);
    const BinnedMeasure fm = BinnedMeasure::from_density(f, 16);
    const BinnedMeasure gm = BinnedMeasure::from_density(g, 16);
    const StepDensity fd = fm.to_density();
    const StepDensity gd = gm.to_density();
    const double quad = oracle::l1_numeric([&](double x) { return fd.integral_over(0, x) - gd.integral_over(0, x); },
                                           20000);
    CHECK(cdf_distance(fm, gm) == Approx(quad).epsilon(1e-6));
  }
}

TEST_CASE("coarsen examples") {
  const Coarsened u = coarsen(StepDensity::uniform(), 5);
  CHECK(is_uniform(u.density, 0.0));
  CHECK(u.error == 0.0);
  const Coarsened h = coarsen(kHalf, 4);
  CHECK(l1_distance(h.density, kHalf) == 0.0);
  CHECK(h.error == 0.0);
  const Coarsened t = coarsen(kHalf, 3);
  CHECK(t.density(0.5) == Approx(1.0).epsilon(1e-15));
  CHECK(t.error == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(t.density.integral() == Approx(1.0).epsilon(1e-15));
  CHECK_THROWS(coarsen(kHalf, 1));
}

TEST_CASE("Lasota-Yorke check examples") {
  const LYReport u = ly_inequality_check(tripling_map(), StepDensity::uniform());
  CHECK(u.lhs == 0.0);
  CHECK(u.rhs == Approx(6.0).epsilon(1e-12));
  CHECK(u.holds);
  const LYReport h = ly_inequality_check(tripling_map(), kHalf);
  CHECK(h.rhs == Approx(22.0 / 3.0).epsilon(1e-12));
  CHECK(h.lhs == Approx(variation(fp_step(tripling_map(), kHalf))).epsilon(1e-15));
  CHECK(h.holds);
}

TEST_CASE("property: transport preserves integral and positivity and obeys the LY inequality") {
  std::mt19937_64 rng(24);
  const std::vector<PiecewiseMap> expanding = {doubling_map(), tripling_map(), markov_oracle_map()};
  for (int c = 0; c < 500; ++c) {
    const StepDensity f = random_step_density(rng);
    for (const auto& map : expanding) {
      const StepDensity g = fp_step(map, f);
      REQUIRE(std::abs(g.integral() - f.integral()) <= 1e-12);
      for (double v : g.values()) REQUIRE(v >= 0.0);
      const LYConstants k = ly_constants(map);
      REQUIRE(oracle::jump_sum(g.values()) <= k.A * oracle::jump_sum(f.values()) + k.B * f.integral() + 1e-10);
      REQUIRE(ly_inequality_check(map, f).holds);
    }
    const StepDensity e = fp_step(example33_map(3), f);
    REQUIRE(std::abs(e.integral() - f.integral()) <= 1e-12);
  }
}

TEST_CASE("COO export lists every stored entry") {
  const UlamOperator d = build_ulam(doubling_map(), 4);
  std::ostringstream out;
  d.write_coo(out);
  std::istringstream in(out.str());
  std::size_t r = 0, c = 0, lines = 0;
  double v = 0.0;
  while (in >> r >> c >> v) {
    CHECK(d.at(r, c) == v);
    ++lines;
  }
  CHECK(lines == 8);
}
