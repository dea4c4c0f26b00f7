#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "nadyn/frobenius_perron.hpp"
#include "nadyn/map_sequence.hpp"
#include "nadyn/nonauto.hpp"
#include "oracles.hpp"

using namespace nadyn;
using doctest::Approx;

namespace {

const MapSequence kDoubling = make_family("constant", {"doubling"});
const MapSequence kExample = make_family("example33");
const StepDensity kHalf = StepDensity::indicator(0.0, 0.5);

double mass_below_half(const BinnedMeasure& m) {
  const auto b = m.binned();
  double s = 0.0;
  for (std::size_t i = 0; i < b.size() / 2; ++i) s += b[i];
  return s;
}

}  // namespace

TEST_CASE("compose_eval") {
  CHECK(compose_eval(kDoubling, 0, 3, 0.2) == Approx(0.6).epsilon(1e-15));
  CHECK(compose_eval(kExample, 2, 4, 0.4) == Approx(0.1).epsilon(1e-15));
  CHECK(compose_eval(kExample, 0, 0, 0.77) == 0.77);
  CHECK_THROWS(compose_eval(kExample, 3, 2, 0.1));
  CHECK(terms(kExample, 2, 5).size() == 4);
}

TEST_CASE("pushforward") {
  const BinnedMeasure u = BinnedMeasure::uniform(64);
  for (std::size_t n : {0, 1, 5, 20}) CHECK(l1_distance(pushforward(kDoubling, n, u), u) <= 1e-14);
  const BinnedMeasure e = pushforward(kExample, 400, BinnedMeasure::uniform(256));
  CHECK(mass_below_half(e) > 0.9);
  CHECK(std::abs(e.mass() - 1.0) <= 1e-10);
}

TEST_CASE("cesaro_measures examples") {
  const CesaroTrace u = cesaro_measures(kDoubling, 30, BinnedMeasure::uniform(32));
  for (const auto& r : u.rows) CHECK(r.invariance_defect <= 1e-15);
  CHECK(l1_distance(*u.final_measure, BinnedMeasure::uniform(32)) <= 1e-14);

  const CesaroTrace p = cesaro_measures(kDoubling, 30, BinnedMeasure::point(32, 0));
  CHECK(p.final_measure->atoms().size() == 1);
  CHECK(p.final_measure->atoms()[0].position == 0.0);
  CHECK(p.final_measure->atoms()[0].mass == Approx(1.0).epsilon(1e-14));
  for (const auto& r : p.rows) CHECK(r.invariance_defect <= 1e-14);

  MeasureTraceOptions opts;
  opts.snapshot_every = 1;
  const CesaroTrace e = cesaro_measures(kExample, 300, BinnedMeasure::uniform(256), opts);
  double prev = 0.0;
  for (const auto& [n, w] : e.snapshots) {
    double low = 0.0;
    for (std::size_t i = 0; i < 128; ++i) low += w[i];
    CHECK(low >= prev - 1e-12);
    prev = low;
  }
  CHECK(prev >= 0.9);
  for (std::size_t i = 1; i < e.rows.size(); ++i) CHECK(e.rows[i].n > e.rows[i - 1].n);
}

TEST_CASE("kb_defect") {
  const BinnedMeasure u = BinnedMeasure::uniform(64);
  for (int j = 0; j <= 4; ++j) CHECK(kb_defect(kDoubling, 25, Observable::monomial(j), u) <= 1e-10);
  // Non-invariant start: telescoping leaves |nu_1(g) - nu_{n+1}(g)| / n.
  const BinnedMeasure point = BinnedMeasure::point(64, 20);
  for (std::size_t n : {5, 20, 80}) CHECK(kb_defect(kDoubling, n, Observable::cosine(1), point) <= 2.0 / n + 1e-12);
  CHECK(kb_defect(kExample, 40, Observable::monomial(0), BinnedMeasure::uniform(64)) == 0.0);
  const double d10 = kb_defect(kExample, 10, Observable::monomial(1), BinnedMeasure::uniform(512));
  const double d100 = kb_defect(kExample, 100, Observable::monomial(1), BinnedMeasure::uniform(512));
  const double d1000 = kb_defect(kExample, 1000, Observable::monomial(1), BinnedMeasure::uniform(512));
  CHECK(d10 > d100);
  CHECK(d100 > d1000);
}

TEST_CASE("expectations against hand integrals") {
  CHECK(expectation(kHalf, Observable::monomial(1)) == Approx(0.25).epsilon(1e-15));
  CHECK(expectation(BinnedMeasure::uniform(10), Observable::monomial(2)) == Approx(1.0 / 3.0).epsilon(1e-14));
  CHECK(expectation(BinnedMeasure::point(4, 2), Observable::monomial(1)) == 0.5);
  CHECK(std::abs(expectation(StepDensity::uniform(), Observable::sine(3))) <= 1e-15);
}

TEST_CASE("cesaro_densities examples") {
  DensityTraceOptions opts;
  opts.reference = StepDensity::uniform();
  for (const StepDensity& f : {StepDensity::uniform(), kHalf}) {
    const CesaroTrace t = cesaro_densities(kDoubling, 12, f, opts);
    for (const auto& r : t.rows) CHECK(r.l1_to_reference <= 1e-14);
  }
  opts.mode = TransportMode::Ulam;
  opts.n_bins = 512;
  const CesaroTrace p = cesaro_densities(make_family("perturbed_tripling"), 200, StepDensity::uniform(), opts);
  CHECK(p.rows.back().l1_to_reference < 0.05);
  CHECK_THROWS_AS(cesaro_densities(make_family("perturbed_tripling"), 3, kHalf, {}), std::invalid_argument);
}

TEST_CASE("property: Cesaro densities equal direct averaging of iterates") {
  std::mt19937_64 rng(31);
  for (const auto& name : {"doubling", "tripling", "markov_oracle", "example33_limit"}) {
    const MapSequence seq = make_family("constant", {name});
    const StepDensity f = random_step_density(rng, 10);
    const std::size_t n = 15;
    const CesaroTrace t = cesaro_densities(seq, n, f);
    std::vector<StepDensity> iterates;
    StepDensity g = f;
    for (std::size_t i = 0; i < n; ++i) iterates.push_back(g = fp_step(seq.limit(), g));
    // Average by pointwise sampling on a grid finer than every breakpoint set.
    const double quad = oracle::l1_numeric(
        [&](double x) {
          double s = 0.0;
          for (const auto& it : iterates) s += it(x);
          return s / static_cast<double>(n) - (*t.final_density)(x);
        },
        1 << 16);
    CHECK(quad <= 1e-10);
  }
}

TEST_CASE("property: trace masses stay at one") {
  std::mt19937_64 rng(32);
  DensityTraceOptions opts;
  opts.breakpoint_cap = 64;
  opts.n_bins = 32;
  const CesaroTrace t = cesaro_densities(kExample, 60, random_step_density(rng, 10), opts);
  for (const auto& r : t.rows) CHECK(std::abs(r.mass - 1.0) <= 1e-9 + r.coarsen_budget);
  CHECK(t.rows.back().coarsen_budget > 0.0);
  const CesaroTrace m = cesaro_measures(kExample, 200, BinnedMeasure::uniform(128));
  for (const auto& r : m.rows) CHECK(std::abs(r.mass - 1.0) <= 1e-9);
}

TEST_CASE("invariance_defect") {
  CHECK(invariance_defect(example33_limit_map(), kHalf) <= 1e-12);
  CHECK(invariance_defect(doubling_map(), StepDensity::uniform()) == 0.0);
  CHECK(invariance_defect(doubling_map(), kHalf) == Approx(1.0).epsilon(1e-15));
  CHECK(invariance_defect(doubling_map(), BinnedMeasure::uniform(16)) <= 1e-15);
}

TEST_CASE("CSV layout") {
  const CesaroTrace t = cesaro_measures(kDoubling, 3, BinnedMeasure::uniform(8));
  std::ostringstream out;
  t.write_csv(out);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line == "n,l1_to_reference,invariance_defect,kb_defect,variation,mass,coarsen_budget");
  std::size_t rows = 0;
  while (std::getline(in, line)) {
    ++rows;
    CHECK(line.rfind(std::to_string(rows) + ",nan,", 0) == 0);
  }
  CHECK(rows == 3);
}
