#include <cmath>
#include <random>

#include "doctest.h"
#include "nadyn/interval_maps.hpp"
#include "nadyn/map_sequence.hpp"
#include "oracles.hpp"

using namespace nadyn;
using doctest::Approx;

TEST_CASE("evaluation uses the half-open cell convention") {
  CHECK(example33_map(5)(0.4) == Approx(0.32).epsilon(1e-15));
  CHECK(example33_map(7)(0.75) == 0.5);
  CHECK(PiecewiseMap::identity()(0.3) == 0.3);
  // 1/2 belongs to the second cell.
  CHECK(example33_map(3)(0.5) == 0.0);
  CHECK(doubling_map()(0.5) == 0.0);
  CHECK(doubling_map()(1.0) == 1.0);
  CHECK(doubling_map().branch_index(0.5) == 1);
  CHECK(tripling_map().branch_index(1.0) == 2);
}

TEST_CASE("derivatives") {
  CHECK(tripling_map().derivative(0.1) == 3.0);
  CHECK(example33_map(4).derivative(0.2) == Approx(0.75).epsilon(1e-15));
  CHECK(example33_map(9).derivative(0.9) == 2.0);
  // Partition point: one-sided derivative from the owning cell.
  CHECK(example33_map(4).derivative(0.5) == 2.0);
}

TEST_CASE("branch inverses") {
  CHECK(doubling_map().branch_inverse(1, 0.5).value() == 0.75);
  CHECK(example33_limit_map().branch_inverse(1, 0.0).value() == 0.5);
  CHECK(tripling_map().branch_inverse(0, 0.9).value() == Approx(0.3).epsilon(1e-15));
  CHECK_FALSE(markov_oracle_map().branch_inverse(0, 0.2).has_value());
}

TEST_CASE("preimages of intervals") {
  const IntervalSet d = doubling_map().preimage(Interval{0.0, 0.25});
  REQUIRE(d.size() == 2);
  CHECK(d.pieces()[0] == Interval{0.0, 0.125});
  CHECK(d.pieces()[1] == Interval{0.5, 0.625});
  CHECK(d.measure() == 0.25);

  const IntervalSet e = example33_limit_map().preimage(Interval{0.0, 0.5});
  REQUIRE(e.size() == 1);
  CHECK(e.pieces()[0].lo == 0.0);
  CHECK(e.pieces()[0].hi == 0.75);

  const IntervalSet t = tripling_map().preimage(Interval{0.3, 0.6});
  REQUIRE(t.size() == 3);
  for (const auto& p : t.pieces()) CHECK(p.length() == Approx(0.1).epsilon(1e-12));
}

TEST_CASE("Lasota-Yorke constants") {
  const LYConstants t = ly_constants(tripling_map());
  CHECK(t.s == Approx(3.0).epsilon(1e-15));
  CHECK(t.h == Approx(1.0 / 3.0).epsilon(1e-15));
  CHECK(t.q == 3);
  CHECK(t.A == Approx(2.0 / 3.0).epsilon(1e-15));
  CHECK(t.B == Approx(6.0).epsilon(1e-12));
  CHECK(t.contracting);

  const LYConstants d = ly_constants(doubling_map());
  CHECK(d.A == 1.0);
  CHECK(d.B == 4.0);
  CHECK_FALSE(d.contracting);

  // Branch t + (1/4) t (1 - t) has derivative 1 + (1 - 2t)/4 >= 3/4 in cell
  // coordinates, so 3 * 3/4 in x.
  const LYConstants p = ly_constants(perturbed_tripling_map(4));
  CHECK(p.s == Approx(9.0 / 4.0).epsilon(1e-12));
  CHECK(p.A == Approx(8.0 / 9.0).epsilon(1e-12));
}

TEST_CASE("non-expanding maps are rejected by name") {
  CHECK_THROWS_WITH_AS(ly_constants(example33_map(3)), doctest::Contains("branch 0"), std::domain_error);
  CHECK_THROWS_AS(ly_constants(PiecewiseMap::identity()), std::domain_error);
}

TEST_CASE("map construction validation") {
  CHECK_THROWS(PiecewiseMap({Branch(0.0, 0.4, AffineRule{1.0, 0.0}), Branch(0.5, 1.0, AffineRule{1.0, 0.0})}));
  CHECK_THROWS(Branch(0.0, 1.0, AffineRule{2.0, 0.0}));
  CHECK_THROWS(Branch(0.0, 1.0, AffineRule{0.0, 0.5}));
  CHECK_THROWS(example33_map(1));
}

TEST_CASE("uniform distance") {
  const MapSequence e = make_family("example33");
  CHECK(uniform_distance(e, 10) == 1.0 / 20.0);
  for (std::size_t n = 2; n <= 200; ++n) {
    CHECK(uniform_distance(e, n) == 1.0 / (2.0 * static_cast<double>(n)));
    CHECK(sup_distance_on_grid(e.term(n), e.limit()) <= uniform_distance(e, n) + 1e-15);
  }
  CHECK(uniform_distance(make_family("constant", {"doubling"}), 7) == 0.0);
  const MapSequence p = make_family("perturbed_tripling");
  for (std::size_t n = 1; n <= 50; ++n) {
    CHECK(uniform_distance(p, n) <= 1.0 / (4.0 * static_cast<double>(n)));
    CHECK(sup_distance_on_grid(p.term(n), p.limit()) <= uniform_distance(p, n) + 1e-12);
    if (n > 1) CHECK(uniform_distance(p, n) <= uniform_distance(p, n - 1));
  }
  CHECK_THROWS(uniform_distance(e, 0));
}

TEST_CASE("families") {
  const MapSequence e = make_family("example33");
  CHECK(e.term(2)(0.25) == 0.125);
  CHECK(e.term(0)(0.37) == 0.37);
  // Index 1 aliases n = 2.
  CHECK(e.term(1)(0.25) == 0.125);
  const MapSequence p = make_family("perturbed_tripling");
  CHECK(p.limit().name() == "tripling");
  for (double x : {0.1, 0.2, 0.5, 0.9}) CHECK(std::abs(p.term(100000)(x) - tripling_map()(x)) < 1e-5);
  CHECK_THROWS_WITH(make_family("lsv"), doctest::Contains("supported families"));
  CHECK_THROWS(make_family("constant", {}));
  CHECK_THROWS(make_family("perturbed_tripling", {"2"}));
}

TEST_CASE("uniform constants over a sequence") {
  const MapSequence p = make_family("perturbed_tripling");
  const LYConstants u = uniform_ly_constants(p, 2, 20);
  for (std::size_t n = 2; n <= 20; ++n) {
    const LYConstants c = ly_constants(p.term(n));
    CHECK(u.q_u >= c.q);
    CHECK(u.s_u <= c.s);
  }
}

TEST_CASE("property: preimage measure is at most (q/s) m(J)") {
  std::mt19937_64 rng(11);
  for (const auto& map : {doubling_map(), tripling_map(), markov_oracle_map(), perturbed_tripling_map(3, 0.5)}) {
    const LYConstants c = ly_constants(map);
    const double k = static_cast<double>(c.q) / c.s;
    for (int i = 0; i < 10000; ++i) {
      const Interval j = oracle::random_interval(rng);
      REQUIRE(map.preimage(j).measure() <= k * j.length() + 1e-12);
    }
  }
}

TEST_CASE("property: preimages agree with forward membership") {
  std::mt19937_64 rng(12);
  const std::vector<PiecewiseMap> maps = {doubling_map(),       tripling_map(),     markov_oracle_map(),
                                          example33_map(6),     example33_limit_map(), perturbed_tripling_map(2)};
  for (const auto& map : maps) {
    for (int c = 0; c < 20; ++c) {
      const Interval j = oracle::random_interval(rng);
      const IntervalSet target({j});
      const IntervalSet pre = map.preimage(j);
      for (int i = 0; i < 10000; ++i) {
        const double x = (i + 0.5) / 10000.0;
        const double y = map(x);
        if (oracle::near_boundary(target, y, 1e-9) || oracle::near_any(map.partition(), x, 1e-9)) continue;
        REQUIRE(pre.contains(x) == target.contains(y));
      }
    }
  }
}

TEST_CASE("property: inverse of evaluation") {
  std::mt19937_64 rng(13);
  for (const auto& map : {tripling_map(), markov_oracle_map(), example33_map(5)}) {
    for (int i = 0; i < 2000; ++i) {
      const double x = oracle::uniform01(rng);
      const std::size_t b = map.branch_index(x);
      CHECK(map.branch_inverse(b, map(x)).value() == Approx(x).epsilon(1e-15).scale(1.0));
    }
  }
  const PiecewiseMap analytic = perturbed_tripling_map(3);
  for (int i = 0; i < 2000; ++i) {
    const double x = oracle::uniform01(rng);
    const std::size_t b = analytic.branch_index(x);
    CHECK(std::abs(analytic.branch_inverse(b, analytic(x)).value() - x) <= 1e-10);
  }
}
