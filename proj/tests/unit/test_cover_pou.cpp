#include <doctest.h>

#include <cmath>

#include "mfda/cover.hpp"
#include "mfda/pou.hpp"
#include "mfda/source.hpp"

using namespace mfda;

TEST_SUITE("cover_pou") {
  TEST_CASE("uniform covers") {
    const Cover one = uniform_cover(1, 0.25);
    CHECK(one.size() == 1);
    CHECK(overlap_count(one) == 1);
    const Cover four = uniform_cover(4, 0.25);
    CHECK(four.size() == 16);
    CHECK(overlap_count(four) == 9);
    REQUIRE(four.uniform_scale().has_value());
    CHECK(*four.uniform_scale() == doctest::Approx(four.max_diameter()));
    CHECK_THROWS(uniform_cover(4, 0.5));
    CHECK_THROWS(uniform_cover(0, 0.25));
  }

  TEST_CASE("collared diameter") {
    const Subdomain q{0.0, 0.0, kPi / 2, kPi / 2, kPi / 8};
    CHECK(q.diameter() == doctest::Approx((kPi / 2 + kPi / 4) * std::sqrt(2.0)).epsilon(1e-14));
  }

  TEST_CASE("two by two cover: every collar meets every other") {
    CHECK(overlap_count(uniform_cover(2, 0.4)) == 4);
  }

  TEST_CASE("dyadic covers") {
    const Cover d1 = dyadic_cover(1);
    CHECK(d1.size() == 1);
    const Cover d2 = dyadic_cover(2);
    CHECK(d2.max_diameter() / d2.min_diameter() > 1.2);
    CHECK(d2.check_delta_adic(2.0));
    CHECK_FALSE(d2.uniform_scale().has_value());
    // A 2:1 refinement corner is met by ten collared cells.
    CHECK(overlap_count(dyadic_cover(3)) == 10);
  }

  TEST_CASE("tiles of a uniform cover form one class") {
    const MultiplicityReport r = partition_multiplicity(uniform_cover(4, 0.25));
    CHECK(r.determined);
    CHECK(r.multiplicity == 1);
    CHECK(r.sandwich_holds);
  }

  TEST_CASE("half-stepped squares need four classes") {
    const double s = kPi / 2, d = 0.05;
    std::vector<Subdomain> cells;
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) cells.push_back({i * s / 2 + d / 2, j * s / 2 + d / 2, s - d, s - d, d});
    const MultiplicityReport r = partition_multiplicity(Cover(cells));
    CHECK(r.multiplicity == 4);
    CHECK(r.determined);
    CHECK(r.sandwich_holds);
    CHECK(r.lower == doctest::Approx(4.0 * kPi * kPi).epsilon(1e-10));
  }

  TEST_CASE("overlap integral bounds") {
    const AnalyticSource one = constant_source(1.0);
    const OverlapIntegralReport single = check_overlap_integral(uniform_cover(1, 0.25), one);
    CHECK(single.lower == doctest::Approx(single.integral));
    CHECK(single.upper == doctest::Approx(single.integral));
    const OverlapIntegralReport grid = check_overlap_integral(uniform_cover(4, 0.25), one);
    CHECK(grid.holds);
    CHECK(grid.lower < grid.integral);
    CHECK(grid.integral < grid.upper);
    const AnalyticSource sin2([](double x, double, int ax, int ay) {
      if (ay) return 0.0;
      switch (ax % 4) {
        case 0: return ax == 0 ? std::sin(x) * std::sin(x) : -std::pow(2.0, ax - 1) * std::cos(2 * x);
        case 1: return std::pow(2.0, ax - 1) * std::sin(2 * x);
        case 2: return std::pow(2.0, ax - 1) * std::cos(2 * x);
        default: return -std::pow(2.0, ax - 1) * std::sin(2 * x);
      }
    });
    CHECK(check_overlap_integral(uniform_cover(4, 0.25), sin2).holds);
  }

  TEST_CASE("single cell partition is identically one") {
    const PartitionOfUnity p = build_pou(uniform_cover(1, 0.25));
    for (double x : {0.0, 1.0, 3.0, 6.0}) CHECK(p.value(0, x, 2.0 * x) == doctest::Approx(1.0));
  }

  TEST_CASE("partition axioms") {
    const PouReport r = check_pou(build_pou(uniform_cover(4, 0.25)), 96);
    CHECK(r.sum_max_deviation <= 1e-12);
    CHECK(r.plateau_exact);
    CHECK(r.support_exact);
  }

  TEST_CASE("scaled derivative bounds are refinement stable") {
    double lo = 1e300, hi = 0.0;
    for (int c : {4, 8, 16}) {
      const PouReport r = check_pou(build_pou(uniform_cover(c, 0.25)), 64);
      lo = std::min(lo, r.c_min[1]);
      hi = std::max(hi, r.c_max[1]);
    }
    CHECK(hi / lo <= 1.2);
  }

  TEST_CASE("normalized fallback for an irregular cover") {
    std::vector<Subdomain> cells = {{0.3, 0.3, 2.5, 2.5, 0.6}, {3.3, 0.3, 2.8, 2.5, 0.6},
                                    {0.3, 3.3, 2.5, 2.7, 0.6}, {3.3, 3.3, 2.8, 2.7, 0.6}};
    const PartitionOfUnity p = build_pou(Cover(cells));
    for (double x = 0.05; x < kTwoPi; x += 0.37)
      for (double y = 0.11; y < kTwoPi; y += 0.41) CHECK(p.sum(x, y) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("cover json round trip") {
    const Cover c = dyadic_cover(2);
    const Cover back = cover_from_json(cover_to_json(c));
    REQUIRE(back.size() == c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      CHECK(back[i].x0 == c[i].x0);
      CHECK(back[i].collar == c[i].collar);
    }
  }
}
