#include <doctest.h>

#include <cmath>
#include <sstream>

#include "mfda/local_interp.hpp"
#include "mfda/snapshot.hpp"
#include "mfda/source.hpp"
#include "mfda/spectral.hpp"

using namespace mfda;

namespace {

SpectralField from_function(const Grid& g, double (*f)(double, double)) {
  std::vector<double> v(g.size());
  for (int iy = 0; iy < g.n(); ++iy)
    for (int ix = 0; ix < g.n(); ++ix) v[static_cast<std::size_t>(iy) * g.n() + ix] = f(g.coord(ix), g.coord(iy));
  return SpectralField::from_physical(g, v);
}

double max_diff(const SpectralField& a, const SpectralField& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.coeffs().size(); ++i) d = std::max(d, std::abs(a.coeffs()[i] - b.coeffs()[i]));
  return d;
}

}  // namespace

TEST_SUITE("spectral") {
  TEST_CASE("constant field is pure mean") {
    const Grid g(16);
    std::vector<double> ones(g.size(), 1.0);
    std::vector<Complex> c(g.size());
    transform(g, Direction::Forward, ones, c);
    CHECK(std::abs(c[0] - Complex(1.0, 0.0)) < 1e-15);
    const SpectralField f = SpectralField::from_physical(g, ones);
    CHECK(sobolev_norm(f, 0) == doctest::Approx(0.0));
  }

  TEST_CASE("round trip and parseval") {
    const Grid g(32);
    const SpectralField f = random_field(g, 10, 3);
    const std::vector<double> x = f.to_physical();
    const SpectralField back = SpectralField::from_physical(g, x);
    CHECK(max_diff(f, back) < 1e-12);
    double q = 0.0;
    for (double v : x) q += v * v * g.dx() * g.dx();
    CHECK(std::abs(q - std::pow(sobolev_norm(f, 0), 2)) <= 1e-10 * q);
  }

  TEST_CASE("sobolev norms of sin x") {
    const Grid g(16);
    const SpectralField f = from_function(g, [](double x, double) { return std::sin(x); });
    CHECK(sobolev_norm(f, 0) == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(sobolev_norm(f, 1) == doctest::Approx(kPi * std::sqrt(2.0)).epsilon(1e-13));
    CHECK(std::pow(sobolev_norm(f, 2), 2) == doctest::Approx(2.0 * kPi * kPi).epsilon(1e-13));
  }

  TEST_CASE("multi-index weight counts each index once") {
    CHECK(multi_index_weight(0.0, 3.0, 2) == doctest::Approx(81.0));
    CHECK(multi_index_weight(1.0, 1.0, 2) == doctest::Approx(3.0));
    CHECK(multi_index_weight(2.0, 1.0, 0) == doctest::Approx(1.0));
  }

  TEST_CASE("local norm on a quarter box") {
    const Grid g(32);
    const SpectralField f = from_function(g, [](double x, double) { return std::sin(x); });
    CHECK(local_sobolev_norm(f, 0, {0.0, 0.0, kPi, kPi}) == doctest::Approx(kPi / std::sqrt(2.0)).epsilon(1e-12));
    CHECK(local_sobolev_norm(f, 1, {0.0, 0.0, kTwoPi, kTwoPi}) ==
          doctest::Approx(sobolev_norm(f, 1)).epsilon(1e-12));
    CHECK(local_sobolev_norm(SpectralField(g), 0, {0.0, 0.0, 1.0, 1.0}) == 0.0);
  }

  TEST_CASE("leray projection") {
    const Grid g(32);
    const SpectralField q = random_field(g, 8, 5);
    const VectorField grad(derivative(q, 1, 0), derivative(q, 0, 1));
    CHECK(sobolev_norm(leray(grad), 0) < 1e-12 * sobolev_norm(grad, 0));

    const VectorField shear(from_function(g, [](double, double y) { return std::sin(y); }), SpectralField(g));
    CHECK(sobolev_norm(leray(shear) - shear, 0) < 1e-14);

    const VectorField w(random_field(g, 12, 6), random_field(g, 12, 7));
    const VectorField p = leray(w);
    CHECK(sobolev_norm(leray(p) - p, 0) < 1e-12 * sobolev_norm(w, 0));
    CHECK(divergence_residual(p) < 1e-12);
  }

  TEST_CASE("dissipation symbol") {
    CHECK(DissipationSymbol{1.0, 0.0, 0.0}(4.0) == 4.0);
    CHECK(DissipationSymbol{1.0, 1.0, 1.0}(0.0) == 0.0);
    CHECK(DissipationSymbol{1.0, 1.0, 1.0}(4.0) == doctest::Approx(20.0));
  }

  TEST_CASE("dealiasing") {
    const Grid g(48);
    const SpectralField low = random_field(g, g.dealias_cutoff() / 2, 9);
    SpectralField d = low;
    dealias(d);
    CHECK(max_diff(d, low) == 0.0);
    SpectralField full = random_field(g, 23, 10);
    dealias(full);
    SpectralField twice = full;
    dealias(twice);
    CHECK(max_diff(full, twice) == 0.0);
  }

  TEST_CASE("dealiased product matches a finer grid") {
    const Grid g(48), fine(96);
    const int cut = g.dealias_cutoff();
    const SpectralField a = random_field(g, cut / 2, 11), b = random_field(g, cut / 2, 12);
    auto lift = [&](const SpectralField& f) {
      SpectralField out(fine);
      for (int ky = -cut; ky <= cut; ++ky)
        for (int kx = -cut; kx <= cut; ++kx) out.mode(kx, ky) = f.mode(kx, ky);
      return out;
    };
    auto product = [](const SpectralField& x, const SpectralField& y) {
      std::vector<double> px = x.to_physical(), py = y.to_physical();
      for (std::size_t i = 0; i < px.size(); ++i) px[i] *= py[i];
      SpectralField out = SpectralField::from_physical(x.grid(), px);
      dealias(out);
      return out;
    };
    const SpectralField coarse = product(a, b), exact = product(lift(a), lift(b));
    double d = 0.0;
    for (int ky = -cut; ky <= cut; ++ky)
      for (int kx = -cut; kx <= cut; ++kx) d = std::max(d, std::abs(coarse.mode(kx, ky) - exact.mode(kx, ky)));
    CHECK(d < 1e-10);
  }

  TEST_CASE("snapshot round trip is bitwise") {
    const Grid g(16);
    const VectorField w(random_field(g, 5, 1), random_field(g, 5, 2));
    const Snapshot s = make_snapshot(w, "velocity", 1.25, {0.1, 0.0, 0.0});
    std::stringstream ss;
    write_snapshot(ss, s);
    Snapshot r;
    REQUIRE(read_snapshot(ss, r));
    CHECK(r.n == 16);
    CHECK(r.time == 1.25);
    CHECK(r.data == s.data);
    const VectorField back = snapshot_vector(r);
    const std::vector<double> again = make_snapshot(back, "velocity", 1.25, {0.1, 0.0, 0.0}).data;
    double d = 0.0;
    for (std::size_t i = 0; i < again.size(); ++i) d = std::max(d, std::abs(again[i] - s.data[i]));
    CHECK(d < 1e-13);
    CHECK_FALSE(read_snapshot(ss, r));
  }
}
