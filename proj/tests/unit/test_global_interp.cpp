#include <doctest.h>

#include <cmath>

#include "mfda/fit.hpp"
#include "mfda/global_interp.hpp"

using namespace mfda;

namespace {

SpectralField sin_x(const Grid& g) {
  SpectralField f(g);
  f.mode(1, 0) = Complex(0.0, -0.5);
  f.mode(-1, 0) = Complex(0.0, 0.5);
  return f;
}

double max_abs_diff(const std::vector<double>& a, const std::vector<double>& b) {
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) d = std::max(d, std::abs(a[i] - b[i]));
  return d;
}

}  // namespace

TEST_SUITE("global_interp") {
  TEST_CASE("family classification") {
    const Cover c = uniform_cover(4, 0.25);
    const GlobalInterpolant avg = GlobalInterpolant::uniform(c, LocalInterpolant::volume_average());
    CHECK(avg.category() == FamilyCategory::RepeatedUniform);
    CHECK(avg.order() == 0);
    CHECK(avg.level() == 1);
    CHECK(avg.optimal());

    std::vector<LocalInterpolant> mix;
    for (std::size_t q = 0; q < c.size(); ++q)
      mix.push_back(q < c.size() / 2 ? LocalInterpolant::lagrange(2) : LocalInterpolant::taylor1());
    const GlobalInterpolant hybrid(build_pou(c), mix);
    CHECK(hybrid.order() == 1);
    CHECK(hybrid.level() == 3);
    CHECK_FALSE(hybrid.generic());
    CHECK_FALSE(hybrid.optimal());
    CHECK(hybrid.category() == FamilyCategory::HybridNonUniform);

    std::vector<LocalInterpolant> same_labels(c.size(), LocalInterpolant::lagrange(2));
    same_labels[3] = LocalInterpolant::volume_polynomial(2);
    CHECK(GlobalInterpolant(build_pou(c), same_labels).category() == FamilyCategory::HybridUniform);
    CHECK(to_string(FamilyCategory::RepeatedNonUniform) == "repeated-nonuniform");
    CHECK_THROWS(GlobalInterpolant(build_pou(c), std::vector<LocalInterpolant>(3, LocalInterpolant::nodal0())));
  }

  TEST_CASE("single spectral cell reproduces band-limited fields") {
    const Grid g(32);
    const SpectralField phi = random_field(g, 4, 8);
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(1, 0.25), LocalInterpolant::spectral(8.0));
    const SpectralSource src(phi);
    CHECK(max_abs_diff(apply_global(I, src, g), phi.to_physical()) < 1e-12);
    const GlobalNorms nr = global_norms(I, src, 2);
    for (double e : nr.error) CHECK(e < 1e-10);
  }

  TEST_CASE("constants are reproduced") {
    const Grid g(24);
    const AnalyticSource three = constant_source(3.0);
    for (const char* spec : {"nodal0", "volavg0", "taylor1", "sobolev:1", "lagrange:2", "volpoly:1"}) {
      const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::parse(spec));
      for (double v : apply_global(I, three, g)) CHECK(v == doctest::Approx(3.0).epsilon(1e-10));
    }
  }

  TEST_CASE("volume elements blend the exact averages") {
    const Grid g(32);
    const SpectralField phi = sin_x(g);
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::volume_average());
    const std::vector<double> got = apply_global(I, SpectralSource(phi), g);
    std::vector<double> want(g.size(), 0.0);
    for (std::size_t q = 0; q < I.size(); ++q) {
      const Rect r = I.cover()[q].core();
      const double avg = (std::cos(r.x0) - std::cos(r.x0 + r.sx)) / r.sx;
      for (int iy = 0; iy < g.n(); ++iy)
        for (int ix = 0; ix < g.n(); ++ix)
          want[static_cast<std::size_t>(iy) * g.n() + ix] += I.pou().value(static_cast<int>(q), g.coord(ix), g.coord(iy)) * avg;
    }
    CHECK(max_abs_diff(got, want) < 1e-12);
  }

  TEST_CASE("grid applicator agrees with the fit path") {
    const Grid g(32);
    const SpectralField phi = random_field(g, 6, 3);
    for (const char* spec : {"volavg0", "lagrange:2", "spectral:3"}) {
      const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::parse(spec));
      const GridApplicator A(I, g);
      CHECK(max_abs_diff(A.apply(phi), apply_global(I, SpectralSource(phi), g)) < 1e-11);
    }
  }

  TEST_CASE("mean-free lift") {
    const Grid g(32);
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::lagrange(1));
    const SpectralField zero(g);
    CHECK(sobolev_norm(mean_free(I, SpectralSource(zero), g), 0) == 0.0);
    const SpectralField phi = random_field(g, 5, 4);
    const SpectralField J = mean_free(I, SpectralSource(phi), g);
    CHECK(std::abs(J.mode(0, 0)) < 1e-14);
    const SpectralField full = SpectralField::from_physical(g, apply_global(I, SpectralSource(phi), g));
    const SpectralField dj = derivative(J, 1, 0), di = derivative(full, 1, 0);
    double d = 0.0;
    for (std::size_t i = 0; i < dj.coeffs().size(); ++i) d = std::max(d, std::abs(dj.coeffs()[i] - di.coeffs()[i]));
    CHECK(d < 1e-12);
  }

  TEST_CASE("linearity") {
    const Grid g(32);
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::taylor1());
    const SpectralField a = random_field(g, 5, 1), b = random_field(g, 5, 2);
    const GridApplicator A(I, g);
    const std::vector<double> ia = A.apply(a), ib = A.apply(b), iab = A.apply(2.0 * a + b);
    std::vector<double> sum(ia.size());
    for (std::size_t i = 0; i < ia.size(); ++i) sum[i] = 2.0 * ia[i] + ib[i];
    CHECK(max_abs_diff(iab, sum) < 1e-12);
    CHECK(I.rank() == 16 * I.cell_operator(0).rank());
  }

  TEST_CASE("error of the degree-two family falls at third order") {
    const Grid g(32);
    const SpectralSource src(random_field(g, 1, 7));
    std::vector<double> h, e;
    for (int c : {8, 16, 32}) {
      const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(c, 0.25), LocalInterpolant::lagrange(2));
      h.push_back(I.cover().max_diameter());
      e.push_back(global_norms(I, src, 0, 4).error[0]);
    }
    CHECK(loglog_fit(h, e).slope == doctest::Approx(3.0).epsilon(0.1));
  }

  TEST_CASE("structural error bound") {
    const Grid g(32);
    const SpectralField phi = random_field(g, 2, 5);
    const GlobalInterpolant I = GlobalInterpolant::uniform(uniform_cover(4, 0.25), LocalInterpolant::lagrange(1));
    EnsembleSpec ens;
    ens.size = 4;
    ens.band = 2;
    const AssociatedConstants c = estimate_all_constants(LocalInterpolant::lagrange(1), I.cover()[5], ens);
    const GlobalErrorReport r = verify_global_error(I, phi, 0, {c});
    CHECK(r.lhs > 0.0);
    CHECK(r.rows.size() == 2);
    CHECK(std::isfinite(r.ratio_general));
    CHECK(r.to_csv().find("l,j,h,lhs,rhs,ratio") != std::string::npos);
    CHECK_THROWS(verify_global_error(I, phi, 2, {c}));

    const GlobalInterpolant S = GlobalInterpolant::uniform(uniform_cover(1, 0.25), LocalInterpolant::spectral(8.0));
    const AssociatedConstants cs = estimate_all_constants(LocalInterpolant::spectral(8.0), S.cover()[0], ens);
    CHECK(verify_global_error(S, phi, 0, {cs}).lhs < 1e-20);
  }

  TEST_CASE("boundedness of the identity-like family") {
    const GlobalInterpolant S = GlobalInterpolant::uniform(uniform_cover(1, 0.25), LocalInterpolant::spectral(8.0));
    EnsembleSpec ens;
    ens.size = 4;
    ens.band = 3;
    const BoundednessReport r = verify_boundedness(S, ens);
    CHECK(r.ratio_l0 <= 1.0 + 1e-10);
    CHECK(r.ratio_l1 <= 1.0 + 1e-10);
  }
}
