#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sigmak/cylinder.hpp"
#include "sigmak/schwarzschild.hpp"

#include <random>

using namespace sigmak;

namespace {

// smooth positive profile with bounded log-derivatives
RadialFn random_smooth_positive(std::mt19937_64& rng, double amp = 0.3) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  const double a1 = amp * u(rng), a2 = amp * u(rng);
  const double w1 = 0.5 + 0.4 * std::abs(u(rng)), w2 = 0.3 + 0.3 * std::abs(u(rng));
  const double p1 = u(rng), p2 = u(rng);
  return [=](double t) {
    const double g = a1 * std::sin(w1 * t + p1) + a2 * std::cos(w2 * t + p2);
    const double gt = a1 * w1 * std::cos(w1 * t + p1) - a2 * w2 * std::sin(w2 * t + p2);
    const double gtt = -a1 * w1 * w1 * std::sin(w1 * t + p1) - a2 * w2 * w2 * std::cos(w2 * t + p2);
    const double e = std::exp(g);
    return std::array<double, 3>{e, gt * e, (gtt + gt * gt) * e};
  };
}

}  // namespace

TEST_CASE("cylinder Schouten spectrum") {
  const Dimensions d(8, 3);
  const SpectrumEndo s = schouten_cylinder(d);
  CHECK(sigma(s, 1) == doctest::Approx(3.0).epsilon(1e-14));
  CHECK(sigma(s, 3) == doctest::Approx(7.0 / 4.0).epsilon(1e-14));
  const SpectrumEndo s4 = schouten_cylinder(Dimensions(4, 1));
  CHECK(sigma(s4, 2) == doctest::Approx(0.0));
  // closed form 2^{-j} binom(n,j) (n-2j)/n for a range of n
  for (int n : {5, 6, 8, 10, 12}) {
    const SpectrumEndo sp = schouten_cylinder(Dimensions(n, 1));
    for (int j = 1; j <= n; ++j) {
      const double expect = std::pow(2.0, -j) * binom(n, j) * double(n - 2 * j) / double(n);
      CHECK(sigma(sp, j) == doctest::Approx(expect).epsilon(1e-13));
    }
  }
}

TEST_CASE("assembled endomorphism at pinned factors") {
  const Dimensions d(8, 3);
  TGrid g(-3.0, 3.0, 501);

  SUBCASE("u = 1") {
    const RadialJet j = constant_jet(g, 1.0);
    const auto B = assemble_B(d, j);
    for (const auto& a : B) {
      CHECK(a.tt == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
      CHECK(a.pp == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
      CHECK(a.ww == doctest::Approx(1.0 / 6.0).epsilon(1e-14));
      CHECK(a.tp == 0.0);
    }
  }
  SUBCASE("u = cosh(t/3)") {
    const RadialJet j = jet_from_function(schwarzschild_fn(SchwarzschildParams(d, 1.0, 0.0)), g);
    const auto B = assemble_B(d, j);
    for (const auto& a : B) {
      CHECK(a.tt == doctest::Approx(-5.0 / 18.0).epsilon(1e-12));
      CHECK(a.ww == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
    }
  }
  SUBCASE("u = exp(-t/3) has vanishing angular entries") {
    auto fn = [&](double t) {
      const double v = std::exp(-t / 3.0);
      return std::array<double, 3>{v, -v / 3.0, v / 9.0};
    };
    const auto B = assemble_B(d, jet_from_function(fn, g));
    for (const auto& a : B) {
      CHECK(std::abs(a.pp) < 1e-15);
      CHECK(std::abs(a.ww) < 1e-15);
    }
  }
}

TEST_CASE("nonlinear operator: pinned values") {
  const Dimensions d(8, 3);
  TGrid g(-4.0, 4.0, 2001);

  SUBCASE("constant factor") {
    const ArrayXd N = nonlinear_op(d, constant_jet(g, 1.0));
    for (int i = 0; i < g.npts; i += 100)
      CHECK(N[i] == doctest::Approx(-7.0 / 36.0).epsilon(1e-13));
  }
  SUBCASE("sphere profile solves the equation") {
    ArrayXd v(g.npts);
    const auto f = sphere_profile_fn(d);
    for (int i = 0; i < g.npts; ++i) v[i] = f(g.t(i))[0];
    const ArrayXd N = nonlinear_op(d, jet_from_stencils(RadialProfile(g, v, 4)));
    CHECK(max_abs_interior(N, 4) < 1e-6);
  }
  SUBCASE("model profile: sigma_k part vanishes, source term remains") {
    const RadialJet j = jet_from_function(schwarzschild_fn(SchwarzschildParams(d, 1.0, 0.0)), g);
    const ArrayXd N = nonlinear_op(d, j);
    const ArrayXd source = d.source_coeff() * Eigen::pow(j.u, d.source_exp());
    CHECK(((N + source) / source).abs().maxCoeff() < 1e-12);
    CHECK((N < 0.0).all());
  }
}

TEST_CASE("grid convergence of the sphere-profile residual at stencil order") {
  const Dimensions d(8, 3);
  for (int order : {2, 4}) {
    std::vector<double> errs, hs;
    for (int npts : {251, 501, 1001}) {
      TGrid g(-4.0, 4.0, npts);
      ArrayXd v(npts);
      const auto f = sphere_profile_fn(d);
      for (int i = 0; i < npts; ++i) v[i] = f(g.t(i))[0];
      const ArrayXd N = nonlinear_op(d, jet_from_stencils(RadialProfile(g, v, order)));
      errs.push_back(max_abs_interior(N, order));
      hs.push_back(g.h());
    }
    const double p = std::log(errs.front() / errs.back()) / std::log(hs.front() / hs.back());
    CHECK(p > order - 0.3);
    CHECK(p < order + 0.7);
  }
}

TEST_CASE("sigma_k(B(c u)) = c^{2k} sigma_k(B(u))") {
  const Dimensions d(8, 3);
  TGrid g(-2.0, 2.0, 301);
  std::mt19937_64 rng(42);
  std::uniform_real_distribution<double> cdist(0.2, 4.0);
  for (int trial = 0; trial < 10; ++trial) {
    const RadialJet uj = jet_from_function(random_smooth_positive(rng), g);
    const double c = cdist(rng);
    RadialJet cj = uj;
    cj.u *= c;
    cj.ut *= c;
    cj.utt *= c;
    const auto B = assemble_B(d, uj), Bc = assemble_B(d, cj);
    for (int i = 0; i < g.npts; i += 37) {
      const double s = sigma(B[std::size_t(i)], d.n, d.k);
      const double sc = sigma(Bc[std::size_t(i)], d.n, d.k);
      CHECK(std::abs(sc - std::pow(c, 2 * d.k) * s) <=
            1e-10 * std::max(1.0, std::abs(std::pow(c, 2 * d.k) * s)));
    }
  }
}

TEST_CASE("conformal equivariance") {
  const Dimensions d(8, 3);
  TGrid g(-3.0, 3.0, 1001);
  const RadialJet F1 = constant_jet(g, 1.0);

  SUBCASE("u = v gives zero exactly") {
    std::mt19937_64 rng(1);
    const RadialJet uj = jet_from_function(random_smooth_positive(rng), g);
    CHECK(equivariance_residual(d, uj, uj, F1) == 0.0);
  }
  SUBCASE("sphere profile against its perturbation") {
    const RadialJet vj = jet_from_function(sphere_profile_fn(d), g);
    auto pert = [&](double t) {
      const auto s = sphere_profile_fn(d)(t);
      const double b = 1.0 + 0.1 * std::exp(-t * t);
      const double bt = -0.2 * t * std::exp(-t * t);
      const double btt = (0.4 * t * t - 0.2) * std::exp(-t * t);
      return std::array<double, 3>{s[0] * b, s[1] * b + s[0] * bt,
                                   s[2] * b + 2.0 * s[1] * bt + s[0] * btt};
    };
    const RadialJet uj = jet_from_function(pert, g);
    CHECK(equivariance_residual(d, uj, vj, F1) < 1e-11);
  }
  SUBCASE("constant rescaling") {
    const RadialJet vj = jet_from_function(sphere_profile_fn(d), g);
    for (double c : {1.05, 1.25}) {
      RadialJet uj = vj;
      uj.u *= c;
      uj.ut *= c;
      uj.utt *= c;
      CHECK(equivariance_residual(d, uj, vj, F1) < 1e-10);
    }
    // larger constants amplify round-off by c^{2kn/(n-2k)} through the
    // conformal weight; the identity still holds at that scale
    RadialJet uj = vj;
    uj.u *= 1.7;
    uj.ut *= 1.7;
    uj.utt *= 1.7;
    CHECK(equivariance_residual(d, uj, vj, F1) < 1e-10 * std::pow(1.7, d.source_exp()));
  }
  SUBCASE("ten random pairs stay at assembly round-off") {
    std::mt19937_64 rng(99);
    for (int trial = 0; trial < 10; ++trial) {
      const RadialJet uj = jet_from_function(random_smooth_positive(rng), g);
      const RadialJet vj = jet_from_function(random_smooth_positive(rng), g);
      CHECK(equivariance_residual(d, uj, vj, F1) < 1e-9);
    }
  }
}

TEST_CASE("zonal assembly is consistent with the radial one") {
  const Dimensions d(8, 3);
  TGrid g(-2.0, 2.0, 201);
  const int nphi = 33;
  std::mt19937_64 rng(5);
  const RadialJet uj = jet_from_function(random_smooth_positive(rng), g);
  const ZonalJet zj = broadcast(uj, nphi);
  const ArrowField BF = assemble_B(d, zj);
  const auto BR = assemble_B(d, uj);
  for (int i = 0; i < g.npts; i += 23)
    for (int m = 0; m < nphi; m += 7) {
      CHECK(BF.tt(i, m) == doctest::Approx(BR[std::size_t(i)].tt).epsilon(1e-13));
      CHECK(BF.pp(i, m) == doctest::Approx(BR[std::size_t(i)].pp).epsilon(1e-13));
      CHECK(BF.ww(i, m) == doctest::Approx(BR[std::size_t(i)].ww).epsilon(1e-13));
      CHECK(BF.tp(i, m) == 0.0);
    }
  const ArrayXXd Nz = nonlinear_op(d, zj, broadcast(constant_jet(g, 1.0), nphi));
  const ArrayXd Nr = nonlinear_op(d, uj);
  for (int i = 0; i < g.npts; i += 23)
    for (int m = 0; m < nphi; m += 7)
      CHECK(Nz(i, m) == doctest::Approx(Nr[i]).epsilon(1e-12));
}

TEST_CASE("zonal equivariance bookkeeping") {
  const Dimensions d(6, 2);
  TGrid g(-2.0, 2.0, 401);
  const int nphi = 65;
  ArrayXXd vals(g.npts, nphi);
  for (int i = 0; i < g.npts; ++i)
    for (int m = 0; m < nphi; ++m) {
      const double t = g.t(i), c = std::cos(M_PI * double(m) / double(nphi - 1));
      vals(i, m) = std::exp(0.2 * std::sin(t) + 0.1 * c * c);
    }
  const ZonalJet uj = jet_from_stencils(ZonalField(g, nphi, vals, 4));
  const ZonalJet vj = broadcast(jet_from_function(sphere_profile_fn(d), g), nphi);
  const ZonalJet F1 = broadcast(constant_jet(g, 1.0), nphi);
  CHECK(equivariance_residual(d, uj, vj, F1, 4) < 5e-7);
}

TEST_CASE("domain errors") {
  const Dimensions d(8, 3);
  TGrid g(-1.0, 1.0, 51);
  RadialJet bad = constant_jet(g, 1.0);
  bad.u[10] = -0.5;
  CHECK_THROWS_AS(nonlinear_op(d, bad), std::domain_error);
}
