#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "sigmak/grid.hpp"

using namespace sigmak;

TEST_CASE("stencil derivatives converge at the requested order") {
  auto f = [](double t) { return std::exp(std::sin(t)); };
  auto f1 = [&](double t) { return std::cos(t) * f(t); };
  auto f2 = [&](double t) { return (-std::sin(t) + std::cos(t) * std::cos(t)) * f(t); };
  for (int order : {2, 4}) {
    std::vector<double> errs1, errs2, hs;
    for (int npts : {101, 201, 401}) {
      TGrid g(-2.0, 2.0, npts);
      ArrayXd v(npts);
      for (int i = 0; i < npts; ++i) v[i] = f(g.t(i));
      const DiffOp d1(g, 1, order), d2(g, 2, order);
      const ArrayXd a1 = d1.apply(v), a2 = d2.apply(v);
      double e1 = 0, e2 = 0;
      for (int i = 0; i < npts; ++i) {
        e1 = std::max(e1, std::abs(a1[i] - f1(g.t(i))));
        e2 = std::max(e2, std::abs(a2[i] - f2(g.t(i))));
      }
      errs1.push_back(e1);
      errs2.push_back(e2);
      hs.push_back(g.h());
    }
    const double p1 = std::log(errs1[0] / errs1[2]) / std::log(hs[0] / hs[2]);
    const double p2 = std::log(errs2[0] / errs2[2]) / std::log(hs[0] / hs[2]);
    CHECK(p1 > order - 0.35);
    CHECK(p2 > order - 0.35);
  }
}

TEST_CASE("jet product and quotient follow Leibniz") {
  TGrid g(-1.0, 1.0, 201);
  auto fa = [](double t) { return std::array<double, 3>{std::exp(t), std::exp(t), std::exp(t)}; };
  auto fb = [](double t) {
    return std::array<double, 3>{2.0 + std::sin(t), std::cos(t), -std::sin(t)};
  };
  const RadialJet a = jet_from_function(fa, g), b = jet_from_function(fb, g);
  const RadialJet p = jet_product(a, b);
  const RadialJet q = jet_quotient(a, b);
  for (int i = 0; i < g.npts; i += 17) {
    const double t = g.t(i);
    const double e = std::exp(t), s = std::sin(t), c = std::cos(t);
    CHECK(p.u[i] == doctest::Approx(e * (2 + s)).epsilon(1e-13));
    CHECK(p.ut[i] == doctest::Approx(e * (2 + s) + e * c).epsilon(1e-13));
    CHECK(p.utt[i] == doctest::Approx(e * (2 + s) + 2 * e * c - e * s).epsilon(1e-13));
    CHECK(q.u[i] == doctest::Approx(e / (2 + s)).epsilon(1e-13));
    const double qt = e / (2 + s) - e * c / ((2 + s) * (2 + s));
    CHECK(q.ut[i] == doctest::Approx(qt).epsilon(1e-12));
  }
  // quotient times divisor restores the numerator jet
  const RadialJet back = jet_product(q, b);
  CHECK((back.utt - a.utt).abs().maxCoeff() < 1e-12);
}

TEST_CASE("zonal jets: pole regularity and cross derivative") {
  TGrid tg(-1.0, 1.0, 81);
  const int nphi = 41;
  ArrayXXd vals(tg.npts, nphi);
  const double hphi = M_PI / double(nphi - 1);
  for (int i = 0; i < tg.npts; ++i)
    for (int m = 0; m < nphi; ++m) {
      const double t = tg.t(i), c = std::cos(hphi * m);
      vals(i, m) = std::exp(0.3 * t) * (1.0 + 0.5 * c * c);
    }
  const ZonalField f(tg, nphi, vals, 4);
  const ZonalJet j = jet_from_stencils(f);
  CHECK(j.up.col(0).abs().maxCoeff() == 0.0);
  CHECK(j.up.col(nphi - 1).abs().maxCoeff() == 0.0);
  // utp of exp(0.3 t)(1 + 0.5 cos^2) = 0.3 * (-cos sin) * exp(0.3 t) at interior
  const int i0 = 40, m0 = 20;
  const double t0 = tg.t(i0), p0 = hphi * m0;
  const double expect = 0.3 * std::exp(0.3 * t0) * (-std::cos(p0) * std::sin(p0));
  CHECK(j.utp(i0, m0) == doctest::Approx(expect).epsilon(1e-6));
}

TEST_CASE("loglog fit and Aitken extrapolation") {
  std::vector<double> x{1e-1, 1e-2, 1e-3}, y;
  for (double xi : x) y.push_back(2.5 * std::pow(xi, 0.75));
  const auto [slope, rms] = fit_loglog(x, y);
  CHECK(slope == doctest::Approx(0.75).epsilon(1e-12));
  CHECK(rms < 1e-12);

  std::vector<double> s;
  for (int i = 0; i < 4; ++i) s.push_back(3.0 + 0.7 * std::pow(0.2, i));
  CHECK(aitken_limit(s) == doctest::Approx(3.0).epsilon(1e-10));
}
