#ifndef SIGMAK_SCHWARZSCHILD_HPP
#define SIGMAK_SCHWARZSCHILD_HPP

// The scalar-flat model family on the cylinder: profiles
// v(t) = sqrt(h0) cosh(rate*t - c) with rate = (n-2k)/(2k), the conserved
// quantity h(t) = v^2 - (dv/rate)^2, verification that sigma_k(B_{g_v}) = 0,
// and the correspondence with radial factors on the punctured ball.

#include "sigmak/cylinder.hpp"

namespace sigmak {

struct SchwarzschildParams {
  Dimensions dims;
  double h0 = 1.0;  // value of the conserved quantity; must be positive
  double c = 0.0;   // throat translation in units of rate*t

  SchwarzschildParams(Dimensions d, double h0_, double c_) : dims(d), h0(h0_), c(c_) {
    if (!(h0 > 0.0)) throw std::invalid_argument("SchwarzschildParams: h0 must be > 0");
  }
};

/// Closed-form jet of v(t) = sqrt(h0) cosh(rate*t - c).
inline RadialFn schwarzschild_fn(const SchwarzschildParams& p) {
  const double r = p.dims.rate();
  const double s = std::sqrt(p.h0);
  const double c = p.c;
  return [r, s, c](double t) {
    const double x = r * t - c;
    return std::array<double, 3>{s * std::cosh(x), s * r * std::sinh(x), s * r * r * std::cosh(x)};
  };
}

inline RadialProfile schwarzschild_profile(const SchwarzschildParams& p, const TGrid& g, int order = 4) {
  ArrayXd v(g.npts);
  const auto f = schwarzschild_fn(p);
  for (int i = 0; i < g.npts; ++i) v[i] = f(g.t(i))[0];
  return RadialProfile(g, std::move(v), order);
}

/// Sphere profile cosh^{-rate}(t - t0): the round metric written over the
/// cylinder; solves N(v) = 0 with the normalized positive constant.
inline RadialFn sphere_profile_fn(const Dimensions& d, double t0 = 0.0) {
  const double r = d.rate();
  return [r, t0](double t) {
    const double x = t - t0;
    const double v = std::pow(std::cosh(x), -r);
    const double th = std::tanh(x);
    const double vt = -r * th * v;
    const double vtt = v * (r * r * th * th - r / (std::cosh(x) * std::cosh(x)));
    return std::array<double, 3>{v, vt, vtt};
  };
}

/// h(t) = v^2 - (2k/(n-2k))^2 (dv/dt)^2, conserved along d2v/dt2 = rate^2 v.
inline ArrayXd h_invariant(const Dimensions& d, const RadialJet& v) {
  const double ir = 1.0 / d.rate();
  return v.u * v.u - (ir * v.ut) * (ir * v.ut);
}

inline ArrayXd h_invariant(const Dimensions& d, const RadialProfile& v) {
  return h_invariant(d, jet_from_stencils(v));
}

/// sigma_k(B_{g_v}) in factorized form:
/// binom(n-1,k-1) ((n-2k)/(4k) h)^{k-1} v (rate^2 v - d2v/dt2).
/// This is an algebraic identity with the direct assembly for radial v.
inline ArrayXd sigma_k_factorized(const Dimensions& d, const RadialJet& v) {
  const double r = d.rate();
  const ArrayXd h = h_invariant(d, v);
  const ArrayXd lead = Eigen::pow(0.5 * r * h, d.k - 1) * binom(d.n - 1, d.k - 1);
  return lead * v.u * (r * r * v.u - v.utt);
}

struct FlatnessReport {
  double direct = 0.0;      // max |sigma_k(B)| from stencil derivatives of the sampled profile
  double factorized = 0.0;  // max of the factorized form from analytic derivatives
};

/// Residual of sigma_k(B_{g_v}) = 0 for the model profile on a grid.
inline FlatnessReport verify_flat(const SchwarzschildParams& p, const TGrid& g, int order = 4) {
  const Dimensions& d = p.dims;
  const auto fn = schwarzschild_fn(p);
  const RadialJet sjet = jet_from_stencils(schwarzschild_profile(p, g, order));
  const auto B = assemble_B(d, sjet);
  FlatnessReport rep;
  for (int i = order; i < g.npts - order; ++i)
    rep.direct = std::max(rep.direct, std::abs(sigma(B[std::size_t(i)], d.n, d.k)));
  const RadialJet ajet = jet_from_function(fn, g);
  rep.factorized = sigma_k_factorized(d, ajet).abs().maxCoeff();
  return rep;
}

/// Radial factor on the punctured ball: u(r) = r^{-rate} v(-log r), r = e^{-t}.
struct RadialCorrespondence {
  ArrayXd r;
  ArrayXd u;
};

inline RadialCorrespondence radial_correspondence(const Dimensions& d, const RadialProfile& v) {
  RadialCorrespondence out;
  const int n = v.grid.npts;
  out.r.resize(n);
  out.u.resize(n);
  for (int i = 0; i < n; ++i) {
    const double t = v.grid.t(i);
    out.r[i] = std::exp(-t);
    out.u[i] = std::pow(out.r[i], -d.rate()) * v.values[i];
  }
  return out;
}

}  // namespace sigmak

#endif  // SIGMAK_SCHWARZSCHILD_HPP
