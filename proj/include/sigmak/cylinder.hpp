#ifndef SIGMAK_CYLINDER_HPP
#define SIGMAK_CYLINDER_HPP

// Conformal geometry on the cylinder R x S^{n-1}: the rescaled curvature
// endomorphism B of g_u = u^{4k/(n-2k)} g_cyl, the fully nonlinear operator
// N(u) = sigma_k(B) - binom(n,k)((n-2k)/4k)^k u^{2kn/(n-2k)}, and the
// conformal equivariance identity. Backgrounds (1+b)^{4k/(n-2k)} g_cyl are
// folded in multiplicatively: assemble for the product (1+b) u against the
// flat cylinder and rescale.

#include "sigmak/grid.hpp"
#include "sigmak/symfun.hpp"

#include <vector>

namespace sigmak {

/// Schouten spectrum of dt^2 + dtheta^2: {-1/2 x1, +1/2 x(n-1)}.
inline SpectrumEndo schouten_cylinder(const Dimensions& d) {
  return SpectrumEndo({-0.5, 0.5}, {1, d.n - 1});
}

/// Cylinder background g = (1+b)^{4k/(n-2k)} g_cyl with radial factor 1+b > 0.
struct CylinderBackground {
  Dimensions dims;
  RadialFn factor;  // jet of 1+b; identity for the flat cylinder

  explicit CylinderBackground(Dimensions d) : dims(d) {
    factor = [](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
  }
  CylinderBackground(Dimensions d, RadialFn f) : dims(d), factor(std::move(f)) {}
};

namespace detail {
struct AssemblyConsts {
  double cA;   // (n-2k)/(4k)
  double Nc;   // (n-k)/(n-2k)
  double Kc;   // k/(n-2k)
  double Pc;   // n/(n-2k)
  explicit AssemblyConsts(const Dimensions& d)
      : cA(0.5 * d.rate()),
        Nc(double(d.n - d.k) / double(d.n - 2 * d.k)),
        Kc(double(d.k) / double(d.n - 2 * d.k)),
        Pc(double(d.n) / double(d.n - 2 * d.k)) {}
};
}  // namespace detail

/// B at one node of a radial conformal factor (b_tp = 0, b_pp = b_ww).
inline ArrowEndo assemble_node(const Dimensions& d, double V, double Vt, double Vtt) {
  const detail::AssemblyConsts c(d);
  ArrowEndo a;
  a.tt = -c.cA * V * V - V * Vtt + c.Nc * Vt * Vt;
  a.pp = c.cA * V * V - c.Kc * Vt * Vt;
  a.tp = 0.0;
  a.ww = a.pp;
  return a;
}

/// B at one node of a zonal conformal factor. `cotphi` must carry the pole
/// limit convention: at phi = 0, pi pass Vp = 0, Vtp = 0 and cot_Vp = Vpp.
inline ArrowEndo assemble_node(const Dimensions& d, double V, double Vt, double Vp, double Vtt,
                               double Vpp, double Vtp, double cot_Vp) {
  const detail::AssemblyConsts c(d);
  ArrowEndo a;
  a.tt = -c.cA * V * V - V * Vtt + c.Nc * Vt * Vt - c.Kc * Vp * Vp;
  a.tp = -V * Vtp + c.Pc * Vt * Vp;
  a.pp = c.cA * V * V - V * Vpp + c.Nc * Vp * Vp - c.Kc * Vt * Vt;
  a.ww = c.cA * V * V - V * cot_Vp - c.Kc * (Vt * Vt + Vp * Vp);
  return a;
}

inline void require_positive(const ArrayXd& u, const char* who) {
  if (!(u > 0.0).all()) throw std::domain_error(std::string(who) + ": non-positive conformal factor");
}
inline void require_positive(const ArrayXXd& u, const char* who) {
  if (!(u > 0.0).all()) throw std::domain_error(std::string(who) + ": non-positive conformal factor");
}

/// B field for a radial total factor V = (1+b) u given by its jet.
inline std::vector<ArrowEndo> assemble_B(const Dimensions& d, const RadialJet& V) {
  require_positive(V.u, "assemble_B");
  std::vector<ArrowEndo> out(static_cast<std::size_t>(V.grid.npts));
  for (int i = 0; i < V.grid.npts; ++i) out[std::size_t(i)] = assemble_node(d, V.u[i], V.ut[i], V.utt[i]);
  return out;
}

/// Arrow entry grids for a zonal total factor.
struct ArrowField {
  ArrayXXd tt, tp, pp, ww;
  ArrowEndo at(int i, int m) const { return {tt(i, m), tp(i, m), pp(i, m), ww(i, m)}; }
};

inline ArrowField assemble_B(const Dimensions& d, const ZonalJet& V) {
  require_positive(V.u, "assemble_B");
  const int nt = V.tgrid.npts, np = V.nphi;
  const double hphi = M_PI / double(np - 1);
  ArrowField F;
  F.tt.resize(nt, np);
  F.tp.resize(nt, np);
  F.pp.resize(nt, np);
  F.ww.resize(nt, np);
  for (int m = 0; m < np; ++m) {
    const bool pole = (m == 0 || m == np - 1);
    const double cot = pole ? 0.0 : 1.0 / std::tan(hphi * double(m));
    for (int i = 0; i < nt; ++i) {
      const double cvp = pole ? V.upp(i, m) : cot * V.up(i, m);
      const ArrowEndo a = assemble_node(d, V.u(i, m), V.ut(i, m), pole ? 0.0 : V.up(i, m),
                                        V.utt(i, m), V.upp(i, m), pole ? 0.0 : V.utp(i, m), cvp);
      F.tt(i, m) = a.tt;
      F.tp(i, m) = a.tp;
      F.pp(i, m) = a.pp;
      F.ww(i, m) = a.ww;
    }
  }
  return F;
}

/// N for a radial conformal factor u against the background (factor jet Fj):
/// N_bg(u) = F^{-e} [sigma_k(B(F u)) - binom(n,k)((n-2k)/4k)^k (F u)^e],
/// e = 2kn/(n-2k).
inline ArrayXd nonlinear_op(const Dimensions& d, const RadialJet& uj, const RadialJet& Fj) {
  require_positive(uj.u, "nonlinear_op");
  const RadialJet V = jet_product(Fj, uj);
  const auto B = assemble_B(d, V);
  const double e = d.source_exp();
  const double cs = d.source_coeff();
  ArrayXd out(V.grid.npts);
  for (int i = 0; i < V.grid.npts; ++i) {
    const double sk = sigma(B[std::size_t(i)], d.n, d.k);
    out[i] = std::pow(Fj.u[i], -e) * (sk - cs * std::pow(V.u[i], e));
  }
  return out;
}

inline ArrayXd nonlinear_op(const Dimensions& d, const RadialJet& uj) {
  return nonlinear_op(d, uj, constant_jet(uj.grid, 1.0));
}

inline ArrayXXd nonlinear_op(const Dimensions& d, const ZonalJet& uj, const ZonalJet& Fj) {
  require_positive(uj.u, "nonlinear_op");
  const ZonalJet V = jet_product(Fj, uj);
  const ArrowField B = assemble_B(d, V);
  const double e = d.source_exp();
  const double cs = d.source_coeff();
  const int nt = V.tgrid.npts, np = V.nphi;
  ArrayXXd out(nt, np);
  for (int m = 0; m < np; ++m)
    for (int i = 0; i < nt; ++i) {
      const double sk = sigma(B.at(i, m), d.n, d.k);
      out(i, m) = std::pow(Fj.u(i, m), -e) * (sk - cs * std::pow(V.u(i, m), e));
    }
  return out;
}

/// Max-norm over nodes at least `margin` away from each grid end.
inline double max_abs_interior(const ArrayXd& f, int margin) {
  const int n = int(f.size());
  double m = 0.0;
  for (int i = margin; i < n - margin; ++i) m = std::max(m, std::abs(f[i]));
  return m;
}
inline double max_abs_interior(const ArrayXXd& f, int margin) {
  const int nt = int(f.rows());
  double m = 0.0;
  for (int i = margin; i < nt - margin; ++i)
    for (int j = 0; j < int(f.cols()); ++j) m = std::max(m, std::abs(f(i, j)));
  return m;
}

/// Max-norm of N_{gbar}(u) - (v/u)^{-e} N_g(v) with gbar = (v/u)^{4k/(n-2k)} g,
/// both sides evaluated through the nonlinear operator on the base background.
inline double equivariance_residual(const Dimensions& d, const RadialJet& uj, const RadialJet& vj,
                                    const RadialJet& Fj, int margin = 0) {
  require_positive(uj.u, "equivariance_residual");
  require_positive(vj.u, "equivariance_residual");
  const RadialJet ratio = jet_quotient(vj, uj);
  const RadialJet Fbar = jet_product(Fj, ratio);
  const ArrayXd lhs = nonlinear_op(d, uj, Fbar);
  const ArrayXd rhs = Eigen::pow(ratio.u, -d.source_exp()) * nonlinear_op(d, vj, Fj);
  return max_abs_interior(ArrayXd(lhs - rhs), margin);
}

inline double equivariance_residual(const Dimensions& d, const ZonalJet& uj, const ZonalJet& vj,
                                    const ZonalJet& Fj, int margin = 0) {
  require_positive(uj.u, "equivariance_residual");
  require_positive(vj.u, "equivariance_residual");
  const ZonalJet ratio = jet_quotient(vj, uj);
  const ZonalJet Fbar = jet_product(Fj, ratio);
  const ArrayXXd lhs = nonlinear_op(d, uj, Fbar);
  const ArrayXXd rhs = Eigen::pow(ratio.u, -d.source_exp()) * nonlinear_op(d, vj, Fj);
  return max_abs_interior(ArrayXXd(lhs - rhs), margin);
}

}  // namespace sigmak

#endif  // SIGMAK_CYLINDER_HPP
