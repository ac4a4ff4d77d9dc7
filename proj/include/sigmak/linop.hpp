#ifndef SIGMAK_LINOP_HPP
#define SIGMAK_LINOP_HPP

// Linearizations of the nonlinear operator: analytic assembly through
// Newton-transform traces (mode ODEs at radial base points, full stencil
// operators at zonal ones), an independent finite-difference route, the
// conjugated constant-coefficient form at the sphere profile, indicial
// roots, and decay-rate measurement for bounded mode solutions.

#include "sigmak/cylinder.hpp"

#include <Eigen/Sparse>

#include <vector>

namespace sigmak {

/// lambda_j = j (j + n - 2): eigenvalues of -Delta on S^{n-1}.
inline double sphere_eigenvalue(int n, int j) { return double(j) * double(j + n - 2); }

/// Coefficients of the mode ODEs of the linearized operator at a radial base
/// point u against a radial background factor F: mode j satisfies
/// a w'' + b w' + (c0 + lambda_j clam) w = f.
struct ModeCoeffs {
  TGrid grid;
  ArrayXd a, b, c0, clam;

  ArrayXd c(const Dimensions& d, int j) const { return c0 + sphere_eigenvalue(d.n, j) * clam; }
};

/// Analytic linearization at a radial base point. With include_source = false
/// only the sigma_k part (the derivative of sigma_k(B)) is assembled.
inline ModeCoeffs linearize_radial(const Dimensions& d, const RadialJet& uj, const RadialJet& Fj,
                                   bool include_source = true) {
  require_positive(uj.u, "linearize_radial");
  const detail::AssemblyConsts cst(d);
  const RadialJet V = jet_product(Fj, uj);
  const int n = V.grid.npts;
  ModeCoeffs mc;
  mc.grid = V.grid;
  mc.a.resize(n);
  mc.b.resize(n);
  mc.c0.resize(n);
  mc.clam.resize(n);
  const double e = d.source_exp();
  const double cs = d.source_coeff();
  for (int i = 0; i < n; ++i) {
    const ArrowEndo B = assemble_node(d, V.u[i], V.ut[i], V.utt[i]);
    const ArrowEndo T = newton_transform(B, d.n, d.k - 1);
    const double Ttt = T.tt, Tang = T.pp;  // radial base: T.pp == T.ww
    const double pre = std::pow(Fj.u[i], -e);
    // coefficients in the direction W, then W = F w expanded by Leibniz
    const double cWtt = -Ttt * V.u[i];
    const double cWt = (2.0 * cst.Nc * Ttt - 2.0 * cst.Kc * double(d.n - 1) * Tang) * V.ut[i];
    double cW = Ttt * (-2.0 * cst.cA * V.u[i] - V.utt[i]) +
                Tang * 2.0 * cst.cA * double(d.n - 1) * V.u[i];
    if (include_source) cW -= cs * e * std::pow(V.u[i], e - 1.0);
    mc.a[i] = pre * cWtt * Fj.u[i];
    mc.b[i] = pre * (cWt * Fj.u[i] + cWtt * 2.0 * Fj.ut[i]);
    mc.c0[i] = pre * (cW * Fj.u[i] + cWt * Fj.ut[i] + cWtt * Fj.utt[i]);
    mc.clam[i] = pre * Tang * V.u[i] * Fj.u[i];
  }
  return mc;
}

/// Apply the mode-0 operator to a radial direction given by its jet.
inline ArrayXd apply_radial(const ModeCoeffs& mc, const RadialJet& w) {
  return mc.a * w.utt + mc.b * w.ut + mc.c0 * w.u;
}

/// Per-node stencil coefficients of the linearized operator at a zonal base.
struct LinearizedOperator {
  Dimensions dims;
  TGrid tgrid;
  int nphi = 0;
  int order = 2;
  ArrayXXd ctt, ctp, cpp, ct, cp, c0;

  explicit LinearizedOperator(Dimensions d) : dims(d) {}

  ArrayXXd apply(const ZonalJet& w) const {
    return ctt * w.utt + ctp * w.utp + cpp * w.upp + ct * w.ut + cp * w.up + c0 * w.u;
  }

  /// Sparse matrix on the (t, phi) grid, t-major ordering, with identity rows
  /// at the two t-boundaries (Dirichlet) and regular pole rows.
  Eigen::SparseMatrix<double> matrix() const;
};

/// Analytic linearization at a zonal base point against a zonal background.
inline LinearizedOperator linearize_zonal(const Dimensions& d, const ZonalJet& uj,
                                          const ZonalJet& Fj, int order = 2,
                                          bool include_source = true) {
  require_positive(uj.u, "linearize_zonal");
  const detail::AssemblyConsts cst(d);
  const ZonalJet V = jet_product(Fj, uj);
  const int nt = V.tgrid.npts, np = V.nphi;
  const double hphi = M_PI / double(np - 1);
  LinearizedOperator L(d);
  L.tgrid = V.tgrid;
  L.nphi = np;
  L.order = order;
  L.ctt.resize(nt, np);
  L.ctp.resize(nt, np);
  L.cpp.resize(nt, np);
  L.ct.resize(nt, np);
  L.cp.resize(nt, np);
  L.c0.resize(nt, np);
  const double e = d.source_exp();
  const double cs = d.source_coeff();
  const double nm2 = double(d.n - 2);
  for (int m = 0; m < np; ++m) {
    const bool pole = (m == 0 || m == np - 1);
    const double cot = pole ? 0.0 : 1.0 / std::tan(hphi * double(m));
    for (int i = 0; i < nt; ++i) {
      const double Vv = V.u(i, m), Vt = V.ut(i, m), Vtt = V.utt(i, m), Vpp = V.upp(i, m);
      const double Vp = pole ? 0.0 : V.up(i, m);
      const double Vtp = pole ? 0.0 : V.utp(i, m);
      const double cotVp = pole ? Vpp : cot * Vp;
      const ArrowEndo B = assemble_node(d, Vv, Vt, Vp, Vtt, Vpp, Vtp, cotVp);
      const ArrowEndo T = newton_transform(B, d.n, d.k - 1);
      // coefficients in the direction W = F w
      double cWtt = -T.tt * Vv;
      double cWtp = -2.0 * T.tp * Vv;
      double cWpp = -T.pp * Vv;
      double cWt = 2.0 * cst.Nc * T.tt * Vt + 2.0 * cst.Pc * T.tp * Vp -
                   2.0 * cst.Kc * (T.pp + nm2 * T.ww) * Vt;
      double cWp = -2.0 * cst.Kc * T.tt * Vp + 2.0 * cst.Pc * T.tp * Vt +
                   2.0 * cst.Nc * T.pp * Vp - nm2 * T.ww * (cot * Vv + 2.0 * cst.Kc * Vp);
      double cW = T.tt * (-2.0 * cst.cA * Vv - Vtt) - 2.0 * T.tp * Vtp +
                  T.pp * (2.0 * cst.cA * Vv - Vpp) +
                  nm2 * T.ww * (2.0 * cst.cA * Vv - cotVp);
      if (pole) {
        // cot(phi) d_phi tends to d_phi^2 at the poles for regular data
        cWpp += -nm2 * T.ww * Vv;
        cWp = 0.0;
        cWtp = 0.0;
      }
      if (include_source) cW -= cs * e * std::pow(Vv, e - 1.0);
      const double F = Fj.u(i, m), Ft = Fj.ut(i, m), Fp = pole ? 0.0 : Fj.up(i, m);
      const double Ftt = Fj.utt(i, m), Fpp = Fj.upp(i, m);
      const double Ftp = pole ? 0.0 : Fj.utp(i, m);
      const double pre = std::pow(F, -e);
      L.ctt(i, m) = pre * cWtt * F;
      L.ctp(i, m) = pre * cWtp * F;
      L.cpp(i, m) = pre * cWpp * F;
      L.ct(i, m) = pre * (cWt * F + cWtt * 2.0 * Ft + cWtp * Fp);
      L.cp(i, m) = pre * (cWp * F + cWpp * 2.0 * Fp + cWtp * Ft);
      L.c0(i, m) = pre * (cW * F + cWtt * Ftt + cWpp * Fpp + cWtp * Ftp + cWt * Ft + cWp * Fp);
    }
  }
  return L;
}

inline Eigen::SparseMatrix<double> LinearizedOperator::matrix() const {
  const int nt = tgrid.npts, np = nphi;
  const TGrid pg(0.0, M_PI, np);
  const DiffOp dt1(tgrid, 1, order), dt2(tgrid, 2, order);
  const DiffOp dp1(pg, 1, order), dp2(pg, 2, order);
  auto idx = [np](int i, int m) { return i * np + m; };
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(std::size_t(nt) * std::size_t(np) * 12);
  std::vector<std::pair<int, double>> r1, r2, q1, q2;
  for (int i = 0; i < nt; ++i) {
    for (int m = 0; m < np; ++m) {
      const int row = idx(i, m);
      if (i == 0 || i == nt - 1) {
        trip.emplace_back(row, row, 1.0);
        continue;
      }
      dt1.row(i, r1);
      dt2.row(i, r2);
      dp1.row(m, q1);
      dp2.row(m, q2);
      trip.emplace_back(row, row, c0(i, m));
      for (const auto& [l, w] : r2) trip.emplace_back(row, idx(l, m), ctt(i, m) * w);
      for (const auto& [l, w] : r1) trip.emplace_back(row, idx(l, m), ct(i, m) * w);
      for (const auto& [l, w] : q2) trip.emplace_back(row, idx(i, l), cpp(i, m) * w);
      if (m != 0 && m != np - 1) {
        for (const auto& [l, w] : q1) trip.emplace_back(row, idx(i, l), cp(i, m) * w);
        if (ctp(i, m) != 0.0)
          for (const auto& [lt, wt] : r1)
            for (const auto& [lp, wp] : q1)
              trip.emplace_back(row, idx(lt, lp), ctp(i, m) * wt * wp);
      }
    }
  }
  Eigen::SparseMatrix<double> A(nt * np, nt * np);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

/// Independent route: centered difference of the nonlinear operator,
/// (N(u + h w) - N(u - h w)) / (2h).
inline ArrayXd linearize_fd(const Dimensions& d, const RadialJet& uj, const RadialJet& Fj,
                            const RadialJet& wj, double h = 1e-6) {
  RadialJet up = uj, um = uj;
  up.u += h * wj.u;
  up.ut += h * wj.ut;
  up.utt += h * wj.utt;
  um.u -= h * wj.u;
  um.ut -= h * wj.ut;
  um.utt -= h * wj.utt;
  return (nonlinear_op(d, up, Fj) - nonlinear_op(d, um, Fj)) / (2.0 * h);
}

inline ArrayXXd linearize_fd(const Dimensions& d, const ZonalJet& uj, const ZonalJet& Fj,
                             const ZonalJet& wj, double h = 1e-6) {
  auto shift = [&](double s) {
    ZonalJet j = uj;
    j.u += s * wj.u;
    j.ut += s * wj.ut;
    j.up += s * wj.up;
    j.utt += s * wj.utt;
    j.upp += s * wj.upp;
    j.utp += s * wj.utp;
    return j;
  };
  return (nonlinear_op(d, shift(h), Fj) - nonlinear_op(d, shift(-h), Fj)) / (2.0 * h);
}

enum class IndicialModel { Neck, Interior };

/// Exponential rates of mode solutions of the two blow-up limit operators.
inline double indicial_root(const Dimensions& d, int j, IndicialModel model) {
  const double lj = sphere_eigenvalue(d.n, j);
  switch (model) {
    case IndicialModel::Neck:
      return std::sqrt(double(d.n - d.k) / (double(d.k) * double(d.n - 1)) * lj +
                       d.rate() * d.rate());
    case IndicialModel::Interior:
      return std::sqrt(double(d.n - 2 * d.k + 1) / double(d.n - 1) * lj +
                       double((d.n - 2 * d.k) * (d.n - 2 * d.k)) / double(2 * d.k));
  }
  throw std::invalid_argument("indicial_root: unknown model");
}

/// Mode ODE of the conjugated operator at the sphere profile:
/// z'' - [lambda_j + ((n-2)/2)^2] z + (n(n+2)/4) sech^2(s - s0) z = 0.
struct ConjugatedMode {
  int n = 0;
  int j = 0;
  double s0 = 0.0;

  double far_rate() const {
    const double half = 0.5 * double(n - 2);
    return std::sqrt(sphere_eigenvalue(n, j) + half * half);
  }
  double potential(double s) const {
    const double sech = 1.0 / std::cosh(s - s0);
    return 0.25 * double(n) * double(n + 2) * sech * sech;
  }
  /// z'' = q(s) z with q = lambda_j + ((n-2)/2)^2 - potential.
  double q(double s) const { return far_rate() * far_rate() - potential(s); }
};

inline std::vector<ConjugatedMode> conjugated_form(const Dimensions& d, double s0, int jmax) {
  std::vector<ConjugatedMode> out;
  for (int j = 0; j <= jmax; ++j) out.push_back({d.n, j, s0});
  return out;
}

/// Fitted log-slope of |z| on the trailing half of [window_lo, window_hi] for
/// the bounded branch of z'' = q(s) z, selected by backward integration from
/// the far field with the decaying seed exp(-far_rate s).
inline double measure_decay(const std::function<double(double)>& q, double far_rate,
                            double window_lo, double window_hi, double step = 1e-3) {
  if (!(window_hi > window_lo)) throw std::invalid_argument("measure_decay: empty window");
  const double far = window_hi + 10.0;
  // z' = p, p' = q z integrated backward (ds < 0); RK4
  double s = far, z = 1.0, p = -far_rate;
  const double h = -std::abs(step);
  std::vector<double> ss, zz;
  const double fit_lo = 0.5 * (window_lo + window_hi);
  while (s > window_lo - 1e-12) {
    if (s <= window_hi + 1e-12 && s >= fit_lo - 1e-12) {
      ss.push_back(s);
      zz.push_back(z);
    }
    const double k1z = p, k1p = q(s) * z;
    const double k2z = p + 0.5 * h * k1p, k2p = q(s + 0.5 * h) * (z + 0.5 * h * k1z);
    const double k3z = p + 0.5 * h * k2p, k3p = q(s + 0.5 * h) * (z + 0.5 * h * k2z);
    const double k4z = p + h * k3p, k4p = q(s + h) * (z + h * k3z);
    z += h / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z);
    p += h / 6.0 * (k1p + 2.0 * k2p + 2.0 * k3p + k4p);
    s += h;
    if (!std::isfinite(z) || !std::isfinite(p))
      throw std::runtime_error("measure_decay: integration blew up");
  }
  if (ss.size() < 8) throw std::runtime_error("measure_decay: window too small for the fit");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t cnt = 0;
  for (std::size_t i = 0; i < ss.size(); ++i) {
    const double az = std::abs(zz[i]);
    if (az < 1e-280) throw std::runtime_error("measure_decay: solution vanished to round-off");
    const double ly = std::log(az);
    sx += ss[i];
    sy += ly;
    sxx += ss[i] * ss[i];
    sxy += ss[i] * ly;
    ++cnt;
  }
  const double dn = double(cnt);
  return (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
}

inline double measure_decay(const ConjugatedMode& mode, double window_lo, double window_hi,
                            double step = 1e-3) {
  return measure_decay([&mode](double s) { return mode.q(s); }, mode.far_rate(), window_lo,
                       window_hi, step);
}

/// Discrete zonal Laplacian on [0, pi]: w'' + (n-2) cot(phi) w', with the
/// regular pole limit (n-1) w''.
inline Eigen::MatrixXd zonal_laplacian_matrix(int n, int nphi, int order = 4) {
  const TGrid pg(0.0, M_PI, nphi);
  const DiffOp d1(pg, 1, order), d2(pg, 2, order);
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(nphi, nphi);
  std::vector<std::pair<int, double>> row;
  for (int m = 0; m < nphi; ++m) {
    const bool pole = (m == 0 || m == nphi - 1);
    const double c2 = pole ? double(n - 1) : 1.0;
    d2.row(m, row);
    for (const auto& [l, w] : row) A(m, l) += c2 * w;
    if (!pole) {
      const double cot = 1.0 / std::tan(pg.t(m));
      d1.row(m, row);
      for (const auto& [l, w] : row) A(m, l) += double(n - 2) * cot * w;
    }
  }
  return A;
}

/// Zonal spherical harmonic: Gegenbauer polynomial C_j^{(n-2)/2}(cos phi),
/// eigenfunction of -Delta_theta with eigenvalue j(j+n-2).
inline double zonal_harmonic(int n, int j, double phi) {
  const double lam = 0.5 * double(n - 2);
  const double x = std::cos(phi);
  if (j == 0) return 1.0;
  double cm1 = 1.0, c = 2.0 * lam * x;
  for (int i = 2; i <= j; ++i) {
    const double cn = (2.0 * x * (double(i) + lam - 1.0) * c - (double(i) + 2.0 * lam - 2.0) * cm1) / double(i);
    cm1 = c;
    c = cn;
  }
  return c;
}

}  // namespace sigmak

#endif  // SIGMAK_LINOP_HPP
