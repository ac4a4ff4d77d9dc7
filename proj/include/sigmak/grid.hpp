#ifndef SIGMAK_GRID_HPP
#define SIGMAK_GRID_HPP

// Uniform grids on the cylinder, finite-difference stencils of order 2 or 4
// (Fornberg weights, one-sided at boundaries), radial and zonal fields with
// their derivative jets.

#include <Eigen/Dense>

#include <cmath>
#include <functional>
#include <stdexcept>
#include <vector>

namespace sigmak {

using Eigen::ArrayXd;
using Eigen::ArrayXXd;

/// Uniform grid on [lo, hi] with npts nodes (npts >= 2).
struct TGrid {
  double lo = 0.0;
  double hi = 1.0;
  int npts = 2;

  TGrid() = default;
  TGrid(double lo_, double hi_, int npts_) : lo(lo_), hi(hi_), npts(npts_) {
    if (!(hi > lo) || npts < 2) throw std::invalid_argument("TGrid: need hi > lo, npts >= 2");
  }
  double h() const { return (hi - lo) / double(npts - 1); }
  double t(int i) const { return lo + h() * double(i); }
  ArrayXd nodes() const {
    ArrayXd out(npts);
    for (int i = 0; i < npts; ++i) out[i] = t(i);
    return out;
  }
};

/// Fornberg finite-difference weights for derivative `d` at point x0 from the
/// given nodes. Returns one weight per node.
inline std::vector<double> fd_weights(double x0, const std::vector<double>& x, int d) {
  const int nn = int(x.size());
  std::vector<std::vector<double>> c(std::size_t(nn), std::vector<double>(std::size_t(d) + 1, 0.0));
  double c1 = 1.0;
  double c4 = x[0] - x0;
  c[0][0] = 1.0;
  for (int i = 1; i < nn; ++i) {
    const int mn = std::min(i, d);
    double c2 = 1.0;
    const double c5 = c4;
    c4 = x[std::size_t(i)] - x0;
    for (int j = 0; j < i; ++j) {
      const double c3 = x[std::size_t(i)] - x[std::size_t(j)];
      c2 *= c3;
      if (j == i - 1) {
        for (int s = mn; s >= 1; --s)
          c[std::size_t(i)][std::size_t(s)] =
              c1 * (s * c[std::size_t(i - 1)][std::size_t(s - 1)] - c5 * c[std::size_t(i - 1)][std::size_t(s)]) / c2;
        c[std::size_t(i)][0] = -c1 * c5 * c[std::size_t(i - 1)][0] / c2;
      }
      for (int s = mn; s >= 1; --s)
        c[std::size_t(j)][std::size_t(s)] =
            (c4 * c[std::size_t(j)][std::size_t(s)] - s * c[std::size_t(j)][std::size_t(s - 1)]) / c3;
      c[std::size_t(j)][0] = c4 * c[std::size_t(j)][0] / c3;
    }
    c1 = c2;
  }
  std::vector<double> w(static_cast<std::size_t>(nn));
  for (int i = 0; i < nn; ++i) w[std::size_t(i)] = c[std::size_t(i)][std::size_t(d)];
  return w;
}

/// Banded derivative operator on a uniform grid: centered interior stencils,
/// shifted one-sided stencils near the ends, truncation order >= `order`.
struct DiffOp {
  int npts = 0;
  std::vector<int> start;                  // first node of each row's window
  std::vector<std::vector<double>> weights;

  DiffOp() = default;
  DiffOp(const TGrid& g, int deriv, int order) : npts(g.npts) {
    if (order != 2 && order != 4) throw std::invalid_argument("DiffOp: order must be 2 or 4");
    if (deriv != 1 && deriv != 2) throw std::invalid_argument("DiffOp: deriv must be 1 or 2");
    const int half = order / 2;
    // centered window keeps order `order` for both derivatives; one extra node
    // is needed off-center to hold the order for the second derivative
    const int wid_center = 2 * half + 1;
    const int wid_side = (deriv == 2) ? order + 2 : order + 1;
    start.resize(std::size_t(npts));
    weights.resize(std::size_t(npts));
    const double h = g.h();
    for (int i = 0; i < npts; ++i) {
      int wid = wid_center;
      int s = i - half;
      if (s < 0 || s + wid > npts) {
        wid = std::min(wid_side, npts);
        s = std::min(std::max(0, i - wid / 2), npts - wid);
      }
      std::vector<double> x(static_cast<std::size_t>(wid));
      for (int j = 0; j < wid; ++j) x[std::size_t(j)] = double(s + j - i) * h;
      start[std::size_t(i)] = s;
      weights[std::size_t(i)] = fd_weights(0.0, x, deriv);
    }
  }

  ArrayXd apply(const ArrayXd& f) const {
    if (int(f.size()) != npts) throw std::invalid_argument("DiffOp: size mismatch");
    ArrayXd out(npts);
    for (int i = 0; i < npts; ++i) {
      const auto& w = weights[std::size_t(i)];
      double acc = 0.0;
      for (std::size_t j = 0; j < w.size(); ++j) acc += w[j] * f[start[std::size_t(i)] + int(j)];
      out[i] = acc;
    }
    return out;
  }

  /// One row as (node index, weight) pairs, for matrix assembly.
  void row(int i, std::vector<std::pair<int, double>>& out) const {
    out.clear();
    const auto& w = weights[std::size_t(i)];
    for (std::size_t j = 0; j < w.size(); ++j) out.emplace_back(start[std::size_t(i)] + int(j), w[j]);
  }
};

/// Positive grid function of t with a chosen stencil order.
struct RadialProfile {
  TGrid grid;
  ArrayXd values;
  int order = 4;

  RadialProfile() = default;
  RadialProfile(TGrid g, ArrayXd v, int ord = 4) : grid(g), values(std::move(v)), order(ord) {
    if (int(values.size()) != grid.npts) throw std::invalid_argument("RadialProfile: size mismatch");
  }
};

/// A radial function with its first two t-derivatives on a grid.
struct RadialJet {
  TGrid grid;
  ArrayXd u, ut, utt;
};

/// Closed-form radial function: value and first two derivatives at a point.
using RadialFn = std::function<std::array<double, 3>(double)>;

inline RadialJet jet_from_stencils(const RadialProfile& p) {
  const DiffOp d1(p.grid, 1, p.order), d2(p.grid, 2, p.order);
  return {p.grid, p.values, d1.apply(p.values), d2.apply(p.values)};
}

inline RadialJet jet_from_function(const RadialFn& f, const TGrid& g) {
  RadialJet j;
  j.grid = g;
  j.u.resize(g.npts);
  j.ut.resize(g.npts);
  j.utt.resize(g.npts);
  for (int i = 0; i < g.npts; ++i) {
    const auto v = f(g.t(i));
    j.u[i] = v[0];
    j.ut[i] = v[1];
    j.utt[i] = v[2];
  }
  return j;
}

inline RadialJet constant_jet(const TGrid& g, double c) {
  return {g, ArrayXd::Constant(g.npts, c), ArrayXd::Zero(g.npts), ArrayXd::Zero(g.npts)};
}

/// Pointwise product of two jets (Leibniz rule).
inline RadialJet jet_product(const RadialJet& a, const RadialJet& b) {
  RadialJet j;
  j.grid = a.grid;
  j.u = a.u * b.u;
  j.ut = a.ut * b.u + a.u * b.ut;
  j.utt = a.utt * b.u + 2.0 * a.ut * b.ut + a.u * b.utt;
  return j;
}

/// Pointwise quotient a/b of two jets.
inline RadialJet jet_quotient(const RadialJet& a, const RadialJet& b) {
  RadialJet j;
  j.grid = a.grid;
  j.u = a.u / b.u;
  j.ut = (a.ut - j.u * b.ut) / b.u;
  j.utt = (a.utt - 2.0 * j.ut * b.ut - j.u * b.utt) / b.u;
  return j;
}

/// Grid function u(t_i, phi_m) on [lo,hi] x [0,pi]; rows index t, columns phi.
struct ZonalField {
  TGrid tgrid;
  int nphi = 0;
  ArrayXXd values;  // tgrid.npts x nphi
  int order = 4;

  ZonalField() = default;
  ZonalField(TGrid tg, int nphi_, ArrayXXd v, int ord = 4)
      : tgrid(tg), nphi(nphi_), values(std::move(v)), order(ord) {
    if (values.rows() != tgrid.npts || values.cols() != nphi)
      throw std::invalid_argument("ZonalField: shape mismatch");
    if (nphi < 5) throw std::invalid_argument("ZonalField: need nphi >= 5");
  }
  double hphi() const { return M_PI / double(nphi - 1); }
  double phi(int m) const { return hphi() * double(m); }
};

/// Zonal function with all derivatives needed by the curvature assembly.
/// up vanishes at the poles (regularity of zonal functions); the assembly
/// replaces cot(phi) up by upp there.
struct ZonalJet {
  TGrid tgrid;
  int nphi = 0;
  ArrayXXd u, ut, up, utt, upp, utp;
};

inline ZonalJet jet_from_stencils(const ZonalField& f) {
  ZonalJet j;
  j.tgrid = f.tgrid;
  j.nphi = f.nphi;
  const DiffOp dt1(f.tgrid, 1, f.order), dt2(f.tgrid, 2, f.order);
  const TGrid pg(0.0, M_PI, f.nphi);
  const DiffOp dp1(pg, 1, f.order), dp2(pg, 2, f.order);
  const int nt = f.tgrid.npts, np = f.nphi;
  j.u = f.values;
  j.ut.resize(nt, np);
  j.utt.resize(nt, np);
  j.up.resize(nt, np);
  j.upp.resize(nt, np);
  j.utp.resize(nt, np);
  for (int m = 0; m < np; ++m) {
    ArrayXd col = f.values.col(m);
    j.ut.col(m) = dt1.apply(col);
    j.utt.col(m) = dt2.apply(col);
  }
  for (int i = 0; i < nt; ++i) {
    ArrayXd row = f.values.row(i).transpose();
    j.up.row(i) = dp1.apply(row).transpose();
    j.upp.row(i) = dp2.apply(row).transpose();
    j.utp.row(i) = dp1.apply(ArrayXd(j.ut.row(i).transpose())).transpose();
  }
  // pole regularity
  j.up.col(0).setZero();
  j.up.col(np - 1).setZero();
  j.utp.col(0).setZero();
  j.utp.col(np - 1).setZero();
  return j;
}

inline ZonalJet jet_product(const ZonalJet& a, const ZonalJet& b) {
  ZonalJet j;
  j.tgrid = a.tgrid;
  j.nphi = a.nphi;
  j.u = a.u * b.u;
  j.ut = a.ut * b.u + a.u * b.ut;
  j.up = a.up * b.u + a.u * b.up;
  j.utt = a.utt * b.u + 2.0 * a.ut * b.ut + a.u * b.utt;
  j.upp = a.upp * b.u + 2.0 * a.up * b.up + a.u * b.upp;
  j.utp = a.utp * b.u + a.ut * b.up + a.up * b.ut + a.u * b.utp;
  return j;
}

inline ZonalJet jet_quotient(const ZonalJet& a, const ZonalJet& b) {
  ZonalJet j;
  j.tgrid = a.tgrid;
  j.nphi = a.nphi;
  const ArrayXXd ib = 1.0 / b.u;
  j.u = a.u * ib;
  j.ut = (a.ut - j.u * b.ut) * ib;
  j.up = (a.up - j.u * b.up) * ib;
  j.utt = (a.utt - 2.0 * j.ut * b.ut - j.u * b.utt) * ib;
  j.upp = (a.upp - 2.0 * j.up * b.up - j.u * b.upp) * ib;
  j.utp = (a.utp - j.ut * b.up - j.up * b.ut - j.u * b.utp) * ib;
  return j;
}

/// Constant-in-phi extension of a radial jet.
inline ZonalJet broadcast(const RadialJet& r, int nphi) {
  ZonalJet j;
  j.tgrid = r.grid;
  j.nphi = nphi;
  const int nt = r.grid.npts;
  j.u = r.u.replicate(1, nphi);
  j.ut = r.ut.replicate(1, nphi);
  j.utt = r.utt.replicate(1, nphi);
  j.up = ArrayXXd::Zero(nt, nphi);
  j.upp = ArrayXXd::Zero(nt, nphi);
  j.utp = ArrayXXd::Zero(nt, nphi);
  return j;
}

/// Least-squares slope of log(y) against log(x); also returns the rms fit
/// residual in log space.
inline std::pair<double, double> fit_loglog(const std::vector<double>& x,
                                            const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("fit_loglog: need 2+ points");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double dn = double(n);
  const double slope = (dn * sxy - sx * sy) / (dn * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / dn;
  double rss = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double r = std::log(y[i]) - (slope * std::log(x[i]) + icpt);
    rss += r * r;
  }
  return {slope, std::sqrt(rss / dn)};
}

/// Aitken delta-squared extrapolation of the last three terms.
inline double aitken_limit(const std::vector<double>& s) {
  if (s.size() < 3) throw std::invalid_argument("aitken_limit: need 3+ terms");
  const std::size_t n = s.size();
  const double d1 = s[n - 1] - s[n - 2];
  const double d2 = s[n - 1] - 2.0 * s[n - 2] + s[n - 3];
  if (std::abs(d2) < 1e-300) return s[n - 1];
  return s[n - 1] - d1 * d1 / d2;
}

}  // namespace sigmak

#endif  // SIGMAK_GRID_HPP
