#ifndef SIGMAK_DTN_HPP
#define SIGMAK_DTN_HPP

// Mode-wise Dirichlet problems on half-necks, the interface
// Dirichlet-to-Neumann values T (left half) and S (right half), and Cauchy
// data matching of two half solutions into a global one. The matching uses
// the discrete interface-row flux, which makes the matched solution
// algebraically identical to the monolithic solve.

#include "sigmak/linop.hpp"
#include "sigmak/neck.hpp"

#include <Eigen/Sparse>

namespace sigmak {

/// One mode's two-point boundary value problem a w'' + b w' + c w = f.
struct ModeBvp {
  TGrid grid;
  ArrayXd a, b, c;
};

inline ModeBvp mode_bvp(const ModeCoeffs& mc, const Dimensions& d, int j) {
  return {mc.grid, mc.a, mc.b, mc.c(d, j)};
}

/// Discrete system of a mode BVP with identity rows at both ends.
inline Eigen::SparseMatrix<double> mode_bvp_matrix(const ModeBvp& p, int order = 2) {
  const int n = p.grid.npts;
  const DiffOp d1(p.grid, 1, order), d2(p.grid, 2, order);
  std::vector<Eigen::Triplet<double>> trip;
  std::vector<std::pair<int, double>> row;
  for (int i = 1; i < n - 1; ++i) {
    d2.row(i, row);
    for (const auto& [l, w] : row) trip.emplace_back(i, l, p.a[i] * w);
    d1.row(i, row);
    for (const auto& [l, w] : row) trip.emplace_back(i, l, p.b[i] * w);
    trip.emplace_back(i, i, p.c[i]);
  }
  trip.emplace_back(0, 0, 1.0);
  trip.emplace_back(n - 1, n - 1, 1.0);
  Eigen::SparseMatrix<double> A(n, n);
  A.setFromTriplets(trip.begin(), trip.end());
  A.makeCompressed();
  return A;
}

/// Banded solve with Dirichlet data at both ends. The relative residual of
/// the discrete system is checked against `residual_tol`.
inline ArrayXd solve_mode_bvp(const ModeBvp& p, const ArrayXd& f, double bc_lo, double bc_hi,
                              int order = 2, double residual_tol = 1e-12) {
  const int n = p.grid.npts;
  if (int(f.size()) != n) throw std::invalid_argument("solve_mode_bvp: source size mismatch");
  const Eigen::SparseMatrix<double> A = mode_bvp_matrix(p, order);
  Eigen::VectorXd rhs = f.matrix();
  rhs[0] = bc_lo;
  rhs[n - 1] = bc_hi;
  Eigen::SparseLU<Eigen::SparseMatrix<double>> lu(A);
  if (lu.info() != Eigen::Success)
    throw std::runtime_error("solve_mode_bvp: singular discrete system");
  Eigen::VectorXd x = lu.solve(rhs);
  const double scale = rhs.cwiseAbs().maxCoeff() +
                       Eigen::VectorXd(A * x).cwiseAbs().maxCoeff() + 1e-300;
  const double res = Eigen::VectorXd(A * x - rhs).cwiseAbs().maxCoeff() / scale;
  if (!(res <= residual_tol))
    throw std::runtime_error("solve_mode_bvp: discrete residual above tolerance");
  return x.array();
}

/// Mode coefficients of the linearized operator at u_eps on an arbitrary
/// subgrid of the neck.
inline ModeCoeffs neck_mode_coeffs(const NeckConfig& cfg, const TGrid& g) {
  const RadialJet uj = jet_from_function(u_eps_fn(cfg), g);
  const RadialJet Fj = jet_from_function(background_fn(cfg), g);
  return linearize_radial(cfg.dims, uj, Fj);
}

/// Outward-normal derivative at t = 0 of the mode-j kernel extension with
/// unit interface data on the left half [log eps, 0] (zero at the outer end).
inline double dtn_T(const NeckConfig& cfg, int j, ArrayXd* solution = nullptr) {
  const TGrid g(cfg.t_left(), 0.0, cfg.nt);
  const ModeBvp p = mode_bvp(neck_mode_coeffs(cfg, g), cfg.dims, j);
  const ArrayXd w = solve_mode_bvp(p, ArrayXd::Zero(g.npts), 0.0, 1.0, cfg.order);
  if (solution != nullptr) *solution = w;
  const DiffOp d1(g, 1, cfg.order);
  std::vector<std::pair<int, double>> row;
  d1.row(g.npts - 1, row);
  double der = 0.0;
  for (const auto& [l, wt] : row) der += wt * w[l];
  return der;
}

/// Interface t-derivative of the mode-j kernel extension on the right half
/// [0, -log eps]; equals minus the outward-normal derivative there.
inline double dtn_S(const NeckConfig& cfg, int j, ArrayXd* solution = nullptr) {
  const TGrid g(0.0, cfg.t_right(), cfg.nt);
  const ModeBvp p = mode_bvp(neck_mode_coeffs(cfg, g), cfg.dims, j);
  const ArrayXd w = solve_mode_bvp(p, ArrayXd::Zero(g.npts), 1.0, 0.0, cfg.order);
  if (solution != nullptr) *solution = w;
  const DiffOp d1(g, 1, cfg.order);
  std::vector<std::pair<int, double>> row;
  d1.row(0, row);
  double der = 0.0;
  for (const auto& [l, wt] : row) der += wt * w[l];
  return der;
}

struct ModeMatchResult {
  int j = 0;
  ArrayXd w;                   // matched global mode solution on the full neck
  double psi = 0.0;            // recovered interface datum
  double flux_gap = 0.0;       // interface-row residual, derivative scale
  double stencil_gap = 0.0;    // one-sided stencil derivative jump (diagnostic)
  double sup_diff = 0.0;       // matched vs monolithic full solve
  double T = 0.0, S = 0.0;     // stencil DtN values of this mode
};

/// Split the neck at t = 0, solve both halves with zero interface data, and
/// recover the interface datum psi from the jump of the discrete fluxes. The
/// order-2 interface row makes the construction an exact Schur complement of
/// the monolithic system.
inline ModeMatchResult match_cauchy_mode(const NeckConfig& cfg, int j, const ArrayXd& f,
                                         double singular_tol = 1e-8) {
  if (cfg.nt % 2 == 0) throw std::invalid_argument("match_cauchy_mode: need odd nt");
  const TGrid g = cfg.grid();
  const int n = g.npts, m = (n - 1) / 2;
  if (int(f.size()) != n) throw std::invalid_argument("match_cauchy_mode: source size mismatch");
  const int order = 2;
  const ModeBvp full = mode_bvp(neck_mode_coeffs(cfg, g), cfg.dims, j);
  const double h = g.h();

  auto slice = [&](int lo, int hi) {
    ModeBvp s;
    s.grid = TGrid(g.t(lo), g.t(hi), hi - lo + 1);
    s.a = full.a.segment(lo, hi - lo + 1);
    s.b = full.b.segment(lo, hi - lo + 1);
    s.c = full.c.segment(lo, hi - lo + 1);
    return s;
  };
  const ModeBvp left = slice(0, m), right = slice(m, n - 1);
  const ArrayXd fL = f.segment(0, m + 1), fR = f.segment(m, n - m);
  const ArrayXd zL = ArrayXd::Zero(m + 1), zR = ArrayXd::Zero(n - m);

  const ArrayXd w1 = solve_mode_bvp(left, fL, 0.0, 0.0, order);
  const ArrayXd w2 = solve_mode_bvp(right, fR, 0.0, 0.0, order);
  const ArrayXd wb1 = solve_mode_bvp(left, zL, 0.0, 1.0, order);
  const ArrayXd wb2 = solve_mode_bvp(right, zR, 1.0, 0.0, order);

  // interface row of the monolithic order-2 system
  const double Am = full.a[m] / (h * h), Bm = full.b[m] / (2.0 * h);
  const double a_lo = Am - Bm, a_mid = -2.0 * Am + full.c[m], a_hi = Am + Bm;
  const double eta = f[m] - a_lo * w1[m - 1] - a_hi * w2[1];
  const double kap = a_mid + a_lo * wb1[m - 1] + a_hi * wb2[1];
  if (std::abs(kap) < singular_tol * (std::abs(a_mid) + 1e-300))
    throw std::runtime_error("match_cauchy_mode: interface operator numerically singular");

  ModeMatchResult res;
  res.j = j;
  res.psi = eta / kap;
  res.w.resize(n);
  for (int i = 0; i < m; ++i) res.w[i] = w1[i] + res.psi * wb1[i];
  res.w[m] = res.psi;
  for (int i = m + 1; i < n; ++i) res.w[i] = w2[i - m] + res.psi * wb2[i - m];

  const double rowres = f[m] - (a_lo * res.w[m - 1] + a_mid * res.w[m] + a_hi * res.w[m + 1]);
  res.flux_gap = std::abs(rowres) * h / (std::abs(full.a[m]) + 1e-300);

  const ArrayXd mono = solve_mode_bvp(full, f, 0.0, 0.0, order);
  res.sup_diff = (res.w - mono).abs().maxCoeff();

  // one-sided derivative stencils from each half (diagnostic scale)
  {
    const DiffOp dL(left.grid, 1, 4), dR(right.grid, 1, 4);
    std::vector<std::pair<int, double>> row;
    double dl = 0.0, dr = 0.0;
    dL.row(m, row);
    for (const auto& [l, wt] : row) dl += wt * res.w[l];
    dR.row(0, row);
    for (const auto& [l, wt] : row) dr += wt * res.w[m + l];
    res.stencil_gap = std::abs(dr - dl);
  }
  res.T = dtn_T(cfg, j);
  res.S = dtn_S(cfg, j);
  return res;
}

}  // namespace sigmak

#endif  // SIGMAK_DTN_HPP
