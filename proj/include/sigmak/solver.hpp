#ifndef SIGMAK_SOLVER_HPP
#define SIGMAK_SOLVER_HPP

// The nonlinear driver: proper-error evaluation with scaling fit, the
// quadratic remainder (direct and quadrature forms), the frozen-linearization
// iteration w_{i+1} = L(u_eps)^{-1}[-N(u_eps) - Q(u_eps)(w_i)] and a full
// Newton variant, cone monitoring, and an independent solution certificate.

#include "sigmak/dtn.hpp"
#include "sigmak/neck.hpp"
#include "sigmak/schwarzschild.hpp"

#include <memory>

namespace sigmak {

enum class Scheme { PaperFrozen, FullNewton };

struct SolveConfig {
  NeckConfig neck;
  Scheme scheme = Scheme::PaperFrozen;
  double tol = 1e-10;
  int max_iter = 30;
  // Robustness margin for cone monitoring: with a flat background the neck
  // ends are exactly scalar-flat and the sigmas sit at round-off scale there.
  double cone_floor = 1e-12;

  explicit SolveConfig(NeckConfig n) : neck(n) {
    if (!(tol > 0.0)) throw std::invalid_argument("SolveConfig: tol must be > 0");
  }
};

struct IterateStats {
  double residual = 0.0;     // ||N(u_eps + w_i)||_inf over interior nodes
  double correction = 0.0;   // ||w_{i+1} - w_i||_inf
  double w_norm = 0.0;       // ||w_i||_inf
  double cone_margin = 0.0;  // min_j<=k-1 min_node sigma_j(g^{-1}A)
  double ellipticity = 0.0;  // min eigenvalue of T_{k-1}(B) over nodes
  double sigma_k_min = 0.0;
};

struct ConvergenceReport {
  std::vector<IterateStats> iterates;
  bool converged = false;
  int iterations = 0;
  double final_residual = 0.0;
  double fixed_point_residual = 0.0;  // ||w - L^{-1}[-N(u_eps) - Q(w)]||_inf
  double rel_correction = 0.0;        // ||w / u_eps||_inf
  double iterate_ratio_max = 0.0;     // max_i ||w_i|| / ||w_1||
};

struct SolveError : std::runtime_error {
  enum class Kind { ConeExit, PositivityLoss, MaxIter };
  Kind kind;
  ConvergenceReport report;
  SolveError(Kind k, std::string msg, ConvergenceReport rep)
      : std::runtime_error(std::move(msg)), kind(k), report(std::move(rep)) {}
};

struct SolveResult {
  RadialProfile u;  // converged conformal factor u_eps + w
  ArrayXd w;
  ConvergenceReport report;
};

namespace detail {

struct ConeState {
  double margin;
  double ellipticity;
  double sigma_k_min;
};

inline ConeState cone_state(const Dimensions& d, const RadialJet& V) {
  ConeState st{std::numeric_limits<double>::infinity(), std::numeric_limits<double>::infinity(),
               std::numeric_limits<double>::infinity()};
  const double expo = 2.0 * d.n / double(d.n - 2 * d.k);
  for (int i = 0; i < V.grid.npts; ++i) {
    const ArrowEndo B = assemble_node(d, V.u[i], V.ut[i], V.utt[i]);
    const auto sig = all_sigmas(B, d.n);
    const double fac = (1.0 / d.rate()) * std::pow(V.u[i], -expo);
    for (int j = 1; j < d.k; ++j)
      st.margin = std::min(st.margin, sig[std::size_t(j)] * std::pow(fac, j));
    st.sigma_k_min = std::min(st.sigma_k_min, sig[std::size_t(d.k)] * std::pow(fac, d.k));
    const ArrowEndo T = newton_transform(B, d.n, d.k - 1);
    const auto ev = block_eigenvalues(T);
    st.ellipticity = std::min({st.ellipticity, ev[1], T.ww});
  }
  return st;
}

}  // namespace detail

/// Predicted weighted-norm decay exponent of the proper error,
/// (n-2k)/n ((n+2k)/(2k) + delta).
inline double proper_error_exponent(const Dimensions& d, double delta) {
  return double(d.n - 2 * d.k) / double(d.n) *
         (double(d.n + 2 * d.k) / double(2 * d.k) + delta);
}

struct ProperErrorReport {
  std::vector<double> eps;
  std::vector<WeightedNormReport> norms;
  double slope = 0.0;
  double fit_rms = 0.0;
  double predicted = 0.0;
};

/// Weighted norm of N(u_eps) at weight delta - (n-2k)(2k-1)/(2k) over an
/// eps-sweep, with the fitted log-log slope.
inline ProperErrorReport proper_error(const NeckConfig& base, const std::vector<double>& sweep) {
  ProperErrorReport rep;
  rep.predicted = proper_error_exponent(base.dims, base.delta);
  const double wdelta =
      base.delta - base.dims.rate() * double(2 * base.dims.k - 1);
  std::vector<double> vals;
  for (double e : sweep) {
    NeckConfig cfg = base;
    cfg.eps = e;
    const TGrid g = cfg.grid();
    const RadialJet uj = jet_from_function(u_eps_fn(cfg), g);
    const RadialJet Fj = jet_from_function(background_fn(cfg), g);
    ArrayXd N = nonlinear_op(cfg.dims, uj, Fj);
    RadialJet nj{g, N, ArrayXd::Zero(g.npts), ArrayXd::Zero(g.npts)};
    const WeightedNormReport wn = weighted_norm(cfg, nj, 0, wdelta);
    rep.eps.push_back(e);
    rep.norms.push_back(wn);
    vals.push_back(wn.value);
  }
  const auto [slope, rms] = fit_loglog(rep.eps, vals);
  rep.slope = slope;
  rep.fit_rms = rms;
  return rep;
}

/// Q(u)(w) = N(u + w) - N(u) - L(u)[w], computed directly.
inline ArrayXd quadratic_remainder(const Dimensions& d, const RadialJet& uj, const RadialJet& Fj,
                                   const RadialJet& wj) {
  RadialJet uw = uj;
  uw.u += wj.u;
  uw.ut += wj.ut;
  uw.utt += wj.utt;
  require_positive(uw.u, "quadratic_remainder");
  const ModeCoeffs L = linearize_radial(d, uj, Fj);
  return nonlinear_op(d, uw, Fj) - nonlinear_op(d, uj, Fj) - apply_radial(L, wj);
}

/// The same remainder as int_0^1 (L(u+sw) - L(u))[w] ds by 5-point Gauss.
inline ArrayXd quadratic_remainder_quadrature(const Dimensions& d, const RadialJet& uj,
                                              const RadialJet& Fj, const RadialJet& wj) {
  static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                               0.5384693101056831, 0.9061798459386640};
  static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                               0.4786286704993665, 0.2369268850561891};
  const ModeCoeffs L0 = linearize_radial(d, uj, Fj);
  const ArrayXd base = apply_radial(L0, wj);
  ArrayXd acc = ArrayXd::Zero(uj.grid.npts);
  for (int i = 0; i < 5; ++i) {
    const double s = 0.5 * (1.0 + xs[i]);
    RadialJet us = uj;
    us.u += s * wj.u;
    us.ut += s * wj.ut;
    us.utt += s * wj.utt;
    const ModeCoeffs Ls = linearize_radial(d, us, Fj);
    acc += (0.5 * ws[i]) * (apply_radial(Ls, wj) - base);
  }
  return acc;
}

/// Glue solve on the full neck with Dirichlet data u = u_eps at both ends.
inline SolveResult newton_solve(const SolveConfig& scfg) {
  const NeckConfig& cfg = scfg.neck;
  const Dimensions& d = cfg.dims;
  const TGrid g = cfg.grid();
  const int n = g.npts;
  const RadialJet uj = jet_from_function(u_eps_fn(cfg), g);
  const RadialJet Fj = jet_from_function(background_fn(cfg), g);
  const DiffOp d1(g, 1, cfg.order), d2(g, 2, cfg.order);

  auto wjet = [&](const ArrayXd& w) { return RadialJet{g, w, d1.apply(w), d2.apply(w)}; };
  auto total = [&](const RadialJet& wj) {
    RadialJet t = uj;
    t.u += wj.u;
    t.ut += wj.ut;
    t.utt += wj.utt;
    return t;
  };
  auto residual = [&](const RadialJet& tj) {
    ArrayXd r = nonlinear_op(d, tj, Fj);
    r[0] = 0.0;
    r[n - 1] = 0.0;
    return r;
  };
  auto factor = [&](const RadialJet& base) {
    const ModeCoeffs mc = linearize_radial(d, base, Fj);
    auto lu = std::make_unique<Eigen::SparseLU<Eigen::SparseMatrix<double>>>();
    lu->compute(mode_bvp_matrix(mode_bvp(mc, d, 0), cfg.order));
    if (lu->info() != Eigen::Success)
      throw std::runtime_error("newton_solve: singular linearized system");
    return lu;
  };

  ConvergenceReport rep;
  ArrayXd w = ArrayXd::Zero(n);
  auto frozen = factor(uj);

  const ConeReport pre = cone_check_neck(cfg);
  if (!(pre.margin > -scfg.cone_floor))
    throw SolveError(SolveError::Kind::ConeExit, "newton_solve: u_eps not (k-1)-admissible", rep);

  for (int it = 0; it <= scfg.max_iter; ++it) {
    const RadialJet wj = wjet(w);
    const RadialJet tj = total(wj);
    if (!(tj.u > 0.0).all())
      throw SolveError(SolveError::Kind::PositivityLoss, "newton_solve: factor lost positivity", rep);
    const detail::ConeState cs = detail::cone_state(d, jet_product(Fj, tj));
    const ArrayXd r = residual(tj);
    IterateStats st;
    st.residual = r.abs().maxCoeff();
    st.w_norm = w.abs().maxCoeff();
    st.cone_margin = cs.margin;
    st.ellipticity = cs.ellipticity;
    st.sigma_k_min = cs.sigma_k_min;
    if (cs.margin <= -scfg.cone_floor || cs.ellipticity <= -scfg.cone_floor) {
      rep.iterates.push_back(st);
      throw SolveError(SolveError::Kind::ConeExit, "newton_solve: iterate left the cone", rep);
    }
    if (st.residual <= scfg.tol) {
      rep.iterates.push_back(st);
      rep.converged = true;
      rep.iterations = it;
      rep.final_residual = st.residual;
      break;
    }
    if (it == scfg.max_iter) {
      rep.iterates.push_back(st);
      throw SolveError(SolveError::Kind::MaxIter, "newton_solve: iteration budget exhausted", rep);
    }
    Eigen::VectorXd upd;
    if (scfg.scheme == Scheme::PaperFrozen) {
      upd = frozen->solve(r.matrix());
    } else {
      auto lu = factor(tj);
      upd = lu->solve(r.matrix());
    }
    st.correction = upd.cwiseAbs().maxCoeff();
    rep.iterates.push_back(st);
    w -= upd.array();
  }

  // summary diagnostics
  if (rep.iterates.size() >= 2) {
    const double w1 = std::max(rep.iterates[1].w_norm, 1e-300);
    for (const auto& st : rep.iterates)
      rep.iterate_ratio_max = std::max(rep.iterate_ratio_max, st.w_norm / w1);
  }
  {
    const RadialJet wj = wjet(w);
    const ArrayXd fp = frozen->solve(residual(total(wj)).matrix());
    rep.fixed_point_residual = fp.abs().maxCoeff();
    rep.rel_correction = (w / uj.u).abs().maxCoeff();
  }
  SolveResult out{RadialProfile(g, uj.u + w, cfg.order), w, rep};
  return out;
}

struct CertificateReport {
  double max_deviation = 0.0;        // |sigma_k(g~^{-1}A) - 2^{-k} binom(n,k)|
  std::vector<double> cone_margins;  // j = 1..k
  bool positive = false;
  bool admissible = false;
};

/// Re-evaluates the curvature of the final metric through an independent
/// path: closed-form block eigenvalues and subset-enumeration sigmas.
inline CertificateReport solution_certificate(const Dimensions& d, const RadialJet& Vj) {
  CertificateReport rep;
  rep.cone_margins.assign(std::size_t(d.k), std::numeric_limits<double>::infinity());
  const double target = d.target_sigma();
  const double expo = 2.0 * d.n / double(d.n - 2 * d.k);
  rep.positive = (Vj.u > 0.0).all();
  if (!rep.positive) return rep;
  for (int i = 0; i < Vj.grid.npts; ++i) {
    const ArrowEndo B = assemble_node(d, Vj.u[i], Vj.ut[i], Vj.utt[i]);
    const double fac = (1.0 / d.rate()) * std::pow(Vj.u[i], -expo);
    std::vector<double> lam = arrow_spectrum(B, d.n).expanded();
    for (double& l : lam) l *= fac;
    for (int j = 1; j <= d.k; ++j) {
      const double sj = sigma_enumerate(lam, j);
      rep.cone_margins[std::size_t(j) - 1] = std::min(rep.cone_margins[std::size_t(j) - 1], sj);
      if (j == d.k) rep.max_deviation = std::max(rep.max_deviation, std::abs(sj - target));
    }
  }
  rep.admissible = true;
  for (double mj : rep.cone_margins) rep.admissible = rep.admissible && (mj > 0.0);
  return rep;
}

}  // namespace sigmak

#endif  // SIGMAK_SOLVER_HPP
