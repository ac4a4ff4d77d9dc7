#ifndef SIGMAK_NECK_HPP
#define SIGMAK_NECK_HPP

// Approximate solutions on the truncated cylinder (log eps, -log eps) x S^{n-1}:
// smooth cutoffs, the spliced conformal factor u_eps, the weight function
// zeta = min(1, eps cosh t), discrete weighted norms, synthetic backgrounds
// and the admissibility check of the glued metric.

#include "sigmak/cylinder.hpp"

#include <algorithm>
#include <limits>
#include <vector>

namespace sigmak {

namespace detail {

// Bump exp(1 - 1/(1-s^2)) on (-1,1) and its derivative.
inline double bump(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - s * s));
}
inline double bump_d1(double s) {
  if (std::abs(s) >= 1.0) return 0.0;
  const double d = 1.0 - s * s;
  return bump(s) * (-2.0 * s / (d * d));
}

// Cumulative integral of the bump over [-1, s], tabulated per cell with
// Gauss-Legendre accumulation.
class BumpIntegral {
 public:
  static const BumpIntegral& instance() {
    static BumpIntegral tab;
    return tab;
  }
  double total() const { return cum_.back(); }
  double operator()(double s) const {
    if (s <= -1.0) return 0.0;
    if (s >= 1.0) return total();
    const double x = (s + 1.0) / h_;
    int cell = std::min(int(x), ncells_ - 1);
    const double lo = -1.0 + h_ * double(cell);
    return cum_[std::size_t(cell)] + gauss5(lo, s);
  }

 private:
  static constexpr int ncells_ = 2048;
  double h_ = 2.0 / double(ncells_);
  std::vector<double> cum_;

  static double gauss5(double a, double b) {
    static const double xs[5] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                 0.5384693101056831, 0.9061798459386640};
    static const double ws[5] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                 0.4786286704993665, 0.2369268850561891};
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double acc = 0.0;
    for (int i = 0; i < 5; ++i) acc += ws[i] * bump(mid + half * xs[i]);
    return acc * half;
  }

  BumpIntegral() {
    cum_.resize(std::size_t(ncells_) + 1, 0.0);
    for (int i = 0; i < ncells_; ++i) {
      const double a = -1.0 + h_ * double(i);
      cum_[std::size_t(i) + 1] = cum_[std::size_t(i)] + gauss5(a, a + h_);
    }
  }
};

}  // namespace detail

/// C-infinity non-increasing step: 1 on (-inf, a], 0 on [b, inf), built from
/// the primitive of the bump exp(1 - 1/(1-s^2)).
struct SmoothStep {
  double a = 0.0;
  double b = 1.0;

  SmoothStep() = default;
  SmoothStep(double a_, double b_) : a(a_), b(b_) {
    if (!(b > a)) throw std::invalid_argument("SmoothStep: need b > a");
  }
  double map(double t) const { return -1.0 + 2.0 * (t - a) / (b - a); }
  double value(double t) const {
    if (t <= a) return 1.0;
    if (t >= b) return 0.0;
    const auto& I = detail::BumpIntegral::instance();
    return 1.0 - I(map(t)) / I.total();
  }
  double d1(double t) const {
    if (t <= a || t >= b) return 0.0;
    const auto& I = detail::BumpIntegral::instance();
    return -detail::bump(map(t)) * (2.0 / (b - a)) / I.total();
  }
  double d2(double t) const {
    if (t <= a || t >= b) return 0.0;
    const auto& I = detail::BumpIntegral::instance();
    const double m = 2.0 / (b - a);
    return -detail::bump_d1(map(t)) * m * m / I.total();
  }
  std::array<double, 3> jet(double t) const { return {value(t), d1(t), d2(t)}; }
};

enum class BackgroundKind { None, Spheres };

/// Neck configuration: necksize eps, weight delta, grid and background knobs.
struct NeckConfig {
  Dimensions dims;
  double eps = 1e-2;
  double delta = 0.0;
  BackgroundKind bg_kind = BackgroundKind::Spheres;
  double bg_amplitude = 1.0;
  int nt = 2001;
  int nphi = 65;
  int order = 4;
  int jmax = 32;

  NeckConfig(Dimensions d, double eps_, double delta_ = 0.0) : dims(d), eps(eps_), delta(delta_) {
    if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("NeckConfig: eps must be in (0,1)");
    if (!(std::abs(delta) < d.rate()))
      throw std::invalid_argument("NeckConfig: |delta| must be < (n-2k)/(2k)");
  }
  double t_left() const { return std::log(eps); }
  double t_right() const { return -std::log(eps); }
  TGrid grid() const { return TGrid(t_left(), t_right(), nt); }

  /// Cutoff pair: eta transitions on [-1,1]; chi is 1 up to -log(eps)-1 and
  /// falls to 0 at -log(eps).
  SmoothStep eta() const { return SmoothStep(-1.0, 1.0); }
  SmoothStep chi() const { return SmoothStep(t_right() - 1.0, t_right()); }
};

/// One side's pure exponential factor eps^{rate} e^{-s * rate * t}, s = +-1.
/// Equals 1 at its own end of the neck.
inline RadialFn side_factor(const NeckConfig& cfg, int side_sign) {
  const double r = cfg.dims.rate();
  const double amp = std::pow(cfg.eps, r);
  const double s = (side_sign >= 0) ? 1.0 : -1.0;
  return [r, amp, s](double t) {
    const double v = amp * std::exp(-s * r * t);
    return std::array<double, 3>{v, -s * r * v, r * r * v};
  };
}

/// The spliced conformal factor: u_eps = (chi(t) u1 + chi(-t) u2) / 2, which
/// equals eps^{rate} cosh(rate t) exactly on the plateau and 1/2 at the ends.
inline RadialFn u_eps_fn(const NeckConfig& cfg) {
  const SmoothStep chi = cfg.chi();
  const RadialFn u1 = side_factor(cfg, +1);
  const RadialFn u2 = side_factor(cfg, -1);
  return [chi, u1, u2](double t) {
    const auto a = u1(t);
    const auto b = u2(t);
    const auto cl = chi.jet(t);
    const auto cr = chi.jet(-t);  // d/dt chi(-t) = -chi'(-t)
    double v = 0.5 * (cl[0] * a[0] + cr[0] * b[0]);
    double vt = 0.5 * (cl[1] * a[0] + cl[0] * a[1] - cr[1] * b[0] + cr[0] * b[1]);
    double vtt = 0.5 * (cl[2] * a[0] + 2.0 * cl[1] * a[1] + cl[0] * a[2] + cr[2] * b[0] -
                        2.0 * cr[1] * b[1] + cr[0] * b[2]);
    return std::array<double, 3>{v, vt, vtt};
  };
}

inline RadialProfile build_u_eps(const NeckConfig& cfg, const TGrid& g) {
  if (g.lo < cfg.t_left() - 1e-12 || g.hi > cfg.t_right() + 1e-12)
    throw std::domain_error("build_u_eps: grid exceeds the neck (log eps, -log eps)");
  ArrayXd v(g.npts);
  const auto f = u_eps_fn(cfg);
  for (int i = 0; i < g.npts; ++i) v[i] = f(g.t(i))[0];
  return RadialProfile(g, std::move(v), cfg.order);
}

/// Weight function: eps cosh t on the neck, spliced with 1 outside by min.
inline double zeta_eps(const NeckConfig& cfg, double t) {
  return std::min(1.0, cfg.eps * std::cosh(t));
}

/// Jet of the sphere profile cosh^{-rate}(t - t0), duplicated here to keep
/// include order one-way; equals sphere_profile_fn in the model module.
inline RadialFn neck_sphere_profile(const Dimensions& d, double t0) {
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

/// Background factor F multiplying u_eps: the glued metric is
/// (F u_eps)^{4k/(n-2k)} g_cyl. Kind None is the flat cylinder (F = 1).
/// Kind Spheres makes the total factor F u_eps the superposition of the two
/// exact sphere profiles cosh^{-rate}(t -+ t0), t0 = log(eps/2), which keeps
/// the glued metric admissible with no cutoff spikes; the deviation of F/2
/// from 1 is O(eps^2 cosh 2t), scaled by bg_amplitude.
inline RadialFn background_fn(const NeckConfig& cfg) {
  if (cfg.bg_kind == BackgroundKind::None) {
    return [](double) { return std::array<double, 3>{1.0, 0.0, 0.0}; };
  }
  const double t0 = std::log(cfg.eps / 2.0);
  const RadialFn s1 = neck_sphere_profile(cfg.dims, t0);
  const RadialFn s2 = neck_sphere_profile(cfg.dims, -t0);
  const RadialFn ue = u_eps_fn(cfg);
  const double a = cfg.bg_amplitude;
  return [s1, s2, ue, a](double t) {
    const auto v1 = s1(t), v2 = s2(t), u = ue(t);
    const double su = v1[0] + v2[0], st = v1[1] + v2[1], stt = v1[2] + v2[2];
    const double q = su / u[0];
    const double qt = (st - q * u[1]) / u[0];
    const double qtt = (stt - 2.0 * qt * u[1] - q * u[2]) / u[0];
    return std::array<double, 3>{2.0 * (1.0 - a) + a * q, a * qt, a * qtt};
  };
}

/// Discrete weighted norm sum_{j<=m} sup zeta^{delta+j} |d^j u| with grid
/// derivatives measured in the glued metric's length scale (each order
/// divided by scale = V^{2k/(n-2k)} when V is supplied).
struct WeightedNormReport {
  int m = 0;
  double delta = 0.0;
  double value = 0.0;
  double region_left = 0.0;    // [log eps, (2k/n) log eps)
  double region_middle = 0.0;  // the scaled-model region around t = 0
  double region_right = 0.0;   // mirror of region_left
};

inline WeightedNormReport weighted_norm(const NeckConfig& cfg, const RadialJet& u, int m,
                                        double delta, const ArrayXd* metric_scale = nullptr) {
  if (m < 0 || m > 2) throw std::invalid_argument("weighted_norm: m must be 0, 1, or 2");
  WeightedNormReport rep;
  rep.m = m;
  rep.delta = delta;
  const double split = (2.0 * cfg.dims.k / double(cfg.dims.n)) * std::log(cfg.eps);
  for (int i = 0; i < u.grid.npts; ++i) {
    const double t = u.grid.t(i);
    const double z = zeta_eps(cfg, t);
    const double s = (metric_scale != nullptr)
                         ? std::pow((*metric_scale)[i], 2.0 * cfg.dims.k / double(cfg.dims.n - 2 * cfg.dims.k))
                         : 1.0;
    double acc = std::pow(z, delta) * std::abs(u.u[i]);
    if (m >= 1) acc += std::pow(z, delta + 1.0) * std::abs(u.ut[i]) / s;
    if (m >= 2) acc += std::pow(z, delta + 2.0) * std::abs(u.utt[i]) / (s * s);
    double& slot = (t < split) ? rep.region_left : ((t > -split) ? rep.region_right : rep.region_middle);
    slot = std::max(slot, acc);
  }
  rep.value = std::max({rep.region_left, rep.region_middle, rep.region_right});
  return rep;
}

struct ConeReport {
  bool admissible = false;
  double margin = 0.0;             // min over nodes and j = 1..k-1 of sigma_j(g^{-1}A)
  std::vector<double> per_j;       // per-order margins, j = 1..k-1
  double sigma_k_min = 0.0;        // informational: min sigma_k(g^{-1}A)
};

/// Admissibility of the glued metric (F u_eps)^{4k/(n-2k)} g_cyl: requires
/// sigma_j(g^{-1}A) > 0 for j = 1..k-1 at every node. Eigenvalues of g^{-1}A
/// are those of B scaled by (2k/(n-2k)) V^{-2n/(n-2k)}.
inline ConeReport cone_check_neck(const NeckConfig& cfg) {
  const Dimensions& d = cfg.dims;
  const TGrid g = cfg.grid();
  const RadialJet V = jet_product(jet_from_function(background_fn(cfg), g),
                                  jet_from_function(u_eps_fn(cfg), g));
  ConeReport rep;
  rep.per_j.assign(std::size_t(d.k) - 1, std::numeric_limits<double>::infinity());
  rep.sigma_k_min = std::numeric_limits<double>::infinity();
  const double expo = 2.0 * d.n / double(d.n - 2 * d.k);
  for (int i = 0; i < g.npts; ++i) {
    const ArrowEndo B = assemble_node(d, V.u[i], V.ut[i], V.utt[i]);
    const auto sig = all_sigmas(B, d.n);
    const double fac = (1.0 / d.rate()) * std::pow(V.u[i], -expo);
    for (int j = 1; j <= d.k; ++j) {
      const double sj = sig[std::size_t(j)] * std::pow(fac, j);
      if (j < d.k)
        rep.per_j[std::size_t(j) - 1] = std::min(rep.per_j[std::size_t(j) - 1], sj);
      else
        rep.sigma_k_min = std::min(rep.sigma_k_min, sj);
    }
  }
  rep.margin = *std::min_element(rep.per_j.begin(), rep.per_j.end());
  rep.admissible = rep.margin > 0.0;
  return rep;
}

}  // namespace sigmak

#endif  // SIGMAK_NECK_HPP
