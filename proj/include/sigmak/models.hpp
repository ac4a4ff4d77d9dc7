#ifndef SIGMAK_MODELS_HPP
#define SIGMAK_MODELS_HPP

// Closed-form product models: block-constant Schouten spectra, the
// linearization at u = 1 after normalizing the metric so the constant
// curvature equals the round-sphere value, and the separation-of-variables
// kernel scan that decides non-degeneracy.

#include "sigmak/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

namespace sigmak {

enum class FactorKind { Sphere, Torus, ProjectiveSphere };

struct Factor {
  FactorKind kind = FactorKind::Sphere;
  int dim = 2;
  double radius = 1.0;
};

struct ProductModel {
  std::vector<Factor> factors;

  int n() const {
    int d = 0;
    for (const auto& f : factors) d += f.dim;
    return d;
  }
};

/// Block-constant Schouten spectrum of the product metric: Ricci eigenvalue
/// (m-1)/r^2 on round factors, 0 on flat ones.
inline SpectrumEndo product_schouten(const ProductModel& model) {
  const int n = model.n();
  if (n < 3) throw std::invalid_argument("product_schouten: total dimension must be >= 3");
  double R = 0.0;
  std::vector<double> ric;
  for (const auto& f : model.factors) {
    if (f.dim < 1 || !(f.radius > 0.0))
      throw std::invalid_argument("product_schouten: invalid factor");
    const double r = (f.kind == FactorKind::Torus) ? 0.0 : double(f.dim - 1) / (f.radius * f.radius);
    ric.push_back(r);
    R += double(f.dim) * r;
  }
  SpectrumEndo s;
  for (std::size_t i = 0; i < model.factors.size(); ++i) {
    s.value.push_back((ric[i] - R / (2.0 * double(n - 1))) / double(n - 2));
    s.mult.push_back(model.factors[i].dim);
  }
  return s;
}

/// Linearized operator at u = 1 of the normalized model:
/// L(1)[w] = -sum_f coeff_f Delta_f w + zero_order w, with the Laplacians of
/// the rescaled metric. `scale` maps unit-factor spectra to the rescaled ones
/// (lambda_rescaled = scale * lambda_unit).
struct HomogeneousLin {
  std::vector<double> factor_coeff;  // per-factor Newton-transform eigenvalue
  double zero_order = 0.0;
  double scale = 1.0;                // (target / sigma_k(spectrum))^{1/k}
  double sigma_k_unit = 0.0;         // sigma_k before normalization
};

inline HomogeneousLin homogeneous_linearization(const ProductModel& model, int k) {
  const int n = model.n();
  if (k < 1 || k > n || 2 * k == n)
    throw std::invalid_argument("homogeneous_linearization: need 1 <= k <= n, 2k != n");
  const SpectrumEndo A = product_schouten(model);
  HomogeneousLin out;
  out.sigma_k_unit = sigma(A, k);
  if (!(out.sigma_k_unit > 0.0))
    throw std::domain_error("homogeneous_linearization: sigma_k must be positive to normalize");
  const double target = std::pow(2.0, -k) * binom(n, k);
  out.scale = std::pow(target / out.sigma_k_unit, 1.0 / double(k));
  const double bfac = double(n - 2 * k) / double(2 * k);
  SpectrumEndo B = A;
  for (double& v : B.value) v *= out.scale * bfac;
  const SpectrumEndo T = newton_transform(B, k - 1);
  out.factor_coeff.assign(T.value.begin(), T.value.end());
  const double cA = 0.5 * bfac;
  const double e = 2.0 * k * n / double(n - 2 * k);
  out.zero_order = 2.0 * double(k) * sigma(B, k) - binom(n, k) * std::pow(cA, k) * e;
  return out;
}

/// Laplacian spectrum of one unit-radius factor, listed up to a value cap.
inline std::vector<double> factor_spectrum(const Factor& f, double cap) {
  std::vector<double> out;
  if (f.kind == FactorKind::Torus) {
    const double step = 4.0 * M_PI * M_PI;
    for (double v = 0.0; v <= cap; v += step) out.push_back(v);
  } else {
    const int m = f.dim;
    const int jstep = (f.kind == FactorKind::ProjectiveSphere) ? 2 : 1;
    for (int j = 0;; j += jstep) {
      const double v = double(j) * double(j + m - 1);
      if (v > cap) break;
      out.push_back(v);
    }
  }
  return out;
}

/// Full Z^2 lattice spectrum of the 2-torus, 4 pi^2 (p^2 + q^2); a
/// refinement of the single-index family reported alongside it.
inline std::vector<double> torus_lattice_spectrum(double cap) {
  std::vector<double> out;
  const double step = 4.0 * M_PI * M_PI;
  const int pmax = int(std::sqrt(cap / step)) + 1;
  for (int p = 0; p <= pmax; ++p)
    for (int q = p; q <= pmax; ++q) {
      const double v = step * double(p * p + q * q);
      if (v <= cap) out.push_back(v);
    }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

struct ScanRow {
  int j = 0;                  // mode of the scanned (first) factor
  double required = 0.0;      // eigenvalue the other factor would need
  double nearest = 0.0;       // closest available spectrum value
  bool kernel = false;
};

struct ScanReport {
  bool degenerate = false;
  std::vector<ScanRow> rows;
  std::optional<bool> degenerate_alt;  // same scan with an alternate constant
  std::optional<bool> degenerate_lattice;  // 2-torus lattice refinement
};

namespace detail {
inline bool in_spectrum(const std::vector<double>& spec, double v, double tol) {
  for (double s : spec)
    if (std::abs(s - v) <= tol) return true;
  return false;
}
inline double nearest_in(const std::vector<double>& spec, double v) {
  double best = spec.empty() ? 0.0 : spec.front();
  for (double s : spec)
    if (std::abs(s - v) < std::abs(best - v)) best = s;
  return best;
}
}  // namespace detail

/// Scans separated kernel candidates: sum_f coeff_f scale lambda_f = -zero_order
/// over the factor spectra. Returns degenerate = true iff an exact combination
/// exists (within tol). Supports one- and two-factor models.
inline ScanReport nondegeneracy_scan(const ProductModel& model, int k, const HomogeneousLin& lin,
                                     std::optional<double> alt_zero_order = std::nullopt,
                                     double tol = 1e-9) {
  ScanReport rep;
  const double budget = -lin.zero_order / lin.scale;  // sum_f coeff_f lambda_f^unit = budget
  if (model.factors.size() == 1) {
    const double need = budget / lin.factor_coeff[0];
    const auto spec = factor_spectrum(model.factors[0], std::abs(need) * 2.0 + 10.0);
    ScanRow row;
    row.j = 0;
    row.required = need;
    row.nearest = detail::nearest_in(spec, need);
    row.kernel = need >= -tol && detail::in_spectrum(spec, need, tol * std::max(1.0, std::abs(need)));
    rep.rows.push_back(row);
    rep.degenerate = row.kernel;
    return rep;
  }
  if (model.factors.size() != 2)
    throw std::invalid_argument("nondegeneracy_scan: supports 1- or 2-factor models");
  for (double c : lin.factor_coeff)
    if (!(c > 0.0))
      throw std::domain_error("nondegeneracy_scan: factor coefficients must be positive");

  auto run = [&](double zero_order, const std::vector<double>* second_override) {
    const double bud = -zero_order / lin.scale;
    bool degen = false;
    std::vector<ScanRow> rows;
    // first factor scanned mode by mode; the second must absorb the remainder
    const Factor& f1 = model.factors[0];
    const Factor& f2 = model.factors[1];
    const double c1 = lin.factor_coeff[0], c2 = lin.factor_coeff[1];
    auto spec1 = factor_spectrum(f1, std::max(0.0, bud / c1) + 1.0);
    {  // one eigenvalue past the cap, to witness the sign flip of the budget
      const std::size_t cnt = spec1.size();
      if (f1.kind == FactorKind::Torus)
        spec1.push_back(4.0 * M_PI * M_PI * double(cnt));
      else {
        const int jn = (f1.kind == FactorKind::ProjectiveSphere) ? 2 * int(cnt) : int(cnt);
        spec1.push_back(double(jn) * double(jn + f1.dim - 1));
      }
    }
    for (std::size_t idx = 0; idx < spec1.size(); ++idx) {
      const double need = (bud - c1 * spec1[idx]) / c2;
      const auto spec2 = second_override
                             ? *second_override
                             : factor_spectrum(f2, std::max(0.0, need) + 1.0);
      ScanRow row;
      row.j = int(idx);
      row.required = need;
      row.nearest = detail::nearest_in(spec2, need);
      row.kernel =
          need >= -tol && detail::in_spectrum(spec2, need, tol * std::max(1.0, std::abs(need)));
      rows.push_back(row);
      degen = degen || row.kernel;
    }
    return std::make_pair(degen, rows);
  };

  auto [degen, rows] = run(lin.zero_order, nullptr);
  rep.degenerate = degen;
  rep.rows = std::move(rows);
  if (alt_zero_order) rep.degenerate_alt = run(*alt_zero_order, nullptr).first;
  if (model.factors[1].kind == FactorKind::Torus && model.factors[1].dim == 2) {
    const double cap = std::max(1.0, -lin.zero_order / lin.scale / lin.factor_coeff[1]) + 1.0;
    const auto lattice = torus_lattice_spectrum(cap);
    rep.degenerate_lattice = run(lin.zero_order, &lattice).first;
  }
  return rep;
}

}  // namespace sigmak

#endif  // SIGMAK_MODELS_HPP
