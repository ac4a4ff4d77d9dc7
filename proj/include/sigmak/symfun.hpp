#ifndef SIGMAK_SYMFUN_HPP
#define SIGMAK_SYMFUN_HPP

// Elementary symmetric function calculus on symmetric endomorphisms:
// sigma_k, Newton transforms, directional derivatives, cone membership.

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace sigmak {

inline double binom(int n, int k) {
  if (k < 0 || k > n) return 0.0;
  k = std::min(k, n - k);
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * double(n - k + i) / double(i);
  return r;
}

/// Ambient dimension n and Hessian order k, restricted to 2 <= 2k < n.
struct Dimensions {
  int n = 0;
  int k = 0;

  Dimensions(int n_, int k_) : n(n_), k(k_) {
    if (n < 3 || n > 12) throw std::invalid_argument("Dimensions: n must be in [3,12]");
    if (k < 1 || 2 * k >= n) throw std::invalid_argument("Dimensions: need 2 <= 2k < n");
  }

  /// Exponential rate (n-2k)/(2k) of the model neck profiles.
  double rate() const { return double(n - 2 * k) / double(2 * k); }
  /// Exponent in the conformal change g_u = u^{4k/(n-2k)} g.
  double conf_exp() const { return 4.0 * k / double(n - 2 * k); }
  /// Exponent of u in the constant-curvature source term, 2kn/(n-2k).
  double source_exp() const { return 2.0 * k * n / double(n - 2 * k); }
  /// binom(n-1,k-1) ((n-2k)/4k)^{k-1}: prefactor of the model linearized operator.
  double lin_coeff() const { return binom(n - 1, k - 1) * std::pow(0.5 * rate(), k - 1); }
  /// binom(n,k) ((n-2k)/4k)^k: prefactor of the source term.
  double source_coeff() const { return binom(n, k) * std::pow(0.5 * rate(), k); }
  /// 2^{-k} binom(n,k): the normalized constant curvature of the round sphere.
  double target_sigma() const { return std::pow(2.0, -k) * binom(n, k); }
};

/// Symmetric endomorphism given by its eigenvalues with multiplicities.
struct SpectrumEndo {
  std::vector<double> value;
  std::vector<int> mult;

  SpectrumEndo() = default;
  SpectrumEndo(std::vector<double> v, std::vector<int> m)
      : value(std::move(v)), mult(std::move(m)) {
    if (value.size() != mult.size())
      throw std::invalid_argument("SpectrumEndo: value/mult size mismatch");
    for (int mi : mult)
      if (mi <= 0) throw std::invalid_argument("SpectrumEndo: multiplicities must be positive");
  }

  int dim() const {
    int d = 0;
    for (int m : mult) d += m;
    return d;
  }

  /// Expanded eigenvalue list, one entry per multiplicity.
  std::vector<double> expanded() const {
    std::vector<double> out;
    out.reserve(dim());
    for (std::size_t i = 0; i < value.size(); ++i)
      for (int j = 0; j < mult[i]; ++j) out.push_back(value[i]);
    return out;
  }
};

/// Coefficients of prod_i (1 + lambda_i x); coeff[j] = sigma_j.
template <typename T>
std::vector<T> elementary_coeffs(const std::vector<T>& value, const std::vector<int>& mult) {
  std::vector<T> c{T(1)};
  for (std::size_t i = 0; i < value.size(); ++i) {
    for (int r = 0; r < mult[i]; ++r) {
      c.push_back(T(0));
      for (std::size_t j = c.size() - 1; j >= 1; --j) c[j] += value[i] * c[j - 1];
    }
  }
  return c;
}

inline double sigma(const SpectrumEndo& s, int k) {
  if (k < 0 || k > s.dim()) throw std::domain_error("sigma: k out of range");
  return elementary_coeffs<double>(s.value, s.mult)[std::size_t(k)];
}

/// All sigma_j, j = 0..n, in one pass.
inline std::vector<double> all_sigmas(const SpectrumEndo& s) {
  return elementary_coeffs<double>(s.value, s.mult);
}

/// T_m(B) acting eigenvalue-wise: entry i equals sigma_m of the spectrum with
/// one copy of value[i] removed.
inline SpectrumEndo newton_transform(const SpectrumEndo& s, int m) {
  const int n = s.dim();
  if (m < 0 || m > n) throw std::domain_error("newton_transform: m out of range");
  const std::vector<double> sig = all_sigmas(s);
  SpectrumEndo out = s;
  for (std::size_t i = 0; i < s.value.size(); ++i) {
    double acc = 0.0, pw = 1.0, sgn = 1.0;
    for (int j = 0; j <= m; ++j) {
      acc += sgn * sig[std::size_t(m - j)] * pw;
      pw *= s.value[i];
      sgn = -sgn;
    }
    out.value[i] = acc;
  }
  return out;
}

/// tr(T_{k-1}(B) dB) for simultaneously diagonal B, dB (same multiplicities).
inline double sigma_derivative(const SpectrumEndo& B, const SpectrumEndo& dB, int k) {
  if (B.value.size() != dB.value.size() || B.mult != dB.mult)
    throw std::domain_error("sigma_derivative: shape mismatch");
  if (k < 1 || k > B.dim()) throw std::domain_error("sigma_derivative: k out of range");
  const SpectrumEndo T = newton_transform(B, k - 1);
  double tr = 0.0;
  for (std::size_t i = 0; i < B.value.size(); ++i)
    tr += double(B.mult[i]) * T.value[i] * dB.value[i];
  return tr;
}

/// Reference path: sigma_k as the literal sum over all k-element subsets.
/// Exponential in n; used by certificates and test oracles, never in assembly.
inline double sigma_enumerate(const std::vector<double>& lam, int k) {
  const int n = int(lam.size());
  if (k < 0 || k > n) throw std::domain_error("sigma_enumerate: k out of range");
  if (k == 0) return 1.0;
  std::vector<int> idx(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) idx[std::size_t(i)] = i;
  double acc = 0.0;
  while (true) {
    double prod = 1.0;
    for (int i = 0; i < k; ++i) prod *= lam[std::size_t(idx[std::size_t(i)])];
    acc += prod;
    int pos = k - 1;
    while (pos >= 0 && idx[std::size_t(pos)] == n - k + pos) --pos;
    if (pos < 0) break;
    ++idx[std::size_t(pos)];
    for (int i = pos + 1; i < k; ++i) idx[std::size_t(i)] = idx[std::size_t(i - 1)] + 1;
  }
  return acc;
}

/// g is k-admissible iff sigma_j > 0 for all j = 1..k (strict, no tolerance).
inline bool cone_membership(const SpectrumEndo& s, int k) {
  if (k < 1 || k > s.dim()) throw std::domain_error("cone_membership: k out of range");
  const std::vector<double> sig = all_sigmas(s);
  for (int j = 1; j <= k; ++j)
    if (!(sig[std::size_t(j)] > 0.0)) return false;
  return true;
}

/// Symmetric endomorphism of the cylinder metric for fields with one polar
/// angle: a 2x2 coupling block [[tt, tp], [tp, pp]] plus an isotropic angular
/// entry ww carried with multiplicity n-2.
struct ArrowEndo {
  double tt = 0.0;
  double tp = 0.0;
  double pp = 0.0;
  double ww = 0.0;
};

inline double block_trace(const ArrowEndo& a) { return a.tt + a.pp; }
inline double block_det(const ArrowEndo& a) { return a.tt * a.pp - a.tp * a.tp; }

/// Eigenvalues of the 2x2 block, closed form. The symmetric block has a
/// non-negative discriminant; values inside -1e-14 * scale are clamped to 0.
inline std::array<double, 2> block_eigenvalues(const ArrowEndo& a) {
  const double tr = block_trace(a);
  const double hd = 0.5 * (a.tt - a.pp);
  double disc = hd * hd + a.tp * a.tp;
  const double scale = std::abs(a.tt) + std::abs(a.pp) + std::abs(a.tp);
  if (disc < 0.0) {
    if (disc < -1e-14 * scale * scale)
      throw std::domain_error("block_eigenvalues: negative discriminant");
    disc = 0.0;
  }
  const double s = std::sqrt(disc);
  return {0.5 * tr + s, 0.5 * tr - s};
}

/// Spectrum of the full n x n endomorphism (block eigenvalues + ww x (n-2)).
inline SpectrumEndo arrow_spectrum(const ArrowEndo& a, int n) {
  const auto ev = block_eigenvalues(a);
  return SpectrumEndo({ev[0], ev[1], a.ww}, {1, 1, n - 2});
}

/// sigma_0..sigma_n via (1 + tr x + det x^2) (1 + ww x)^{n-2}; eigenvalue-free.
inline std::vector<double> all_sigmas(const ArrowEndo& a, int n) {
  std::vector<double> c(std::size_t(n) + 1, 0.0);
  const double tr = block_trace(a), de = block_det(a);
  const int m = n - 2;
  // binomial row of (1 + ww x)^{n-2}, convolved with [1, tr, det]
  double row = 1.0;
  for (int j = 0; j <= m; ++j) {
    c[std::size_t(j)] += row;
    if (j + 1 <= n) c[std::size_t(j + 1)] += row * tr;
    if (j + 2 <= n) c[std::size_t(j + 2)] += row * de;
    row *= double(m - j) / double(j + 1) * a.ww;
  }
  return c;
}

inline double sigma(const ArrowEndo& a, int n, int k) {
  if (k < 0 || k > n) throw std::domain_error("sigma: k out of range");
  return all_sigmas(a, n)[std::size_t(k)];
}

/// T_m(B) = sum_{j=0}^m (-1)^j sigma_{m-j}(B) B^j for an arrow endomorphism;
/// acts on the 2x2 block and on ww separately.
inline ArrowEndo newton_transform(const ArrowEndo& a, int n, int m) {
  if (m < 0 || m > n) throw std::domain_error("newton_transform: m out of range");
  const std::vector<double> sig = all_sigmas(a, n);
  Eigen::Matrix2d M;
  M << a.tt, a.tp, a.tp, a.pp;
  Eigen::Matrix2d P = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d accM = Eigen::Matrix2d::Zero();
  double pw = 1.0, accw = 0.0, sgn = 1.0;
  for (int j = 0; j <= m; ++j) {
    accM += sgn * sig[std::size_t(m - j)] * P;
    accw += sgn * sig[std::size_t(m - j)] * pw;
    P = (P * M).eval();
    pw *= a.ww;
    sgn = -sgn;
  }
  return {accM(0, 0), accM(0, 1), accM(1, 1), accw};
}

/// tr(T_{k-1}(B) dB) for arrow endomorphisms on the same frame.
inline double sigma_derivative(const ArrowEndo& B, const ArrowEndo& dB, int n, int k) {
  if (k < 1 || k > n) throw std::domain_error("sigma_derivative: k out of range");
  const ArrowEndo T = newton_transform(B, n, k - 1);
  return T.tt * dB.tt + 2.0 * T.tp * dB.tp + T.pp * dB.pp + double(n - 2) * T.ww * dB.ww;
}

}  // namespace sigmak

#endif  // SIGMAK_SYMFUN_HPP
