#pragma once

#include <cmath>

#include "weakcond/polymat.hpp"
#include "weakcond/spectral.hpp"
#include "weakcond/types.hpp"

namespace weakcond {

/// Parameters of the directional-sensitivity law: sigma_E is distributed like
/// sqrt(Z_N / Z_ell) / gamma with independent Z_k ~ Beta(beta/2, beta(k-1)/2)
/// (Z_ell == 1 when ell == 1). N = n^2 (d+1) is the perturbation-space
/// dimension, ell = n - r + 1.
struct SigmaLaw {
  int beta = 1;
  int N = 2;
  int ell = 1;
  double gamma = 1.0;

  int corank() const { return ell - 1; }  // n - r
};

inline SigmaLaw sigma_law(const SpectralData& s, int grade) {
  // The real-perturbation law relies on orthogonal invariance of E(lambda),
  // which holds only at real eigenvalues: at non-real lambda the evaluated
  // perturbation is a structured complex Gaussian and the tail genuinely
  // deviates from the beta = 1 formulas. Complex perturbations (beta = 2)
  // stay valid at any eigenvalue.
  if (s.beta == 1 && std::abs(s.lambda.imag()) > 1e-12 * (1.0 + std::abs(s.lambda)))
    throw ValidationError(
        "real-perturbation sensitivity laws apply at real eigenvalues only; analyze complex "
        "perturbations instead (complex-field copy of the polynomial)");
  return SigmaLaw{s.beta, s.n * s.n * (grade + 1), s.ell, s.gamma};
}

namespace special {

double log_beta(double a, double b);

/// Regularized incomplete beta I_x(a, b) by continued fraction.
double reg_inc_beta(double a, double b, double x);

namespace detail {
// Gauss-Kronrod 7/15 node and weight tables on [-1, 1].
inline constexpr double kronrod_nodes[8] = {
    0.9914553711208126392068547, 0.9491079123427585245261897, 0.8648644233597690727897128,
    0.7415311855993944398638648, 0.5860872354676911302941448, 0.4058451513773971669066064,
    0.2077849550078984676006894, 0.0};
inline constexpr double kronrod_weights[8] = {
    0.0229353220105292249637320, 0.0630920926299785532907007, 0.1047900103222501838398763,
    0.1406532597155259187451896, 0.1690047266392679028265834, 0.1903505780647854099132564,
    0.2044329400752988924141620, 0.2094821410847278280129992};
inline constexpr double gauss_weights[4] = {
    0.1294849661688696932706114, 0.2797053914892766679014678, 0.3818300505051189449503698,
    0.4179591836734693877551020};

template <class F>
void gk15(const F& f, double a, double b, double* value, double* error) {
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double f_mid = f(mid);
  double acc_k = kronrod_weights[7] * f_mid;
  double acc_g = gauss_weights[3] * f_mid;
  for (int i = 0; i < 7; ++i) {
    const double dx = half * kronrod_nodes[i];
    const double pair = f(mid - dx) + f(mid + dx);
    acc_k += kronrod_weights[i] * pair;
    if (i % 2 == 1) acc_g += gauss_weights[i / 2] * pair;
  }
  *value = acc_k * half;
  *error = std::abs((acc_k - acc_g) * half);
}

template <class F>
double adaptive_gk(const F& f, double a, double b, double tol, int depth) {
  double value = 0.0, error = 0.0;
  gk15(f, a, b, &value, &error);
  if (error <= tol || b - a <= 1e-300) return value;
  if (depth >= 48)
    throw NumericalError("adaptive quadrature did not converge to the requested tolerance");
  const double mid = 0.5 * (a + b);
  return adaptive_gk(f, a, mid, 0.5 * tol, depth + 1) +
         adaptive_gk(f, mid, b, 0.5 * tol, depth + 1);
}
}  // namespace detail

/// Adaptive Gauss-Kronrod integration with absolute tolerance.
template <class F>
double integrate(const F& f, double a, double b, double abs_tol) {
  if (!(b > a)) return 0.0;
  return detail::adaptive_gk(f, a, b, abs_tol, 0);
}

}  // namespace special

/// E[(X/Y)^(1/k)] for X ~ Beta(a,b), Y ~ Beta(c,d); infinite when c*k <= 1.
double beta_ratio_moment(double a, double b, double c, double d, double k);

/// Upper bound on P{(X/Y)^(1/k) >= t}, piecewise in t <= 1 / t >= 1, clamped
/// to [0, 1].
double beta_ratio_tail_bound(double a, double b, double c, double d, double k, double t);

/// P{sigma_E >= t}, exact: regularized incomplete beta for ell == 1,
/// one-dimensional quadrature of the Z_ell density against the Z_N survival
/// function for ell >= 2 (absolute tolerance 1e-11).
double sigma_tail_exact(const SigmaLaw& law, double t);

/// Closed-form tail bound, valid for t >= 1/gamma and ell >= 2.
double sigma_tail_bound(const SigmaLaw& law, double t);

/// E[sigma_E]; infinite for beta == 1 with ell >= 2.
double expected_sensitivity(const SigmaLaw& law);

/// Upper bound on E[log sigma_E] for real singular laws (beta == 1, ell >= 2).
double expected_log_bound(const SigmaLaw& law);

/// exp(-beta (N-1) gamma^2 t^2 / 2) for regular laws (ell == 1), 0 <= t <= 1/gamma.
double regular_concentration_bound(const SigmaLaw& law, double t);

}  // namespace weakcond
