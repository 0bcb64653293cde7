#include "weakcond/condition.hpp"

#include <cmath>

namespace weakcond {

namespace {

double closed_form_weak_bound(const SigmaLaw& law, double delta) {
  if (law.ell == 1) return 1.0 / law.gamma;
  const double ratio = static_cast<double>(law.ell - 1) / law.N;
  const double factor = law.beta == 2 ? std::sqrt(ratio / delta) : std::sqrt(ratio) / delta;
  return std::max(1.0, factor) / law.gamma;
}

double stochastic_prefactor(int beta, int N) {
  if (beta == 2)
    return 0.5 * std::sqrt(M_PI) *
           std::exp(std::lgamma(static_cast<double>(N)) - std::lgamma(N + 0.5));
  return std::exp(std::lgamma(0.5 * N) - std::lgamma(0.5 * (N + 1))) / std::sqrt(M_PI);
}

}  // namespace

double sigma_quantile(const SigmaLaw& law, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  double hi = closed_form_weak_bound(law, delta);
  double lo = 0.0;
  // The closed-form bound already satisfies tail(hi) <= delta; expand once in
  // case of numerical slack right at the boundary.
  for (int guard = 0; sigma_tail_exact(law, hi) > delta; ++guard) {
    if (guard > 200) throw NumericalError("sigma_quantile: could not bracket the quantile");
    lo = hi;
    hi *= 1.5;
  }
  for (int iter = 0; iter < 400 && (hi - lo) > 1e-10 * hi; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (sigma_tail_exact(law, mid) <= delta)
      hi = mid;
    else
      lo = mid;
  }
  return 0.5 * (lo + hi);
}

ConditionReport condition_report(const SigmaLaw& law, double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  ConditionReport rep;
  rep.beta = law.beta;
  rep.N = law.N;
  rep.ell = law.ell;
  rep.gamma = law.gamma;
  rep.delta = delta;
  rep.regular = law.ell == 1;
  rep.kappa = rep.regular ? 1.0 / law.gamma : kInf;
  rep.kappa_s = expected_sensitivity(law);
  rep.kappa_w = sigma_quantile(law, delta);
  rep.kappa_w_bound = closed_form_weak_bound(law, delta);
  // In configurations where the closed-form bound is tight the bisection can
  // overshoot it by its own tolerance; reconcile sub-tolerance overshoot so
  // the reported quantile never sits above the bound it is guaranteed to obey.
  if (rep.kappa_w > rep.kappa_w_bound && rep.kappa_w <= rep.kappa_w_bound * (1.0 + 1e-6))
    rep.kappa_w = rep.kappa_w_bound;
  rep.kappa_ws_bound = kNaN;
  if (law.beta == 1 && law.ell >= 2) {
    const double c = std::sqrt(static_cast<double>(law.ell - 1) / law.N);
    if (delta < c) {
      const double a = 1.0 / law.gamma;
      const double t0 = c / (delta * law.gamma);
      rep.kappa_ws_bound = conditional_mean_bound(a, c, t0);
    }
  }
  return rep;
}

double conditional_mean_bound(double a, double c, double t0) {
  if (!(a > 0.0) || !(c > 0.0)) throw ValidationError("conditional_mean_bound needs a, C > 0");
  if (!(t0 > a)) throw ValidationError("conditional_mean_bound needs t0 > a");
  if (!(c * a < t0)) throw ValidationError("conditional_mean_bound needs C*a < t0");
  return a / (1.0 - c * a / t0) * (1.0 - c * std::log(a / t0));
}

WeakConditionEstimate estimate_weak_condition(const SpectralData& s, const MatrixPolynomial& p,
                                              const MatrixPolynomial& e, double delta,
                                              double eta) {
  const LimitEigenvectors lim = limit_eigenvectors(s, p, e);
  return estimate_weak_condition_from_vectors(s, p, lim.u_bar, lim.v_bar, delta, eta);
}

WeakConditionEstimate estimate_weak_condition_from_vectors(const SpectralData& s,
                                                           const MatrixPolynomial& p,
                                                           const Vector& u_approx,
                                                           const Vector& v_approx, double delta,
                                                           double eta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");
  if (!(eta > 0.0)) throw ValidationError("eta must be positive");
  if (s.beta == 1 && std::abs(s.lambda.imag()) > 1e-12 * (1.0 + std::abs(s.lambda)))
    throw ValidationError(
        "real-perturbation estimates apply at real eigenvalues only; analyze complex "
        "perturbations instead (complex-field copy of the polynomial)");
  if (u_approx.size() != p.size() || v_approx.size() != p.size())
    throw ValidationError("eigenvector estimates must have length n");
  const double un = u_approx.norm();
  const double vn = v_approx.norm();
  if (un == 0.0 || vn == 0.0) throw ValidationError("eigenvector estimates must be nonzero");

  WeakConditionEstimate est;
  est.beta = s.beta;
  est.N = s.n * s.n * (p.grade() + 1);
  est.ell = s.ell;
  est.delta = delta;
  est.eta = eta;
  const Complex form = u_approx.dot(p.derivative_at(s.lambda) * v_approx) / (un * vn);
  est.gamma_bar = std::abs(form) / s.lambda_scale;
  if (!(est.gamma_bar > 0.0))
    throw NumericalError("weak-condition estimator undefined: u^* P'(lambda) v vanishes for the "
                         "supplied eigenvectors");
  est.kappa_bar = 1.0 / est.gamma_bar;
  est.kappa_s_bar = est.kappa_bar * stochastic_prefactor(est.beta, est.N);
  const double ratio = std::sqrt(static_cast<double>(est.ell - 1) / est.N);
  est.kappa_w_bound =
      est.kappa_bar * std::max(1.0, std::pow(delta, -1.0 / est.beta) * ratio);
  est.confidence = (delta <= static_cast<double>(est.ell - 1) / est.N)
                       ? 1.0 - std::exp(-est.beta / (eta * eta))
                       : kNaN;
  return est;
}

}  // namespace weakcond
