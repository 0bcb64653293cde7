#pragma once

#include "weakcond/dist.hpp"
#include "weakcond/polymat.hpp"
#include "weakcond/sensitivity.hpp"
#include "weakcond/spectral.hpp"
#include "weakcond/types.hpp"

namespace weakcond {

/// Condition numbers of a simple eigenvalue at confidence parameter delta:
/// worst case kappa, stochastic kappa_s, exact delta-weak worst case kappa_w
/// (quantile of the sigma_E law), its closed-form bound, and the weak
/// stochastic bound (real singular case only; NaN otherwise).
struct ConditionReport {
  int beta = 1;
  int N = 2;
  int ell = 1;
  double gamma = 1.0;
  double delta = 0.5;
  bool regular = true;
  double kappa = kInf;
  double kappa_s = kInf;
  double kappa_w = 0.0;
  double kappa_w_bound = 0.0;
  double kappa_ws_bound = kNaN;
};

ConditionReport condition_report(const SigmaLaw& law, double delta);

/// Bound on E[Z | Z <= t0] for a variable with tail P{Z >= t} <= C a / t
/// (t > a): a / (1 - C a / t0) * (1 - C log(a / t0)).
double conditional_mean_bound(double a, double c, double t0);

/// Exact (1-delta)-quantile of the sigma_E law by bisection on
/// sigma_tail_exact, relative tolerance 1e-8.
double sigma_quantile(const SigmaLaw& law, double delta);

/// Weak-condition estimate from the limit eigenvectors of a perturbed
/// problem: kappa_bar = 1/gamma_bar >= kappa-parameter 1/gamma_P, the
/// estimated stochastic condition kappa_s_bar, the resulting upper bound on
/// kappa_w(delta), and the confidence 1 - exp(-beta/eta^2) that
/// delta^(-1/beta) kappa_s_bar >= eta kappa_w(delta) (defined for
/// delta <= (n-r)/N; NaN otherwise).
struct WeakConditionEstimate {
  int beta = 1;
  int N = 2;
  int ell = 1;
  double delta = 0.5;
  double eta = 1.0;
  double gamma_bar = 0.0;
  double kappa_bar = kInf;
  double kappa_s_bar = kInf;
  double kappa_w_bound = kInf;
  double confidence = kNaN;
};

/// Estimator driven by an internally chosen perturbation direction.
WeakConditionEstimate estimate_weak_condition(const SpectralData& s, const MatrixPolynomial& p,
                                              const MatrixPolynomial& e, double delta,
                                              double eta = 1.0);

/// Estimator driven by eigenvector output of a backward stable solver run on
/// a nearby problem (vectors are normalized internally). Shares all
/// downstream computation with the direction-driven path.
WeakConditionEstimate estimate_weak_condition_from_vectors(const SpectralData& s,
                                                           const MatrixPolynomial& p,
                                                           const Vector& u_approx,
                                                           const Vector& v_approx, double delta,
                                                           double eta = 1.0);

}  // namespace weakcond
