#pragma once

#include "weakcond/polymat.hpp"
#include "weakcond/spectral.hpp"
#include "weakcond/types.hpp"

namespace weakcond {

/// First-order behaviour of the eigenvalue along a perturbation direction E.
/// sigma is the directional sensitivity; it is flagged infinite when
/// det(U^* E(lambda) V) vanishes at working tolerance. The raw determinants
/// are kept for inspection.
struct SensitivityReport {
  double sigma = 0.0;
  bool infinite = false;
  Complex det_full;   // det(X^* E(lambda) Y)
  Complex det_core;   // det(U^* E(lambda) V); 1 by convention when r = n
  Complex first_order_coefficient;  // lambda(eps) = lambda + coeff * eps + O(eps^2)
};

SensitivityReport analyze_direction(const SpectralData& s, const MatrixPolynomial& p,
                                    const MatrixPolynomial& e);

/// sigma_E; +infinity when the direction is discontinuous at tolerance.
double directional_sensitivity(const SpectralData& s, const MatrixPolynomial& p,
                               const MatrixPolynomial& e);

/// First-order predicted eigenvalue of P + eps*E. Throws when X^* E(lambda) Y
/// is singular at tolerance or the sensitivity is infinite.
Complex first_order_eigenvalue(const SpectralData& s, const MatrixPolynomial& p,
                               const MatrixPolynomial& e, double eps);

/// Limits of the eigenvectors of P + eps*E as eps -> 0: u_bar = X a,
/// v_bar = Y b with (a, b) the eigenvectors of the unique finite eigenvalue
/// zeta of the small pencil X^* E(lambda) Y + zeta X^* P'(lambda) Y.
struct LimitEigenvectors {
  Vector u_bar;
  Vector v_bar;
  Vector a;
  Vector b;
  Complex zeta;
  double gamma_bar = 0.0;  // |u_bar^* P'(lambda) v_bar| / lambda_scale
};

LimitEigenvectors limit_eigenvectors(const SpectralData& s, const MatrixPolynomial& p,
                                     const MatrixPolynomial& e);

}  // namespace weakcond
