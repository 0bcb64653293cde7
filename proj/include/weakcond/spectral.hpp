#pragma once

#include <vector>

#include "weakcond/polymat.hpp"
#include "weakcond/types.hpp"

namespace weakcond {

/// Adapted spectral data of a simple eigenvalue lambda of P:
///   X = [U u], Y = [V v] with orthonormal columns spanning the left/right
///   null spaces of P(lambda); U, V span the evaluated rational kernels
///   ker_lambda P(x)^* and ker_lambda P(x); u, v are the eigenvector
///   representatives orthogonal to those spans. gamma is the sensitivity
///   constant |u^* P'(lambda) v| / sqrt(sum_j |lambda|^(2j)).
struct SpectralData {
  Complex lambda;
  int n = 0;
  int r = 0;      // normal rank
  int ell = 0;    // n - r + 1
  int beta = 1;   // 1 real, 2 complex perturbation field
  Matrix X;       // n x ell
  Matrix Y;       // n x ell
  Complex u_pprime_v;   // u^* P'(lambda) v
  double lambda_scale = 1.0;  // sqrt(sum_j |lambda|^(2j))
  double gamma = 0.0;
  double simplicity_gap = kInf;  // sigma_{r-1}(P(lambda)) / ||P||

  auto U() const { return X.leftCols(ell - 1); }
  auto V() const { return Y.leftCols(ell - 1); }
  Vector u() const { return X.col(ell - 1); }
  Vector v() const { return Y.col(ell - 1); }
};

/// All finite eigenvalues of the companion linearization, by QZ. For singular
/// P most of the returned values are spurious; callers filter.
std::vector<Complex> all_eigenvalues(const MatrixPolynomial& p);

/// Extracts SpectralData at a simple eigenvalue. The input lambda is
/// Newton-refined (at most two steps) before extraction. Throws
/// NumericalError when lambda is not an eigenvalue, when the rank drop
/// exceeds one (multiple eigenvalue), or when the kernel dimensions are
/// inconsistent with simplicity.
SpectralData spectral_data(const MatrixPolynomial& p, Complex lambda, double tol = 1e-10);

}  // namespace weakcond
