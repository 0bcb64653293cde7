#include "weakcond/sensitivity.hpp"

#include <cmath>

#include "weakcond/linalg.hpp"

namespace weakcond {

namespace {

constexpr double kSingularCut = 1e-14;

void check_shapes(const SpectralData& s, const MatrixPolynomial& p, const MatrixPolynomial& e) {
  if (e.size() != p.size() || e.grade() != p.grade() || e.field() != p.field())
    throw ValidationError("perturbation direction must match the polynomial in field, size and grade");
  if (s.n != p.size()) throw ValidationError("spectral data does not belong to this polynomial");
}

double pow_int(double base, int k) {
  double out = 1.0;
  for (int i = 0; i < k; ++i) out *= base;
  return out;
}

}  // namespace

SensitivityReport analyze_direction(const SpectralData& s, const MatrixPolynomial& p,
                                    const MatrixPolynomial& e) {
  check_shapes(s, p, e);
  const double enorm = e.coeff_norm();
  if (enorm == 0.0) throw ValidationError("perturbation direction must be nonzero");

  const Matrix e_lam = e.evaluate(s.lambda);
  SensitivityReport out;
  if (s.ell == 1) {
    out.det_full = s.u().dot(e_lam * s.v());
    out.det_core = Complex(1);
    out.sigma = std::abs(out.det_full) / (std::abs(s.u_pprime_v) * enorm);
    out.first_order_coefficient = -out.det_full / s.u_pprime_v;
    return out;
  }

  const Matrix g = s.X.adjoint() * e_lam * s.Y;
  out.det_full = linalg::determinant(g);
  out.det_core = linalg::determinant(g.topLeftCorner(s.ell - 1, s.ell - 1));
  const double scale = e_lam.norm();
  if (std::abs(out.det_core) < kSingularCut * pow_int(scale, s.ell - 1)) {
    out.infinite = true;
    out.sigma = kInf;
    out.first_order_coefficient = Complex(kNaN, kNaN);
    return out;
  }
  out.sigma = std::abs(out.det_full) / (std::abs(s.u_pprime_v) * std::abs(out.det_core) * enorm);
  out.first_order_coefficient = -out.det_full / (s.u_pprime_v * out.det_core);
  return out;
}

double directional_sensitivity(const SpectralData& s, const MatrixPolynomial& p,
                               const MatrixPolynomial& e) {
  return analyze_direction(s, p, e).sigma;
}

Complex first_order_eigenvalue(const SpectralData& s, const MatrixPolynomial& p,
                               const MatrixPolynomial& e, double eps) {
  const SensitivityReport rep = analyze_direction(s, p, e);
  const double scale = e.evaluate(s.lambda).norm();
  if (std::abs(rep.det_full) < kSingularCut * pow_int(scale, s.ell))
    throw NumericalError("first_order_eigenvalue: X^* E(lambda) Y is singular at tolerance");
  if (rep.infinite)
    throw NumericalError("first_order_eigenvalue: directional sensitivity is infinite for this direction");
  return s.lambda + rep.first_order_coefficient * eps;
}

LimitEigenvectors limit_eigenvectors(const SpectralData& s, const MatrixPolynomial& p,
                                     const MatrixPolynomial& e) {
  check_shapes(s, p, e);
  LimitEigenvectors out;
  if (s.ell == 1) {
    out.u_bar = s.u();
    out.v_bar = s.v();
    out.a = Vector::Ones(1);
    out.b = Vector::Ones(1);
    out.zeta = -s.u().dot(e.evaluate(s.lambda) * s.v()) / s.u_pprime_v;
    out.gamma_bar = s.gamma;
    return out;
  }

  const Matrix e_lam = e.evaluate(s.lambda);
  const Matrix g = s.X.adjoint() * e_lam * s.Y;
  if (std::abs(linalg::determinant(g)) < kSingularCut * pow_int(e_lam.norm(), s.ell))
    throw NumericalError("limit_eigenvectors: X^* E(lambda) Y is singular at tolerance");
  const Matrix w = s.X.adjoint() * p.derivative_at(s.lambda) * s.Y;  // rank one

  // det(G + zeta W) = 0  <=>  G b = zeta (-W) b.
  const auto eig = linalg::generalized_eigen(g, -w);
  double beta_max = 0.0;
  for (const Complex& b : eig.beta) beta_max = std::max(beta_max, std::abs(b));
  int finite_index = -1;
  int finite_count = 0;
  for (std::size_t i = 0; i < eig.beta.size(); ++i) {
    if (std::abs(eig.beta[i]) > 1e-8 * beta_max) {
      ++finite_count;
      finite_index = static_cast<int>(i);
    }
  }
  if (finite_count != 1)
    throw NumericalError("limit_eigenvectors: expected exactly one finite eigenvalue of the "
                         "eigenvector pencil, found " + std::to_string(finite_count));

  out.zeta = eig.alpha[static_cast<std::size_t>(finite_index)] /
             eig.beta[static_cast<std::size_t>(finite_index)];
  Vector a = eig.left.col(finite_index);
  Vector b = eig.right.col(finite_index);
  out.a = linalg::phase_normalize(a / a.norm());
  out.b = linalg::phase_normalize(b / b.norm());
  out.u_bar = s.X * out.a;
  out.v_bar = s.Y * out.b;
  out.gamma_bar = std::abs(out.u_bar.dot(p.derivative_at(s.lambda) * out.v_bar)) / s.lambda_scale;
  return out;
}

}  // namespace weakcond
