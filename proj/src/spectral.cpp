#include "weakcond/spectral.hpp"

#include <cmath>

#include "weakcond/linalg.hpp"

namespace weakcond {

namespace {

double lambda_scale_of(Complex lambda, int grade) {
  const double a2 = std::norm(lambda);
  double sum = 1.0;
  double pw = 1.0;
  for (int j = 1; j <= grade; ++j) {
    pw *= a2;
    sum += pw;
  }
  return std::sqrt(sum);
}

Matrix eval_columns(const std::vector<PolyVector>& basis, Complex x0, int n) {
  Matrix m(n, static_cast<Eigen::Index>(basis.size()));
  for (std::size_t k = 0; k < basis.size(); ++k)
    m.col(static_cast<Eigen::Index>(k)) = basis[k].eval(x0);
  return m;
}

// Unit vector spanning the part of span(null_basis) orthogonal to the
// orthonormal columns of `deflate`; one-dimensional for a simple eigenvalue.
// The second singular value of the projected block is returned for the
// consistency check.
Vector unique_orthogonal_direction(const Matrix& null_basis, const Matrix& deflate,
                                   double* second_singular) {
  Matrix t = null_basis - deflate * (deflate.adjoint() * null_basis);
  Eigen::JacobiSVD<Matrix> svd(t, Eigen::ComputeFullU);
  const auto& s = svd.singularValues();
  *second_singular = s.size() > 1 ? s(1) : 0.0;
  return svd.matrixU().col(0);
}

}  // namespace

std::vector<Complex> all_eigenvalues(const MatrixPolynomial& p) {
  const auto [a, b] = linearize(p);
  const auto eig = linalg::pencil_eigenvalues(a, b, p.field() == Field::Real);
  return eig.finite;
}

SpectralData spectral_data(const MatrixPolynomial& p, Complex lambda, double tol) {
  if (tol <= 0) throw ValidationError("spectral_data needs tol > 0");
  const int n = p.size();
  const double pnorm = p.coeff_norm();
  if (pnorm == 0.0) throw ValidationError("spectral_data: zero polynomial");

  const int r = normal_rank(p, tol);
  if (r < 1) throw NumericalError("spectral_data: normal rank is zero");
  const int ell = n - r + 1;

  PolyVectorBasis right_kernel, left_kernel;
  if (r < n) {
    right_kernel = kernel_basis(p, KernelSide::Right, r, tol);
    left_kernel = kernel_basis(p, KernelSide::Left, r, tol);
  }

  // Newton refinement on x -> u^* P(x) v, with u, v the smallest singular
  // pair of P(x) restricted to the complement of the kernel evaluations.
  for (int iter = 0; iter < 2; ++iter) {
    const Matrix v_eval =
        linalg::orthonormal_columns(eval_columns(right_kernel.vectors, lambda, n));
    const Matrix u_eval =
        linalg::orthonormal_columns(eval_columns(left_kernel.vectors, std::conj(lambda), n));
    const Matrix wr = linalg::complement_basis(v_eval, n);
    const Matrix wl = linalg::complement_basis(u_eval, n);
    const Matrix core = wl.adjoint() * p.evaluate(lambda) * wr;
    Eigen::JacobiSVD<Matrix> svd(core, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Index last = core.rows() - 1;
    const Vector u0 = wl * svd.matrixU().col(last);
    const Vector v0 = wr * svd.matrixV().col(last);
    const Complex numer = u0.dot(p.evaluate(lambda) * v0);
    const Complex denom = u0.dot(p.derivative_at(lambda) * v0);
    if (std::abs(denom) < 1e-14 * p.derivative_at(lambda).norm()) break;
    const Complex step = -numer / denom;
    if (!(std::abs(step) < 0.1 * (1.0 + std::abs(lambda)))) break;  // not in the basin
    lambda += step;
    if (std::abs(step) <= 1e-14 * (1.0 + std::abs(lambda))) break;
  }

  // Extraction at the refined lambda.
  const Matrix p_lam = p.evaluate(lambda);
  Eigen::JacobiSVD<Matrix> svd(p_lam, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double scale = lambda_scale_of(lambda, p.grade());
  const double null_cut = tol * n * pnorm * scale;

  int nullity = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i)
    if (s(i) <= null_cut) ++nullity;
  if (nullity < ell)
    throw NumericalError(
        "spectral_data: lambda is not an eigenvalue (rank of P(lambda) does not drop below the "
        "normal rank)");
  if (nullity > ell)
    throw NumericalError(
        "spectral_data: eigenvalue is not simple (rank of P(lambda) drops by more than one)");

  const double gap = (r >= 2) ? s(r - 2) / pnorm : kInf;
  if (r >= 2 && s(r - 2) <= null_cut)
    throw NumericalError("spectral_data: eigenvalue is not simple (vanishing sigma_min gap)");

  const Matrix right_null = svd.matrixV().rightCols(ell);
  const Matrix left_null = svd.matrixU().rightCols(ell);

  Matrix v_eval(n, 0), u_eval(n, 0);
  if (r < n) {
    v_eval = linalg::orthonormal_columns(eval_columns(right_kernel.vectors, lambda, n));
    u_eval = linalg::orthonormal_columns(eval_columns(left_kernel.vectors, std::conj(lambda), n));
    if (v_eval.cols() != ell - 1 || u_eval.cols() != ell - 1)
      throw NumericalError("spectral_data: kernel evaluation dimension mismatch");
    // The evaluated kernels must sit inside the null spaces of P(lambda).
    const double vres = (p_lam * v_eval).norm();
    const double ures = (p_lam.adjoint() * u_eval).norm();
    if (vres > 1e-8 * pnorm * scale || ures > 1e-8 * pnorm * scale)
      throw NumericalError(
          "spectral_data: kernel evaluation inconsistent with ker P(lambda) (tolerance failure)");
  }

  double second_v = 0.0, second_u = 0.0;
  Vector v = unique_orthogonal_direction(right_null, v_eval, &second_v);
  Vector u = unique_orthogonal_direction(left_null, u_eval, &second_u);
  if (second_v > 1e-8 || second_u > 1e-8)
    throw NumericalError(
        "spectral_data: eigenvector direction not unique; kernel dimensions inconsistent with a "
        "simple eigenvalue");
  v = linalg::phase_normalize(v);
  u = linalg::phase_normalize(u);

  SpectralData out;
  out.lambda = lambda;
  out.n = n;
  out.r = r;
  out.ell = ell;
  out.beta = field_beta(p.field());
  out.X = Matrix(n, ell);
  out.Y = Matrix(n, ell);
  if (ell > 1) {
    out.X.leftCols(ell - 1) = u_eval;
    out.Y.leftCols(ell - 1) = v_eval;
  }
  out.X.col(ell - 1) = u;
  out.Y.col(ell - 1) = v;
  out.u_pprime_v = u.dot(p.derivative_at(lambda) * v);
  out.lambda_scale = scale;
  out.gamma = std::abs(out.u_pprime_v) / scale;
  out.simplicity_gap = gap;
  if (!(out.gamma > 0.0) ||
      std::abs(out.u_pprime_v) <= 1e-14 * p.derivative_at(lambda).norm())
    throw NumericalError(
        "spectral_data: u^* P'(lambda) v vanishes; eigenvalue appears multiple or defective");
  return out;
}

}  // namespace weakcond
