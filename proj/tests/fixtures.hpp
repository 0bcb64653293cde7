#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "weakcond/linalg.hpp"
#include "weakcond/polymat.hpp"
#include "weakcond/rng.hpp"

namespace weakcond::testing {

// Singular 4x4 real pencil with unique simple eigenvalue 1 and normal rank 3.
inline MatrixPolynomial demo_pencil() {
  Matrix c0(4, 4), c1(4, 4);
  c0 << 2, -1, -5, -1,
        6, -2, -11, -2,
        5, 0, -2, 0,
        3, 1, 3, 1;
  c1 << -1, 1, 4, 2,
        -2, 3, 12, 6,
        1, 3, 11, 6,
        2, 2, 7, 4;
  return MatrixPolynomial(Field::Real, {c0, c1});
}

// Right kernel direction of the demo pencil, q(x) = [x, -2x^2-4x+1, x, x^2-1].
inline Vector demo_right_kernel_at(Complex x) {
  Vector q(4);
  q << x, -2.0 * x * x - 4.0 * x + 1.0, x, x * x - 1.0;
  return q;
}

// Left kernel direction of the demo pencil (constant).
inline Vector demo_left_kernel() {
  Vector p(4);
  p << 1, 0, -1, 1;
  return p;
}

// diag(x - roots[i]) as a pencil.
inline MatrixPolynomial diagonal_pencil(const std::vector<Complex>& roots, Field field) {
  const int n = static_cast<int>(roots.size());
  Matrix c0 = Matrix::Zero(n, n), c1 = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) c0(i, i) = -roots[static_cast<std::size_t>(i)];
  return MatrixPolynomial(field, {c0, c1});
}

inline Matrix random_gaussian_matrix(int rows, int cols, Rng& rng, bool complex_entries) {
  Matrix m(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i)
      m(i, j) = complex_entries ? rng.gaussian_complex() : Complex(rng.gaussian(), 0.0);
  return m;
}

inline Matrix random_unitary(int n, Rng& rng, bool complex_entries) {
  const Matrix g = random_gaussian_matrix(n, n, rng, complex_entries);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (int i = 0; i < n; ++i) {
    const Complex rii = r(i, i);
    if (std::abs(rii) > 0) q.col(i) *= rii / std::abs(rii);
  }
  return q;
}

inline MatrixPolynomial random_polynomial(int n, int d, Field field, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Matrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(d) + 1);
  for (int j = 0; j <= d; ++j)
    coeffs.push_back(random_gaussian_matrix(n, n, rng, field == Field::Complex));
  return MatrixPolynomial(field, std::move(coeffs));
}

// P(x) = A diag(x - mu_i) B with nonsingular A, B. The eigenvalue mu_0 has
// left/right eigenvectors A^-* e_0 and B^-1 e_0, so gamma has the closed form
// 1 / (||A^-* e_0|| ||B^-1 e_0|| sqrt(1 + |mu_0|^2)).
struct DiagonalizedPencil {
  MatrixPolynomial p;
  Complex lambda;
  double gamma_oracle;
};

inline DiagonalizedPencil diagonalized_regular_pencil(int n, std::uint64_t seed, Field field) {
  Rng rng(seed);
  const bool cx = field == Field::Complex;
  Matrix a, b;
  do {
    a = random_gaussian_matrix(n, n, rng, cx);
  } while (std::abs(linalg::determinant(a)) < 0.1);
  do {
    b = random_gaussian_matrix(n, n, rng, cx);
  } while (std::abs(linalg::determinant(b)) < 0.1);
  std::vector<Complex> mus;
  for (int i = 0; i < n; ++i)
    mus.push_back(Complex(2.0 * rng.uniform() - 1.0, cx ? 2.0 * rng.uniform() - 1.0 : 0.0) +
                  Complex(2.5 * i, 0));
  Matrix d0 = Matrix::Zero(n, n), d1 = Matrix::Identity(n, n);
  for (int i = 0; i < n; ++i) d0(i, i) = -mus[static_cast<std::size_t>(i)];
  DiagonalizedPencil out{
      MatrixPolynomial(field, {a * d0 * b, a * d1 * b}), mus[0], 0.0};
  const Vector u_dir = Matrix(a.adjoint()).partialPivLu().solve(Vector::Unit(n, 0));
  const Vector v_dir = b.partialPivLu().solve(Vector::Unit(n, 0));
  out.gamma_oracle = 1.0 / (u_dir.norm() * v_dir.norm() *
                            std::sqrt(1.0 + std::norm(mus[0])));
  return out;
}

// Scalar polynomial from roots (monic).
inline std::vector<Complex> poly_from_roots(const std::vector<Complex>& roots) {
  std::vector<Complex> coeffs{Complex(1)};
  for (const Complex& r : roots) {
    std::vector<Complex> next(coeffs.size() + 1, Complex(0));
    for (std::size_t i = 0; i < coeffs.size(); ++i) {
      next[i + 1] += coeffs[i];
      next[i] -= coeffs[i] * r;
    }
    coeffs = std::move(next);
  }
  std::reverse(coeffs.begin(), coeffs.end());  // ascending powers
  return coeffs;
}

// Singular fixture: Q1 diag(f_1, ..., f_r, 0, ..., 0) Q2 with constant
// unitary Q1, Q2, f_1(x) = (x - 1) g(x) and the remaining f_i bounded away
// from 1. gamma at lambda = 1 is |g(1)| / sqrt(d + 1).
struct SingularFixture {
  MatrixPolynomial p;
  Complex lambda;
  double gamma_oracle;
  int rank;
};

inline SingularFixture random_singular_fixture(int n, int d, std::uint64_t seed, Field field,
                                               int rank = -1) {
  Rng rng(seed);
  const bool cx = field == Field::Complex;
  const int r = rank < 0 ? n - 1 : rank;
  auto random_root = [&](double min_dist_from_one) {
    for (;;) {
      Complex z(2.4 * rng.uniform() - 1.2, cx ? 2.4 * rng.uniform() - 1.2 : 0.0);
      if (std::abs(z - Complex(1)) >= min_dist_from_one) return z;
    }
  };
  std::vector<std::vector<Complex>> diag_polys;
  {
    std::vector<Complex> g_roots;
    for (int j = 0; j < d - 1; ++j) g_roots.push_back(random_root(0.7));
    std::vector<Complex> f1_roots = g_roots;
    f1_roots.push_back(Complex(1));
    diag_polys.push_back(poly_from_roots(f1_roots));
  }
  for (int i = 1; i < r; ++i) {
    std::vector<Complex> roots;
    for (int j = 0; j < d; ++j) roots.push_back(random_root(0.7));
    diag_polys.push_back(poly_from_roots(roots));
  }
  std::vector<Matrix> coeffs(static_cast<std::size_t>(d) + 1, Matrix::Zero(n, n));
  for (int i = 0; i < r; ++i)
    for (int j = 0; j <= d; ++j)
      coeffs[static_cast<std::size_t>(j)](i, i) = diag_polys[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
  const Matrix q1 = random_unitary(n, rng, cx);
  const Matrix q2 = random_unitary(n, rng, cx);
  for (Matrix& c : coeffs) c = q1 * c * q2;

  // f_1'(1) = g(1); evaluate g at 1 from the stored f_1 coefficients:
  // f_1(x) = (x-1) g(x) => f_1'(1) = g(1).
  Complex df(0);
  for (std::size_t j = 1; j < diag_polys[0].size(); ++j)
    df += static_cast<double>(j) * diag_polys[0][j];
  SingularFixture out{MatrixPolynomial(field, std::move(coeffs)), Complex(1),
                      std::abs(df) / std::sqrt(static_cast<double>(d) + 1.0), r};
  return out;
}

// Independent eigenvalue oracle: roots of det P(x) via evaluation at
// interpolation nodes, coefficient recovery, and the eigenvalues of the
// scalar companion matrix (Eigen's single-matrix solver; no QZ involved).
inline std::vector<Complex> determinant_root_oracle(const MatrixPolynomial& p) {
  const int deg = p.size() * p.grade();
  const int m = deg + 1;
  Matrix vand(m, m);
  Vector values(m);
  for (int k = 0; k < m; ++k) {
    const Complex x = std::polar(1.3, 2.0 * M_PI * (k + 0.37) / m);
    Complex pw(1);
    for (int j = 0; j < m; ++j) {
      vand(k, j) = pw;
      pw *= x;
    }
    values(k) = linalg::determinant(p.evaluate(x));
  }
  Vector coeffs = vand.colPivHouseholderQr().solve(values);
  int top = m - 1;
  const double scale = coeffs.cwiseAbs().maxCoeff();
  while (top > 0 && std::abs(coeffs(top)) < 1e-10 * scale) --top;
  if (top == 0) return {};
  Matrix companion = Matrix::Zero(top, top);
  for (int i = 1; i < top; ++i) companion(i, i - 1) = 1.0;
  for (int i = 0; i < top; ++i) companion(i, top - 1) = -coeffs(i) / coeffs(top);
  Eigen::ComplexEigenSolver<Matrix> solver(companion);
  std::vector<Complex> roots;
  for (int i = 0; i < top; ++i) roots.push_back(solver.eigenvalues()(i));
  return roots;
}

inline Complex nearest(const std::vector<Complex>& values, Complex target) {
  Complex best = values.front();
  for (const Complex& v : values)
    if (std::abs(v - target) < std::abs(best - target)) best = v;
  return best;
}

struct LineFit {
  double slope = 0.0;
  double r2 = 0.0;
};

inline LineFit loglog_fit(const std::vector<double>& xs, const std::vector<double>& ys) {
  const std::size_t m = xs.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
  for (std::size_t i = 0; i < m; ++i) {
    const double x = std::log(xs[i]);
    const double y = std::log(ys[i]);
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
    syy += y * y;
  }
  const double vx = sxx - sx * sx / m;
  const double vy = syy - sy * sy / m;
  const double cxy = sxy - sx * sy / m;
  LineFit fit;
  fit.slope = cxy / vx;
  fit.r2 = vy > 0 ? (cxy * cxy) / (vx * vy) : 1.0;
  return fit;
}

// Rotate w by a unit phase maximizing Re <ref, w>.
inline Vector phase_align(const Vector& w, const Vector& ref) {
  const Complex inner = ref.dot(w);
  if (std::abs(inner) == 0.0) return w;
  return w * (std::conj(inner) / std::abs(inner));
}

}  // namespace weakcond::testing
