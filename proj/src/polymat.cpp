#include "weakcond/polymat.hpp"

#include <algorithm>
#include <cmath>

#include "weakcond/linalg.hpp"
#include "weakcond/rng.hpp"

namespace weakcond {

namespace {

// Generic evaluation point for independence filtering; any fixed point off
// the finitely many bad ones works.
const Complex kGenericPoint = std::polar(1.0, 2.0 * M_PI * 0.61803398874989485);

bool is_real_valued(const Matrix& m) {
  for (int j = 0; j < m.cols(); ++j)
    for (int i = 0; i < m.rows(); ++i)
      if (m(i, j).imag() != 0.0) return false;
  return true;
}

}  // namespace

MatrixPolynomial::MatrixPolynomial(Field field, std::vector<Matrix> coeffs)
    : field_(field), coeffs_(std::move(coeffs)) {
  if (coeffs_.size() < 2)
    throw ValidationError("matrix polynomial needs grade >= 1 (at least two coefficients)");
  grade_ = static_cast<int>(coeffs_.size()) - 1;
  n_ = static_cast<int>(coeffs_.front().rows());
  if (n_ < 1) throw ValidationError("matrix polynomial needs size n >= 1");
  for (const Matrix& c : coeffs_) {
    if (c.rows() != n_ || c.cols() != n_)
      throw ValidationError("all coefficients must be square matrices of equal size");
    if (!c.allFinite()) throw ValidationError("coefficient entries must be finite");
    if (field_ == Field::Real && !is_real_valued(c))
      throw ValidationError("real matrix polynomial has a coefficient with nonzero imaginary part");
  }
}

MatrixPolynomial MatrixPolynomial::zero(Field field, int n, int grade) {
  if (n < 1 || grade < 1) throw ValidationError("zero polynomial needs n >= 1 and grade >= 1");
  std::vector<Matrix> coeffs(static_cast<std::size_t>(grade) + 1, Matrix::Zero(n, n));
  return MatrixPolynomial(field, std::move(coeffs));
}

Matrix MatrixPolynomial::evaluate(Complex x0) const {
  Matrix acc = coeffs_.back();
  for (int j = grade_ - 1; j >= 0; --j) acc = acc * x0 + coeffs_[static_cast<std::size_t>(j)];
  return acc;
}

Matrix MatrixPolynomial::derivative_at(Complex x0) const {
  Matrix acc = Matrix::Zero(n_, n_);
  for (int j = grade_; j >= 1; --j)
    acc = acc * x0 + static_cast<double>(j) * coeffs_[static_cast<std::size_t>(j)];
  return acc;
}

double MatrixPolynomial::coeff_norm() const {
  double sum = 0.0;
  for (const Matrix& c : coeffs_) sum += c.squaredNorm();
  return std::sqrt(sum);
}

MatrixPolynomial MatrixPolynomial::conjugate_transpose() const {
  std::vector<Matrix> adj;
  adj.reserve(coeffs_.size());
  for (const Matrix& c : coeffs_) adj.push_back(c.adjoint());
  return MatrixPolynomial(field_, std::move(adj));
}

MatrixPolynomial as_complex(const MatrixPolynomial& p) {
  return MatrixPolynomial(Field::Complex, p.coeffs());
}

MatrixPolynomial lincomb(Complex alpha, const MatrixPolynomial& p, Complex beta,
                         const MatrixPolynomial& q) {
  if (p.size() != q.size() || p.grade() != q.grade())
    throw ValidationError("lincomb: shape mismatch");
  std::vector<Matrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(p.grade()) + 1);
  for (int j = 0; j <= p.grade(); ++j) coeffs.push_back(alpha * p.coeff(j) + beta * q.coeff(j));
  Field field = Field::Complex;
  if (p.field() == Field::Real && q.field() == Field::Real && alpha.imag() == 0.0 &&
      beta.imag() == 0.0)
    field = Field::Real;
  return MatrixPolynomial(field, std::move(coeffs));
}

int normal_rank(const MatrixPolynomial& p, double tol, int trials) {
  if (trials < 2) throw ValidationError("normal_rank needs trials >= 2");
  if (tol <= 0) throw ValidationError("normal_rank needs tol > 0");

  // Stratified angles keep the sample points away from each other.
  Rng rng(0x72616e6bULL);
  std::vector<int> ranks(static_cast<std::size_t>(trials));
  for (int k = 0; k < trials; ++k) {
    const double angle = 2.0 * M_PI * (k + rng.uniform()) / trials;
    const Matrix value = p.evaluate(std::polar(1.0, angle));
    Eigen::JacobiSVD<Matrix> svd(value);
    const auto& s = svd.singularValues();
    const double cut = s.size() > 0 ? tol * s(0) * p.size() : 0.0;
    int r = 0;
    while (r < s.size() && s(r) > cut) ++r;
    ranks[static_cast<std::size_t>(k)] = r;
  }
  const int rmax = *std::max_element(ranks.begin(), ranks.end());
  const int attained = static_cast<int>(std::count(ranks.begin(), ranks.end(), rmax));
  if (attained < (trials + 1) / 2)
    throw NumericalError("normal rank unstable: maximum rank " + std::to_string(rmax) +
                         " attained at only " + std::to_string(attained) + " of " +
                         std::to_string(trials) + " sample points");
  return rmax;
}

Vector PolyVector::eval(Complex x0) const {
  Vector acc = coeffs.back();
  for (int j = static_cast<int>(coeffs.size()) - 2; j >= 0; --j)
    acc = acc * x0 + coeffs[static_cast<std::size_t>(j)];
  return acc;
}

namespace {

// Block convolution matrix mapping the coefficients of v(x) (degree <= db)
// to the coefficients of P(x) v(x).
Matrix convolution_matrix(const MatrixPolynomial& p, int db) {
  const int n = p.size();
  const int d = p.grade();
  Matrix c = Matrix::Zero(static_cast<Eigen::Index>(n) * (d + db + 1),
                          static_cast<Eigen::Index>(n) * (db + 1));
  for (int i = 0; i <= db; ++i)
    for (int j = 0; j <= d; ++j)
      c.block(static_cast<Eigen::Index>(n) * (i + j), static_cast<Eigen::Index>(n) * i, n, n) =
          p.coeff(j);
  return c;
}

PolyVector poly_from_stacked(const Vector& stacked, int n, int db) {
  PolyVector v;
  v.coeffs.reserve(static_cast<std::size_t>(db) + 1);
  for (int j = 0; j <= db; ++j) v.coeffs.push_back(stacked.segment(static_cast<Eigen::Index>(n) * j, n));
  // Drop trailing zero coefficient blocks and normalize deterministically.
  while (v.coeffs.size() > 1 && v.coeffs.back().norm() < 1e-14 * stacked.norm()) v.coeffs.pop_back();
  double norm2 = 0.0;
  for (const Vector& c : v.coeffs) norm2 += c.squaredNorm();
  const double norm = std::sqrt(norm2);
  Eigen::Index imax = 0;
  double best = -1.0;
  Complex top(1, 0);
  for (const Vector& c : v.coeffs)
    for (Eigen::Index i = 0; i < c.size(); ++i)
      if (std::abs(c(i)) > best) {
        best = std::abs(c(i));
        imax = i;
        top = c(i);
      }
  (void)imax;
  const Complex phase = best > 0 ? std::conj(top) / best : Complex(1, 0);
  for (Vector& c : v.coeffs) c = c * (phase / norm);
  return v;
}

}  // namespace

PolyVectorBasis kernel_basis(const MatrixPolynomial& p, KernelSide side, int rank, double tol) {
  if (side == KernelSide::Left) return kernel_basis(p.conjugate_transpose(), KernelSide::Right, rank, tol);
  const int n = p.size();
  if (rank < 0 || rank >= n)
    throw ValidationError("kernel_basis expects 0 <= rank < n (regular polynomials have no kernel)");
  const int target = n - rank;

  PolyVectorBasis basis;
  Matrix accepted_evals(n, 0);  // orthonormal, for the independence filter

  for (int db = 0; db <= n * p.grade(); ++db) {
    const Matrix c = convolution_matrix(p, db);
    Eigen::JacobiSVD<Matrix> svd(c, Eigen::ComputeFullV);
    const auto& s = svd.singularValues();
    const double smax = s.size() > 0 ? s(0) : 0.0;
    const double cut = tol * smax * std::max(c.rows(), c.cols());
    const int nullity = static_cast<int>(c.cols()) - linalg::numerical_rank(c, cut);

    for (int k = 0; k < nullity; ++k) {
      const Vector stacked = svd.matrixV().col(c.cols() - 1 - k);
      PolyVector v = poly_from_stacked(stacked, n, db);
      Vector w = v.eval(kGenericPoint);
      const double wnorm = w.norm();
      if (wnorm < 1e-12) continue;
      const Vector resid = w - accepted_evals * (accepted_evals.adjoint() * w);
      if (resid.norm() <= 1e-8 * wnorm) continue;  // shifted copy or dependent
      accepted_evals.conservativeResize(n, accepted_evals.cols() + 1);
      accepted_evals.col(accepted_evals.cols() - 1) = resid / resid.norm();
      basis.vectors.push_back(std::move(v));
      basis.degree_bound = db;
      if (static_cast<int>(basis.vectors.size()) > target)
        throw NumericalError("kernel_basis: found more independent kernel vectors than n - rank; "
                             "rank mismatch");
      if (static_cast<int>(basis.vectors.size()) == target) return basis;
    }
  }
  throw NumericalError("kernel_basis: degree bound " + std::to_string(n * p.grade()) +
                       " exceeded before finding " + std::to_string(target) +
                       " kernel vectors (rank mismatch or tolerance failure)");
}

std::pair<Matrix, Matrix> linearize(const MatrixPolynomial& p) {
  const int n = p.size();
  const int d = p.grade();
  if (d == 1) return {p.coeff(0), p.coeff(1)};

  const Eigen::Index m = static_cast<Eigen::Index>(n) * d;
  Matrix a = Matrix::Zero(m, m);
  Matrix b = Matrix::Zero(m, m);
  b.topLeftCorner(n, n) = p.coeff(d);
  b.bottomRightCorner(m - n, m - n) = Matrix::Identity(m - n, m - n);
  for (int j = 0; j < d; ++j) a.block(0, static_cast<Eigen::Index>(n) * j, n, n) = p.coeff(d - 1 - j);
  for (int i = 1; i < d; ++i)
    a.block(static_cast<Eigen::Index>(n) * i, static_cast<Eigen::Index>(n) * (i - 1), n, n) =
        -Matrix::Identity(n, n);
  return {a, b};
}

}  // namespace weakcond
