#include "weakcond/linalg.hpp"

#include <algorithm>
#include <cmath>

extern "C" {
void zggev_(const char* jobvl, const char* jobvr, const int* n, weakcond::Complex* a,
            const int* lda, weakcond::Complex* b, const int* ldb, weakcond::Complex* alpha,
            weakcond::Complex* beta, weakcond::Complex* vl, const int* ldvl,
            weakcond::Complex* vr, const int* ldvr, weakcond::Complex* work,
            const int* lwork, double* rwork, int* info);
void dggev_(const char* jobvl, const char* jobvr, const int* n, double* a, const int* lda,
            double* b, const int* ldb, double* alphar, double* alphai, double* beta,
            double* vl, const int* ldvl, double* vr, const int* ldvr, double* work,
            const int* lwork, int* info);
}

namespace weakcond::linalg {

namespace {

void run_zggev(Matrix a, Matrix b, bool want_vectors, std::vector<Complex>& alpha,
               std::vector<Complex>& beta, Matrix* vl, Matrix* vr) {
  const int n = static_cast<int>(a.rows());
  alpha.assign(n, Complex(0));
  beta.assign(n, Complex(0));
  Matrix left = want_vectors ? Matrix(n, n) : Matrix(1, 1);
  Matrix right = want_vectors ? Matrix(n, n) : Matrix(1, 1);
  const int ldv = static_cast<int>(left.rows());
  std::vector<double> rwork(std::max(1, 8 * n));
  const char job = want_vectors ? 'V' : 'N';
  int info = 0;

  Complex work_query;
  int lwork = -1;
  zggev_(&job, &job, &n, a.data(), &n, b.data(), &n, alpha.data(), beta.data(),
         left.data(), &ldv, right.data(), &ldv, &work_query, &lwork, rwork.data(), &info);
  lwork = std::max(2 * n, static_cast<int>(work_query.real()) + 1);
  std::vector<Complex> work(lwork);
  zggev_(&job, &job, &n, a.data(), &n, b.data(), &n, alpha.data(), beta.data(),
         left.data(), &ldv, right.data(), &ldv, work.data(), &lwork, rwork.data(), &info);
  if (info != 0) throw NumericalError("generalized eigensolver (zggev) failed, info=" + std::to_string(info));
  if (want_vectors) {
    *vl = left;
    *vr = right;
  }
}

void run_dggev(RealMatrix a, RealMatrix b, std::vector<Complex>& alpha,
               std::vector<Complex>& beta) {
  const int n = static_cast<int>(a.rows());
  std::vector<double> ar(n), ai(n), be(n);
  double vdummy = 0.0;
  const int ldv = 1;
  const char job = 'N';
  int info = 0;

  double work_query;
  int lwork = -1;
  dggev_(&job, &job, &n, a.data(), &n, b.data(), &n, ar.data(), ai.data(), be.data(),
         &vdummy, &ldv, &vdummy, &ldv, &work_query, &lwork, &info);
  lwork = std::max(8 * n, static_cast<int>(work_query) + 1);
  std::vector<double> work(lwork);
  dggev_(&job, &job, &n, a.data(), &n, b.data(), &n, ar.data(), ai.data(), be.data(),
         &vdummy, &ldv, &vdummy, &ldv, work.data(), &lwork, &info);
  if (info != 0) throw NumericalError("generalized eigensolver (dggev) failed, info=" + std::to_string(info));
  alpha.resize(n);
  beta.resize(n);
  for (int i = 0; i < n; ++i) {
    alpha[i] = Complex(ar[i], ai[i]);
    beta[i] = Complex(be[i], 0.0);
  }
}

}  // namespace

PencilEigenvalues pencil_eigenvalues(const Matrix& p0, const Matrix& p1, bool real_pair) {
  if (p0.rows() != p0.cols() || p1.rows() != p1.cols() || p0.rows() != p1.rows())
    throw ValidationError("pencil matrices must be square and of equal size");

  // det(p0 + x p1) = 0  <=>  (-p0) v = x p1 v.
  std::vector<Complex> alpha, beta;
  if (real_pair) {
    run_dggev((-p0).real(), p1.real(), alpha, beta);
  } else {
    run_zggev(-p0, p1, false, alpha, beta, nullptr, nullptr);
  }

  PencilEigenvalues out;
  for (std::size_t i = 0; i < alpha.size(); ++i) {
    if (beta[i] == Complex(0)) {
      ++out.infinite_count;
    } else {
      out.finite.push_back(alpha[i] / beta[i]);
    }
  }
  return out;
}

GeneralizedEigen generalized_eigen(const Matrix& a, const Matrix& b) {
  if (a.rows() != a.cols() || b.rows() != b.cols() || a.rows() != b.rows())
    throw ValidationError("pencil matrices must be square and of equal size");
  GeneralizedEigen out;
  run_zggev(a, b, true, out.alpha, out.beta, &out.left, &out.right);
  return out;
}

Matrix null_space(const Matrix& m, double rel_tol) {
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double cut = s.size() > 0 ? rel_tol * s(0) * std::max(m.rows(), m.cols()) : 0.0;
  int rank = 0;
  while (rank < s.size() && s(rank) > cut) ++rank;
  return svd.matrixV().rightCols(m.cols() - rank);
}

Matrix left_null_space(const Matrix& m, double rel_tol) {
  return null_space(m.adjoint(), rel_tol);
}

int numerical_rank(const Matrix& m, double threshold) {
  Eigen::JacobiSVD<Matrix> svd(m);
  const auto& s = svd.singularValues();
  int rank = 0;
  while (rank < s.size() && s(rank) > threshold) ++rank;
  return rank;
}

Matrix orthonormal_columns(const Matrix& m) {
  if (m.cols() == 0) return m;
  Eigen::HouseholderQR<Matrix> qr(m);
  Matrix q = qr.householderQ() * Matrix::Identity(m.rows(), m.cols());
  return q;
}

Matrix complement_basis(const Matrix& v, int n) {
  if (v.cols() == 0) return Matrix::Identity(n, n);
  Eigen::HouseholderQR<Matrix> qr(v);
  Matrix full = qr.householderQ() * Matrix::Identity(n, n);
  return full.rightCols(n - v.cols());
}

double principal_angle(const Matrix& a, const Matrix& b) {
  const Matrix qa = orthonormal_columns(a);
  const Matrix qb = orthonormal_columns(b);
  const Matrix residual = qb - qa * (qa.adjoint() * qb);
  Eigen::JacobiSVD<Matrix> svd(residual);
  const double s = svd.singularValues().size() > 0 ? svd.singularValues()(0) : 0.0;
  return std::asin(std::min(1.0, s));
}

Complex determinant(const Matrix& m) {
  if (m.rows() == 0) return Complex(1);
  if (m.rows() == 1) return m(0, 0);
  if (m.rows() == 2) return m(0, 0) * m(1, 1) - m(0, 1) * m(1, 0);
  return Eigen::PartialPivLU<Matrix>(m).determinant();
}

Vector phase_normalize(const Vector& w) {
  int imax = 0;
  double best = -1.0;
  for (int i = 0; i < w.size(); ++i) {
    const double mag = std::abs(w(i));
    if (mag > best) {
      best = mag;
      imax = i;
    }
  }
  if (best == 0.0) return w;
  return w * (std::conj(w(imax)) / best);
}

}  // namespace weakcond::linalg
