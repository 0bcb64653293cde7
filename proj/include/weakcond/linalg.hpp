#pragma once

#include <utility>
#include <vector>

#include "weakcond/types.hpp"

namespace weakcond::linalg {

/// Finite eigenvalues x of the pencil P0 + x*P1, i.e. roots of
/// det(P0 + x*P1) = 0, computed by the QZ iteration (LAPACK ggev).
/// Generalized eigenvalues with beta == 0 are at infinity and are dropped;
/// their number is reported. Real pencils go through the real QZ so the
/// implicit backward error stays real.
struct PencilEigenvalues {
  std::vector<Complex> finite;
  int infinite_count = 0;
};
PencilEigenvalues pencil_eigenvalues(const Matrix& p0, const Matrix& p1, bool real_pair);

/// Full generalized eigendecomposition of A v = lambda B v with left and
/// right eigenvectors (columns of `left`, `right`; left vectors satisfy
/// l^H A = lambda l^H B). Complex QZ.
struct GeneralizedEigen {
  std::vector<Complex> alpha;
  std::vector<Complex> beta;
  Matrix left;
  Matrix right;
};
GeneralizedEigen generalized_eigen(const Matrix& a, const Matrix& b);

/// Orthonormal basis of the (right) null space at relative threshold
/// rel_tol * sigma_max * max(rows, cols).
Matrix null_space(const Matrix& m, double rel_tol);
Matrix left_null_space(const Matrix& m, double rel_tol);

/// Number of singular values strictly above `threshold`.
int numerical_rank(const Matrix& m, double threshold);

/// Thin orthonormal basis of the column space (all columns assumed
/// independent).
Matrix orthonormal_columns(const Matrix& m);

/// Orthonormal basis of the orthogonal complement of span(v); v must have
/// orthonormal columns. Returns n x (n - k).
Matrix complement_basis(const Matrix& v, int n);

/// Largest principal angle between the column spaces, computed from the sine
/// (accurate for nearly equal subspaces).
double principal_angle(const Matrix& a, const Matrix& b);

/// Determinant via LU with partial pivoting.
Complex determinant(const Matrix& m);

/// Rotate w by a unit phase so that its largest-magnitude entry is real
/// positive.
Vector phase_normalize(const Vector& w);

}  // namespace weakcond::linalg
