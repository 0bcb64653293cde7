#pragma once

#include <utility>
#include <vector>

#include "weakcond/types.hpp"

namespace weakcond {

/// Square matrix polynomial P(x) = P_0 + P_1 x + ... + P_d x^d, stored by its
/// d+1 coefficient matrices. The grade d is semantic: a zero leading
/// coefficient is kept, because the perturbation space has dimension
/// n^2 (d+1) regardless of the true degree. Immutable after construction.
class MatrixPolynomial {
 public:
  MatrixPolynomial(Field field, std::vector<Matrix> coeffs);

  static MatrixPolynomial zero(Field field, int n, int grade);

  Field field() const { return field_; }
  int size() const { return n_; }
  int grade() const { return grade_; }
  const Matrix& coeff(int j) const { return coeffs_[static_cast<std::size_t>(j)]; }
  const std::vector<Matrix>& coeffs() const { return coeffs_; }

  /// Horner evaluation of P(x0).
  Matrix evaluate(Complex x0) const;

  /// P'(x0) = sum_{j>=1} j P_j x0^{j-1}.
  Matrix derivative_at(Complex x0) const;

  /// Frobenius norm of the stacked coefficient block [P_0 ... P_d].
  double coeff_norm() const;

  /// Polynomial with coefficients P_j^*. Its right kernel is the left kernel
  /// of P, and evaluating a right kernel vector of it at conj(lambda) gives a
  /// left null vector of P(lambda).
  MatrixPolynomial conjugate_transpose() const;

 private:
  Field field_;
  int n_;
  int grade_;
  std::vector<Matrix> coeffs_;
};

MatrixPolynomial as_complex(const MatrixPolynomial& p);

/// alpha*P + beta*Q, with the field widened to complex when either operand is
/// complex or a coefficient is non-real.
MatrixPolynomial lincomb(Complex alpha, const MatrixPolynomial& p, Complex beta,
                         const MatrixPolynomial& q);

inline MatrixPolynomial add_scaled(const MatrixPolynomial& p, double eps,
                                   const MatrixPolynomial& e) {
  return lincomb(Complex(1), p, Complex(eps), e);
}

/// Rank of P(x) over the rational functions, taken as the maximum numerical
/// rank of P at `trials` sample points spread over the unit circle; threshold
/// tol * sigma_max * n at each point. Throws when the maximum is attained by
/// fewer than ceil(trials/2) points, which signals an unreliable tolerance.
int normal_rank(const MatrixPolynomial& p, double tol = 1e-10, int trials = 11);

/// Polynomial column vector v(x) = v_0 + v_1 x + ... as coefficient vectors.
struct PolyVector {
  std::vector<Vector> coeffs;
  Vector eval(Complex x0) const;
  int degree() const { return static_cast<int>(coeffs.size()) - 1; }
};

struct PolyVectorBasis {
  std::vector<PolyVector> vectors;
  int degree_bound = 0;
};

enum class KernelSide { Right, Left };

/// n-r polynomial vectors spanning the rational null space of P (side Right)
/// or of P(x)^* (side Left). Candidate degrees are searched incrementally via
/// the block convolution matrix of P; vectors whose evaluations at a generic
/// point are dependent on already accepted ones (shifted copies in
/// particular) are discarded. The degree search is capped at n*d.
PolyVectorBasis kernel_basis(const MatrixPolynomial& p, KernelSide side, int rank,
                             double tol = 1e-10);

/// First companion linearization: an (nd x nd) pencil (A, B) with
/// det(A + x B) = c * det P(x). For d == 1 this is (P_0, P_1).
std::pair<Matrix, Matrix> linearize(const MatrixPolynomial& p);

}  // namespace weakcond
