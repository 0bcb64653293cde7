#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "fixtures.hpp"
#include "weakcond/condition.hpp"
#include "weakcond/montecarlo.hpp"

using namespace weakcond;
using namespace weakcond::testing;

namespace {

std::vector<double> log_grid(double lo, double hi, int points) {
  std::vector<double> grid(static_cast<std::size_t>(points));
  for (int i = 0; i < points; ++i)
    grid[static_cast<std::size_t>(i)] =
        lo * std::pow(hi / lo, static_cast<double>(i) / (points - 1));
  return grid;
}

}  // namespace

TEST_CASE("sample_uniform_perturbation: unit norm, determinism, matching field") {
  const MatrixPolynomial e1 = sample_uniform_perturbation(3, 2, 1, 42);
  CHECK(std::abs(e1.coeff_norm() - 1.0) <= 1e-14);
  CHECK(e1.field() == Field::Real);
  const MatrixPolynomial e2 = sample_uniform_perturbation(3, 2, 1, 42);
  for (int j = 0; j <= 2; ++j) CHECK((e1.coeff(j) - e2.coeff(j)).norm() == 0.0);
  const MatrixPolynomial e3 = sample_uniform_perturbation(3, 2, 2, 42);
  CHECK(e3.field() == Field::Complex);
  CHECK(std::abs(e3.coeff_norm() - 1.0) <= 1e-14);
  const MatrixPolynomial e4 = sample_uniform_perturbation(3, 2, 1, 43);
  CHECK((e1.coeff(0) - e4.coeff(0)).norm() > 0.0);
}

TEST_CASE("sample_uniform_perturbation: squared first coordinate follows the projection law") {
  // |first entry|^2 of a uniform point on the coefficient sphere has mean 1/N.
  for (const int beta : {1, 2}) {
    const int n = 2, d = 1;
    const double target = 1.0 / (n * n * (d + 1));
    const std::uint64_t m = 200000;
    double sum = 0, sumsq = 0;
    for (std::uint64_t i = 0; i < m; ++i) {
      const MatrixPolynomial e = sample_uniform_perturbation(n, d, beta, 7070, i);
      const double x = std::norm(e.coeff(0)(0, 0));
      sum += x;
      sumsq += x * x;
    }
    const double mean = sum / m;
    const double se = std::sqrt((sumsq / m - mean * mean) / m);
    CHECK(std::abs(mean - target) <= 3.0 * se);
  }
}

TEST_CASE("empirical_tail: demo pencil agrees with the exact law") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const SigmaLaw law = sigma_law(s, l.grade());
  const auto grid = log_grid(0.1 / law.gamma, 100.0 / law.gamma, 25);
  const TailCurve curve = empirical_tail(s, l, law, grid, 20000, 606060);
  CHECK(curve.infinite_count == 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::sqrt(curve.exact[i] * (1 - curve.exact[i]) / 20000.0);
    CHECK(std::abs(curve.empirical[i] - curve.exact[i]) <= 4.0 * se);
  }
}

TEST_CASE("empirical_tail: regular pencil has no mass beyond 1/gamma") {
  const MatrixPolynomial p = diagonal_pencil({Complex(1), Complex(2)}, Field::Real);
  const SpectralData s = spectral_data(p, Complex(1));
  const SigmaLaw law = sigma_law(s, p.grade());
  const double cap = 1.0 / law.gamma;
  const std::vector<double> grid{0.1 * cap, 0.9 * cap, 1.000001 * cap, 2.0 * cap};
  const TailCurve curve = empirical_tail(s, p, law, grid, 20000, 11);
  CHECK(curve.empirical[2] == 0.0);
  CHECK(curve.empirical[3] == 0.0);
  CHECK(curve.empirical[0] > 0.0);
}

TEST_CASE("empirical_tail: two seeds agree within combined standard errors") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const SigmaLaw law = sigma_law(s, l.grade());
  const auto grid = log_grid(0.1 / law.gamma, 100.0 / law.gamma, 25);
  const TailCurve a = empirical_tail(s, l, law, grid, 20000, 1001);
  const TailCurve b = empirical_tail(s, l, law, grid, 20000, 2002);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::sqrt(a.stderr_[i] * a.stderr_[i] + b.stderr_[i] * b.stderr_[i]);
    CHECK(std::abs(a.empirical[i] - b.empirical[i]) <= std::max(4.0 * se, 1e-3));
  }
}

TEST_CASE("empirical_tail: validation") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const SigmaLaw law = sigma_law(s, l.grade());
  CHECK_THROWS_AS(empirical_tail(s, l, law, {1.0, 2.0}, 0, 1), ValidationError);
  CHECK_THROWS_AS(empirical_tail(s, l, law, {}, 10, 1), ValidationError);
  CHECK_THROWS_AS(empirical_tail(s, l, law, {2.0, 1.0}, 10, 1), ValidationError);
  SigmaLaw complex_law = law;
  complex_law.beta = 2;
  CHECK_THROWS_AS(empirical_tail(s, l, complex_law, {1.0, 2.0}, 10, 1), ValidationError);
}

TEST_CASE("empirical_tail: bitwise independent of the worker count") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const SigmaLaw law = sigma_law(s, l.grade());
  const auto grid = log_grid(1.0, 1000.0, 10);

  setenv("WEAKCOND_THREADS", "1", 1);
  const TailCurve serial = empirical_tail(s, l, law, grid, 10000, 77);
  setenv("WEAKCOND_THREADS", "4", 1);
  const TailCurve parallel = empirical_tail(s, l, law, grid, 10000, 77);
  unsetenv("WEAKCOND_THREADS");
  for (std::size_t i = 0; i < grid.size(); ++i) {
    CHECK(serial.empirical[i] == parallel.empirical[i]);
    CHECK(serial.stderr_[i] == parallel.stderr_[i]);
  }
  CHECK(serial.infinite_count == parallel.infinite_count);
}

TEST_CASE("qr_ensemble_check: moment checks pass for real and complex ensembles") {
  const QrEnsembleCheck real4 = qr_ensemble_check(4, 1, 100000, 90001);
  CHECK(real4.diag_ok);
  CHECK(real4.offdiag_ok);
  CHECK(real4.qcorner_ok);
  CHECK(real4.indep_ok);
  CHECK(real4.nonpositive_diag_count == 0);
  CHECK(real4.all_ok());

  const QrEnsembleCheck complex2 = qr_ensemble_check(2, 2, 100000, 90002);
  CHECK(complex2.all_ok());
  CHECK(complex2.qcorner_target == doctest::Approx(0.5));
}

TEST_CASE("sensitivity_vs_ratio_law: determinant formula equals the inverse-corner identity") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const RatioLawCheck check = sensitivity_vs_ratio_law(s, l, 1000, 13013);
  CHECK(check.checked + check.skipped_singular == 1000);
  CHECK(check.skipped_singular <= 2);
  CHECK(check.max_rel_discrepancy <= 1e-10);
  CHECK(check.pass);
}

TEST_CASE("sensitivity_vs_ratio_law: regular case reduces to the scalar identity") {
  const MatrixPolynomial p = diagonal_pencil({Complex(1), Complex(2)}, Field::Real);
  const SpectralData s = spectral_data(p, Complex(1));
  const RatioLawCheck check = sensitivity_vs_ratio_law(s, p, 500, 515151);
  CHECK(check.pass);
}

TEST_CASE("sensitivity_vs_ratio_law: both routes are scale invariant") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const MatrixPolynomial e = sample_gaussian_perturbation(4, 1, 1, 606, 3);
  const MatrixPolynomial e7 = lincomb(Complex(7), e, Complex(0), e);
  CHECK(directional_sensitivity(s, l, e7) ==
        doctest::Approx(directional_sensitivity(s, l, e)).epsilon(1e-13));
  auto corner = [&](const MatrixPolynomial& dir) {
    const Matrix g = s.X.adjoint() * dir.evaluate(s.lambda) * s.Y;
    Vector rhs = Vector::Zero(s.ell);
    rhs(s.ell - 1) = 1.0;
    const Vector x = g.partialPivLu().solve(rhs);
    return 1.0 / (std::abs(x(s.ell - 1)) * std::abs(s.u_pprime_v) * dir.coeff_norm());
  };
  CHECK(corner(e7) == doctest::Approx(corner(e)).epsilon(1e-13));
}

TEST_CASE("grade is semantic: a zero leading coefficient enlarges the perturbation space") {
  // The demo pencil restated at grade 2: same matrix function, but
  // perturbations now live in n^2 (d+1) = 48 dimensions and the scale
  // factor at lambda = 1 becomes sqrt(3).
  const MatrixPolynomial l = demo_pencil();
  const MatrixPolynomial padded(Field::Real, {l.coeff(0), l.coeff(1), Matrix::Zero(4, 4)});
  CHECK(padded.grade() == 2);
  CHECK(padded.coeff_norm() == l.coeff_norm());

  const SpectralData s1 = spectral_data(l, Complex(1));
  const SpectralData s2 = spectral_data(padded, Complex(1));
  CHECK(s2.r == 3);
  CHECK(s2.gamma == doctest::Approx(s1.gamma * std::sqrt(2.0 / 3.0)).epsilon(1e-12));

  const SigmaLaw law = sigma_law(s2, padded.grade());
  CHECK(law.N == 48);
  const auto grid = log_grid(0.1 / law.gamma, 100.0 / law.gamma, 15);
  const std::uint64_t m = 20000;
  const TailCurve curve = empirical_tail(s2, padded, law, grid, m, 99123);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::sqrt(std::max(curve.exact[i] * (1 - curve.exact[i]), 1e-9) /
                                static_cast<double>(m));
    CHECK(std::abs(curve.empirical[i] - curve.exact[i]) <= 4.0 * se);
  }

  // The enlarged companion pencil still carries the true eigenvalue; the
  // extra generalized eigenvalues at infinity are dropped.
  const auto evs = all_eigenvalues(padded);
  CHECK(std::abs(nearest(evs, Complex(1)) - Complex(1)) <= 1e-10);
}

TEST_CASE("sensitivity law at a non-real eigenvalue: complex perturbations only") {
  // blkdiag([[x, -1], [1, x]], 0): real, normal rank 2, simple eigenvalue i.
  Matrix c0 = Matrix::Zero(3, 3), c1 = Matrix::Zero(3, 3);
  c0(0, 1) = -1;
  c0(1, 0) = 1;
  c1(0, 0) = c1(1, 1) = 1;
  const MatrixPolynomial p(Field::Real, {c0, c1});
  const SpectralData s_real = spectral_data(p, Complex(0, 1));
  CHECK_THROWS_AS(sigma_law(s_real, p.grade()), ValidationError);

  // The complex-perturbation law stays valid at complex eigenvalues.
  const MatrixPolynomial pc = as_complex(p);
  const SpectralData s = spectral_data(pc, Complex(0, 1));
  const SigmaLaw law = sigma_law(s, pc.grade());
  const auto grid = log_grid(0.1 / law.gamma, 100.0 / law.gamma, 20);
  const std::uint64_t m = 50000;
  const TailCurve curve = empirical_tail(s, pc, law, grid, m, 424201);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double se = std::sqrt(std::max(curve.exact[i] * (1 - curve.exact[i]), 1e-9) /
                                static_cast<double>(m));
    CHECK(std::abs(curve.empirical[i] - curve.exact[i]) <= 4.0 * se);
  }
}

TEST_CASE("running sigma mean: finite for complex directions, divergent signature for real") {
  const MatrixPolynomial l = demo_pencil();
  const MatrixPolynomial lc = as_complex(l);
  const SpectralData s_real = spectral_data(l, Complex(1));
  const SpectralData s_complex = spectral_data(lc, Complex(1));
  const SigmaLaw law_complex = sigma_law(s_complex, lc.grade());
  const double complex_mean_expected = expected_sensitivity(law_complex);

  const std::uint64_t m = 1000000;
  double sum_c = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    const MatrixPolynomial e = sample_uniform_perturbation(4, 1, 2, 31337, i);
    sum_c += directional_sensitivity(s_complex, lc, e);
  }
  const double mean_c = sum_c / static_cast<double>(m);
  // The complex mean is finite but sits at the variance boundary; allow a
  // broad band around the closed form.
  CHECK(mean_c == doctest::Approx(complex_mean_expected).epsilon(0.10));

  double sum_r = 0;
  for (std::uint64_t i = 0; i < m; ++i) {
    const MatrixPolynomial e = sample_uniform_perturbation(4, 1, 1, 31337, i);
    sum_r += directional_sensitivity(s_real, l, e);
  }
  const double mean_r = sum_r / static_cast<double>(m);
  CHECK(mean_r > 3.0 * complex_mean_expected);
}
