#include "weakcond/montecarlo.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "weakcond/linalg.hpp"
#include "weakcond/rng.hpp"

namespace weakcond {

int worker_count() {
  if (const char* env = std::getenv("WEAKCOND_THREADS")) {
    const long parsed = std::strtol(env, nullptr, 10);
    if (parsed >= 1) return static_cast<int>(std::min(parsed, 64L));
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw == 0 ? 1 : static_cast<int>(hw);
}

namespace {

MatrixPolynomial gaussian_fill(int n, int d, int beta, std::uint64_t seed, std::uint64_t stream,
                               bool normalize) {
  if (n < 1 || d < 1) throw ValidationError("perturbation sampler needs n >= 1 and d >= 1");
  if (beta != 1 && beta != 2) throw ValidationError("perturbation sampler needs beta in {1, 2}");
  Rng rng(seed, stream);
  std::vector<Matrix> coeffs(static_cast<std::size_t>(d) + 1);
  for (Matrix& c : coeffs) {
    c.resize(n, n);
    for (int col = 0; col < n; ++col)
      for (int row = 0; row < n; ++row)
        c(row, col) = beta == 1 ? Complex(rng.gaussian(), 0.0) : rng.gaussian_complex();
  }
  MatrixPolynomial e(beta == 1 ? Field::Real : Field::Complex, std::move(coeffs));
  if (!normalize) return e;
  const double norm = e.coeff_norm();
  std::vector<Matrix> scaled;
  scaled.reserve(static_cast<std::size_t>(d) + 1);
  for (int j = 0; j <= d; ++j) scaled.push_back(e.coeff(j) / norm);
  return MatrixPolynomial(e.field(), std::move(scaled));
}

}  // namespace

MatrixPolynomial sample_uniform_perturbation(int n, int d, int beta, std::uint64_t seed,
                                             std::uint64_t stream) {
  return gaussian_fill(n, d, beta, seed, stream, true);
}

MatrixPolynomial sample_gaussian_perturbation(int n, int d, int beta, std::uint64_t seed,
                                              std::uint64_t stream) {
  return gaussian_fill(n, d, beta, seed, stream, false);
}

namespace {

void fill_theoretical_columns(TailCurve& curve) {
  const std::size_t size = curve.grid.size();
  curve.exact.resize(size);
  curve.bound.resize(size);
  const double bound_from = (1.0 - 1e-12) / curve.law.gamma;
  for (std::size_t i = 0; i < size; ++i) {
    curve.exact[i] = sigma_tail_exact(curve.law, curve.grid[i]);
    curve.bound[i] = (curve.law.ell >= 2 && curve.grid[i] >= bound_from)
                         ? sigma_tail_bound(curve.law, curve.grid[i])
                         : kNaN;
  }
}

void check_grid(const std::vector<double>& grid) {
  if (grid.empty()) throw ValidationError("threshold grid must be nonempty");
  for (std::size_t i = 0; i + 1 < grid.size(); ++i)
    if (!(grid[i] < grid[i + 1])) throw ValidationError("threshold grid must be strictly ascending");
  if (!(grid.front() >= 0.0)) throw ValidationError("thresholds must be nonnegative");
}

}  // namespace

TailCurve theoretical_tail(const SigmaLaw& law, const std::vector<double>& grid) {
  check_grid(grid);
  TailCurve curve;
  curve.grid = grid;
  curve.law = law;
  fill_theoretical_columns(curve);
  return curve;
}

TailCurve empirical_tail(const SpectralData& s, const MatrixPolynomial& p, const SigmaLaw& law,
                         const std::vector<double>& grid, std::uint64_t samples,
                         std::uint64_t seed) {
  check_grid(grid);
  if (samples < 1) throw ValidationError("empirical_tail needs samples >= 1");
  if (law.beta != s.beta || law.beta != field_beta(p.field()))
    throw ValidationError("law field does not match the polynomial field");

  const std::size_t gsize = grid.size();
  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t nchunks = (samples + chunk - 1) / chunk;

  struct Partial {
    std::vector<std::uint64_t> hist;  // index = number of grid values <= sigma
    std::uint64_t infinite = 0;
  };
  std::vector<Partial> partials(nchunks);

  parallel_chunks(samples, chunk, [&](std::uint64_t ci, std::uint64_t lo, std::uint64_t hi) {
    Partial part;
    part.hist.assign(gsize + 1, 0);
    for (std::uint64_t i = lo; i < hi; ++i) {
      const MatrixPolynomial e =
          sample_uniform_perturbation(p.size(), p.grade(), law.beta, seed, i);
      const SensitivityReport rep = analyze_direction(s, p, e);
      std::size_t pos;
      if (rep.infinite) {
        pos = gsize;
        ++part.infinite;
      } else {
        pos = static_cast<std::size_t>(
            std::upper_bound(grid.begin(), grid.end(), rep.sigma) - grid.begin());
      }
      ++part.hist[pos];
    }
    partials[ci] = std::move(part);
  });

  std::vector<std::uint64_t> hist(gsize + 1, 0);
  std::uint64_t infinite = 0;
  for (const Partial& part : partials) {
    for (std::size_t j = 0; j <= gsize; ++j) hist[j] += part.hist[j];
    infinite += part.infinite;
  }

  TailCurve curve;
  curve.grid = grid;
  curve.law = law;
  curve.samples = samples;
  curve.seed = seed;
  curve.infinite_count = infinite;
  fill_theoretical_columns(curve);
  curve.empirical.resize(gsize);
  curve.stderr_.resize(gsize);
  std::uint64_t at_least = 0;
  for (std::size_t j = gsize; j-- > 0;) {
    at_least += hist[j + 1];
    const double phat = static_cast<double>(at_least) / static_cast<double>(samples);
    curve.empirical[j] = phat;
    curve.stderr_[j] = std::sqrt(phat * (1.0 - phat) / static_cast<double>(samples));
  }
  return curve;
}

QrEnsembleCheck qr_ensemble_check(int n, int beta, std::uint64_t samples, std::uint64_t seed) {
  if (n < 2) throw ValidationError("qr_ensemble_check needs n >= 2");
  if (beta != 1 && beta != 2) throw ValidationError("qr_ensemble_check needs beta in {1, 2}");
  if (samples < 2) throw ValidationError("qr_ensemble_check needs samples >= 2");

  const int offdiag = n * (n - 1) / 2;
  struct Partial {
    std::vector<double> diag_sum, diag_sumsq;          // beta r_ii^2
    std::vector<double> od_re, od_re2, od_im, od_im2;  // off-diagonal parts
    std::vector<double> od_abs2, od_abs4;              // |r_jk|^2 moments
    double q2 = 0, q4 = 0;                             // |q_nn|^2 moments
    double r2 = 0, r4 = 0;                             // r_nn^2 moments
    double rq = 0;                                     // r_nn^2 |q_nn|^2
    std::uint64_t nonpositive = 0;
    void init(int n_, int od_) {
      diag_sum.assign(n_, 0);
      diag_sumsq.assign(n_, 0);
      od_re.assign(od_, 0);
      od_re2.assign(od_, 0);
      od_im.assign(od_, 0);
      od_im2.assign(od_, 0);
      od_abs2.assign(od_, 0);
      od_abs4.assign(od_, 0);
    }
  };

  constexpr std::uint64_t chunk = 4096;
  const std::uint64_t nchunks = (samples + chunk - 1) / chunk;
  std::vector<Partial> partials(nchunks);

  parallel_chunks(samples, chunk, [&](std::uint64_t ci, std::uint64_t lo, std::uint64_t hi) {
    Partial part;
    part.init(n, offdiag);
    Matrix g(n, n);
    for (std::uint64_t i = lo; i < hi; ++i) {
      Rng rng(seed, i);
      for (int col = 0; col < n; ++col)
        for (int row = 0; row < n; ++row)
          g(row, col) = beta == 1 ? Complex(rng.gaussian(), 0.0) : rng.gaussian_complex();
      Eigen::HouseholderQR<Matrix> qr(g);
      Matrix q = qr.householderQ() * Matrix::Identity(n, n);
      Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
      for (int k = 0; k < n; ++k) {
        const Complex rkk = r(k, k);
        const double mag = std::abs(rkk);
        if (mag == 0.0) {
          ++part.nonpositive;
          continue;
        }
        const Complex phase = rkk / mag;
        r.row(k) *= std::conj(phase);
        q.col(k) *= phase;
      }
      int idx = 0;
      for (int row = 0; row < n; ++row) {
        const double rii2 = beta * std::norm(r(row, row));
        part.diag_sum[row] += rii2;
        part.diag_sumsq[row] += rii2 * rii2;
        if (r(row, row).real() <= 0.0) ++part.nonpositive;
        for (int col = row + 1; col < n; ++col, ++idx) {
          const Complex v = r(row, col);
          const double abs2 = std::norm(v);
          part.od_re[idx] += v.real();
          part.od_re2[idx] += v.real() * v.real();
          part.od_im[idx] += v.imag();
          part.od_im2[idx] += v.imag() * v.imag();
          part.od_abs2[idx] += abs2;
          part.od_abs4[idx] += abs2 * abs2;
        }
      }
      const double q2 = std::norm(q(n - 1, n - 1));
      const double r2 = std::norm(r(n - 1, n - 1));
      part.q2 += q2;
      part.q4 += q2 * q2;
      part.r2 += r2;
      part.r4 += r2 * r2;
      part.rq += r2 * q2;
    }
    partials[ci] = std::move(part);
  });

  Partial total;
  total.init(n, offdiag);
  for (const Partial& part : partials) {
    for (int i = 0; i < n; ++i) {
      total.diag_sum[i] += part.diag_sum[i];
      total.diag_sumsq[i] += part.diag_sumsq[i];
    }
    for (int i = 0; i < offdiag; ++i) {
      total.od_re[i] += part.od_re[i];
      total.od_re2[i] += part.od_re2[i];
      total.od_im[i] += part.od_im[i];
      total.od_im2[i] += part.od_im2[i];
      total.od_abs2[i] += part.od_abs2[i];
      total.od_abs4[i] += part.od_abs4[i];
    }
    total.q2 += part.q2;
    total.q4 += part.q4;
    total.r2 += part.r2;
    total.r4 += part.r4;
    total.rq += part.rq;
    total.nonpositive += part.nonpositive;
  }

  const double m = static_cast<double>(samples);
  QrEnsembleCheck rep;
  rep.n = n;
  rep.beta = beta;
  rep.samples = samples;
  rep.seed = seed;
  rep.nonpositive_diag_count = total.nonpositive;

  rep.diag_ok = true;
  rep.diag_mean.resize(n);
  rep.diag_target.resize(n);
  rep.diag_stderr.resize(n);
  for (int i = 0; i < n; ++i) {
    const double mean = total.diag_sum[i] / m;
    const double var = std::max(0.0, total.diag_sumsq[i] / m - mean * mean);
    const double se = std::sqrt(var / m);
    rep.diag_mean[i] = mean;
    rep.diag_target[i] = static_cast<double>(beta) * (n - i);
    rep.diag_stderr[i] = se;
    if (std::abs(mean - rep.diag_target[i]) > 3.0 * se) rep.diag_ok = false;
  }

  rep.offdiag_ok = true;
  for (int i = 0; i < offdiag; ++i) {
    const double mre = total.od_re[i] / m;
    const double vre = std::max(1e-300, total.od_re2[i] / m - mre * mre);
    const double z_re = std::abs(mre) / std::sqrt(vre / m);
    rep.offdiag_worst_mean_z = std::max(rep.offdiag_worst_mean_z, z_re);
    if (beta == 2) {
      const double mim = total.od_im[i] / m;
      const double vim = std::max(1e-300, total.od_im2[i] / m - mim * mim);
      const double z_im = std::abs(mim) / std::sqrt(vim / m);
      rep.offdiag_worst_mean_z = std::max(rep.offdiag_worst_mean_z, z_im);
    }
    const double mabs2 = total.od_abs2[i] / m;
    const double vabs2 = std::max(1e-300, total.od_abs4[i] / m - mabs2 * mabs2);
    const double z_var = std::abs(mabs2 - 1.0) / std::sqrt(vabs2 / m);
    rep.offdiag_worst_var_z = std::max(rep.offdiag_worst_var_z, z_var);
  }
  if (rep.offdiag_worst_mean_z > 3.0 || rep.offdiag_worst_var_z > 3.0) rep.offdiag_ok = false;

  const double q2_mean = total.q2 / m;
  const double q2_var = std::max(0.0, total.q4 / m - q2_mean * q2_mean);
  rep.qcorner_mean = q2_mean;
  rep.qcorner_target = 1.0 / n;
  rep.qcorner_stderr = std::sqrt(q2_var / m);
  rep.qcorner_ok = std::abs(q2_mean - rep.qcorner_target) <= 3.0 * rep.qcorner_stderr;

  const double r2_mean = total.r2 / m;
  const double r2_var = std::max(1e-300, total.r4 / m - r2_mean * r2_mean);
  const double cov = total.rq / m - r2_mean * q2_mean;
  rep.corner_correlation = cov / std::sqrt(r2_var * std::max(1e-300, q2_var));
  rep.indep_ok = std::abs(rep.corner_correlation) <= 3.0 / std::sqrt(m);

  return rep;
}

RatioLawCheck sensitivity_vs_ratio_law(const SpectralData& s, const MatrixPolynomial& p,
                                       std::uint64_t samples, std::uint64_t seed) {
  if (samples < 1) throw ValidationError("sensitivity_vs_ratio_law needs samples >= 1");
  RatioLawCheck rep;
  const int ell = s.ell;
  for (std::uint64_t i = 0; i < samples; ++i) {
    const MatrixPolynomial e = sample_gaussian_perturbation(p.size(), p.grade(), s.beta, seed, i);
    const SensitivityReport direct = analyze_direction(s, p, e);
    if (direct.infinite) {
      ++rep.skipped_singular;
      continue;
    }
    const Matrix e_lam = e.evaluate(s.lambda);
    const Matrix g = s.X.adjoint() * e_lam * s.Y;
    double h_ll_abs;
    if (ell == 1) {
      const Complex g11 = g(0, 0);
      if (std::abs(g11) < 1e-14 * e_lam.norm()) {
        ++rep.skipped_singular;
        continue;
      }
      h_ll_abs = 1.0 / std::abs(g11);
    } else {
      if (std::abs(linalg::determinant(g)) < 1e-14 * std::pow(e_lam.norm(), ell)) {
        ++rep.skipped_singular;
        continue;
      }
      Vector rhs = Vector::Zero(ell);
      rhs(ell - 1) = Complex(1.0);
      const Vector x = Eigen::PartialPivLU<Matrix>(g).solve(rhs);
      h_ll_abs = std::abs(x(ell - 1));
    }
    const double via_inverse =
        1.0 / (h_ll_abs * std::abs(s.u_pprime_v) * e.coeff_norm());
    const double rel =
        std::abs(direct.sigma - via_inverse) / std::max(direct.sigma, via_inverse);
    rep.max_rel_discrepancy = std::max(rep.max_rel_discrepancy, rel);
    ++rep.checked;
  }
  rep.pass = rep.checked > 0 && rep.max_rel_discrepancy <= rep.tolerance;
  return rep;
}

}  // namespace weakcond
