#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <thread>
#include <vector>

#include "weakcond/dist.hpp"
#include "weakcond/polymat.hpp"
#include "weakcond/sensitivity.hpp"
#include "weakcond/spectral.hpp"

namespace weakcond {

/// Worker cap: WEAKCOND_THREADS environment variable when set, hardware
/// concurrency otherwise, at least 1.
int worker_count();

/// Deterministic parallel driver: chunks [0, total) into contiguous ranges
/// and calls fn(chunk_index, begin, end) from a worker pool. Partial results
/// must be written into per-chunk slots; folding them in chunk order makes
/// the outcome independent of the number of workers.
template <class Fn>
void parallel_chunks(std::uint64_t total, std::uint64_t chunk_size, Fn&& fn) {
  if (total == 0) return;
  const std::uint64_t nchunks = (total + chunk_size - 1) / chunk_size;
  const int workers =
      static_cast<int>(std::min<std::uint64_t>(static_cast<std::uint64_t>(worker_count()), nchunks));
  if (workers <= 1) {
    for (std::uint64_t ci = 0; ci < nchunks; ++ci)
      fn(ci, ci * chunk_size, std::min(total, (ci + 1) * chunk_size));
    return;
  }
  std::atomic<std::uint64_t> next{0};
  auto run = [&]() {
    for (;;) {
      const std::uint64_t ci = next.fetch_add(1);
      if (ci >= nchunks) return;
      fn(ci, ci * chunk_size, std::min(total, (ci + 1) * chunk_size));
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(workers));
  for (int w = 0; w < workers; ++w) pool.emplace_back(run);
  for (auto& th : pool) th.join();
}

/// Uniform perturbation direction on the coefficient sphere: Gaussian fill of
/// all n^2 (d+1) coefficients (real for beta == 1, complex for beta == 2)
/// normalized to coeff_norm == 1. Pure function of (n, d, beta, seed, stream).
MatrixPolynomial sample_uniform_perturbation(int n, int d, int beta, std::uint64_t seed,
                                             std::uint64_t stream = 0);

/// Same Gaussian fill without the normalization.
MatrixPolynomial sample_gaussian_perturbation(int n, int d, int beta, std::uint64_t seed,
                                              std::uint64_t stream = 0);

/// Tail data on a grid of thresholds: exact and bound columns from the law
/// (NaN where a column does not apply), optional empirical column with
/// binomial standard errors.
struct TailCurve {
  std::vector<double> grid;
  std::vector<double> exact;
  std::vector<double> bound;
  std::vector<double> empirical;
  std::vector<double> stderr_;
  SigmaLaw law;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::uint64_t infinite_count = 0;
};

/// Exact and bound columns only.
TailCurve theoretical_tail(const SigmaLaw& law, const std::vector<double>& grid);

/// Draws `samples` uniform perturbations, evaluates sigma_E for each and
/// fills the empirical survival function; infinite draws count in every bin
/// and are reported. Parallel over samples with per-sample streams.
TailCurve empirical_tail(const SpectralData& s, const MatrixPolynomial& p, const SigmaLaw& law,
                         const std::vector<double>& grid, std::uint64_t samples,
                         std::uint64_t seed);

/// Moment checks for the QR factors of Gaussian matrices with the positive
/// diagonal convention: chi-square diagonal law, Gaussian strict upper
/// triangle, uniform last column of Q, and an independence proxy between
/// r_nn^2 and |q_nn|^2.
struct QrEnsembleCheck {
  int n = 0;
  int beta = 1;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  std::vector<double> diag_mean;     // mean of beta r_ii^2 per i
  std::vector<double> diag_target;   // beta (n - i + 1)
  std::vector<double> diag_stderr;
  bool diag_ok = false;
  double offdiag_worst_mean_z = 0.0;  // worst |mean| / stderr over entries and parts
  double offdiag_worst_var_z = 0.0;   // worst |variance - 1| / stderr
  bool offdiag_ok = false;
  double qcorner_mean = 0.0;
  double qcorner_target = 0.0;
  double qcorner_stderr = 0.0;
  bool qcorner_ok = false;
  double corner_correlation = 0.0;
  bool indep_ok = false;
  std::uint64_t nonpositive_diag_count = 0;

  bool all_ok() const {
    return diag_ok && offdiag_ok && qcorner_ok && indep_ok && nonpositive_diag_count == 0;
  }
};

QrEnsembleCheck qr_ensemble_check(int n, int beta, std::uint64_t samples, std::uint64_t seed);

/// Per-sample equality of the determinant formula for sigma_E and the
/// inverse-corner expression 1 / (|h_ll| |u^* P'(lambda) v| ||E||) with
/// h_ll the last diagonal entry of (X^* E(lambda) Y)^(-1).
struct RatioLawCheck {
  std::uint64_t checked = 0;
  std::uint64_t skipped_singular = 0;
  double max_rel_discrepancy = 0.0;
  double tolerance = 1e-10;
  bool pass = false;
};

RatioLawCheck sensitivity_vs_ratio_law(const SpectralData& s, const MatrixPolynomial& p,
                                       std::uint64_t samples, std::uint64_t seed);

}  // namespace weakcond
