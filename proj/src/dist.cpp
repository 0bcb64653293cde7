#include "weakcond/dist.hpp"

#include <algorithm>
#include <cmath>

namespace weakcond {

namespace special {

double log_beta(double a, double b) {
  return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz iteration).
double inc_beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-16;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= 400; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) return h;
  }
  throw NumericalError("incomplete beta continued fraction did not converge");
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0)) throw ValidationError("reg_inc_beta needs a, b > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double front = std::exp(a * std::log(x) + b * std::log1p(-x) - log_beta(a, b));
  if (x < (a + 1.0) / (a + b + 2.0)) return front * inc_beta_cf(a, b, x) / a;
  return 1.0 - std::exp(b * std::log1p(-x) + a * std::log(x) - log_beta(a, b)) *
                   inc_beta_cf(b, a, 1.0 - x) / b;
}

}  // namespace special

namespace {

void validate_law(const SigmaLaw& law) {
  if (law.beta != 1 && law.beta != 2) throw ValidationError("sigma law needs beta in {1, 2}");
  if (law.N < 2) throw ValidationError("sigma law needs N >= 2");
  if (law.ell < 1) throw ValidationError("sigma law needs ell >= 1");
  if (!(law.gamma > 0.0)) throw ValidationError("sigma law needs gamma > 0");
}

constexpr double kQuadTol = 1e-11;

// Survival function of Z_N ~ Beta(aN, bN).
double survival(double a, double b, double y) {
  if (y <= 0.0) return 1.0;
  if (y >= 1.0) return 0.0;
  return 1.0 - special::reg_inc_beta(a, b, y);
}

}  // namespace

double beta_ratio_moment(double a, double b, double c, double d, double k) {
  if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0) || !(k > 0))
    throw ValidationError("beta_ratio_moment needs positive parameters");
  if (c * k <= 1.0) return kInf;
  const double log_num = special::log_beta(a + 1.0 / k, b) + special::log_beta(c - 1.0 / k, d);
  const double log_den = special::log_beta(a, b) + special::log_beta(c, d);
  return std::exp(log_num - log_den);
}

double beta_ratio_tail_bound(double a, double b, double c, double d, double k, double t) {
  if (!(a > 0) || !(b > 0) || !(c > 0) || !(d > 0) || !(k > 0) || !(t > 0))
    throw ValidationError("beta_ratio_tail_bound needs positive parameters");
  double bound;
  if (t <= 1.0) {
    bound = 1.0 - std::pow(t, a * k) *
                      std::exp(special::log_beta(a + c, d) - special::log_beta(c, d));
  } else {
    bound = std::pow(t, -c * k) *
            std::exp(special::log_beta(a + c, b) - special::log_beta(a, b) -
                     special::log_beta(c, d)) /
            c;
  }
  return std::clamp(bound, 0.0, 1.0);
}

double sigma_tail_exact(const SigmaLaw& law, double t) {
  validate_law(law);
  if (!(t >= 0.0)) throw ValidationError("sigma_tail_exact needs t >= 0");
  if (t == 0.0) return 1.0;

  const double gt = law.gamma * t;
  const double s = gt * gt;
  const double a_n = 0.5 * law.beta;
  const double b_n = 0.5 * law.beta * (law.N - 1);

  if (law.ell == 1) return survival(a_n, b_n, s);

  const double a_l = 0.5 * law.beta;
  const double b_l = 0.5 * law.beta * (law.ell - 1);
  const double log_b = special::log_beta(a_l, b_l);
  const double zmax = std::min(1.0, 1.0 / s);
  if (zmax < 1e-300) return 0.0;
  const double zmid = 0.5 * zmax;

  // Lower half with z = w^2 removes the z^(a_l - 1) endpoint singularity.
  const auto lower = [&](double w) {
    const double z = w * w;
    return 2.0 * survival(a_n, b_n, s * z) *
           std::exp(-log_b) * std::pow(w, 2.0 * a_l - 1.0) * std::pow(1.0 - z, b_l - 1.0);
  };
  double total = special::integrate(lower, 0.0, std::sqrt(zmid), 0.5 * kQuadTol);

  if (zmax == 1.0) {
    // Upper half with 1 - z = w^2 removes the (1-z)^(b_l - 1) singularity.
    const auto upper = [&](double w) {
      const double z = 1.0 - w * w;
      return 2.0 * survival(a_n, b_n, s * z) *
             std::exp(-log_b) * std::pow(z, a_l - 1.0) * std::pow(w, 2.0 * b_l - 1.0);
    };
    total += special::integrate(upper, 0.0, std::sqrt(1.0 - zmid), 0.5 * kQuadTol);
  } else {
    const auto direct = [&](double z) {
      return survival(a_n, b_n, s * z) *
             std::exp(-log_b) * std::pow(z, a_l - 1.0) * std::pow(1.0 - z, b_l - 1.0);
    };
    total += special::integrate(direct, zmid, zmax, 0.5 * kQuadTol);
  }
  return std::clamp(total, 0.0, 1.0);
}

double sigma_tail_bound(const SigmaLaw& law, double t) {
  validate_law(law);
  if (law.ell < 2)
    throw ValidationError("sigma_tail_bound applies to singular laws (ell >= 2); "
                          "use regular_concentration_bound for ell == 1");
  if (!(t >= (1.0 - 1e-12) / law.gamma))
    throw ValidationError("sigma_tail_bound is only asserted for t >= 1/gamma");
  const int corank = law.ell - 1;
  if (law.beta == 2) {
    return static_cast<double>(corank) / (law.N * law.gamma * law.gamma * t * t);
  }
  const double log_ratio = std::lgamma(0.5 * law.N) + std::lgamma(0.5 * (corank + 1)) -
                           std::lgamma(0.5 * (law.N + 1)) - std::lgamma(0.5 * corank);
  return (2.0 / M_PI) * std::exp(log_ratio) / (law.gamma * t);
}

double expected_sensitivity(const SigmaLaw& law) {
  validate_law(law);
  if (law.beta == 1) {
    if (law.ell >= 2) return kInf;
    return std::exp(std::lgamma(0.5 * law.N) - std::lgamma(0.5 * (law.N + 1))) /
           (law.gamma * std::sqrt(M_PI));
  }
  const double log_ratio = std::lgamma(static_cast<double>(law.N)) +
                           std::lgamma(static_cast<double>(law.ell)) -
                           std::lgamma(law.N + 0.5) - std::lgamma(law.ell - 0.5);
  return 0.5 * M_PI * std::exp(log_ratio) / law.gamma;
}

double expected_log_bound(const SigmaLaw& law) {
  validate_law(law);
  if (law.beta != 1 || law.ell < 2)
    throw ValidationError("expected_log_bound applies to real singular laws (beta == 1, ell >= 2)");
  const double corank = law.ell - 1;
  return std::log((2.0 / M_PI) * std::sqrt(corank / (law.N - 1.0)) / law.gamma) + 1.0;
}

double regular_concentration_bound(const SigmaLaw& law, double t) {
  validate_law(law);
  if (law.ell != 1)
    throw ValidationError("regular_concentration_bound applies to regular laws (ell == 1)");
  if (!(t >= 0.0) || !(t <= (1.0 + 1e-12) / law.gamma))
    throw ValidationError("regular_concentration_bound is only asserted for 0 <= t <= 1/gamma");
  const double gt = law.gamma * t;
  return std::exp(-0.5 * law.beta * (law.N - 1) * gt * gt);
}

}  // namespace weakcond
