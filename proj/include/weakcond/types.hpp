#pragma once

#include <complex>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace weakcond {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// Coefficient field of a matrix polynomial. Everything is stored in complex
/// arithmetic; the field tag drives validation and the beta parameter of the
/// perturbation laws.
enum class Field { Real, Complex };

inline int field_beta(Field f) { return f == Field::Real ? 1 : 2; }
inline const char* field_name(Field f) { return f == Field::Real ? "real" : "complex"; }

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Invalid arguments, malformed files, schema violations. CLI exit code 1.
struct ValidationError : Error {
  using Error::Error;
};

/// Tolerance pathologies and solver failures. CLI exit code 2.
struct NumericalError : Error {
  using Error::Error;
};

}  // namespace weakcond
