#include "weakcond/io.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace weakcond::io {

using nlohmann::json;

namespace {

Complex entry_from_json(const json& j, const std::string& where) {
  if (j.is_number()) return Complex(j.get<double>(), 0.0);
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return Complex(j[0].get<double>(), j[1].get<double>());
  throw ValidationError("entry at " + where + " must be a number or a [re, im] pair");
}

}  // namespace

MatrixPolynomial polynomial_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("polynomial document must be a JSON object");
  for (const char* key : {"field", "n", "degree", "coefficients"})
    if (!j.contains(key)) throw ValidationError(std::string("polynomial document misses key \"") + key + "\"");

  const auto& field_j = j.at("field");
  if (!field_j.is_string() || (field_j != "real" && field_j != "complex"))
    throw ValidationError("\"field\" must be \"real\" or \"complex\"");
  const Field field = field_j == "real" ? Field::Real : Field::Complex;

  if (!j.at("n").is_number_integer() || j.at("n").get<int>() < 1)
    throw ValidationError("\"n\" must be a positive integer");
  if (!j.at("degree").is_number_integer() || j.at("degree").get<int>() < 1)
    throw ValidationError("\"degree\" must be a positive integer");
  const int n = j.at("n").get<int>();
  const int degree = j.at("degree").get<int>();

  const auto& coeffs_j = j.at("coefficients");
  if (!coeffs_j.is_array() || static_cast<int>(coeffs_j.size()) != degree + 1)
    throw ValidationError("\"coefficients\" must be an array of degree + 1 matrices");

  std::vector<Matrix> coeffs;
  coeffs.reserve(static_cast<std::size_t>(degree) + 1);
  for (int k = 0; k <= degree; ++k) {
    const auto& mat_j = coeffs_j[static_cast<std::size_t>(k)];
    if (!mat_j.is_array() || static_cast<int>(mat_j.size()) != n)
      throw ValidationError("coefficient " + std::to_string(k) + " must be an array of n rows");
    Matrix m(n, n);
    for (int row = 0; row < n; ++row) {
      const auto& row_j = mat_j[static_cast<std::size_t>(row)];
      if (!row_j.is_array() || static_cast<int>(row_j.size()) != n)
        throw ValidationError("coefficient " + std::to_string(k) + ", row " + std::to_string(row) +
                              " must have n entries");
      for (int col = 0; col < n; ++col) {
        const std::string where = "coefficients[" + std::to_string(k) + "][" +
                                  std::to_string(row) + "][" + std::to_string(col) + "]";
        const Complex value = entry_from_json(row_j[static_cast<std::size_t>(col)], where);
        if (!std::isfinite(value.real()) || !std::isfinite(value.imag()))
          throw ValidationError("entry at " + where + " must be finite");
        if (field == Field::Real && value.imag() != 0.0)
          throw ValidationError("entry at " + where + " has nonzero imaginary part in a real polynomial");
        m(row, col) = value;
      }
    }
    coeffs.push_back(std::move(m));
  }
  return MatrixPolynomial(field, std::move(coeffs));
}

MatrixPolynomial read_polynomial(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open input file: " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ValidationError("JSON parse error in " + path + ": " + e.what());
  }
  return polynomial_from_json(j);
}

json to_json(const MatrixPolynomial& p) {
  json coeffs = json::array();
  for (int k = 0; k <= p.grade(); ++k) {
    json mat = json::array();
    for (int row = 0; row < p.size(); ++row) {
      json row_j = json::array();
      for (int col = 0; col < p.size(); ++col) {
        const Complex v = p.coeff(k)(row, col);
        if (p.field() == Field::Real)
          row_j.push_back(v.real());
        else
          row_j.push_back(json::array({v.real(), v.imag()}));
      }
      mat.push_back(std::move(row_j));
    }
    coeffs.push_back(std::move(mat));
  }
  return json{{"field", field_name(p.field())},
              {"n", p.size()},
              {"degree", p.grade()},
              {"coefficients", std::move(coeffs)}};
}

json encode_double(double x) {
  if (std::isnan(x)) return nullptr;
  if (std::isinf(x)) return x > 0 ? "infinity" : "-infinity";
  return x;
}

double decode_double(const json& j) {
  if (j.is_null()) return kNaN;
  if (j.is_string()) {
    if (j == "infinity") return kInf;
    if (j == "-infinity") return -kInf;
    throw ValidationError("unexpected string where a number was expected: " + j.dump());
  }
  if (j.is_number()) return j.get<double>();
  throw ValidationError("expected a number, null, or \"infinity\"");
}

json to_json(const ConditionReport& rep) {
  return json{{"beta", rep.beta},
              {"N", rep.N},
              {"ell", rep.ell},
              {"gamma", encode_double(rep.gamma)},
              {"gamma_inv", encode_double(1.0 / rep.gamma)},
              {"delta", rep.delta},
              {"regular", rep.regular},
              {"kappa", encode_double(rep.kappa)},
              {"kappa_s", encode_double(rep.kappa_s)},
              {"kappa_w", encode_double(rep.kappa_w)},
              {"kappa_w_bound", encode_double(rep.kappa_w_bound)},
              {"kappa_ws_bound", encode_double(rep.kappa_ws_bound)}};
}

ConditionReport condition_report_from_json(const json& j) {
  ConditionReport rep;
  rep.beta = j.at("beta").get<int>();
  rep.N = j.at("N").get<int>();
  rep.ell = j.at("ell").get<int>();
  rep.gamma = decode_double(j.at("gamma"));
  rep.delta = decode_double(j.at("delta"));
  rep.regular = j.at("regular").get<bool>();
  rep.kappa = decode_double(j.at("kappa"));
  rep.kappa_s = decode_double(j.at("kappa_s"));
  rep.kappa_w = decode_double(j.at("kappa_w"));
  rep.kappa_w_bound = decode_double(j.at("kappa_w_bound"));
  rep.kappa_ws_bound = decode_double(j.at("kappa_ws_bound"));
  return rep;
}

json to_json(const WeakConditionEstimate& est) {
  return json{{"beta", est.beta},
              {"N", est.N},
              {"ell", est.ell},
              {"delta", est.delta},
              {"eta", est.eta},
              {"gamma_bar", encode_double(est.gamma_bar)},
              {"kappa_bar", encode_double(est.kappa_bar)},
              {"kappa_s_bar", encode_double(est.kappa_s_bar)},
              {"kappa_w_bound", encode_double(est.kappa_w_bound)},
              {"confidence", encode_double(est.confidence)}};
}

json to_json(const QrEnsembleCheck& rep) {
  return json{{"n", rep.n},
              {"beta", rep.beta},
              {"samples", rep.samples},
              {"seed", rep.seed},
              {"diag_mean", rep.diag_mean},
              {"diag_target", rep.diag_target},
              {"diag_stderr", rep.diag_stderr},
              {"diag_ok", rep.diag_ok},
              {"offdiag_worst_mean_z", rep.offdiag_worst_mean_z},
              {"offdiag_worst_var_z", rep.offdiag_worst_var_z},
              {"offdiag_ok", rep.offdiag_ok},
              {"qcorner_mean", rep.qcorner_mean},
              {"qcorner_target", rep.qcorner_target},
              {"qcorner_stderr", rep.qcorner_stderr},
              {"qcorner_ok", rep.qcorner_ok},
              {"corner_correlation", rep.corner_correlation},
              {"indep_ok", rep.indep_ok},
              {"nonpositive_diag_count", rep.nonpositive_diag_count},
              {"all_ok", rep.all_ok()}};
}

json to_json(const RatioLawCheck& rep) {
  return json{{"checked", rep.checked},
              {"skipped_singular", rep.skipped_singular},
              {"max_rel_discrepancy", rep.max_rel_discrepancy},
              {"tolerance", rep.tolerance},
              {"pass", rep.pass}};
}

json to_json(const TailCurve& curve) {
  auto column = [](const std::vector<double>& v) {
    json arr = json::array();
    for (double x : v) arr.push_back(encode_double(x));
    return arr;
  };
  return json{{"grid", column(curve.grid)},
              {"exact", column(curve.exact)},
              {"bound", column(curve.bound)},
              {"empirical", column(curve.empirical)},
              {"stderr", column(curve.stderr_)},
              {"samples", curve.samples},
              {"seed", curve.seed},
              {"infinite_samples", curve.infinite_count},
              {"law", json{{"beta", curve.law.beta},
                           {"N", curve.law.N},
                           {"ell", curve.law.ell},
                           {"gamma", curve.law.gamma}}}};
}

std::string format_double(double x) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::string to_csv(const TailCurve& curve) {
  std::ostringstream out;
  out << "t,p_exact,p_bound,p_empirical,stderr\n";
  auto cell = [&](const std::vector<double>& column, std::size_t i) -> std::string {
    if (column.size() != curve.grid.size()) return "";
    if (std::isnan(column[i])) return "";
    return format_double(column[i]);
  };
  for (std::size_t i = 0; i < curve.grid.size(); ++i) {
    out << format_double(curve.grid[i]) << ',' << cell(curve.exact, i) << ','
        << cell(curve.bound, i) << ',' << cell(curve.empirical, i) << ','
        << cell(curve.stderr_, i) << '\n';
  }
  return out.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw ValidationError("cannot open output file for writing: " + tmp);
    out << content;
    out.flush();
    if (!out) throw ValidationError("write failed: " + tmp);
  }
  if (std::rename(tmp.c_str(), path.c_str()) != 0) {
    std::remove(tmp.c_str());
    throw ValidationError("cannot rename temporary output into place: " + path);
  }
}

}  // namespace weakcond::io
