#pragma once

#include <string>

#include <json.hpp>

#include "weakcond/condition.hpp"
#include "weakcond/montecarlo.hpp"
#include "weakcond/polymat.hpp"

namespace weakcond::io {

/// Matrix polynomial JSON schema:
///   {"field": "real"|"complex", "n": int, "degree": int,
///    "coefficients": [M_0, ..., M_degree]}
/// where each M_j is an array of n rows of n entries; an entry is a number or
/// a two-element array [re, im] (the writer emits numbers for real input and
/// [re, im] pairs for complex input).
MatrixPolynomial polynomial_from_json(const nlohmann::json& j);
MatrixPolynomial read_polynomial(const std::string& path);
nlohmann::json to_json(const MatrixPolynomial& p);

/// Non-finite doubles use explicit sentinels: "infinity" for an infinite
/// value, null for not-applicable.
nlohmann::json encode_double(double x);
double decode_double(const nlohmann::json& j);

nlohmann::json to_json(const ConditionReport& rep);
ConditionReport condition_report_from_json(const nlohmann::json& j);
nlohmann::json to_json(const WeakConditionEstimate& est);
nlohmann::json to_json(const QrEnsembleCheck& rep);
nlohmann::json to_json(const RatioLawCheck& rep);
nlohmann::json to_json(const TailCurve& curve);

/// CSV with header t,p_exact,p_bound,p_empirical,stderr; absent columns and
/// NaN entries are left empty; values carry 17 significant digits.
std::string to_csv(const TailCurve& curve);

std::string format_double(double x);  // %.17g

/// Write via a temporary file in the same directory plus rename.
void write_file_atomic(const std::string& path, const std::string& content);

}  // namespace weakcond::io
