#include <doctest.h>

#include <cstdlib>
#include <fstream>
#include <sstream>

#include "fixtures.hpp"
#include "weakcond/condition.hpp"
#include "weakcond/io.hpp"
#include "weakcond/montecarlo.hpp"

using namespace weakcond;
using namespace weakcond::testing;
using nlohmann::json;

namespace {

bool polynomials_equal(const MatrixPolynomial& a, const MatrixPolynomial& b) {
  if (a.field() != b.field() || a.size() != b.size() || a.grade() != b.grade()) return false;
  for (int j = 0; j <= a.grade(); ++j)
    if ((a.coeff(j) - b.coeff(j)).norm() != 0.0) return false;
  return true;
}

}  // namespace

TEST_CASE("polynomial JSON: round trip is exact for both fields") {
  const MatrixPolynomial real_poly = random_polynomial(3, 2, Field::Real, 808);
  CHECK(polynomials_equal(real_poly, io::polynomial_from_json(io::to_json(real_poly))));

  const MatrixPolynomial complex_poly = random_polynomial(2, 3, Field::Complex, 809);
  CHECK(polynomials_equal(complex_poly, io::polynomial_from_json(io::to_json(complex_poly))));
}

TEST_CASE("polynomial JSON: schema violations are rejected with context") {
  json good = io::to_json(demo_pencil());

  json j = good;
  j.erase("degree");
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["field"] = "rational";
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["coefficients"].erase(1);
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["coefficients"][0][1].erase(2);
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["coefficients"][0][1][2] = json::array({1.0, 2.0, 3.0});
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["coefficients"][0][1][2] = json::array({1.0, 0.5});  // imaginary part in a real polynomial
  CHECK_THROWS_AS(io::polynomial_from_json(j), ValidationError);

  j = good;
  j["field"] = "complex";
  j["coefficients"][0][1][2] = json::array({1.0, 0.5});
  CHECK_NOTHROW(io::polynomial_from_json(j));
}

TEST_CASE("condition report JSON: infinity sentinels survive the round trip") {
  const SigmaLaw law{1, 32, 2, 0.08223379918968994};
  const ConditionReport rep = condition_report(law, 0.01);
  const json j = io::to_json(rep);
  CHECK(j.at("kappa") == "infinity");
  CHECK(j.at("kappa_s") == "infinity");
  const ConditionReport back = io::condition_report_from_json(j);
  CHECK(std::isinf(back.kappa));
  CHECK(std::isinf(back.kappa_s));
  CHECK(back.kappa_w == rep.kappa_w);
  CHECK(back.kappa_w_bound == rep.kappa_w_bound);
  CHECK(back.kappa_ws_bound == rep.kappa_ws_bound);
  CHECK(back.delta == rep.delta);

  const SigmaLaw regular{2, 18, 1, 1.0};
  const ConditionReport rep2 = condition_report(regular, 0.25);
  const json j2 = io::to_json(rep2);
  CHECK(j2.at("kappa_ws_bound").is_null());
  CHECK(std::isnan(io::condition_report_from_json(j2).kappa_ws_bound));
}

TEST_CASE("tail curve CSV: header, empty columns, and 17-digit round trip") {
  const SigmaLaw law{1, 32, 2, 0.08223379918968994};
  const TailCurve curve = theoretical_tail(law, {10.0, 12.0, 15.0, 40.0});
  const std::string csv = io::to_csv(curve);
  std::istringstream lines(csv);
  std::string line;
  REQUIRE(std::getline(lines, line));
  CHECK(line == "t,p_exact,p_bound,p_empirical,stderr");
  int rows = 0;
  while (std::getline(lines, line)) {
    ++rows;
    // last two columns stay empty without sampling
    CHECK(line.substr(line.size() - 2) == ",,");
    const std::size_t first_comma = line.find(',');
    const double t_back = std::strtod(line.substr(0, first_comma).c_str(), nullptr);
    CHECK(t_back == curve.grid[static_cast<std::size_t>(rows - 1)]);
    const std::size_t second_comma = line.find(',', first_comma + 1);
    const double exact_back =
        std::strtod(line.substr(first_comma + 1, second_comma - first_comma - 1).c_str(), nullptr);
    CHECK(exact_back == curve.exact[static_cast<std::size_t>(rows - 1)]);
  }
  CHECK(rows == 4);

  // Bound entries below 1/gamma are not asserted and stay empty.
  std::istringstream again(csv);
  std::getline(again, line);                      // header
  std::getline(again, line);                      // t = 10 < 1/gamma
  const std::size_t c1 = line.find(',');
  const std::size_t c2 = line.find(',', c1 + 1);
  const std::size_t c3 = line.find(',', c2 + 1);
  CHECK(c3 == c2 + 1);
}

TEST_CASE("tail curve JSON carries law context and sampling metadata") {
  const MatrixPolynomial l = demo_pencil();
  const SpectralData s = spectral_data(l, Complex(1));
  const SigmaLaw law = sigma_law(s, l.grade());
  const TailCurve curve = empirical_tail(s, l, law, {5.0, 20.0, 80.0}, 2000, 99);
  const json j = io::to_json(curve);
  CHECK(j.at("samples") == 2000);
  CHECK(j.at("seed") == 99);
  CHECK(j.at("law").at("N") == 32);
  CHECK(j.at("empirical").size() == 3);
}

TEST_CASE("write_file_atomic: writes content and surfaces failures with the path") {
  const std::string path = "/tmp/weakcond_io_test.csv";
  io::write_file_atomic(path, "a,b\n1,2\n");
  std::ifstream in(path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  CHECK(buffer.str() == "a,b\n1,2\n");
  std::remove(path.c_str());

  CHECK_THROWS_WITH_AS(io::write_file_atomic("/nonexistent-dir/out.csv", "x"),
                       doctest::Contains("/nonexistent-dir/out.csv"), ValidationError);
}

TEST_CASE("read_polynomial: file errors are validation errors") {
  CHECK_THROWS_AS(io::read_polynomial("/tmp/weakcond_does_not_exist.json"), ValidationError);
  const std::string path = "/tmp/weakcond_bad.json";
  io::write_file_atomic(path, "{ not json");
  CHECK_THROWS_AS(io::read_polynomial(path), ValidationError);
  std::remove(path.c_str());
}
