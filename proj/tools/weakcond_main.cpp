// weakcond: directional sensitivity and weak condition numbers of simple
// eigenvalues of (possibly singular) matrix polynomials.

#include <algorithm>
#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "weakcond/condition.hpp"
#include "weakcond/io.hpp"
#include "weakcond/montecarlo.hpp"

namespace {

using namespace weakcond;
using nlohmann::json;

// Built-in demonstration fixture: a singular 4x4 real pencil whose only
// finite eigenvalue is 1 (simple), with normal rank 3.
MatrixPolynomial demo_pencil() {
  Matrix c0(4, 4), c1(4, 4);
  c0 << 2, -1, -5, -1,
        6, -2, -11, -2,
        5, 0, -2, 0,
        3, 1, 3, 1;
  c1 << -1, 1, 4, 2,
        -2, 3, 12, 6,
        1, 3, 11, 6,
        2, 2, 7, 4;
  return MatrixPolynomial(Field::Real, {c0, c1});
}

struct CommonOptions {
  std::string input;
  bool use_demo = false;
  std::string lambda_text;
  double delta = 0.01;
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double eta = 1.0;
  std::string grid_text;
  std::string output;
  std::string format;
};

Complex parse_lambda(const std::string& text) {
  try {
    std::size_t used = 0;
    const double re = std::stod(text, &used);
    if (used == text.size()) return Complex(re, 0.0);
    if (text[used] != ',') throw ValidationError("--lambda expects RE or RE,IM");
    std::size_t used2 = 0;
    const std::string rest = text.substr(used + 1);
    const double im = std::stod(rest, &used2);
    if (used2 != rest.size()) throw ValidationError("--lambda expects RE or RE,IM");
    return Complex(re, im);
  } catch (const std::invalid_argument&) {
    throw ValidationError("--lambda expects RE or RE,IM");
  } catch (const std::out_of_range&) {
    throw ValidationError("--lambda value out of range");
  }
}

std::vector<double> parse_grid(const std::string& text) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= text.size()) {
    const std::size_t pos = text.find(':', start);
    if (pos == std::string::npos) {
      parts.push_back(text.substr(start));
      break;
    }
    parts.push_back(text.substr(start, pos - start));
    start = pos + 1;
  }
  if (parts.size() != 3 && parts.size() != 4)
    throw ValidationError("--grid expects MIN:MAX:POINTS[:log]");
  bool log_spacing = false;
  if (parts.size() == 4) {
    if (parts[3] == "log")
      log_spacing = true;
    else if (parts[3] != "linear")
      throw ValidationError("--grid spacing must be \"log\" or \"linear\"");
  }
  double lo, hi;
  long points;
  try {
    lo = std::stod(parts[0]);
    hi = std::stod(parts[1]);
    points = std::stol(parts[2]);
  } catch (const std::exception&) {
    throw ValidationError("--grid expects numeric MIN:MAX:POINTS[:log]");
  }
  if (points < 1) throw ValidationError("--grid needs at least one point");
  if (points > 1 && !(hi > lo)) throw ValidationError("--grid needs MAX > MIN");
  if (log_spacing && !(lo > 0)) throw ValidationError("log grid needs MIN > 0");
  std::vector<double> grid(static_cast<std::size_t>(points));
  if (points == 1) {
    grid[0] = lo;
    return grid;
  }
  for (long i = 0; i < points; ++i) {
    const double f = static_cast<double>(i) / static_cast<double>(points - 1);
    grid[static_cast<std::size_t>(i)] =
        log_spacing ? lo * std::pow(hi / lo, f) : lo + (hi - lo) * f;
  }
  return grid;
}

MatrixPolynomial load_input(const CommonOptions& opt) {
  if (opt.use_demo) return demo_pencil();
  if (opt.input.empty()) throw ValidationError("no input: pass --input FILE or --demo");
  return io::read_polynomial(opt.input);
}

struct Candidate {
  Complex lambda;
  double stability = kInf;
};

// Stability of each computed eigenvalue under two tiny random perturbation
// reruns; genuine simple eigenvalues move O(eps) while the spurious values of
// a singular input move freely.
std::vector<Candidate> eigenvalue_candidates(const MatrixPolynomial& p) {
  const std::vector<Complex> base = all_eigenvalues(p);
  const double scale = 1e-11 * p.coeff_norm();
  std::vector<std::vector<Complex>> reruns;
  for (std::uint64_t k = 1; k <= 2; ++k) {
    const MatrixPolynomial e = sample_uniform_perturbation(
        p.size(), p.grade(), field_beta(p.field()), 0xA11CE5EEDULL, k);
    reruns.push_back(all_eigenvalues(add_scaled(p, scale, e)));
  }
  std::vector<Candidate> out;
  for (const Complex& lam : base) {
    double worst = 0.0;
    for (const auto& rerun : reruns) {
      double best = kInf;
      for (const Complex& mu : rerun) best = std::min(best, std::abs(lam - mu));
      worst = std::max(worst, best);
    }
    out.push_back({lam, worst});
  }
  std::sort(out.begin(), out.end(),
            [](const Candidate& a, const Candidate& b) { return a.stability < b.stability; });
  return out;
}

json candidates_json(const std::vector<Candidate>& candidates) {
  json arr = json::array();
  for (const Candidate& c : candidates)
    arr.push_back(json{{"lambda", {c.lambda.real(), c.lambda.imag()}},
                       {"stability", io::encode_double(c.stability)}});
  return arr;
}

// User-supplied eigenvalue, or the unique re-perturbation-stable candidate.
// On ambiguity or failure the candidate list goes to stdout and a
// NumericalError is thrown (exit code 2).
Complex identify_lambda(const MatrixPolynomial& p, const CommonOptions& opt, json* extra) {
  if (!opt.lambda_text.empty()) {
    (*extra)["eigenvalue_source"] = "given";
    return parse_lambda(opt.lambda_text);
  }
  const auto candidates = eigenvalue_candidates(p);
  (*extra)["eigenvalue_source"] = "auto (re-perturbation heuristic)";
  (*extra)["candidates"] = candidates_json(candidates);
  std::vector<Candidate> stable;
  for (const Candidate& c : candidates)
    if (c.stability <= 1e-7 * (1.0 + std::abs(c.lambda))) stable.push_back(c);
  if (stable.size() == 1) return stable.front().lambda;
  json failure = *extra;
  failure["error"] = stable.empty()
                         ? "eigenvalue identification failed: no computed eigenvalue is stable "
                           "under re-perturbation; pass --lambda"
                         : "eigenvalue identification ambiguous: several stable eigenvalues; "
                           "pass --lambda";
  std::cout << failure.dump(2) << std::endl;
  throw NumericalError(failure["error"].get<std::string>());
}

void emit(const std::string& content, const std::string& output_path) {
  if (output_path.empty()) {
    std::cout << content;
    if (!content.empty() && content.back() != '\n') std::cout << '\n';
  } else {
    io::write_file_atomic(output_path, content);
  }
}

void check_format(const std::string& format, std::initializer_list<const char*> allowed) {
  if (format.empty()) return;
  for (const char* a : allowed)
    if (format == a) return;
  throw ValidationError("unsupported --format \"" + format + "\" for this command");
}

void check_delta(double delta) {
  if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("--delta must lie in (0, 1)");
}

int run_analyze(const CommonOptions& opt) {
  check_format(opt.format, {"json"});
  check_delta(opt.delta);
  const MatrixPolynomial p = load_input(opt);
  json out{{"n", p.size()}, {"degree", p.grade()}, {"field", field_name(p.field())}};
  const Complex lambda = identify_lambda(p, opt, &out);
  const SpectralData s = spectral_data(p, lambda);
  const SigmaLaw law = sigma_law(s, p.grade());
  const ConditionReport rep = condition_report(law, opt.delta);
  out["normal_rank"] = s.r;
  out["lambda"] = {s.lambda.real(), s.lambda.imag()};
  out["simplicity_gap"] = io::encode_double(s.simplicity_gap);
  out.update(io::to_json(rep));
  emit(out.dump(2), opt.output);
  return 0;
}

int run_tails(const CommonOptions& opt, bool with_samples) {
  check_format(opt.format, {"csv", "json"});
  if (opt.grid_text.empty()) throw ValidationError("--grid MIN:MAX:POINTS[:log] is required");
  if (with_samples && opt.samples < 1) throw ValidationError("--samples must be at least 1");
  const MatrixPolynomial p = load_input(opt);
  json scratch;
  const Complex lambda = identify_lambda(p, opt, &scratch);
  const SpectralData s = spectral_data(p, lambda);
  const SigmaLaw law = sigma_law(s, p.grade());
  const std::vector<double> grid = parse_grid(opt.grid_text);
  const TailCurve curve = with_samples
                              ? empirical_tail(s, p, law, grid, opt.samples, opt.seed)
                              : theoretical_tail(law, grid);
  if (opt.format == "json")
    emit(io::to_json(curve).dump(2), opt.output);
  else
    emit(io::to_csv(curve), opt.output);
  return 0;
}

int run_estimate(const CommonOptions& opt) {
  check_format(opt.format, {"json"});
  check_delta(opt.delta);
  const MatrixPolynomial p = load_input(opt);
  json out{{"n", p.size()},
           {"degree", p.grade()},
           {"field", field_name(p.field())},
           {"seed", opt.seed}};
  const Complex lambda = identify_lambda(p, opt, &out);
  const SpectralData s = spectral_data(p, lambda);
  const MatrixPolynomial e = sample_uniform_perturbation(p.size(), p.grade(), s.beta, opt.seed);
  const WeakConditionEstimate est = estimate_weak_condition(s, p, e, opt.delta, opt.eta);
  out["normal_rank"] = s.r;
  out["lambda"] = {s.lambda.real(), s.lambda.imag()};
  out["gamma_inv"] = io::encode_double(1.0 / s.gamma);
  out.update(io::to_json(est));
  emit(out.dump(2), opt.output);
  return 0;
}

void add_common_flags(CLI::App* cmd, CommonOptions* opt) {
  auto* input = cmd->add_option("--input", opt->input, "matrix polynomial JSON file");
  auto* demo = cmd->add_flag("--demo", opt->use_demo, "use the built-in demonstration pencil");
  input->excludes(demo);
  demo->excludes(input);
  cmd->add_option("--lambda", opt->lambda_text,
                  "eigenvalue RE[,IM]; identified automatically when omitted");
  cmd->add_option("--delta", opt->delta, "confidence parameter in (0, 1)");
  cmd->add_option("--output", opt->output, "output file (stdout when omitted)");
  cmd->add_option("--format", opt->format, "output format: json or csv");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "weakcond: directional sensitivity and weak condition numbers of simple eigenvalues of "
      "matrix polynomials"};
  app.require_subcommand(1);

  CommonOptions opt;

  CLI::App* analyze = app.add_subcommand(
      "analyze", "condition report (worst-case, stochastic, weak) for one eigenvalue");
  add_common_flags(analyze, &opt);

  CLI::App* tails =
      app.add_subcommand("tails", "exact tail of sigma_E and its closed-form bound on a grid");
  add_common_flags(tails, &opt);
  tails->add_option("--grid", opt.grid_text, "threshold grid MIN:MAX:POINTS[:log]");

  CLI::App* montecarlo =
      app.add_subcommand("montecarlo", "empirical tail of sigma_E with exact and bound columns");
  add_common_flags(montecarlo, &opt);
  montecarlo->add_option("--grid", opt.grid_text, "threshold grid MIN:MAX:POINTS[:log]");
  montecarlo->add_option("--samples", opt.samples, "number of Monte Carlo samples");
  montecarlo->add_option("--seed", opt.seed, "master seed");

  CLI::App* estimate = app.add_subcommand(
      "estimate", "weak-condition estimate from a perturbed-problem direction");
  add_common_flags(estimate, &opt);
  estimate->add_option("--seed", opt.seed, "seed of the perturbation direction");
  estimate->add_option("--eta", opt.eta, "confidence shape parameter");

  CLI::App* demo =
      app.add_subcommand("demo", "analyze the built-in singular demonstration pencil");
  demo->add_option("--delta", opt.delta, "confidence parameter in (0, 1)");
  demo->add_option("--output", opt.output, "output file (stdout when omitted)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  try {
    if (app.got_subcommand(analyze)) return run_analyze(opt);
    if (app.got_subcommand(tails)) return run_tails(opt, false);
    if (app.got_subcommand(montecarlo)) return run_tails(opt, true);
    if (app.got_subcommand(estimate)) return run_estimate(opt);
    if (app.got_subcommand(demo)) {
      opt.use_demo = true;
      opt.lambda_text.clear();
      return run_analyze(opt);
    }
  } catch (const ValidationError& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << std::endl;
    return 2;
  }
  return 1;
}
