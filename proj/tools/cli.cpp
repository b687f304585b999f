#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <cstdio>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "csv.hpp"
#include "smsn/error.hpp"
#include "smsn/mixing.hpp"
#include "smsn/model.hpp"
#include "smsn/params_io.hpp"
#include "smsn/simulation.hpp"
#include "smsn/skewness.hpp"

namespace smsn::cli {
namespace {

using nlohmann::json;

json to_json_array(const Vector& v) {
  return std::vector<double>(v.begin(), v.end());
}

/// Writes to `path`, or to `out` when the path is empty or "-".
void emit(const std::string& path, const std::string& contents,
          std::ostream& out) {
  if (path.empty() || path == "-") {
    out << contents;
  } else {
    write_file_atomic(path, contents);
  }
}

Vector parse_point(const std::string& text) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string field;
  while (std::getline(ss, field, ',')) {
    try {
      std::size_t used = 0;
      values.push_back(std::stod(field, &used));
      if (field.find_first_not_of(" \t", used) != std::string::npos) {
        throw std::invalid_argument(field);
      }
    } catch (const std::logic_error&) {
      throw Error(Errc::parse_error, "--at expects comma-separated numbers");
    }
  }
  if (values.empty()) throw Error(Errc::parse_error, "--at is empty");
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Index>(values.size()));
}

std::string format_real(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

struct Options {
  bool quiet = false;

  std::string params_path;
  std::string out_path;
  std::string in_path;
  std::string config_path;
  std::string replications_out;
  std::string at;

  std::size_t n = 0;
  std::uint64_t seed = 0;
  int restarts = 8;
  int max_iter = 500;
  double tol = 1e-10;
  double density_tol = 1e-10;
  bool svd_only = false;
  bool full = false;
};

int cmd_sample(const Options& o, std::ostream& out) {
  const SmsnParams params = load_params(o.params_path);
  RngStream rng(o.seed, 0);
  const Matrix x = sample(params, o.n, rng);
  emit(o.out_path, format_sample_csv(x), out);
  return kExitOk;
}

int cmd_density(const Options& o, std::ostream& out) {
  const SmsnParams params = load_params(o.params_path);
  const Vector x = parse_point(o.at);
  if (x.size() != params.dim()) {
    throw Error(Errc::parse_error, "--at has " + std::to_string(x.size()) +
                                       " coordinates, model has p = " +
                                       std::to_string(params.dim()));
  }
  double value = 0.0;
  if (std::holds_alternative<Degenerate>(params.mixing)) {
    value = density_sn(x, params);
  } else if (std::holds_alternative<InvSqrtChiSq>(params.mixing)) {
    value = density_st(x, params);
  } else {
    value = density_smsn(x, params, o.density_tol);
  }
  out << format_real(value) << '\n';
  return kExitOk;
}

int cmd_check_moments(const Options& o, std::ostream& out) {
  const SmsnParams params = load_params(o.params_path);
  const MomentCondition cond = check_moment_condition(params.mixing);
  json doc;
  doc["lhs"] = cond.lhs;
  doc["rhs"] = cond.rhs;
  doc["holds"] = cond.holds;
  if (moment_exists(params.mixing, 3)) {
    const SkewCoefficients coef = coefficients(params.mixing);
    doc["a"] = coef.a;
    doc["b"] = coef.b;
    doc["c"] = coef.c;
  } else {
    // a and b need E(S^3); c only E(S^2).
    const double e1 = moment(params.mixing, 1);
    doc["a"] = nullptr;
    doc["b"] = nullptr;
    doc["c"] = (2.0 / std::numbers::pi) * e1 * e1 / cond.rhs;
  }
  out << doc.dump() << '\n';
  return kExitOk;
}

int cmd_maxskew(const Options& o, std::ostream& out, std::ostream& err) {
  const SmsnParams params = load_params(o.params_path);
  const AnalyticDirection dir = analytic_max_direction(params);
  json doc;
  doc["direction"] = to_json_array(dir.direction);
  doc["gamma1"] = analytic_max_skewness(params);
  doc["condition_ok"] = dir.condition_ok;
  if (!dir.condition_ok && !o.quiet) {
    err << "warning: moment condition (4/pi)E(S)^2 >= E(S^2) fails; the "
           "direction is not guaranteed to maximize skewness\n";
  }
  out << doc.dump() << '\n';
  return kExitOk;
}

int cmd_estimate(const Options& o, std::ostream& out) {
  const Matrix x = parse_numeric_csv(read_text_file(o.in_path));
  EstimatorOptions opts;
  opts.restarts = o.restarts;
  opts.max_iter = o.max_iter;
  opts.tol = o.tol;
  opts.refine = !o.svd_only;
  opts.seed = o.seed;
  const MaxSkewResult res = estimate_max_direction(x, opts);
  json doc;
  doc["direction"] = to_json_array(res.direction);
  doc["gamma1"] = res.gamma1;
  doc["converged"] = res.converged;
  doc["iterations"] = res.iterations;
  out << doc.dump() << '\n';
  return kExitOk;
}

int cmd_simulate(const Options& o, std::ostream& out, std::ostream& err) {
  SimulationConfig cfg =
      parse_simulation_config(read_text_file(o.config_path));
  if (o.full) cfg.replications = kFullReplications;
  if (!o.replications_out.empty()) cfg.keep_replications = true;

  const unsigned threads = default_thread_count();
  ProgressFn progress;
  if (!o.quiet) {
    progress = [&err, last = std::size_t{0}](std::size_t done,
                                             std::size_t total) mutable {
      const std::size_t pct = total ? 100 * done / total : 100;
      if (pct >= last + 5 || done == total) {
        last = pct;
        err << "simulate: " << done << "/" << total << " replications ("
            << pct << "%)\n";
      }
    };
  }
  const SimulationReport report = run_experiment(cfg, threads, progress);
  emit(o.out_path, report_csv(report), out);
  if (!o.replications_out.empty()) {
    write_file_atomic(o.replications_out, replications_csv(report));
  }
  return kExitOk;
}

bool is_usage_error(Errc code) {
  return code == Errc::parse_error;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"Scale mixtures of skew-normal distributions: sampling, "
               "densities and maximal skewness projections"};
  app.name("smsn");
  app.require_subcommand(1);
  app.fallthrough();
  Options o;
  app.add_flag("-q,--quiet", o.quiet, "Suppress progress and warnings");

  auto* sample_cmd = app.add_subcommand("sample", "Draw samples to CSV");
  sample_cmd->add_option("--params", o.params_path, "Parameter JSON")
      ->required()->check(CLI::ExistingFile);
  sample_cmd->add_option("--n", o.n, "Number of draws")
      ->required()->check(CLI::PositiveNumber);
  sample_cmd->add_option("--seed", o.seed, "Random seed");
  sample_cmd->add_option("--out", o.out_path, "Output CSV (default stdout)");

  auto* density_cmd = app.add_subcommand("density", "Evaluate the density");
  density_cmd->add_option("--params", o.params_path, "Parameter JSON")
      ->required()->check(CLI::ExistingFile);
  density_cmd->add_option("--at", o.at, "Point \"x1,...,xp\"")->required();
  density_cmd->add_option("--tol", o.density_tol,
                          "Quadrature tolerance (sde, ssl)")
      ->check(CLI::PositiveNumber);

  auto* moments_cmd = app.add_subcommand(
      "check-moments", "Check (4/pi)E(S)^2 >= E(S^2) and report a, b, c");
  moments_cmd->add_option("--params", o.params_path, "Parameter JSON")
      ->required()->check(CLI::ExistingFile);

  auto* maxskew_cmd =
      app.add_subcommand("maxskew", "Analytic maximal skewness direction");
  maxskew_cmd->add_option("--params", o.params_path, "Parameter JSON")
      ->required()->check(CLI::ExistingFile);

  auto* estimate_cmd = app.add_subcommand(
      "estimate", "Estimate the maximal skewness direction from data");
  estimate_cmd->add_option("--in", o.in_path, "Data CSV")
      ->required()->check(CLI::ExistingFile);
  estimate_cmd->add_option("--restarts", o.restarts, "Random restarts")
      ->check(CLI::NonNegativeNumber);
  estimate_cmd->add_option("--seed", o.seed, "Seed for random restarts");
  estimate_cmd->add_option("--max-iter", o.max_iter, "Iterations per start")
      ->check(CLI::PositiveNumber);
  estimate_cmd->add_option("--tol", o.tol, "Objective change tolerance")
      ->check(CLI::PositiveNumber);
  estimate_cmd->add_flag("--svd-only", o.svd_only,
                         "Report the third-moment SVD direction unrefined");

  auto* simulate_cmd =
      app.add_subcommand("simulate", "Run the skew-t simulation experiment");
  simulate_cmd->add_option("--config", o.config_path, "Simulation JSON")
      ->required()->check(CLI::ExistingFile);
  simulate_cmd->add_option("--out", o.out_path, "Output CSV (default stdout)");
  simulate_cmd->add_option("--replications-out", o.replications_out,
                           "Optional per-replication CSV");
  simulate_cmd->add_flag("--full", o.full, "Use 5000 replications per cell");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "smsn: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    if (*sample_cmd) return cmd_sample(o, out);
    if (*density_cmd) return cmd_density(o, out);
    if (*moments_cmd) return cmd_check_moments(o, out);
    if (*maxskew_cmd) return cmd_maxskew(o, out, err);
    if (*estimate_cmd) return cmd_estimate(o, out);
    if (*simulate_cmd) return cmd_simulate(o, out, err);
  } catch (const Error& e) {
    err << "smsn: " << e.what() << '\n';
    return is_usage_error(e.code()) ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    err << "smsn: " << e.what() << '\n';
    return kExitRuntime;
  }
  return kExitUsage;
}

}  // namespace smsn::cli
