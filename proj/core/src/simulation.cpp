#include "smsn/simulation.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <mutex>
#include <random>
#include <string>
#include <thread>

#include <json.hpp>

#include "smsn/error.hpp"
#include "smsn/model.hpp"
#include "smsn/rng.hpp"

namespace smsn {
namespace {

/// Neumaier compensated summation.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x)) {
      carry_ += (sum_ - t) + x;
    } else {
      carry_ += (x - t) + sum_;
    }
    sum_ = t;
  }
  double value() const { return sum_ + carry_; }

 private:
  double sum_ = 0.0;
  double carry_ = 0.0;
};

template <class Body>
void parallel_for(std::size_t count, unsigned threads, Body&& body) {
  const std::size_t workers =
      std::min<std::size_t>(std::max(1u, threads), count);
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) body(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < count; i = next++) body(i);
    });
  }
}

constexpr std::uint32_t kCellOmegaStream = 0xFFFFFFFFu;

Vector draw_omega(const OmegaRule& rule, Index p, RngStream& rng) {
  if (rule.kind == OmegaRule::Kind::Explicit) {
    if (rule.values.size() != p) {
      throw Error(Errc::dim_mismatch, "explicit omega has the wrong length");
    }
    return rule.values;
  }
  std::uniform_int_distribution<int> dist(rule.low, rule.high);
  Vector out(p);
  for (Index j = 0; j < p; ++j) out[j] = dist(rng);
  return out;
}

CellRecord aggregate(const SimulationConfig& cfg, const CellSpec& cell,
                     std::vector<ReplicationRecord> reps) {
  CellRecord out;
  out.cell = cell;
  out.replications_configured = cfg.replications;
  CompensatedSum sq_g, sq_d, g_hat, g_theory;
  for (const auto& r : reps) {
    if (!r.ok) continue;
    ++out.replications_used;
    sq_g.add(r.sq_error_gamma1);
    sq_d.add(r.sq_error_direction);
    g_hat.add(r.gamma1_hat);
    g_theory.add(r.gamma1_theory);
  }
  if (out.replications_used > 0) {
    const double used = out.replications_used;
    out.mse_gamma1 = sq_g.value() / used;
    out.mse_direction = sq_d.value() / used;
    out.mean_gamma1_hat = g_hat.value() / used;
    out.gamma1_theory = g_theory.value() / used;
  }
  if (cfg.keep_replications) out.replications = std::move(reps);
  return out;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

using nlohmann::json;

template <class T>
std::vector<T> list_field(const json& doc, const char* key) {
  if (!doc.contains(key)) return {};
  const json& j = doc.at(key);
  if (!j.is_array()) {
    throw Error(Errc::parse_error, std::string("'") + key + "' must be a list");
  }
  std::vector<T> out;
  for (const auto& v : j) {
    if (!v.is_number()) {
      throw Error(Errc::parse_error,
                  std::string("'") + key + "' entries must be numbers");
    }
    out.push_back(v.get<T>());
  }
  return out;
}

Vector vector_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_array()) {
    throw Error(Errc::parse_error, std::string("missing list '") + key + "'");
  }
  const auto values = j.at(key).get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(),
                                  static_cast<Index>(values.size()));
}

}  // namespace

Vector AlphaRule::build(Index p) const {
  if (kind == Kind::Explicit) {
    if (values.size() != p) {
      throw Error(Errc::dim_mismatch, "explicit alpha has the wrong length");
    }
    return values;
  }
  return Vector::Constant(p, norm / std::sqrt(static_cast<double>(p)));
}

void validate(const SimulationConfig& cfg) {
  for (int p : cfg.p) {
    if (p < 1) throw Error(Errc::invalid_parameter, "grid p must be >= 1");
    for (int n : cfg.n) {
      if (n < p + 2) {
        throw Error(Errc::invalid_parameter,
                    "grid n must be at least p + 2 for every p");
      }
    }
  }
  for (double nu : cfg.nu) {
    if (!(nu > 3.0) || !std::isfinite(nu)) {
      throw Error(Errc::invalid_parameter,
                  "grid nu must exceed 3 (finite third moments)");
    }
  }
  for (double rho : cfg.rho) {
    if (!(std::abs(rho) < 1.0)) {
      throw Error(Errc::invalid_parameter, "grid rho must satisfy |rho| < 1");
    }
  }
  if (cfg.replications < 1) {
    throw Error(Errc::invalid_parameter, "replications must be >= 1");
  }
  if (cfg.omega.kind == OmegaRule::Kind::RandomInteger &&
      (cfg.omega.low < 1 || cfg.omega.high < cfg.omega.low)) {
    throw Error(Errc::invalid_parameter, "omega range must be 1 <= low <= high");
  }
  if (cfg.omega.kind == OmegaRule::Kind::Explicit &&
      (cfg.omega.values.size() == 0 || cfg.omega.values.minCoeff() <= 0.0)) {
    throw Error(Errc::invalid_parameter, "explicit omega must be positive");
  }
}

SimulationConfig parse_simulation_config(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!doc.is_object()) {
    throw Error(Errc::parse_error, "simulation config must be an object");
  }
  SimulationConfig cfg;
  try {
    cfg.p = list_field<int>(doc, "p");
    cfg.n = list_field<int>(doc, "n");
    cfg.nu = list_field<double>(doc, "nu");
    cfg.rho = list_field<double>(doc, "rho");
    cfg.replications = doc.value("replications", cfg.replications);
    cfg.seed = doc.value("seed", cfg.seed);
    cfg.keep_replications =
        doc.value("keep_replications", cfg.keep_replications);

    if (doc.contains("alpha")) {
      const json& a = doc.at("alpha");
      const std::string rule = a.value("rule", "ones");
      if (rule == "ones") {
        cfg.alpha.kind = AlphaRule::Kind::OnesScaled;
        cfg.alpha.norm = a.value("norm", cfg.alpha.norm);
      } else if (rule == "explicit") {
        cfg.alpha.kind = AlphaRule::Kind::Explicit;
        cfg.alpha.values = vector_field(a, "values");
      } else {
        throw Error(Errc::parse_error, "unknown alpha rule '" + rule + "'");
      }
    }
    if (doc.contains("omega")) {
      const json& o = doc.at("omega");
      const std::string rule = o.value("rule", "random_int");
      if (rule == "random_int") {
        cfg.omega.kind = OmegaRule::Kind::RandomInteger;
        cfg.omega.low = o.value("low", cfg.omega.low);
        cfg.omega.high = o.value("high", cfg.omega.high);
        const std::string per = o.value("per", "replication");
        if (per != "replication" && per != "cell") {
          throw Error(Errc::parse_error, "omega 'per' must be replication|cell");
        }
        cfg.omega.per_replication = per == "replication";
      } else if (rule == "explicit") {
        cfg.omega.kind = OmegaRule::Kind::Explicit;
        cfg.omega.values = vector_field(o, "values");
      } else {
        throw Error(Errc::parse_error, "unknown omega rule '" + rule + "'");
      }
    }
    if (doc.contains("estimator")) {
      const json& e = doc.at("estimator");
      auto& est = cfg.estimator;
      est.restarts = e.value("restarts", est.restarts);
      est.max_iter = e.value("max_iter", est.max_iter);
      est.tol = e.value("tol", est.tol);
      est.refine = e.value("refine", est.refine);
      est.seed = e.value("seed", est.seed);
    }
  } catch (const json::exception& e) {
    throw Error(Errc::parse_error, e.what());
  }
  validate(cfg);
  return cfg;
}

std::vector<CellSpec> expand_grid(const SimulationConfig& cfg) {
  auto sorted = [](auto v) {
    std::sort(v.begin(), v.end());
    v.erase(std::unique(v.begin(), v.end()), v.end());
    return v;
  };
  const auto ps = sorted(cfg.p);
  const auto ns = sorted(cfg.n);
  const auto nus = sorted(cfg.nu);
  const auto rhos = sorted(cfg.rho);
  std::vector<CellSpec> cells;
  for (int p : ps)
    for (int n : ns)
      for (double nu : nus)
        for (double rho : rhos) {
          cells.push_back(
              {p, n, nu, rho, static_cast<std::uint32_t>(cells.size())});
        }
  return cells;
}

double mse_direction(const Vector& est, const Vector& ref) {
  if (est.size() != ref.size()) {
    throw Error(Errc::dim_mismatch, "directions differ in length");
  }
  if (std::abs(est.norm() - 1.0) > 1e-8 || std::abs(ref.norm() - 1.0) > 1e-8) {
    throw Error(Errc::invalid_parameter, "directions must have unit norm");
  }
  return std::min((est - ref).squaredNorm(), (est + ref).squaredNorm());
}

ReplicationRecord run_replication(const SimulationConfig& cfg,
                                  const CellSpec& cell, int replication) {
  ReplicationRecord rec;
  rec.replication = replication;
  const auto rep = static_cast<std::uint32_t>(replication);
  RngStream rng(cfg.seed, stream_key(cell.index, rep));

  const Index p = cell.p;
  Vector omega;
  if (cfg.omega.per_replication) {
    omega = draw_omega(cfg.omega, p, rng);
  } else {
    RngStream cell_rng(cfg.seed, stream_key(cell.index, kCellOmegaStream));
    omega = draw_omega(cfg.omega, p, cell_rng);
  }

  SmsnParams params;
  params.location = Vector::Zero(p);
  params.scale =
      omega.asDiagonal() * toeplitz_corr(cell.rho, p) * omega.asDiagonal();
  params.shape = cfg.alpha.build(p);
  params.mixing = InvSqrtChiSq{cell.nu};

  const SmsnDistribution dist(params);
  const Matrix x = dist.sample(static_cast<std::size_t>(cell.n), rng);
  rec.gamma1_theory = analytic_max_skewness(params);
  const Vector reference = analytic_max_direction(params).direction;

  EstimatorOptions opts = cfg.estimator;
  opts.seed ^= stream_key(cell.index, rep);
  try {
    const MaxSkewResult est = estimate_max_direction(x, opts);
    rec.gamma1_hat = est.gamma1;
    const double diff = est.gamma1 - rec.gamma1_theory;
    rec.sq_error_gamma1 = diff * diff;
    rec.sq_error_direction = mse_direction(est.direction, reference);
    rec.ok = true;
  } catch (const Error& e) {
    rec.error = e.what();
  }
  return rec;
}

CellRecord run_cell(const SimulationConfig& cfg, const CellSpec& cell,
                    unsigned threads) {
  validate(cfg);
  std::vector<ReplicationRecord> reps(
      static_cast<std::size_t>(cfg.replications));
  parallel_for(reps.size(), threads, [&](std::size_t r) {
    reps[r] = run_replication(cfg, cell, static_cast<int>(r));
  });
  return aggregate(cfg, cell, std::move(reps));
}

SimulationReport run_experiment(const SimulationConfig& cfg, unsigned threads,
                                const ProgressFn& progress) {
  validate(cfg);
  const std::vector<CellSpec> cells = expand_grid(cfg);
  const auto reps_per_cell = static_cast<std::size_t>(cfg.replications);
  const std::size_t total = cells.size() * reps_per_cell;

  std::vector<ReplicationRecord> records(total);
  std::mutex progress_mutex;
  std::size_t done = 0;
  parallel_for(total, threads, [&](std::size_t job) {
    const CellSpec& cell = cells[job / reps_per_cell];
    records[job] =
        run_replication(cfg, cell, static_cast<int>(job % reps_per_cell));
    if (progress) {
      std::lock_guard lock(progress_mutex);
      progress(++done, total);
    }
  });

  SimulationReport report;
  report.cells.reserve(cells.size());
  for (std::size_t c = 0; c < cells.size(); ++c) {
    const auto first = records.begin() + static_cast<std::ptrdiff_t>(
                                             c * reps_per_cell);
    report.cells.push_back(aggregate(
        cfg, cells[c],
        {std::make_move_iterator(first),
         std::make_move_iterator(first +
                                 static_cast<std::ptrdiff_t>(reps_per_cell))}));
  }
  return report;
}

std::string report_csv(const SimulationReport& report) {
  std::string out =
      "p,n,nu,rho,replications,mse_gamma1,mse_direction,mean_gamma1_hat,"
      "gamma1_theory\n";
  for (const auto& cell : report.cells) {
    out += std::to_string(cell.cell.p) + ',' + std::to_string(cell.cell.n) +
           ',' + format_real(cell.cell.nu) + ',' + format_real(cell.cell.rho) +
           ',' + std::to_string(cell.replications_used) + ',' +
           format_real(cell.mse_gamma1) + ',' +
           format_real(cell.mse_direction) + ',' +
           format_real(cell.mean_gamma1_hat) + ',' +
           format_real(cell.gamma1_theory) + '\n';
  }
  return out;
}

std::string replications_csv(const SimulationReport& report) {
  std::string out =
      "p,n,nu,rho,replication,ok,gamma1_hat,gamma1_theory,sq_error_gamma1,"
      "sq_error_direction\n";
  for (const auto& cell : report.cells) {
    for (const auto& r : cell.replications) {
      out += std::to_string(cell.cell.p) + ',' + std::to_string(cell.cell.n) +
             ',' + format_real(cell.cell.nu) + ',' +
             format_real(cell.cell.rho) + ',' + std::to_string(r.replication) +
             ',' + (r.ok ? "1" : "0") + ',' + format_real(r.gamma1_hat) + ',' +
             format_real(r.gamma1_theory) + ',' +
             format_real(r.sq_error_gamma1) + ',' +
             format_real(r.sq_error_direction) + '\n';
    }
  }
  return out;
}

unsigned default_thread_count() {
  if (const char* env = std::getenv("SMSN_THREADS")) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<unsigned>(v);
  }
  return std::max(1u, std::thread::hardware_concurrency());
}

}  // namespace smsn
