#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "smsn/numerics.hpp"
#include "smsn/skewness.hpp"

namespace smsn {

/// How the shape vector alpha is built for dimension p.
struct AlphaRule {
  enum class Kind { OnesScaled, Explicit };
  Kind kind = Kind::OnesScaled;
  double norm = 3.0;  ///< OnesScaled: alpha = norm * (1, ..., 1) / sqrt(p)
  Vector values;      ///< Explicit: used when its length equals p

  Vector build(Index p) const;
};

/// How the diagonal scale omega is built.
struct OmegaRule {
  enum class Kind { RandomInteger, Explicit };
  Kind kind = Kind::RandomInteger;
  int low = 1;
  int high = 5;
  bool per_replication = true;  ///< false: one draw per cell
  Vector values;                ///< Explicit: used when its length equals p
};

struct SimulationConfig {
  std::vector<int> p;
  std::vector<int> n;
  std::vector<double> nu;
  std::vector<double> rho;
  AlphaRule alpha;
  OmegaRule omega;
  int replications = 200;
  std::uint64_t seed = 20160101;
  EstimatorOptions estimator;
  bool keep_replications = false;  ///< retain per-replication records
};

/// Replication count used by a full-scale run.
inline constexpr int kFullReplications = 5000;

/// Empty grids are allowed. Throws invalid_parameter for nu <= 3,
/// |rho| >= 1, p < 1, n < p + 2 or replications < 1.
void validate(const SimulationConfig& cfg);

/// Throws parse_error on malformed JSON; the result is validated.
///
///   {"p": [2, 10], "n": [20, 100, 500], "nu": [4, 100], "rho": [-0.8],
///    "replications": 200, "seed": 1,
///    "alpha": {"rule": "ones", "norm": 3} | {"rule": "explicit",
///              "values": [...]},
///    "omega": {"rule": "random_int", "low": 1, "high": 5,
///              "per": "replication" | "cell"} | {"rule": "explicit",
///              "values": [...]},
///    "estimator": {"restarts": 8, "max_iter": 500, "tol": 1e-10,
///                  "refine": true, "seed": 0},
///    "keep_replications": false}
SimulationConfig parse_simulation_config(std::string_view json_text);

struct CellSpec {
  int p = 0;
  int n = 0;
  double nu = 0.0;
  double rho = 0.0;
  std::uint32_t index = 0;  ///< position in the sorted grid
};

/// Grid cells in lexicographic (p, n, nu, rho) order, duplicates removed.
std::vector<CellSpec> expand_grid(const SimulationConfig& cfg);

struct ReplicationRecord {
  int replication = 0;
  bool ok = false;
  double gamma1_hat = 0.0;
  double gamma1_theory = 0.0;
  double sq_error_gamma1 = 0.0;
  double sq_error_direction = 0.0;
  std::string error;  ///< set when the estimator failed
};

struct CellRecord {
  CellSpec cell;
  int replications_configured = 0;
  int replications_used = 0;
  double mse_gamma1 = 0.0;
  double mse_direction = 0.0;
  double mean_gamma1_hat = 0.0;
  double gamma1_theory = 0.0;  ///< mean over used replications
  std::vector<ReplicationRecord> replications;  ///< when keep_replications
};

struct SimulationReport {
  std::vector<CellRecord> cells;
};

/// Squared L2 distance between unit vectors after sign folding:
/// min(|est - ref|^2, |est + ref|^2). Throws invalid_parameter for non-unit
/// input.
double mse_direction(const Vector& est, const Vector& ref);

/// One replication: draws omega and the data from the stream keyed by
/// (seed, cell, replication), estimates, and scores against the theory.
ReplicationRecord run_replication(const SimulationConfig& cfg,
                                  const CellSpec& cell, int replication);

/// Runs every replication of one cell on up to `threads` workers.
CellRecord run_cell(const SimulationConfig& cfg, const CellSpec& cell,
                    unsigned threads = 1);

using ProgressFn = std::function<void(std::size_t done, std::size_t total)>;

/// Runs all cells. Output is identical for any thread count.
SimulationReport run_experiment(const SimulationConfig& cfg,
                                unsigned threads = 1,
                                const ProgressFn& progress = {});

/// Header: p,n,nu,rho,replications,mse_gamma1,mse_direction,
/// mean_gamma1_hat,gamma1_theory. Reals use 6 significant digits.
std::string report_csv(const SimulationReport& report);

/// Per-replication rows for histogram reconstruction.
std::string replications_csv(const SimulationReport& report);

/// SMSN_THREADS if set and positive, otherwise the hardware concurrency.
unsigned default_thread_count();

}  // namespace smsn
