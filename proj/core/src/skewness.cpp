#include "smsn/skewness.hpp"

#include <cmath>
#include <numbers>

#include "smsn/error.hpp"
#include "smsn/rng.hpp"

namespace smsn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateDirectionTol = 1e-12;

}  // namespace

double gamma1_univariate(const Eigen::Ref<const Vector>& y) {
  if (y.size() < 3) {
    throw Error(Errc::degenerate_sample, "need at least three observations");
  }
  const double n = static_cast<double>(y.size());
  const double mean = y.mean();
  double m2 = 0.0;
  double m3 = 0.0;
  for (Index i = 0; i < y.size(); ++i) {
    const double r = y[i] - mean;
    m2 += r * r;
    m3 += r * r * r;
  }
  m2 /= n;
  m3 /= n;
  const double spread = y.cwiseAbs().maxCoeff();
  if (!(m2 > 1e-28 * spread * spread) || m2 == 0.0) {
    throw Error(Errc::degenerate_sample, "sample variance is zero");
  }
  const double skew = m3 / std::pow(m2, 1.5);
  return skew * skew;
}

double h_objective(double t, double omega_d, const SkewCoefficients& coef) {
  if (!(omega_d > 0.0)) {
    throw Error(Errc::invalid_parameter, "omega_d must be positive");
  }
  if (!(t >= 0.0) || t > omega_d * (1.0 + 1e-12)) {
    throw Error(Errc::invalid_parameter, "t must lie in [0, omega_d]");
  }
  const double inner = coef.a * t - 3.0 * coef.b * omega_d;
  return (2.0 / kPi) * t * inner * inner;
}

AnalyticDirection analytic_max_direction(const SmsnParams& params) {
  const SmsnDistribution dist(params);
  if (params.shape.isZero(0.0)) {
    throw Error(Errc::no_unique_direction,
                "alpha = 0: every direction has zero skewness");
  }
  AnalyticDirection out;
  out.condition_ok = check_moment_condition(params.mixing).holds;
  out.direction = dist.eta().normalized();
  // eta'gamma > 0, so the projection's third moment has the sign of
  // a delta0^2 - 3b, which is positive whenever the condition holds.
  if (!out.condition_ok) {
    const ProjectionParams proj = projection_params(params, out.direction);
    const SkewCoefficients coef = coefficients(params.mixing);
    if (coef.a * proj.delta0_sq - 3.0 * coef.b < 0.0) {
      out.direction = -out.direction;
    }
  }
  return out;
}

double analytic_max_skewness(const SmsnParams& params) {
  validate(params);
  if (params.shape.isZero(0.0)) return 0.0;
  const DerivedParams derived = derive(params);
  const Vector sigma_inv_gamma = spd_solve(derived.covariance, derived.gamma);
  const double t_star = derived.gamma.dot(sigma_inv_gamma);
  const Vector d_star = sigma_inv_gamma / std::sqrt(t_star);
  const double omega_d = d_star.dot(params.scale * d_star);
  return h_objective(t_star, omega_d, coefficients(params.mixing));
}

ProjectionSkewness::ProjectionSkewness(const SmsnParams& params)
    : scale_(params.scale) {
  const DerivedParams derived = derive(params);
  covariance_ = derived.covariance;
  gamma_ = derived.gamma;
  coef_ = smsn::coefficients(params.mixing);
}

double ProjectionSkewness::operator()(const Vector& d) const {
  if (d.size() != gamma_.size()) {
    throw Error(Errc::dim_mismatch, "direction has the wrong length");
  }
  const double var = d.dot(covariance_ * d);
  if (!(var > 0.0)) {
    throw Error(Errc::invalid_parameter, "direction must be non-zero");
  }
  // Normalize to d' Sigma d = 1 so h gives the standardized moment.
  const double inv_sd = 1.0 / std::sqrt(var);
  const double dg = d.dot(gamma_) * inv_sd;
  const double t = dg * dg;
  const double omega_d = d.dot(scale_ * d) * inv_sd * inv_sd;
  if (omega_d - t <= kDegenerateDirectionTol * omega_d) {
    throw Error(Errc::degenerate_direction,
                "projection reaches the half-normal limit");
  }
  return h_objective(t, omega_d, coef_);
}

double gamma1_population(const SmsnParams& params, const Vector& d) {
  return ProjectionSkewness(params)(d);
}

Vector ThirdMomentMatrix::contract(const Vector& c) const {
  const Index p = dim();
  Vector out = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) {
    out += c[j] * data.middleCols(j * p, p) * c;
  }
  return out;
}

Vector ThirdMomentMatrix::dominant_direction() const {
  Eigen::JacobiSVD<Matrix> svd(data, Eigen::ComputeThinU);
  return svd.matrixU().col(0);
}

ThirdMomentMatrix third_moment_matrix(const Matrix& u) {
  const Index n = u.rows();
  const Index p = u.cols();
  if (n < 1 || p < 1) {
    throw Error(Errc::dim_mismatch, "third_moment_matrix needs data");
  }
  ThirdMomentMatrix out{Matrix(p, p * p)};
  for (Index j = 0; j < p; ++j) {
    const Matrix weighted = u.array().colwise() * u.col(j).array();
    out.data.middleCols(j * p, p) =
        u.transpose() * weighted / static_cast<double>(n);
  }
  return out;
}

namespace {

/// Objective machinery on standardized data.
class SkewObjective {
 public:
  explicit SkewObjective(const Matrix& u)
      : u_(u), inv_n_(1.0 / static_cast<double>(u.rows())) {}

  double third(const Vector& c) const {
    return (u_ * c).array().cube().sum() * inv_n_;
  }

  double value(const Vector& c) const {
    const double m = third(c);
    return m * m;
  }

  /// Returns m(c) and fills g = (1/n) sum u_i (u_i'c)^2.
  double third_and_contraction(const Vector& c, Vector& g) const {
    const Vector y = u_ * c;
    const Vector y2 = y.array().square();
    g = u_.transpose() * y2 * inv_n_;
    return y.dot(y2) * inv_n_;
  }

 private:
  const Matrix& u_;
  double inv_n_;
};

struct AscentRun {
  Vector c;
  double f = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> trace;
};

AscentRun sphere_ascent(const SkewObjective& obj, Vector c,
                        const EstimatorOptions& opts) {
  AscentRun run;
  c.normalize();
  Vector g;
  double m = obj.third_and_contraction(c, g);
  double f = m * m;
  run.trace.push_back(f);

  for (int it = 0; it < opts.max_iter; ++it) {
    const double scale = std::max(1.0, f);
    // Riemannian gradient of m^2: 6 m (g - (c'g) c), with c'g = m.
    const Vector rgrad = 6.0 * m * (g - m * c);
    const double rgrad_norm = rgrad.norm();

    Vector next;
    double f_next = f;
    const double g_norm = g.norm();
    if (g_norm > 0.0) {
      Vector power = g / g_norm;
      const double f_power = obj.value(power);
      if (f_power > f) {
        next = std::move(power);
        f_next = f_power;
      }
    }
    if (next.size() == 0 && rgrad_norm > 0.0) {
      // Armijo backtracking along the tangent gradient, starting from a
      // step of half a radian.
      double step = 0.5 / rgrad_norm;
      for (int k = 0; k < 60; ++k, step *= 0.5) {
        Vector trial = (c + step * rgrad).normalized();
        const double f_trial = obj.value(trial);
        if (f_trial >= f + 1e-4 * step * rgrad_norm * rgrad_norm &&
            f_trial > f) {
          next = std::move(trial);
          f_next = f_trial;
          break;
        }
      }
    }
    run.iterations = it + 1;
    if (next.size() == 0) {
      // No ascent step exists at working precision: stationary point.
      run.converged = true;
      break;
    }
    const double gain = f_next - f;
    c = std::move(next);
    m = obj.third_and_contraction(c, g);
    f = m * m;
    run.trace.push_back(f);
    if (gain <= opts.tol * scale) {
      const Vector rg = 6.0 * m * (g - m * c);
      if (rg.norm() <= 1e-5 * std::max(1.0, f)) {
        run.converged = true;
        break;
      }
    }
  }
  run.c = std::move(c);
  run.f = f;
  return run;
}

}  // namespace

MaxSkewResult estimate_max_direction(const Matrix& x,
                                     const EstimatorOptions& opts) {
  const Index n = x.rows();
  const Index p = x.cols();
  if (p < 1 || n < p + 2) {
    throw Error(Errc::invalid_parameter,
                "estimate_max_direction needs n >= p + 2 observations");
  }
  if (opts.restarts < 0 || opts.max_iter < 1 || !(opts.tol > 0.0)) {
    throw Error(Errc::invalid_parameter, "invalid estimator options");
  }
  require_finite(x, "data");

  const Eigen::RowVectorXd mean = x.colwise().mean();
  const Matrix centred = x.rowwise() - mean;
  const Matrix cov = centred.transpose() * centred / static_cast<double>(n);
  Eigen::SelfAdjointEigenSolver<Matrix> eig(cov);
  const Vector& ev = eig.eigenvalues();
  if (!(ev.maxCoeff() > 0.0) || ev.minCoeff() <= 1e-12 * ev.maxCoeff()) {
    throw Error(Errc::rank_deficient, "sample covariance is singular");
  }
  const Matrix whitening = eig.eigenvectors() *
                           ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                           eig.eigenvectors().transpose();
  const Matrix u = centred * whitening;
  const SkewObjective objective(u);

  MaxSkewResult result;
  if (p == 1) {
    const double m = objective.third(Vector::Ones(1));
    result.standardized_direction = Vector::Constant(1, m >= 0.0 ? 1.0 : -1.0);
    result.gamma1 = m * m;
    result.converged = true;
    result.objective_trace = {result.gamma1};
  } else {
    std::vector<Vector> starts;
    starts.push_back(third_moment_matrix(u).dominant_direction());
    for (int r = 0; r < opts.restarts; ++r) {
      RngStream rng(opts.seed, static_cast<std::uint64_t>(r));
      Vector v(p);
      for (Index j = 0; j < p; ++j) v[j] = rng.normal();
      starts.push_back(v.normalized());
    }
    bool have_best = false;
    AscentRun best;
    for (auto& start : starts) {
      AscentRun run;
      if (opts.refine) {
        run = sphere_ascent(objective, std::move(start), opts);
      } else {
        run.c = start.normalized();
        run.f = objective.value(run.c);
        run.converged = true;
        run.trace = {run.f};
      }
      if (!have_best || run.f > best.f) {
        best = std::move(run);
        have_best = true;
      }
      if (!opts.refine) break;  // SVD direction only
    }
    if (objective.third(best.c) < 0.0) best.c = -best.c;
    result.standardized_direction = best.c;
    result.gamma1 = best.f;
    result.iterations = best.iterations;
    result.converged = best.converged;
    result.objective_trace = std::move(best.trace);
  }
  result.direction = (whitening * result.standardized_direction).normalized();
  return result;
}

}  // namespace smsn
