#include "smsn/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/tools/minima.hpp>

#include "smsn/error.hpp"

namespace smsn {
namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kDegenerateDirectionTol = 1e-12;
constexpr double kInf = std::numeric_limits<double>::infinity();

void require_dim(const Vector& x, Index p, const char* what) {
  if (x.size() != p) {
    throw Error(Errc::dim_mismatch, std::string(what) + " has length " +
                                        std::to_string(x.size()) +
                                        ", expected " + std::to_string(p));
  }
}

}  // namespace

void validate(const SmsnParams& params) {
  const Index p = params.dim();
  if (p < 1) throw Error(Errc::dim_mismatch, "location vector is empty");
  if (params.scale.rows() != p || params.scale.cols() != p) {
    throw Error(Errc::dim_mismatch, "scale matrix must be p x p");
  }
  require_dim(params.shape, p, "shape vector");
  require_finite(params.location, "location");
  require_finite(params.scale, "scale matrix");
  require_finite(params.shape, "shape vector");
  if (!is_symmetric(params.scale, 1e-10)) {
    throw Error(Errc::invalid_parameter, "scale matrix is not symmetric");
  }
  if (Eigen::LLT<Matrix>(params.scale).info() != Eigen::Success) {
    throw Error(Errc::not_spd, "scale matrix is not positive definite");
  }
  validate(params.mixing);
  if (const auto* sde = std::get_if<SqrtGamma>(&params.mixing);
      sde != nullptr && sde->dim != p) {
    throw Error(Errc::dim_mismatch,
                "double exponential mixing is keyed to dimension " +
                    std::to_string(sde->dim) + " but the model has p = " +
                    std::to_string(p));
  }
}

SmsnDistribution::SmsnDistribution(SmsnParams params)
    : params_(std::move(params)) {
  validate(params_);
  scale_llt_.compute(params_.scale);
  log_det_scale_ =
      2.0 * scale_llt_.matrixLLT().diagonal().array().log().sum();

  omega_ = params_.scale.diagonal().cwiseSqrt();
  eta_ = params_.shape.cwiseQuotient(omega_);
  const Vector inv_omega = omega_.cwiseInverse();
  const Matrix omega_bar =
      inv_omega.asDiagonal() * params_.scale * inv_omega.asDiagonal();
  corr_chol_ = cholesky(0.5 * (omega_bar + omega_bar.transpose()));

  const double quad = params_.shape.dot(omega_bar * params_.shape);
  const double norm = std::sqrt(1.0 + quad);
  delta_ = omega_bar * params_.shape / norm;
  gamma_ = omega_.cwiseProduct(delta_);
  selection_weights_ = params_.shape / norm;
  // 1 - delta' Omega_bar^-1 delta = 1 / (1 + alpha' Omega_bar alpha)
  selection_noise_sd_ = 1.0 / norm;
}

SmsnDistribution::Residual SmsnDistribution::residual(const Vector& x) const {
  require_dim(x, dim(), "evaluation point");
  const Vector r = x - params_.location;
  const Vector z = scale_llt_.matrixL().solve(r);
  return {z.squaredNorm(), eta_.dot(r)};
}

double SmsnDistribution::skew_normal_density(const Vector& x) const {
  const Residual res = residual(x);
  const double p = static_cast<double>(dim());
  const double log_phi =
      -0.5 * p * std::log(2.0 * kPi) - 0.5 * log_det_scale_ -
      0.5 * res.mahalanobis;
  return 2.0 * std::exp(log_phi) * normal_cdf(res.slant);
}

double SmsnDistribution::skew_t_density(const Vector& x, double nu) const {
  if (!(nu > 0.0)) throw Error(Errc::invalid_parameter, "nu must be > 0");
  const Residual res = residual(x);
  const double p = static_cast<double>(dim());
  const double log_t = std::lgamma(0.5 * (nu + p)) - std::lgamma(0.5 * nu) -
                       0.5 * p * std::log(nu * kPi) - 0.5 * log_det_scale_ -
                       0.5 * (nu + p) * std::log1p(res.mahalanobis / nu);
  const double arg =
      res.slant * std::sqrt((nu + p) / (res.mahalanobis + nu));
  return 2.0 * std::exp(log_t) * t_cdf(arg, nu + p);
}

double SmsnDistribution::mixture_density(const Vector& x, double tol) const {
  const Residual res = residual(x);
  const double p = static_cast<double>(dim());
  const double q_x = res.mahalanobis;
  const double slant = res.slant;
  const double log_const =
      std::log(2.0) - 0.5 * p * std::log(2.0 * kPi) - 0.5 * log_det_scale_;

  // Given the precision V = S^-2 = e^y the density is
  // 2 phi_p(x - xi; Omega / V) Phi(sqrt(V) slant). The integrand over y is
  // centred at its mode and scaled by the curvature there, so the quadrature
  // sees an O(1) bump wherever x sits.
  //
  // The log prior is log_norm + linear y + grow e^y + decay e^-y. Far in the
  // tails those exponential terms reach ~1e6 and cancel, so the integrand is
  // built from differences to the mode (expm1) rather than from raw values.
  // For negative slant the Gaussian factor of Phi joins the e^y term.
  const bool lower_tail = slant < 0.0;
  const double q_eff = lower_tail ? q_x + slant * slant : q_x;
  const auto log_cdf_part = [&](double y) {
    const double u = std::exp(0.5 * y) * slant;
    return lower_tail ? log_normal_cdf_scaled(u) : log_normal_cdf(u);
  };
  const auto over_log_precision = [&](double log_norm, double linear,
                                      double grow, double decay,
                                      double upper) {
    linear += 0.5 * p;
    grow -= 0.5 * q_eff;
    const auto log_integrand = [&](double y) {
      double v = log_norm + linear * y + log_cdf_part(y);
      if (grow != 0.0) v += grow * std::exp(y);
      if (decay != 0.0) v += decay * std::exp(-y);
      return v;
    };
    const auto peak = boost::math::tools::brent_find_minima(
        [&](double y) { return -log_integrand(y); }, -200.0,
        std::min(upper, 60.0), 40);
    const double mode = peak.first;
    const double log_peak = -peak.second;
    const double cdf_at_mode = log_cdf_part(mode);
    const double grow_at_mode = grow * std::exp(mode);
    const double decay_at_mode = decay * std::exp(-mode);
    const auto rise = [&](double d) {
      double v = linear * d + log_cdf_part(mode + d) - cdf_at_mode;
      if (grow != 0.0) v += grow_at_mode * std::expm1(d);
      if (decay != 0.0) v += decay_at_mode * std::expm1(-d);
      return v;
    };
    const double step = 1e-3;
    const double up = rise(step);
    const double down = rise(-step);
    const double curvature = -(up + down) / (step * step);
    const double slope = std::abs(up - down) / (2.0 * step);
    const double width =
        1.0 / std::max({std::sqrt(std::max(curvature, 0.0)), slope, 1e-3});
    const auto integrand = [&](double z) {
      const double lf = rise(width * z);
      if (!(lf > -745.0)) return 0.0;
      return std::exp(lf);
    };
    // Split at the mode: the half-infinite map would squeeze a bump that
    // sits far from the finite end.
    double total = integrate(integrand, -kInf, 0.0, tol).value;
    const double z_upper = (upper - mode) / width;
    if (z_upper > 0.0) total += integrate(integrand, 0.0, z_upper, tol).value;
    return std::exp(log_const + log_peak) * width * total;
  };

  return std::visit(
      [&](const auto& law) -> double {
        using Law = std::decay_t<decltype(law)>;
        if constexpr (std::is_same_v<Law, Degenerate>) {
          return skew_normal_density(x);
        } else if constexpr (std::is_same_v<Law, InvSqrtChiSq>) {
          // V ~ Gamma(nu/2, rate nu/2).
          const double half_nu = 0.5 * law.nu;
          const double log_norm =
              half_nu * std::log(half_nu) - std::lgamma(half_nu);
          return over_log_precision(log_norm, half_nu, -half_nu, 0.0, kInf);
        } else if constexpr (std::is_same_v<Law, SqrtGamma>) {
          // 1 / V ~ Gamma((dim + 1)/2, scale 8).
          const double shape = 0.5 * (law.dim + 1);
          const double log_norm = -std::lgamma(shape) - shape * std::log(8.0);
          return over_log_precision(log_norm, -shape, 0.0, -1.0 / 8.0, kInf);
        } else {
          // V = U^{2/q} on (0, 1) with density (q/2) v^{q/2 - 1}.
          const double half_q = 0.5 * law.q;
          return over_log_precision(std::log(half_q), half_q, 0.0, 0.0, 0.0);
        }
      },
      params_.mixing);
}

Matrix SmsnDistribution::sample(std::size_t n, RngStream& rng) const {
  if (n == 0) throw Error(Errc::invalid_parameter, "sample size must be >= 1");
  const Index p = dim();
  Matrix out(static_cast<Index>(n), p);
  Vector noise(p);
  for (Index i = 0; i < out.rows(); ++i) {
    for (Index j = 0; j < p; ++j) noise[j] = rng.normal();
    Vector u = corr_chol_.triangularView<Eigen::Lower>() * noise;
    // Selection: U0 correlated with U through delta; keep U when U0 > 0.
    const double u0 =
        selection_weights_.dot(u) + selection_noise_sd_ * rng.normal();
    if (u0 <= 0.0) u = -u;
    const double s = draw_mixing(params_.mixing, rng);
    out.row(i) = (params_.location + s * omega_.cwiseProduct(u)).transpose();
  }
  return out;
}

DerivedParams derive(const SmsnParams& params) {
  const SmsnDistribution dist(params);
  const double c1 = moment(params.mixing, 1);
  const double c2 = moment(params.mixing, 2);

  DerivedParams out;
  out.omega = dist.omega();
  const Vector inv_omega = out.omega.cwiseInverse();
  out.omega_bar =
      inv_omega.asDiagonal() * params.scale * inv_omega.asDiagonal();
  out.omega_bar.diagonal().setOnes();
  out.eta = dist.eta();
  out.delta = dist.delta();
  out.gamma = dist.gamma();
  out.mean = params.location + c1 * std::sqrt(2.0 / kPi) * out.gamma;
  out.covariance = c2 * params.scale -
                   (2.0 / kPi) * c1 * c1 * out.gamma * out.gamma.transpose();
  out.covariance = 0.5 * (out.covariance + out.covariance.transpose());
  return out;
}

ProjectionParams projection_params(const SmsnParams& params, const Vector& d) {
  const SmsnDistribution dist(params);
  require_dim(d, dist.dim(), "direction");
  if (d.squaredNorm() == 0.0) {
    throw Error(Errc::invalid_parameter, "direction must be non-zero");
  }
  ProjectionParams out;
  out.omega_d = d.dot(params.scale * d);
  const double dg = d.dot(dist.gamma());
  out.t = dg * dg;
  const double gap = out.omega_d - out.t;
  if (gap <= kDegenerateDirectionTol * out.omega_d) {
    throw Error(Errc::degenerate_direction,
                "projection reaches the half-normal limit");
  }
  out.alpha_d = dg / std::sqrt(gap);
  out.delta0_sq = out.t / out.omega_d;
  return out;
}

double density_sn(const Vector& x, const SmsnParams& params) {
  if (!std::holds_alternative<Degenerate>(params.mixing)) {
    throw Error(Errc::invalid_parameter,
                "density_sn requires degenerate mixing");
  }
  return SmsnDistribution(params).skew_normal_density(x);
}

double density_st(const Vector& x, const SmsnParams& params) {
  const auto* st = std::get_if<InvSqrtChiSq>(&params.mixing);
  if (st == nullptr) {
    throw Error(Errc::invalid_parameter, "density_st requires skew-t mixing");
  }
  return SmsnDistribution(params).skew_t_density(x, st->nu);
}

double density_smsn(const Vector& x, const SmsnParams& params, double tol) {
  return SmsnDistribution(params).mixture_density(x, tol);
}

Matrix sample(const SmsnParams& params, std::size_t n, RngStream& rng) {
  return SmsnDistribution(params).sample(n, rng);
}

}  // namespace smsn
