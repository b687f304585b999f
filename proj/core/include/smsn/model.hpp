#pragma once

#include <cstddef>

#include "smsn/mixing.hpp"
#include "smsn/numerics.hpp"
#include "smsn/rng.hpp"

namespace smsn {

/// User-facing parameterization SMSN_p(xi, Omega, alpha, H).
struct SmsnParams {
  Vector location;  ///< xi
  Matrix scale;     ///< Omega, symmetric positive definite
  Vector shape;     ///< alpha
  MixingDistribution mixing = Degenerate{};

  Index dim() const { return location.size(); }
};

/// Checks dimensions, symmetry and positive definiteness of the scale
/// matrix, and the mixing law (a double exponential law must match dim()).
void validate(const SmsnParams& params);

/// Quantities derived from SmsnParams.
struct DerivedParams {
  Vector omega;      ///< diagonal of omega = (Omega . I)^{1/2}
  Matrix omega_bar;  ///< correlation matrix omega^-1 Omega omega^-1
  Vector eta;        ///< omega^-1 alpha
  Vector delta;      ///< Omega_bar alpha / sqrt(1 + alpha' Omega_bar alpha)
  Vector gamma;      ///< omega delta = Omega eta / sqrt(1 + eta' Omega eta)
  Vector mean;       ///< xi + E(S) sqrt(2/pi) gamma
  Matrix covariance; ///< E(S^2) Omega - (2/pi) E(S)^2 gamma gamma'
};

/// Throws moment_undefined when E(S^2) is infinite.
DerivedParams derive(const SmsnParams& params);

/// Parameters of the scalar projection d'(X - xi) = S Z0 with
/// Z0 ~ SN_1(0, omega_d, alpha_d).
struct ProjectionParams {
  double omega_d = 0.0;    ///< d' Omega d
  double alpha_d = 0.0;    ///< d'gamma / sqrt(omega_d - (d'gamma)^2)
  double delta0_sq = 0.0;  ///< (d'gamma)^2 / omega_d, in [0, 1]
  double t = 0.0;          ///< (d'gamma)^2
};

/// Throws degenerate_direction when omega_d - t <= 1e-12 omega_d and
/// invalid_parameter for d = 0.
ProjectionParams projection_params(const SmsnParams& params, const Vector& d);

/// Validated parameter set with the factorizations needed for repeated
/// density evaluation and sampling. Immutable after construction.
class SmsnDistribution {
 public:
  explicit SmsnDistribution(SmsnParams params);

  const SmsnParams& params() const { return params_; }
  Index dim() const { return params_.dim(); }
  const Vector& omega() const { return omega_; }
  const Vector& eta() const { return eta_; }
  const Vector& delta() const { return delta_; }
  const Vector& gamma() const { return gamma_; }

  /// Skew-normal density 2 phi_p(x - xi; Omega) Phi(alpha' omega^-1 (x - xi)),
  /// ignoring the mixing law.
  double skew_normal_density(const Vector& x) const;

  /// Closed-form skew-t density for the given degrees of freedom.
  double skew_t_density(const Vector& x, double nu) const;

  /// Mixture density integral over the mixing law, to relative tolerance
  /// `tol`. Degenerate mixing short-circuits to the skew-normal density.
  double mixture_density(const Vector& x, double tol) const;

  /// n x p matrix of independent draws.
  Matrix sample(std::size_t n, RngStream& rng) const;

 private:
  struct Residual {
    double mahalanobis;  ///< (x - xi)' Omega^-1 (x - xi)
    double slant;        ///< eta' (x - xi)
  };
  Residual residual(const Vector& x) const;

  SmsnParams params_;
  Eigen::LLT<Matrix> scale_llt_;
  double log_det_scale_ = 0.0;
  Vector omega_;
  Vector eta_;
  Vector delta_;
  Vector gamma_;
  Matrix corr_chol_;         ///< Cholesky factor of Omega_bar
  Vector selection_weights_; ///< Omega_bar^-1 delta
  double selection_noise_sd_ = 0.0;
};

/// Skew-normal density; requires Degenerate mixing.
double density_sn(const Vector& x, const SmsnParams& params);

/// Skew-t density; requires InvSqrtChiSq mixing.
double density_st(const Vector& x, const SmsnParams& params);

/// Density of any family by quadrature over the mixing law.
double density_smsn(const Vector& x, const SmsnParams& params,
                    double tol = 1e-8);

Matrix sample(const SmsnParams& params, std::size_t n, RngStream& rng);

}  // namespace smsn
