#pragma once

#include <cstdint>
#include <vector>

#include "smsn/mixing.hpp"
#include "smsn/model.hpp"
#include "smsn/numerics.hpp"

namespace smsn {

/// Squared standardized third central moment (m3 / m2^{3/2})^2 of a sample,
/// with biased (divide-by-n) moment estimators. Throws degenerate_sample for
/// fewer than three observations or zero variance.
double gamma1_univariate(const Eigen::Ref<const Vector>& y);

/// h(t) = (2/pi) t (a t - 3 b omega_d)^2, the squared skewness of a
/// unit-variance projection as a function of t = (d'gamma)^2.
/// Requires 0 <= t <= omega_d.
double h_objective(double t, double omega_d, const SkewCoefficients& coef);

struct AnalyticDirection {
  Vector direction;           ///< eta / |eta|, third projected moment >= 0
  bool condition_ok = false;  ///< (4/pi) E(S)^2 >= E(S^2)
};

/// Direction of maximal skewness, proportional to eta = omega^-1 alpha.
/// Throws no_unique_direction when alpha = 0. When the moment condition on
/// the mixing law fails the direction is still returned, flagged.
AnalyticDirection analytic_max_direction(const SmsnParams& params);

/// Squared skewness attained along Sigma^-1 gamma (zero when alpha = 0).
/// Under the moment condition this is the maximum over all directions.
double analytic_max_skewness(const SmsnParams& params);

/// Population squared skewness of d'X. Invariant to rescaling d.
double gamma1_population(const SmsnParams& params, const Vector& d);

/// gamma1_population with the covariance and moment coefficients computed
/// once, for evaluating many directions against one parameter set.
class ProjectionSkewness {
 public:
  explicit ProjectionSkewness(const SmsnParams& params);

  double operator()(const Vector& d) const;

  const Matrix& covariance() const { return covariance_; }
  const Vector& gamma() const { return gamma_; }
  const SkewCoefficients& coefficients() const { return coef_; }

 private:
  Matrix scale_;
  Matrix covariance_;
  Vector gamma_;
  SkewCoefficients coef_;
};

/// p x p^2 flattening of the sample third-moment tensor of standardized
/// data: column block j holds (1/n) sum_i u_i u_i' u_ij.
struct ThirdMomentMatrix {
  Matrix data;

  Index dim() const { return data.rows(); }
  /// Entry E[u_i u_j u_k].
  double operator()(Index i, Index j, Index k) const {
    return data(i, j * dim() + k);
  }
  /// Contraction T(., c, c).
  Vector contract(const Vector& c) const;
  /// Dominant left singular vector.
  Vector dominant_direction() const;
};

ThirdMomentMatrix third_moment_matrix(const Matrix& u);

struct EstimatorOptions {
  int restarts = 8;     ///< random unit starts in addition to the SVD start
  int max_iter = 500;   ///< per start
  double tol = 1e-10;   ///< on the change in objective (relative above 1)
  bool refine = true;   ///< false: report the SVD direction as is
  std::uint64_t seed = 0;
};

struct MaxSkewResult {
  Vector direction;               ///< unit norm, data coordinates
  Vector standardized_direction;  ///< unit norm, standardized coordinates
  double gamma1 = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> objective_trace;  ///< objective per accepted step
};

/// Empirical maximal skewness direction of an n x p data matrix.
///
/// Data are standardized with the sample mean and the symmetric inverse
/// square root of the (biased) sample covariance. The objective
/// f(c) = ((1/n) sum (c'u_i)^3)^2 is then maximized over the unit sphere,
/// starting from the dominant left singular vector of the third-moment matrix
/// and from `restarts` random unit vectors. Each step tries the power update
/// c <- T(., c, c) / |T(., c, c)| and falls back to a projected gradient step
/// with Armijo backtracking and normalization as retraction, so f never
/// decreases. The best start wins (ties: lowest start index). Directions are
/// signed so the projected third moment is nonnegative and mapped back with
/// the inverse square root of the sample covariance.
///
/// Throws rank_deficient for a singular sample covariance and
/// invalid_parameter when n < p + 2.
MaxSkewResult estimate_max_direction(const Matrix& x,
                                     const EstimatorOptions& opts = {});

}  // namespace smsn
