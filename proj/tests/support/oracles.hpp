#pragma once

// Test-only reference computations. Nothing here calls into the code path it
// is used to check: moment formulas are the alternative closed forms, the
// sphere search is brute force, and statistics are computed from raw draws.

#include <algorithm>
#include <cmath>
#include <limits>
#include <variant>
#include <numbers>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "smsn/mixing.hpp"
#include "smsn/model.hpp"
#include "smsn/numerics.hpp"
#include "smsn/rng.hpp"

namespace smsn::oracle {

constexpr double kPi = std::numbers::pi;

/// Double exponential mixing moment in the duplication-formula form
/// 2^{k/2} Gamma(p/2) Gamma(p+k) / (Gamma(p) Gamma((p+k)/2)).
inline double sde_moment_alt(int p, int k) {
  return std::exp(0.5 * k * std::log(2.0) + std::lgamma(0.5 * p) +
                  std::lgamma(p + k) - std::lgamma(p) -
                  std::lgamma(0.5 * (p + k)));
}

struct MeanAndError {
  double mean = 0.0;
  double std_error = 0.0;
};

inline MeanAndError mean_and_error(const std::vector<double>& xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  var /= static_cast<double>(xs.size() - 1);
  return {mean, std::sqrt(var / static_cast<double>(xs.size()))};
}

inline Matrix random_spd(Index p, RngStream& rng) {
  Matrix a(p, p);
  for (Index i = 0; i < p; ++i)
    for (Index j = 0; j < p; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + 0.5 * Matrix::Identity(p, p);
}

inline Matrix random_correlation(Index p, RngStream& rng) {
  const Matrix s = random_spd(p, rng);
  const Vector inv_sd = s.diagonal().cwiseSqrt().cwiseInverse();
  Matrix c = inv_sd.asDiagonal() * s * inv_sd.asDiagonal();
  c.diagonal().setOnes();
  return c;
}

/// Random valid parameter set: omega in [0.5, 3], random correlation,
/// alpha entries in [-5, 5].
inline SmsnParams random_params(Index p, MixingDistribution mixing,
                                RngStream& rng) {
  Vector omega(p);
  Vector alpha(p);
  for (Index j = 0; j < p; ++j) {
    omega[j] = 0.5 + 2.5 * rng.uniform();
    alpha[j] = -5.0 + 10.0 * rng.uniform();
  }
  SmsnParams params;
  params.location = Vector::Zero(p);
  for (Index j = 0; j < p; ++j) params.location[j] = rng.normal();
  params.scale = omega.asDiagonal() * random_correlation(p, rng) *
                 omega.asDiagonal();
  params.scale = 0.5 * (params.scale + params.scale.transpose());
  params.shape = alpha;
  if (auto* sde = std::get_if<SqrtGamma>(&mixing)) sde->dim = static_cast<int>(p);
  params.mixing = mixing;
  return params;
}

/// Quasi-uniform unit directions: a half circle for p = 2 (gamma1 is even),
/// a Fibonacci lattice for p = 3, uniform random directions otherwise.
inline std::vector<Vector> sphere_directions(Index p, std::size_t count,
                                             RngStream& rng) {
  std::vector<Vector> out;
  out.reserve(count);
  if (p == 2) {
    for (std::size_t i = 0; i < count; ++i) {
      const double theta = kPi * (static_cast<double>(i) + 0.5) /
                           static_cast<double>(count);
      Vector v(2);
      v << std::cos(theta), std::sin(theta);
      out.push_back(v);
    }
  } else if (p == 3) {
    const double golden = kPi * (3.0 - std::sqrt(5.0));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = 1.0 - 2.0 * (static_cast<double>(i) + 0.5) /
                                 static_cast<double>(count);
      const double r = std::sqrt(1.0 - z * z);
      const double phi = golden * static_cast<double>(i);
      Vector v(3);
      v << r * std::cos(phi), r * std::sin(phi), z;
      out.push_back(v);
    }
  } else {
    for (std::size_t i = 0; i < count; ++i) {
      Vector v(p);
      for (Index j = 0; j < p; ++j) v[j] = rng.normal();
      out.push_back(v.normalized());
    }
  }
  return out;
}

/// Direct Sigma^-1 through the rank-one update formula
/// (A + u v')^-1 = A^-1 - A^-1 u v' A^-1 / (1 + v' A^-1 u).
inline Matrix sherman_morrison_inverse(const Matrix& a, const Vector& u,
                                       const Vector& v) {
  const Matrix a_inv = a.inverse();
  const Vector au = a_inv * u;
  const Eigen::RowVectorXd va = v.transpose() * a_inv;
  return a_inv - au * va / (1.0 + v.dot(au));
}

/// Sample skewness squared from raw draws, accumulated in long double.
inline double sample_gamma1(const std::vector<double>& y) {
  long double mean = 0.0L;
  for (double v : y) mean += v;
  mean /= static_cast<long double>(y.size());
  long double m2 = 0.0L, m3 = 0.0L;
  for (double v : y) {
    const long double r = v - mean;
    m2 += r * r;
    m3 += r * r * r;
  }
  m2 /= static_cast<long double>(y.size());
  m3 /= static_cast<long double>(y.size());
  const long double s = m3 / std::pow(m2, 1.5L);
  return static_cast<double>(s * s);
}

/// Density of the distribution through the path a user of its family would
/// take: closed forms for SN and ST, quadrature over the mixing law otherwise.
inline double family_density(const SmsnDistribution& dist, const Vector& x,
                             double tol = 1e-10) {
  const auto& mixing = dist.params().mixing;
  if (std::holds_alternative<Degenerate>(mixing))
    return dist.skew_normal_density(x);
  if (const auto* st = std::get_if<InvSqrtChiSq>(&mixing))
    return dist.skew_t_density(x, st->nu);
  return dist.mixture_density(x, tol);
}

/// Total mass of a p = 1 or p = 2 density over the whole space, by nested
/// adaptive quadrature on infinite intervals.
inline double total_mass(const SmsnDistribution& dist, double tol = 1e-9) {
  using Rule = boost::math::quadrature::gauss_kronrod<double, 31>;
  const double inf = std::numeric_limits<double>::infinity();
  const Vector& xi = dist.params().location;
  if (dist.dim() == 1) {
    return Rule::integrate([&](double x) {
      Vector v(1);
      v << xi[0] + x;
      return family_density(dist, v);
    }, -inf, inf, 20, tol);
  }
  return Rule::integrate([&](double x) {
    return Rule::integrate([&](double y) {
      Vector v(2);
      v << xi[0] + x, xi[1] + y;
      return family_density(dist, v);
    }, -inf, inf, 15, tol);
  }, -inf, inf, 15, tol);
}

/// Standard error of the full-sample squared skewness, estimated from the
/// spread of the statistic over `batches` equal batches.
inline double gamma1_standard_error(const std::vector<double>& y,
                                    std::size_t batches = 100) {
  const std::size_t size = y.size() / batches;
  std::vector<double> stats;
  for (std::size_t b = 0; b < batches; ++b) {
    std::vector<double> part(y.begin() + b * size, y.begin() + (b + 1) * size);
    stats.push_back(sample_gamma1(part));
  }
  return mean_and_error(stats).std_error;
}

/// Squared skewness of SN_1 with correlation parameter delta, in the usual
/// closed form ((4 - pi)/2)^2 (2 delta^2/pi)^3 / (1 - 2 delta^2/pi)^3.
inline double sn_gamma1(double delta) {
  const double m = 2.0 * delta * delta / kPi;
  const double k = (4.0 - kPi) / 2.0;
  return k * k * m * m * m / ((1.0 - m) * (1.0 - m) * (1.0 - m));
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
struct KsResult {
  double statistic = 0.0;
  double p_value = 0.0;
};

inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  const double ne = na * nb / (na + nb);
  const double lambda = (std::sqrt(ne) + 0.12 + 0.11 / std::sqrt(ne)) * d;
  double p = 0.0;
  for (int k = 1; k <= 100; ++k) {
    p += 2.0 * ((k % 2) ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
  }
  return {d, std::clamp(p, 0.0, 1.0)};
}

}  // namespace smsn::oracle
