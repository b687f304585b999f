#include "smsn/numerics.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/beta.hpp>

#include "smsn/error.hpp"

namespace smsn {

std::string_view to_string(Errc code) noexcept {
  switch (code) {
    case Errc::invalid_parameter: return "invalid-parameter";
    case Errc::dim_mismatch: return "dim-mismatch";
    case Errc::not_spd: return "not-spd";
    case Errc::moment_undefined: return "moment-undefined";
    case Errc::degenerate_direction: return "degenerate-direction";
    case Errc::degenerate_sample: return "degenerate-sample";
    case Errc::rank_deficient: return "rank-deficient";
    case Errc::no_unique_direction: return "no-unique-direction";
    case Errc::quadrature_nonconvergence: return "quadrature-nonconvergence";
    case Errc::parse_error: return "parse-error";
    case Errc::io_error: return "io-error";
  }
  return "unknown";
}

void require_finite(const Eigen::Ref<const Matrix>& m, const char* what) {
  if (!m.allFinite()) {
    throw Error(Errc::invalid_parameter,
                std::string(what) + " has non-finite entries");
  }
}

Matrix toeplitz_corr(double rho, Index p) {
  if (!(std::abs(rho) < 1.0)) {
    throw Error(Errc::invalid_parameter, "toeplitz_corr requires |rho| < 1");
  }
  if (p < 1) {
    throw Error(Errc::invalid_parameter, "toeplitz_corr requires p >= 1");
  }
  Matrix out(p, p);
  for (Index i = 0; i < p; ++i) {
    for (Index j = 0; j < p; ++j) {
      out(i, j) = std::pow(rho, static_cast<double>(std::abs(i - j)));
    }
  }
  return out;
}

bool is_symmetric(const Matrix& a, double tol) {
  if (a.rows() != a.cols()) return false;
  const double scale = std::max(1.0, a.cwiseAbs().maxCoeff());
  return (a - a.transpose()).cwiseAbs().maxCoeff() <= tol * scale;
}

namespace {

Eigen::LLT<Matrix> checked_llt(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(Errc::dim_mismatch, "expected a non-empty square matrix");
  }
  require_finite(a, "matrix");
  Eigen::LLT<Matrix> llt(a);
  if (llt.info() != Eigen::Success) {
    throw Error(Errc::not_spd, "matrix is not positive definite");
  }
  return llt;
}

}  // namespace

Matrix cholesky(const Matrix& a) {
  return checked_llt(a).matrixL();
}

Vector spd_solve(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw Error(Errc::dim_mismatch, "spd_solve: right-hand side length");
  }
  return checked_llt(a).solve(b);
}

Matrix inv_sqrt_spd(const Matrix& a) {
  if (a.rows() != a.cols() || a.rows() == 0) {
    throw Error(Errc::dim_mismatch, "expected a non-empty square matrix");
  }
  require_finite(a, "matrix");
  Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
  if (eig.info() != Eigen::Success) {
    throw Error(Errc::not_spd, "eigendecomposition failed");
  }
  const Vector& values = eig.eigenvalues();
  if (values.minCoeff() <= 0.0) {
    throw Error(Errc::not_spd, "matrix is not positive definite");
  }
  const Matrix& vectors = eig.eigenvectors();
  Matrix out = vectors * values.cwiseSqrt().cwiseInverse().asDiagonal() *
               vectors.transpose();
  return 0.5 * (out + out.transpose());
}

double log_gamma(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) {
    throw Error(Errc::invalid_parameter, "log_gamma requires x > 0");
  }
  return std::lgamma(x);
}

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

double log_normal_cdf(double x) {
  if (std::isnan(x)) return x;
  if (x > 0.0) return std::log1p(-0.5 * std::erfc(x / std::sqrt(2.0)));
  return log_normal_cdf_scaled(x) - 0.5 * x * x;
}

double log_normal_cdf_scaled(double x) {
  if (std::isnan(x)) return x;
  if (x > 0.0) {
    throw Error(Errc::invalid_parameter, "log_normal_cdf_scaled requires x <= 0");
  }
  if (x > -37.0) return std::log(0.5 * std::erfc(-x / std::sqrt(2.0))) + 0.5 * x * x;
  // Mills ratio series; erfc underflows below here.
  const double r = 1.0 / (x * x);
  const double series =
      1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r * (1.0 - 9.0 * r))));
  return -std::log(-x) - 0.5 * std::log(2.0 * std::numbers::pi) + std::log(series);
}

double t_cdf(double x, double dof) {
  if (!(dof > 0.0) || std::isnan(x)) {
    throw Error(Errc::invalid_parameter, "t_cdf requires dof > 0");
  }
  if (std::isinf(x)) return x > 0 ? 1.0 : 0.0;
  if (x == 0.0) return 0.5;
  // P(|T| > |x|) = I_{dof / (dof + x^2)}(dof / 2, 1 / 2)
  const double z = dof / (dof + x * x);
  double tail;
  if (z < 0.5) {
    tail = 0.5 * boost::math::ibeta(0.5 * dof, 0.5, z);
  } else {
    // Complementary form keeps precision when x^2 << dof.
    const double w = x * x / (dof + x * x);
    tail = 0.5 * boost::math::ibetac(0.5, 0.5 * dof, w);
  }
  return x > 0 ? 1.0 - tail : tail;
}

namespace {

void check_converged(const char* method, double error, double l1, double tol) {
  if (!std::isfinite(error) || error > tol * std::max(l1, 1e-300)) {
    std::ostringstream msg;
    msg << method << " did not reach tolerance " << tol
        << " (error estimate " << error << ", L1 " << l1 << ")";
    throw Error(Errc::quadrature_nonconvergence, msg.str());
  }
}

}  // namespace

QuadratureResult integrate(const std::function<double(double)>& f,
                           double lower, double upper, double tol) {
  if (!(tol > 0.0)) {
    throw Error(Errc::invalid_parameter, "quadrature tolerance must be > 0");
  }
  if (!(lower < upper)) {
    throw Error(Errc::invalid_parameter, "quadrature requires lower < upper");
  }
  double error = 0.0;
  double l1 = 0.0;
  const double value = boost::math::quadrature::gauss_kronrod<double, 31>::
      integrate(f, lower, upper, 15, tol, &error, &l1);
  check_converged("gauss-kronrod", error, l1, tol);
  return {value, error};
}

QuadratureResult integrate_endpoint_singular(
    const std::function<double(double)>& f, double lower, double upper,
    double tol) {
  if (!(tol > 0.0)) {
    throw Error(Errc::invalid_parameter, "quadrature tolerance must be > 0");
  }
  if (!(lower < upper) || !std::isfinite(lower) || !std::isfinite(upper)) {
    throw Error(Errc::invalid_parameter,
                "tanh-sinh quadrature requires a finite interval");
  }
  thread_local boost::math::quadrature::tanh_sinh<double> integrator;
  double error = 0.0;
  double l1 = 0.0;
  std::size_t levels = 0;
  const double value =
      integrator.integrate(f, lower, upper, tol, &error, &l1, &levels);
  check_converged("tanh-sinh", error, l1, tol);
  return {value, error};
}

double quadrature(const std::function<double(double)>& f, double lower,
                  double upper, double tol) {
  return integrate(f, lower, upper, tol).value;
}

}  // namespace smsn
