#pragma once

#include <functional>

#include <Eigen/Dense>

namespace smsn {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Throws invalid_parameter if any entry is NaN or infinite.
void require_finite(const Eigen::Ref<const Matrix>& m, const char* what);

/// Correlation matrix with entry (i, j) = rho^|i - j|.
Matrix toeplitz_corr(double rho, Index p);

/// Lower-triangular Cholesky factor L with L L' = A. Throws not_spd.
Matrix cholesky(const Matrix& a);

/// Solves A x = b for symmetric positive definite A.
Vector spd_solve(const Matrix& a, const Vector& b);

/// Symmetric inverse square root B (B A B = I) via eigendecomposition.
Matrix inv_sqrt_spd(const Matrix& a);

/// True when A is symmetric to a relative tolerance `tol`.
bool is_symmetric(const Matrix& a, double tol = 1e-12);

double log_gamma(double x);

/// Standard normal distribution function.
double normal_cdf(double x);

/// log Phi(x), accurate far into the lower tail.
double log_normal_cdf(double x);

/// log Phi(x) + x^2 / 2 for x <= 0: the Gaussian factor taken out, so it
/// varies slowly even where Phi(x) underflows.
double log_normal_cdf_scaled(double x);

/// Student t distribution function with `dof` degrees of freedom, through
/// the regularized incomplete beta function.
double t_cdf(double x, double dof);

struct QuadratureResult {
  double value = 0.0;
  double error_estimate = 0.0;
};

/// Adaptive Gauss-Kronrod quadrature over [lower, upper]; either bound may be
/// infinite. `tol` is relative to the L1 norm of the integrand. Throws
/// quadrature_nonconvergence when the estimate misses the tolerance.
QuadratureResult integrate(const std::function<double(double)>& f,
                           double lower, double upper, double tol);

/// Double-exponential (tanh-sinh) quadrature on a finite interval; tolerates
/// integrable endpoint singularities.
QuadratureResult integrate_endpoint_singular(
    const std::function<double(double)>& f, double lower, double upper,
    double tol);

/// Convenience wrapper returning just the value.
double quadrature(const std::function<double(double)>& f, double lower,
                  double upper, double tol);

}  // namespace smsn
