#pragma once

#include <cstddef>
#include <string_view>
#include <variant>

#include "smsn/numerics.hpp"
#include "smsn/rng.hpp"

namespace smsn {

/// S = 1 almost surely (skew-normal).
struct Degenerate {};

/// S = V^{-1/2}, V ~ chi^2_nu / nu (skew-t). E(S^k) finite iff nu > k.
struct InvSqrtChiSq {
  double nu;
};

/// S = W^{1/2}, W ~ Gamma(shape (dim + 1) / 2, scale 8) (skew double
/// exponential). The shape is tied to the dimension of the model.
struct SqrtGamma {
  int dim;
};

/// S = U^{-1/q}, U ~ Uniform(0, 1) (skew-slash). E(S^k) finite iff q > k.
struct InvPowUniform {
  double q;
};

using MixingDistribution =
    std::variant<Degenerate, InvSqrtChiSq, SqrtGamma, InvPowUniform>;

/// Short family tag: "sn", "st", "sde" or "ssl".
std::string_view family_name(const MixingDistribution& m);

/// Throws invalid_parameter for out-of-domain variant parameters.
void validate(const MixingDistribution& m);

bool moment_exists(const MixingDistribution& m, int k);

/// Raw moment E(S^k), k >= 1. Gamma ratios are evaluated in log space.
/// Throws moment_undefined when the moment is infinite.
double moment(const MixingDistribution& m, int k);

/// Moment functionals of S that drive the skewness of linear projections:
///   a = (4/pi) E(S)^3 - E(S^3)
///   b = E(S) E(S^2) - E(S^3)       (always <= 0)
///   c = (2/pi) E(S)^2 / E(S^2)
struct SkewCoefficients {
  double a = 0.0;
  double b = 0.0;
  double c = 0.0;
};

SkewCoefficients coefficients(const MixingDistribution& m);

/// Outcome of checking (4/pi) E(S)^2 >= E(S^2).
struct MomentCondition {
  bool holds = false;
  double lhs = 0.0;  ///< (4/pi) E(S)^2
  double rhs = 0.0;  ///< E(S^2)
};

/// Differences down to -1e-12 count as equality (nu = 4 and the
/// one-dimensional double exponential sit exactly on the boundary).
MomentCondition check_moment_condition(const MixingDistribution& m);

double draw_mixing(const MixingDistribution& m, RngStream& rng);

Vector sample_mixing(const MixingDistribution& m, std::size_t n,
                     RngStream& rng);

}  // namespace smsn
