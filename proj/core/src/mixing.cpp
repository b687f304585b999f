#include "smsn/mixing.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "smsn/error.hpp"

namespace smsn {
namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

constexpr double kConditionSlack = 1e-12;

}  // namespace

std::string_view family_name(const MixingDistribution& m) {
  return std::visit(
      overloaded{
          [](const Degenerate&) { return std::string_view("sn"); },
          [](const InvSqrtChiSq&) { return std::string_view("st"); },
          [](const SqrtGamma&) { return std::string_view("sde"); },
          [](const InvPowUniform&) { return std::string_view("ssl"); },
      },
      m);
}

void validate(const MixingDistribution& m) {
  std::visit(
      overloaded{
          [](const Degenerate&) {},
          [](const InvSqrtChiSq& st) {
            if (!(st.nu > 0.0) || !std::isfinite(st.nu)) {
              throw Error(Errc::invalid_parameter, "skew-t requires nu > 0");
            }
          },
          [](const SqrtGamma& sde) {
            if (sde.dim < 1) {
              throw Error(Errc::invalid_parameter,
                          "double exponential mixing requires dim >= 1");
            }
          },
          [](const InvPowUniform& ssl) {
            if (!(ssl.q > 0.0) || !std::isfinite(ssl.q)) {
              throw Error(Errc::invalid_parameter, "skew-slash requires q > 0");
            }
          },
      },
      m);
}

bool moment_exists(const MixingDistribution& m, int k) {
  return std::visit(overloaded{
                        [](const Degenerate&) { return true; },
                        [k](const InvSqrtChiSq& st) { return st.nu > k; },
                        [](const SqrtGamma&) { return true; },
                        [k](const InvPowUniform& ssl) { return ssl.q > k; },
                    },
                    m);
}

double moment(const MixingDistribution& m, int k) {
  validate(m);
  if (k < 1) {
    throw Error(Errc::invalid_parameter, "moment order must be >= 1");
  }
  if (!moment_exists(m, k)) {
    throw Error(Errc::moment_undefined,
                "E(S^" + std::to_string(k) + ") is infinite for the " +
                    std::string(family_name(m)) + " mixing law");
  }
  const double kd = k;
  return std::visit(
      overloaded{
          [](const Degenerate&) { return 1.0; },
          [kd](const InvSqrtChiSq& st) {
            // (nu/2)^{k/2} Gamma((nu-k)/2) / Gamma(nu/2)
            return std::exp(0.5 * kd * std::log(0.5 * st.nu) +
                            log_gamma(0.5 * (st.nu - kd)) -
                            log_gamma(0.5 * st.nu));
          },
          [kd](const SqrtGamma& sde) {
            // E(W^{k/2}) = 8^{k/2} Gamma(shape + k/2) / Gamma(shape)
            const double shape = 0.5 * (sde.dim + 1);
            return std::exp(0.5 * kd * std::log(8.0) +
                            log_gamma(shape + 0.5 * kd) - log_gamma(shape));
          },
          [kd](const InvPowUniform& ssl) { return ssl.q / (ssl.q - kd); },
      },
      m);
}

SkewCoefficients coefficients(const MixingDistribution& m) {
  const double e1 = moment(m, 1);
  const double e2 = moment(m, 2);
  const double e3 = moment(m, 3);
  constexpr double pi = std::numbers::pi;
  return {(4.0 / pi) * e1 * e1 * e1 - e3, e1 * e2 - e3,
          (2.0 / pi) * e1 * e1 / e2};
}

MomentCondition check_moment_condition(const MixingDistribution& m) {
  const double e1 = moment(m, 1);
  const double e2 = moment(m, 2);
  MomentCondition out;
  out.lhs = (4.0 / std::numbers::pi) * e1 * e1;
  out.rhs = e2;
  out.holds = out.lhs - out.rhs >= -kConditionSlack * std::max(1.0, out.rhs);
  return out;
}

double draw_mixing(const MixingDistribution& m, RngStream& rng) {
  return std::visit(
      overloaded{
          [](const Degenerate&) { return 1.0; },
          [&rng](const InvSqrtChiSq& st) {
            // chi^2_nu / nu = Gamma(nu/2, scale 2/nu)
            const double v = rng.gamma(0.5 * st.nu, 2.0 / st.nu);
            return 1.0 / std::sqrt(v);
          },
          [&rng](const SqrtGamma& sde) {
            return std::sqrt(rng.gamma(0.5 * (sde.dim + 1), 8.0));
          },
          [&rng](const InvPowUniform& ssl) {
            return std::pow(rng.uniform(), -1.0 / ssl.q);
          },
      },
      m);
}

Vector sample_mixing(const MixingDistribution& m, std::size_t n,
                     RngStream& rng) {
  validate(m);
  if (n == 0) {
    throw Error(Errc::invalid_parameter, "sample size must be >= 1");
  }
  Vector out(static_cast<Index>(n));
  for (Index i = 0; i < out.size(); ++i) out[i] = draw_mixing(m, rng);
  return out;
}

}  // namespace smsn
