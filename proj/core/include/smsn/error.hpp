#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smsn {

enum class Errc {
  invalid_parameter,
  dim_mismatch,
  not_spd,
  moment_undefined,
  degenerate_direction,
  degenerate_sample,
  rank_deficient,
  no_unique_direction,
  quadrature_nonconvergence,
  parse_error,
  io_error,
};

std::string_view to_string(Errc code) noexcept;

/// Exception carrying a machine-readable category alongside the message.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace smsn
