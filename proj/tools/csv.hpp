#pragma once

#include <string>
#include <string_view>

#include "smsn/numerics.hpp"

namespace smsn::cli {

/// Numeric CSV with an optional header row; every row needs the same number
/// of columns. Throws smsn::Error(parse_error).
Matrix parse_numeric_csv(std::string_view text);

/// CSV with header x1..xp and full round-trip precision.
std::string format_sample_csv(const Matrix& x);

}  // namespace smsn::cli
