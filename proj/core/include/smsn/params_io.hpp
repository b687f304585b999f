#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "smsn/model.hpp"

namespace smsn {

// Parameter documents look like
//   {"xi": [0, 0], "Omega": [[1, 0], [0, 1]], "alpha": [3, 0],
//    "mixing": {"type": "st", "nu": 4}}
// with mixing types "sn", "st" (nu), "sde" (optional p, must equal the
// dimension) and "ssl" (q). A missing "mixing" means "sn". Matrices are
// row-major arrays of rows.

/// Throws parse_error for malformed documents; the result is validated.
SmsnParams parse_params(std::string_view json_text);

SmsnParams load_params(const std::filesystem::path& path);

std::string params_to_json(const SmsnParams& params);

/// Reads a whole file; throws io_error.
std::string read_text_file(const std::filesystem::path& path);

/// Writes through a temporary sibling and renames it into place, so readers
/// never observe a partial file.
void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents);

}  // namespace smsn
