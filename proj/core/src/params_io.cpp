#include "smsn/params_io.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "smsn/error.hpp"

namespace smsn {
namespace {

using nlohmann::json;

Vector vector_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw Error(Errc::parse_error,
                std::string("'") + key + "' must be a non-empty array");
  }
  Vector out(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) {
      throw Error(Errc::parse_error,
                  std::string("'") + key + "' entries must be numbers");
    }
    out[static_cast<Index>(i)] = j[i].get<double>();
  }
  return out;
}

Matrix matrix_from_json(const json& j, const char* key) {
  if (!j.is_array() || j.empty()) {
    throw Error(Errc::parse_error,
                std::string("'") + key + "' must be an array of rows");
  }
  const std::size_t rows = j.size();
  const std::size_t cols = j[0].is_array() ? j[0].size() : 0;
  Matrix out(static_cast<Index>(rows), static_cast<Index>(cols));
  for (std::size_t i = 0; i < rows; ++i) {
    if (!j[i].is_array() || j[i].size() != cols || cols == 0) {
      throw Error(Errc::parse_error,
                  std::string("'") + key + "' rows must have equal length");
    }
    for (std::size_t k = 0; k < cols; ++k) {
      if (!j[i][k].is_number()) {
        throw Error(Errc::parse_error,
                    std::string("'") + key + "' entries must be numbers");
      }
      out(static_cast<Index>(i), static_cast<Index>(k)) =
          j[i][k].get<double>();
    }
  }
  return out;
}

double number_field(const json& j, const char* key) {
  if (!j.contains(key) || !j.at(key).is_number()) {
    throw Error(Errc::parse_error,
                std::string("mixing requires numeric '") + key + "'");
  }
  return j.at(key).get<double>();
}

MixingDistribution mixing_from_json(const json& j, Index dim) {
  if (!j.is_object() || !j.contains("type") || !j.at("type").is_string()) {
    throw Error(Errc::parse_error, "'mixing' must be an object with 'type'");
  }
  const auto type = j.at("type").get<std::string>();
  if (type == "sn") return Degenerate{};
  if (type == "st") return InvSqrtChiSq{number_field(j, "nu")};
  if (type == "ssl") return InvPowUniform{number_field(j, "q")};
  if (type == "sde") {
    const int p = j.contains("p") ? static_cast<int>(number_field(j, "p"))
                                  : static_cast<int>(dim);
    return SqrtGamma{p};
  }
  throw Error(Errc::parse_error, "unknown mixing type '" + type + "'");
}

json mixing_to_json(const MixingDistribution& m) {
  json out;
  out["type"] = std::string(family_name(m));
  if (const auto* st = std::get_if<InvSqrtChiSq>(&m)) out["nu"] = st->nu;
  if (const auto* sde = std::get_if<SqrtGamma>(&m)) out["p"] = sde->dim;
  if (const auto* ssl = std::get_if<InvPowUniform>(&m)) out["q"] = ssl->q;
  return out;
}

}  // namespace

SmsnParams parse_params(std::string_view json_text) {
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(Errc::parse_error, e.what());
  }
  if (!doc.is_object()) {
    throw Error(Errc::parse_error, "parameter document must be an object");
  }
  for (const char* key : {"xi", "Omega", "alpha"}) {
    if (!doc.contains(key)) {
      throw Error(Errc::parse_error, std::string("missing '") + key + "'");
    }
  }
  SmsnParams params;
  params.location = vector_from_json(doc["xi"], "xi");
  params.scale = matrix_from_json(doc["Omega"], "Omega");
  params.shape = vector_from_json(doc["alpha"], "alpha");
  params.mixing = doc.contains("mixing")
                      ? mixing_from_json(doc["mixing"], params.dim())
                      : MixingDistribution{Degenerate{}};
  validate(params);
  return params;
}

SmsnParams load_params(const std::filesystem::path& path) {
  return parse_params(read_text_file(path));
}

std::string params_to_json(const SmsnParams& params) {
  json doc;
  doc["xi"] = std::vector<double>(params.location.begin(),
                                  params.location.end());
  json rows = json::array();
  for (Index i = 0; i < params.scale.rows(); ++i) {
    json row = json::array();
    for (Index k = 0; k < params.scale.cols(); ++k) {
      row.push_back(params.scale(i, k));
    }
    rows.push_back(std::move(row));
  }
  doc["Omega"] = std::move(rows);
  doc["alpha"] = std::vector<double>(params.shape.begin(), params.shape.end());
  doc["mixing"] = mixing_to_json(params.mixing);
  return doc.dump();
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::io_error, "cannot open " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

void write_file_atomic(const std::filesystem::path& path,
                       std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(Errc::io_error, "cannot write " + tmp.string());
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) {
      std::error_code ignored;
      fs::remove(tmp, ignored);
      throw Error(Errc::io_error, "short write to " + tmp.string());
    }
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp, ec);
    throw Error(Errc::io_error, "cannot move output into " + path.string());
  }
}

}  // namespace smsn
