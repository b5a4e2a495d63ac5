#pragma once

// Tensor file formats: voigt6, kelvin6, full81, matrix3 (whitespace separated
// numbers, '#' starts a comment) and json (explicit "format" field).

#include <array>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "devitensor/spectral.hpp"

namespace devitensor {

enum class InputFormat { Voigt6, Kelvin6, Full81, Matrix3, Json };

inline constexpr std::array<std::string_view, 5> kFormatNames{"voigt6", "kelvin6", "full81", "matrix3", "json"};

inline InputFormat parse_format(std::string_view name) {
  for (std::size_t i = 0; i < kFormatNames.size(); ++i)
    if (kFormatNames[i] == name) return static_cast<InputFormat>(i);
  throw Error(ErrorCode::ParseError, "unknown format '" + std::string(name) + "'");
}

constexpr std::string_view to_string(InputFormat f) { return kFormatNames[static_cast<std::size_t>(f)]; }

/// Stiffness: V_IJ = C_ijkl. Compliance (engineering shear strain):
/// V_IJ = C_ijkl f_I f_J with f = 1 for I ≤ 3 and 2 for I > 3.
enum class VoigtConvention { Stiffness, Compliance };

inline VoigtConvention parse_voigt_convention(std::string_view name) {
  if (name == "stiffness") return VoigtConvention::Stiffness;
  if (name == "compliance") return VoigtConvention::Compliance;
  throw Error(ErrorCode::ParseError, "unknown Voigt convention '" + std::string(name) + "'");
}

using Matrix6 = std::array<std::array<double, 6>, 6>;

inline double voigt_factor(int m, VoigtConvention conv) {
  return conv == VoigtConvention::Compliance && m >= 3 ? 2.0 : 1.0;
}

inline DenseTensor voigt_to_tensor(const Matrix6& v, VoigtConvention conv = VoigtConvention::Stiffness) {
  DenseTensor c(4);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      for (int k = 0; k < 3; ++k)
        for (int l = 0; l < 3; ++l) {
          const int m = kelvin_index(i, j), n = kelvin_index(k, l);
          c(i, j, k, l) = v[m][n] / (voigt_factor(m, conv) * voigt_factor(n, conv));
        }
  return c;
}

inline Matrix6 tensor_to_voigt(const DenseTensor& c, VoigtConvention conv = VoigtConvention::Stiffness) {
  if (c.order() != 4) throw Error(ErrorCode::DimensionError, "Voigt form needs an order-4 tensor");
  Matrix6 v{};
  for (int m = 0; m < 6; ++m)
    for (int n = 0; n < 6; ++n) {
      const auto [i, j] = kKelvinPairs[m];
      const auto [k, l] = kKelvinPairs[n];
      v[m][n] = c(i, j, k, l) * voigt_factor(m, conv) * voigt_factor(n, conv);
    }
  return v;
}

struct TensorFile {
  InputFormat format = InputFormat::Full81;
  DenseTensor tensor{4};
  std::string name;
  std::string units;
};

namespace detail {

struct Row {
  int line = 0;
  std::vector<double> values;
};

inline double parse_number(const std::string& tok, int line, int column, int row) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != tok.size())
    throw Error(ErrorCode::ParseError, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                           ": invalid number '" + tok + "' in row " + std::to_string(row));
  if (!std::isfinite(v))
    throw Error(ErrorCode::NonFinite, "line " + std::to_string(line) + ", column " + std::to_string(column) +
                                          ": non-finite value in row " + std::to_string(row));
  return v;
}

/// Non-empty lines after comment stripping; commas count as whitespace.
inline std::vector<Row> read_rows(std::string_view text) {
  std::vector<Row> rows;
  std::istringstream in{std::string(text)};
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    Row row{lineno, {}};
    std::size_t pos = 0;
    while (pos < line.size()) {
      while (pos < line.size() && (std::isspace(static_cast<unsigned char>(line[pos])) || line[pos] == ',')) ++pos;
      if (pos >= line.size()) break;
      const std::size_t start = pos;
      while (pos < line.size() && !std::isspace(static_cast<unsigned char>(line[pos])) && line[pos] != ',') ++pos;
      row.values.push_back(parse_number(line.substr(start, pos - start), lineno, static_cast<int>(start) + 1,
                                        static_cast<int>(rows.size()) + 1));
    }
    if (!row.values.empty()) rows.push_back(std::move(row));
  }
  return rows;
}

template <std::size_t N>
std::array<std::array<double, N>, N> square_from_rows(const std::vector<Row>& rows, std::string_view what) {
  for (std::size_t r = 0; r < rows.size(); ++r) {
    if (r >= N)
      throw Error(ErrorCode::ParseError, std::string(what) + ": unexpected row " + std::to_string(r + 1) + " at line " +
                                             std::to_string(rows[r].line) + ", expected " + std::to_string(N) + " rows");
    if (rows[r].values.size() != N)
      throw Error(ErrorCode::ParseError, std::string(what) + ": row " + std::to_string(r + 1) + " at line " +
                                             std::to_string(rows[r].line) + " has " +
                                             std::to_string(rows[r].values.size()) + " entries, expected " +
                                             std::to_string(N));
  }
  if (rows.size() < N)
    throw Error(ErrorCode::ParseError, std::string(what) + ": row " + std::to_string(rows.size() + 1) +
                                           " missing, expected " + std::to_string(N) + " rows");
  std::array<std::array<double, N>, N> m{};
  for (std::size_t r = 0; r < N; ++r)
    for (std::size_t c = 0; c < N; ++c) m[r][c] = rows[r].values[c];
  return m;
}

/// Symmetric within `rel`·‖M‖, reporting the worst (I, J) pair otherwise.
inline void require_symmetric6(const Matrix6& m, double rel) {
  double nrm = 0.0, worst = 0.0;
  int wi = 0, wj = 0;
  for (int i = 0; i < 6; ++i)
    for (int j = 0; j < 6; ++j) {
      nrm += m[i][j] * m[i][j];
      if (const double r = std::abs(m[i][j] - m[j][i]); r > worst) {
        worst = r;
        wi = i;
        wj = j;
      }
    }
  if (worst > rel * std::sqrt(nrm))
    throw Error(ErrorCode::SymmetryViolation, "6x6 matrix not symmetric: residual " + std::to_string(worst) +
                                                  " between entries (" + std::to_string(wi + 1) + "," +
                                                  std::to_string(wj + 1) + ") and (" + std::to_string(wj + 1) + "," +
                                                  std::to_string(wi + 1) + ")");
}

inline DenseTensor from_square6(const Matrix6& m, InputFormat fmt, VoigtConvention conv, double sym_rel) {
  require_symmetric6(m, sym_rel);
  return fmt == InputFormat::Kelvin6 ? kelvin_unmap(m) : voigt_to_tensor(m, conv);
}

inline std::vector<double> flatten_json(const nlohmann::json& j) {
  std::vector<double> out;
  if (j.is_array()) {
    for (const auto& e : j) {
      const auto sub = flatten_json(e);
      out.insert(out.end(), sub.begin(), sub.end());
    }
  } else if (j.is_number()) {
    out.push_back(j.get<double>());
  } else {
    throw Error(ErrorCode::ParseError, "json: data entries must be numbers, found " + std::string(j.type_name()));
  }
  return out;
}

inline std::vector<Row> json_rows(const nlohmann::json& data) {
  if (!data.is_array()) throw Error(ErrorCode::ParseError, "json: \"data\" must be an array");
  std::vector<Row> rows;
  int r = 0;
  for (const auto& row : data) {
    ++r;
    if (!row.is_array()) throw Error(ErrorCode::ParseError, "json: row " + std::to_string(r) + " is not an array");
    rows.push_back({r, flatten_json(row)});
  }
  return rows;
}

}  // namespace detail

/// Parses file contents. `fmt` may not be Json when the text is not JSON;
/// for Json the document's "format" field selects the payload layout.
inline TensorFile parse_tensor_text(std::string_view text, InputFormat fmt,
                                    VoigtConvention conv = VoigtConvention::Stiffness, const Tolerances& tol = {}) {
  TensorFile out;
  out.format = fmt;
  std::vector<detail::Row> rows;
  std::vector<double> flat;
  if (fmt == InputFormat::Json) {
    nlohmann::json doc;
    try {
      doc = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
      throw Error(ErrorCode::ParseError, std::string("json: ") + e.what());
    }
    if (!doc.is_object() || !doc.contains("format") || !doc["format"].is_string())
      throw Error(ErrorCode::ParseError, "json: missing string field \"format\"");
    if (!doc.contains("data")) throw Error(ErrorCode::ParseError, "json: missing field \"data\"");
    out.format = parse_format(doc["format"].get<std::string>());
    if (out.format == InputFormat::Json) throw Error(ErrorCode::ParseError, "json: \"format\" cannot be json");
    if (doc.contains("voigt_convention") && doc["voigt_convention"].is_string())
      conv = parse_voigt_convention(doc["voigt_convention"].get<std::string>());
    if (doc.contains("name") && doc["name"].is_string()) out.name = doc["name"].get<std::string>();
    if (doc.contains("units") && doc["units"].is_string()) out.units = doc["units"].get<std::string>();
    if (out.format == InputFormat::Full81)
      flat = detail::flatten_json(doc["data"]);
    else
      rows = detail::json_rows(doc["data"]);
  } else {
    rows = detail::read_rows(text);
    if (fmt == InputFormat::Full81)
      for (const auto& r : rows) flat.insert(flat.end(), r.values.begin(), r.values.end());
  }

  switch (out.format) {
    case InputFormat::Voigt6:
    case InputFormat::Kelvin6:
      out.tensor = detail::from_square6(detail::square_from_rows<6>(rows, to_string(out.format)), out.format, conv,
                                        tol.stiffness_accept);
      break;
    case InputFormat::Matrix3: {
      const auto m = detail::square_from_rows<3>(rows, "matrix3");
      out.tensor = DenseTensor(2);
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) out.tensor(i, j) = m[i][j];
      break;
    }
    case InputFormat::Full81:
      if (flat.size() != 81)
        throw Error(ErrorCode::DimensionError, "full81: expected 81 numbers, found " + std::to_string(flat.size()));
      out.tensor = DenseTensor::from_coeffs(4, flat);
      break;
    case InputFormat::Json:
      break;
  }
  return out;
}

inline TensorFile parse_tensor_file(const std::string& path, InputFormat fmt,
                                    VoigtConvention conv = VoigtConvention::Stiffness, const Tolerances& tol = {}) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::ParseError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  TensorFile out = parse_tensor_text(buf.str(), fmt, conv, tol);
  if (out.name.empty()) out.name = path;
  return out;
}

}  // namespace devitensor
