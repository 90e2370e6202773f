#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "envimp/envelope.hpp"
#include "envimp/implicitize.hpp"

namespace envimp {

inline constexpr const char* kToolVersion = "envimp 0.1.0";

/// Lowercase hex SHA-256 digest.
std::string sha256_hex(std::string_view bytes);

/// Shortest decimal that parses back to the same double; C locale.
std::string format_double(double v);
/// Inverse of format_double; accepts "inf"/"-inf"/"nan". Throws InvalidInput.
double parse_double(std::string_view text);

std::string read_text_file(const std::filesystem::path& path);
/// Writes to a temporary sibling, then renames over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view content);

// Family files: {"bidegree": [n1, n2], "x": [[..]], "y": .., "w": ..,
//                "domain": [[s_lo, s_hi], [t_lo, t_hi]]}
// Matrix row i holds the coefficients of s^i. Schema violations throw
// InvalidInput.
RationalFamily family_from_json(const nlohmann::json& doc);
nlohmann::json family_to_json(const RationalFamily& f);
RationalFamily parse_family(std::string_view text);

struct ResultFile {
  ImplicitApproximation approx;
  std::optional<RationalFamily> family;
  std::string input_fingerprint;
  std::string tool_version = kToolVersion;
};

nlohmann::json result_to_json(const ResultFile& r);
ResultFile result_from_json(const nlohmann::json& doc);
std::string serialize_result(const ResultFile& r);
ResultFile parse_result(std::string_view text);

}  // namespace envimp
