#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "grwalk/types.hpp"

namespace grwalk {

using Json = nlohmann::json;

/// Row-major, comma separated, no header. Values written with 17 significant digits.
void write_matrix_csv(const std::filesystem::path& path, const Matrix& m);
/// Throws ParseError with the offending line number on malformed input.
Matrix read_matrix_csv(const std::filesystem::path& path);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

Json to_json(const Matrix& m);
Matrix matrix_from_json(const Json& j);
Json to_json(const Vector& v);
Vector vector_from_json(const Json& j);

/// Formats a double with round-trip precision.
std::string format_double(double v);

}  // namespace grwalk
