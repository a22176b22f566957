#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include <json.hpp>

#include "anndyn/extlog.hpp"
#include "anndyn/logpolar.hpp"

namespace anndyn {

/// JSON has no infinities; non-finite values become the strings "inf",
/// "-inf" and "nan".
nlohmann::json json_number(double x);
nlohmann::json json_extlog(const ExtLog& v);
nlohmann::json json_logpolar(const LogPolar& p);
nlohmann::json json_complex(cplx z);

/// Shortest round-trip formatting ("%.17g" trimmed), "inf"/"-inf"/"nan".
std::string format_double(double x);

/// Writes `contents` to `path` through a temporary file in the same
/// directory followed by a rename.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

}  // namespace anndyn
