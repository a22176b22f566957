#include "anndyn/report.hpp"

#include <charconv>
#include <cmath>
#include <fstream>

#include "anndyn/error.hpp"

namespace anndyn {

nlohmann::json json_number(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return x;
}

nlohmann::json json_extlog(const ExtLog& v) { return {{"level", v.level()}, {"mantissa", v.mantissa()}}; }

nlohmann::json json_logpolar(const LogPolar& p) {
  return {{"logmod", json_number(p.logmod)}, {"arg", p.arg}, {"arg_reliable", p.arg_reliable}};
}

nlohmann::json json_complex(cplx z) { return nlohmann::json::array({json_number(z.real()), json_number(z.imag())}); }

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents) {
  namespace fs = std::filesystem;
  fs::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::Config, "cannot open " + tmp.string() + " for writing");
    out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
    if (!out) throw Error(ErrorCode::Config, "write failed for " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) throw Error(ErrorCode::Config, "rename to " + path.string() + " failed: " + ec.message());
}

}  // namespace anndyn
