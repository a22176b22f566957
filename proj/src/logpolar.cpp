#include "anndyn/logpolar.hpp"

#include <cmath>
#include <limits>

namespace anndyn {

double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  if (!std::isfinite(a)) return a;
  double r = std::remainder(a, two_pi);
  if (r <= -std::numbers::pi) r += two_pi;
  return r;
}

LogPolar LogPolar::from_complex(cplx z) { return LogPolar(std::log(std::abs(z)), std::arg(z)); }

cplx LogPolar::to_complex() const { return std::polar(std::exp(logmod), arg); }

ExtPoint ExtPoint::from_complex(cplx z) {
  ExtPoint p;
  p.modulus = ExtLog::from_double(std::abs(z));
  p.arg = std::arg(z);
  p.arg_reliable = true;
  p.log_rel_err = 2.0 * std::numeric_limits<double>::epsilon();
  return p;
}

ExtPoint ExtPoint::from_logpolar(const LogPolar& lp, double log_abs_err) {
  ExtPoint p;
  p.modulus = ExtLog::from_log(lp.logmod);
  p.arg = lp.arg;
  p.arg_reliable = lp.arg_reliable;
  p.log_rel_err = log_abs_err / std::max(1.0, std::abs(lp.logmod));
  return p;
}

std::optional<double> ExtPoint::log_modulus() const {
  if (modulus.is_zero()) return -std::numeric_limits<double>::infinity();
  return modulus.log_value();
}

std::optional<cplx> ExtPoint::to_complex() const {
  auto v = modulus.to_double();
  if (!v) return std::nullopt;
  return std::polar(*v, arg);
}

std::optional<LogPolar> ExtPoint::to_logpolar() const {
  auto lm = log_modulus();
  if (!lm) return std::nullopt;
  return LogPolar(*lm, arg, arg_reliable);
}

ExtLog ExtPoint::modulus_lower_bound() const {
  if (modulus.is_zero()) return modulus;
  if (auto lm = modulus.log_value()) {
    double abs_err = log_rel_err * std::max(1.0, std::abs(*lm));
    return ExtLog::from_log(*lm - abs_err);
  }
  if (log_rel_err >= 1.0) return ExtLog();
  return modulus.log().scaled(1.0 - log_rel_err).exp();
}

}  // namespace anndyn
