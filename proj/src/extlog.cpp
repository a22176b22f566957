#include "anndyn/extlog.hpp"

#include <cmath>
#include <sstream>

#include "anndyn/error.hpp"

namespace anndyn {

namespace {
const double kLogCeiling = std::log(ExtLog::kCeiling);
}

ExtLog ExtLog::from_double(double x) {
  if (!(x >= 0.0)) throw Error(ErrorCode::Domain, "ExtLog requires a nonnegative value");
  if (std::isinf(x)) throw Error(ErrorCode::Overflow, "ExtLog::from_double of infinity");
  ExtLog v(0, x);
  v.normalize();
  return v;
}

ExtLog ExtLog::from_log(double log_x) {
  if (std::isnan(log_x)) throw Error(ErrorCode::Domain, "ExtLog::from_log of NaN");
  if (log_x == -INFINITY) return ExtLog();
  if (log_x < kLogCeiling) return ExtLog(0, std::exp(log_x));
  return tower(1, log_x);
}

ExtLog ExtLog::tower(int level, double mantissa) {
  if (level < 0) throw Error(ErrorCode::Domain, "negative ExtLog level");
  if (!(mantissa >= 0.0)) throw Error(ErrorCode::Domain, "negative ExtLog mantissa");
  if (std::isinf(mantissa)) throw Error(ErrorCode::Overflow, "infinite ExtLog mantissa");
  ExtLog v(level, mantissa);
  v.normalize();
  return v;
}

void ExtLog::normalize() {
  while (mantissa_ >= kCeiling) {
    mantissa_ = std::log(mantissa_);
    ++level_;
  }
  while (level_ > 0 && mantissa_ < kLogCeiling) {
    mantissa_ = std::exp(mantissa_);
    --level_;
  }
}

std::optional<double> ExtLog::to_double() const {
  switch (level_) {
    case 0:
      return mantissa_;
    case 1:
      return std::exp(mantissa_);
    case 2: {
      double v = std::exp(std::exp(mantissa_));
      if (std::isfinite(v)) return v;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

std::optional<double> ExtLog::log_value() const {
  switch (level_) {
    case 0:
      return std::log(mantissa_);
    case 1:
      return mantissa_;
    case 2:
      return std::exp(mantissa_);
    case 3: {
      double v = std::exp(std::exp(mantissa_));
      if (std::isfinite(v)) return v;
      return std::nullopt;
    }
    default:
      return std::nullopt;
  }
}

ExtLog ExtLog::exp() const { return tower(level_ + 1, mantissa_); }

ExtLog ExtLog::log() const {
  if (level_ == 0) {
    if (mantissa_ < 1.0) throw Error(ErrorCode::Domain, "ExtLog::log of a value below 1");
    return ExtLog(0, std::log(mantissa_));
  }
  return tower(level_ - 1, mantissa_);
}

ExtLog ExtLog::scaled(double factor) const {
  if (!(factor > 0.0)) throw Error(ErrorCode::Domain, "ExtLog::scaled requires factor > 0");
  if (is_zero()) return *this;
  if (level_ == 0) {
    double v = mantissa_ * factor;
    if (std::isfinite(v)) return from_double(v);
  }
  if (auto lv = log_value()) return from_log(*lv + std::log(factor));
  return log().shifted(std::log(factor)).exp();
}

ExtLog ExtLog::shifted(double shift) const {
  if (level_ == 0) {
    double v = mantissa_ + shift;
    if (v < 0.0) {
      if (v > -1e-12 * (std::abs(mantissa_) + std::abs(shift))) return ExtLog();
      throw Error(ErrorCode::Domain, "ExtLog::shifted would go negative");
    }
    return from_double(v);
  }
  auto lv = log_value();
  if (!lv) return *this;
  double rel = shift * std::exp(-*lv);
  if (rel <= -1.0) throw Error(ErrorCode::Domain, "ExtLog::shifted would go negative");
  return from_log(*lv + std::log1p(rel));
}

ExtLog ExtLog::pow(double power) const {
  if (!(power > 0.0)) throw Error(ErrorCode::Domain, "ExtLog::pow requires power > 0");
  if (is_zero()) return *this;
  if (auto lv = log_value()) {
    double l = power * *lv;
    if (std::isfinite(l)) return from_log(l);
  }
  return log().scaled(power).exp();
}

std::string ExtLog::to_string() const {
  std::ostringstream os;
  os.precision(17);
  os << "exp^" << level_ << "(" << mantissa_ << ")";
  return os.str();
}

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::Pole: return "POLE";
    case ErrorCode::Overflow: return "OVERFLOW";
    case ErrorCode::NoAsymptoticModel: return "NO_ASYMPTOTIC_MODEL";
    case ErrorCode::PoleTooClose: return "POLE_TOO_CLOSE";
    case ErrorCode::PoleOnCircle: return "POLE_ON_CIRCLE";
    case ErrorCode::QuadratureNonconvergent: return "QUADRATURE_NONCONVERGENT";
    case ErrorCode::AsymptoticUnavailable: return "ASYMPTOTIC_UNAVAILABLE";
    case ErrorCode::OutsideDomain: return "OUTSIDE_DOMAIN";
    case ErrorCode::Domain: return "DOMAIN";
    case ErrorCode::NoRoot: return "NO_ROOT";
    case ErrorCode::BoundaryTooClose: return "BOUNDARY_TOO_CLOSE";
    case ErrorCode::Invalid: return "INVALID";
    case ErrorCode::PullbackFailed: return "PULLBACK_FAILED";
    case ErrorCode::ChainNotPassing: return "CHAIN_NOT_PASSING";
    case ErrorCode::PoleHit: return "POLE_HIT";
    case ErrorCode::ArgUnreliable: return "ARG_UNRELIABLE";
    case ErrorCode::ConstraintViolation: return "CONSTRAINT_VIOLATION";
    case ErrorCode::Config: return "CONFIG";
  }
  return "UNKNOWN";
}

}  // namespace anndyn
