#pragma once

#include <complex>
#include <numbers>

#include "anndyn/extlog.hpp"

namespace anndyn {

using cplx = std::complex<double>;

/// Reduce an angle into (-pi, pi].
double wrap_angle(double a);

/// Nonzero complex number stored as (log modulus, argument).
struct LogPolar {
  double logmod = 0.0;
  double arg = 0.0;  // in (-pi, pi]
  bool arg_reliable = true;

  LogPolar() = default;
  LogPolar(double logmod_, double arg_, bool reliable = true)
      : logmod(logmod_), arg(wrap_angle(arg_)), arg_reliable(reliable) {}

  static LogPolar from_complex(cplx z);
  /// Inverse of from_complex; overflows to infinity past double range.
  cplx to_complex() const;
  /// The complex logarithm logmod + i*arg.
  cplx log() const { return {logmod, arg}; }
};

/// A point whose modulus may exceed double range. `log_err` bounds the
/// absolute error of log|z| and arg(z) (the complex log) relative to
/// max(1, |log|z||).
struct ExtPoint {
  ExtLog modulus;
  double arg = 0.0;
  bool arg_reliable = true;
  double log_rel_err = 0.0;

  static ExtPoint from_complex(cplx z);
  static ExtPoint from_logpolar(const LogPolar& p, double log_abs_err = 0.0);

  /// log|z| as a double when representable.
  std::optional<double> log_modulus() const;
  std::optional<cplx> to_complex() const;
  std::optional<LogPolar> to_logpolar() const;
  /// Certified lower bound for |z| from the carried error.
  ExtLog modulus_lower_bound() const;
};

}  // namespace anndyn
