#pragma once

#include <compare>
#include <optional>
#include <string>

namespace anndyn {

/// Nonnegative magnitude in level-index form: exp applied `level` times to
/// `mantissa`. Values are kept canonical: the level is the smallest one for
/// which the mantissa stays below kCeiling, so ordering reduces to comparing
/// (level, mantissa) lexicographically.
class ExtLog {
 public:
  static constexpr double kCeiling = 700.0;

  ExtLog() = default;

  static ExtLog from_double(double x);
  /// The value e^log_x for any real log_x.
  static ExtLog from_log(double log_x);
  static ExtLog tower(int level, double mantissa);

  int level() const { return level_; }
  double mantissa() const { return mantissa_; }

  /// The value as a double when it is finite in double precision.
  std::optional<double> to_double() const;
  /// Natural log of the value as a double (requires value > 0 and the log to
  /// be representable).
  std::optional<double> log_value() const;

  ExtLog exp() const;
  /// Natural log; requires value >= 1 so the result stays nonnegative.
  ExtLog log() const;
  /// value * factor for factor > 0.
  ExtLog scaled(double factor) const;
  /// value + shift; the result must be nonnegative.
  ExtLog shifted(double shift) const;
  /// value^power for power > 0.
  ExtLog pow(double power) const;

  bool is_zero() const { return level_ == 0 && mantissa_ == 0.0; }

  std::string to_string() const;

  friend bool operator==(const ExtLog& a, const ExtLog& b) = default;
  friend std::partial_ordering operator<=>(const ExtLog& a, const ExtLog& b) {
    if (auto c = a.level_ <=> b.level_; c != 0) return c;
    return a.mantissa_ <=> b.mantissa_;
  }

 private:
  ExtLog(int level, double mantissa) : level_(level), mantissa_(mantissa) {}
  void normalize();

  int level_ = 0;
  double mantissa_ = 0.0;
};

}  // namespace anndyn
