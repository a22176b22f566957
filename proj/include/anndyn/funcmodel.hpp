#pragma once

#include <optional>
#include <vector>

#include <json.hpp>

#include "anndyn/logpolar.hpp"

namespace anndyn {

enum class Family { Rational, Exp, EntireOverSin, Theorem4 };

struct PoleRecord {
  cplx location;
  int multiplicity = 1;
};

/// A meromorphic function from one of the builtin closed families.
///
///  - Rational:      num(z) / den(z), coefficients low to high degree.
///  - Exp:           e^z.
///  - EntireOverSin: pi z e^{z^2} / sin(pi z), i.e. e^{z^2} prod (1 - z^2/n^2)^{-1}.
///  - Theorem4:      sum_n z^2 / (r_n^2 (z^2 - r_n^2)) with r_{n+1} = factor r_n^2.
///
/// Models are immutable after construction; Theorem4 radii are generated up
/// front (the listed `count` radii plus the continuation until overflow).
class FunctionModel {
 public:
  static FunctionModel exp();
  static FunctionModel entire_over_sin();
  static FunctionModel theorem4(double r1, double factor, int count);
  static FunctionModel rational(std::vector<cplx> num, std::vector<cplx> den);
  static FunctionModel from_json(const nlohmann::json& j);

  nlohmann::json to_json() const;

  Family family() const { return family_; }
  bool has_poles() const;

  const std::vector<cplx>& numerator() const { return num_; }
  const std::vector<cplx>& denominator() const { return den_; }
  /// Rational only: reduced poles, sorted by modulus then argument.
  const std::vector<PoleRecord>& rational_poles() const { return rational_poles_; }

  double t4_r1() const { return t4_r1_; }
  double t4_factor() const { return t4_factor_; }
  int t4_count() const { return t4_count_; }
  /// Every finite generated radius (listed ones first, then continuation).
  const std::vector<double>& t4_radii() const { return t4_radii_; }

 private:
  FunctionModel() = default;

  Family family_ = Family::Exp;
  std::vector<cplx> num_, den_;
  std::vector<PoleRecord> rational_poles_;
  double t4_r1_ = 0.0, t4_factor_ = 0.0;
  int t4_count_ = 0;
  std::vector<double> t4_radii_;
};

/// f(z); std::nullopt marks a pole (z within 1e-12 relative of one).
/// Throws Error(Overflow) when |f(z)| leaves double range.
std::optional<cplx> eval(const FunctionModel& model, cplx z);

struct LogEval {
  LogPolar value;
  double errbound = 0.0;  // absolute, on value.logmod
};

/// log-polar evaluation that never overflows in the intermediate steps.
/// Beyond the direct-evaluation threshold the family's dominant-term
/// expansion is used. Throws Error(Overflow) if even log|f| is not a double.
LogEval log_eval(const FunctionModel& model, const LogPolar& p);

/// Evaluation for points whose modulus may be far beyond double range.
/// Carries the input error forward through the condition number |z f'/f|.
ExtPoint eval_ext(const FunctionModel& model, const ExtPoint& p);

std::vector<PoleRecord> poles_within(const FunctionModel& model, double radius);
/// Poles with inner < |p - center| < outer, counted with multiplicity.
int pole_count_in_annulus(const FunctionModel& model, cplx center, double inner, double outer);
/// Poles with |p - center| < radius, counted with multiplicity.
int pole_count_in_disk(const FunctionModel& model, cplx center, double radius);
/// Whether some pole has inner < |p| < outer, for radii beyond double range.
/// nullopt when the family cannot decide at that scale.
std::optional<bool> pole_in_annulus_ext(const FunctionModel& model, const ExtLog& inner, const ExtLog& outer);

double distance_to_nearest_pole(const FunctionModel& model, cplx z);

/// f'(z). Throws Error(PoleTooClose) within 1e-9 of a pole.
cplx derivative_eval(const FunctionModel& model, cplx z);
/// f'(z)/f(z) from closed forms, stable where f itself overflows.
cplx log_derivative(const FunctionModel& model, cplx z);

struct SeriesValue {
  cplx value;
  double tail_bound = 0.0;  // bound on |f(z) - value|
};

/// Theorem4 partial sum over the first `terms` radii together with a bound
/// on everything left out (generated radii plus the continuation past
/// overflow). Requires every omitted radius to exceed |z|.
SeriesValue t4_partial_sum(const FunctionModel& model, cplx z, int terms);
/// Full Theorem4 evaluation with its tail bound.
SeriesValue t4_eval(const FunctionModel& model, cplx z);

}  // namespace anndyn
