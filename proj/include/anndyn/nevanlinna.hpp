#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anndyn/extlog.hpp"
#include "anndyn/funcmodel.hpp"

namespace anndyn {

/// Radius actually used for circle functionals. When a pole modulus lies
/// within relative 1e-9 of r, r is moved by the factor (1 +- 1e-6) away
/// from it (upward on an exact hit).
struct CircleRadius {
  double requested = 0.0;
  double used = 0.0;
  bool nudged() const { return used != requested; }
};
CircleRadius circle_radius(const FunctionModel& model, double r);

/// m(r, f), the circle average of log+|f|, at the (possibly nudged) radius.
double proximity(const FunctionModel& model, double r);
/// N(r, f) from the exact pole list.
double counting(const FunctionModel& model, double r);
/// T(r, f) = m(r, f) + N(r, f), with m and N taken at the same radius.
double characteristic(const FunctionModel& model, double r);

struct Characteristic {
  CircleRadius radius;
  double m = 0.0, N = 0.0, T = 0.0;
  std::int64_t nodes = 0;
};
Characteristic characteristic_detail(const FunctionModel& model, double r);

struct MaxModulus {
  double log_max = 0.0;
  double theta = 0.0;  // where the maximum is attained
};
/// log M(r, f). Throws Error(PoleOnCircle) when a pole sits on |z| = r.
MaxModulus max_modulus(const FunctionModel& model, double r);

/// Power-law fit T(rho) ~ a rho^q and N(rho) ~ b rho^p over the top numeric
/// decade [kNumericLimit / 10, kNumericLimit].
struct GrowthFit {
  double a = 0.0, q = 0.0, residual_T = 0.0;
  double b = 0.0, p = 0.0, residual_N = 0.0;
  bool usable() const { return residual_T <= 0.05 && residual_N <= 0.05; }
  nlohmann::json to_json() const;
};
inline constexpr double kNumericLimit = 1e5;
GrowthFit growth_fit(const FunctionModel& model);

/// T and N at a radius of any size: quadrature up to kNumericLimit, the
/// power-law fit beyond it.
struct ExtCharacteristic {
  ExtLog T, N;
  bool extrapolated = false;
};
/// `fit` is computed on demand when extrapolation is needed and not supplied.
/// Throws Error(AsymptoticUnavailable) when the fit residual exceeds 5%.
ExtCharacteristic characteristic_ext(const FunctionModel& model, const ExtLog& rho,
                                     const std::optional<GrowthFit>& fit = std::nullopt);

/// The n-th iterate of exp T(., f) started at r.
ExtLog characteristic_iterate(const FunctionModel& model, double r, int n,
                              const std::optional<GrowthFit>& fit = std::nullopt);
/// All iterates 0..n, sharing a single fit.
std::vector<ExtLog> characteristic_iterates(const FunctionModel& model, double r, int n,
                                            const std::optional<GrowthFit>& fit = std::nullopt);

struct HaymanSandwich {
  double r = 0.0, R = 0.0;  // radii used (nudged off pole moduli)
  double T_r = 0.0, log_M = 0.0, T_R = 0.0;
  double upper = 0.0;  // (R + r) / (R - r) * T(R)
  bool ok = false;
};
/// T(r) <= log M(r) <= (R + r)/(R - r) T(R) with R = 2r.
HaymanSandwich hayman_sandwich(const FunctionModel& model, double r);

struct GrowthReport {
  std::vector<double> r_grid;
  std::vector<double> r_used;
  std::vector<double> m, N, T;
  std::vector<std::optional<double>> logM;
  std::vector<double> ratio_11;
  std::vector<double> lemma4_margin;
  std::vector<std::optional<bool>> hayman_ok;
  std::vector<double> phi_hat;
  double K = 2.0;
  /// Whether ratio_11 is strictly increasing along the grid.
  bool ratio_increasing = false;

  std::string to_csv() const;
  nlohmann::json to_json() const;
};
/// Requires r_grid strictly increasing and K > 1. The Hayman check is only
/// attempted for pole-free models.
GrowthReport growth_report(const FunctionModel& model, const std::vector<double>& r_grid, double K = 2.0);

}  // namespace anndyn
