#pragma once

#include <cstdint>
#include <functional>

namespace anndyn {

struct QuadResult {
  double value = 0.0;
  double error_estimate = 0.0;
  std::int64_t nodes = 0;
};

struct QuadOptions {
  int initial_panels = 256;
  /// Relative to max(1, |coarse estimate|).
  double rel_tol = 1e-9;
  std::int64_t max_nodes = std::int64_t{1} << 20;
};

/// Adaptive Simpson over [a, b]. The absolute tolerance is rel_tol times
/// max(1, |estimate from the initial panels|), split evenly over the panels
/// and halved on every bisection.
/// Throws Error(QuadratureNonconvergent) past max_nodes evaluations.
QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b,
                            const QuadOptions& opt = {});

}  // namespace anndyn
