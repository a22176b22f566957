#include "anndyn/polynomial.hpp"

#include <algorithm>
#include <cmath>

#include "anndyn/error.hpp"

namespace anndyn::poly {

cplx eval(std::span<const cplx> coeffs, cplx z) {
  cplx acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * z + *it;
  return acc;
}

std::pair<cplx, cplx> eval_with_derivative(std::span<const cplx> coeffs, cplx z) {
  cplx p = 0.0, dp = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) {
    dp = dp * z + p;
    p = p * z + *it;
  }
  return {p, dp};
}

cplx eval_reversed(std::span<const cplx> coeffs, cplx w) {
  cplx acc = 0.0;
  for (const cplx& c : coeffs) acc = acc * w + c;
  return acc;
}

std::vector<cplx> trimmed(std::vector<cplx> coeffs) {
  while (!coeffs.empty() && coeffs.back() == cplx(0.0)) coeffs.pop_back();
  return coeffs;
}

std::vector<cplx> roots(std::span<const cplx> coeffs) {
  const int n = static_cast<int>(coeffs.size()) - 1;
  if (n < 1 || coeffs.back() == cplx(0.0))
    throw Error(ErrorCode::Domain, "roots() needs a nonconstant polynomial with nonzero leading coefficient");

  // Fujiwara-style radius for the starting circle.
  double radius = 0.0;
  for (int i = 0; i < n; ++i) {
    double ratio = std::abs(coeffs[i] / coeffs[n]);
    if (ratio > 0) radius = std::max(radius, std::pow(ratio, 1.0 / (n - i)));
  }
  radius = std::max(2.0 * radius, 1e-3);

  std::vector<cplx> z(n);
  for (int k = 0; k < n; ++k) z[k] = std::polar(radius, 0.4 + 2.0 * std::numbers::pi * k / n);

  for (int iter = 0; iter < 800; ++iter) {
    double max_step = 0.0;
    for (int k = 0; k < n; ++k) {
      auto [p, dp] = eval_with_derivative(coeffs, z[k]);
      if (p == cplx(0.0)) continue;
      cplx ratio = p / dp;
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != k) sum += 1.0 / (z[k] - z[j]);
      cplx step = ratio / (1.0 - ratio * sum);
      if (!std::isfinite(step.real()) || !std::isfinite(step.imag())) continue;
      z[k] -= step;
      max_step = std::max(max_step, std::abs(step) / std::max(1.0, std::abs(z[k])));
    }
    if (max_step < 1e-16) break;
  }
  return z;
}

std::vector<RootCluster> cluster_roots(std::span<const cplx> coeffs) {
  std::vector<RootCluster> out;
  std::vector<std::vector<cplx>> members;
  for (const cplx& r : roots(coeffs)) {
    bool joined = false;
    for (size_t c = 0; c < out.size(); ++c) {
      if (std::abs(r - members[c].front()) <= 1e-4 * std::max(1.0, std::abs(r))) {
        members[c].push_back(r);
        joined = true;
        break;
      }
    }
    if (!joined) {
      out.push_back({r, 1});
      members.push_back({r});
    }
  }
  for (size_t c = 0; c < out.size(); ++c) {
    cplx mean = 0.0;
    for (const cplx& m : members[c]) mean += m;
    out[c].location = mean / static_cast<double>(members[c].size());
    out[c].multiplicity = static_cast<int>(members[c].size());
    // Snap tiny imaginary/real parts left over from the iteration.
    double scale = std::max(1.0, std::abs(out[c].location));
    if (std::abs(out[c].location.imag()) < 1e-13 * scale) out[c].location.imag(0.0);
    if (std::abs(out[c].location.real()) < 1e-13 * scale) out[c].location.real(0.0);
  }
  return out;
}

}  // namespace anndyn::poly
