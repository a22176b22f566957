#pragma once

#include <span>
#include <utility>
#include <vector>

#include "anndyn/logpolar.hpp"

namespace anndyn::poly {

/// Coefficients are ordered low to high degree throughout.
cplx eval(std::span<const cplx> coeffs, cplx z);
/// Value and first derivative by Horner's scheme.
std::pair<cplx, cplx> eval_with_derivative(std::span<const cplx> coeffs, cplx z);
/// Evaluate sum_i c_i w^(deg - i), i.e. z^-deg p(z) with w = 1/z.
cplx eval_reversed(std::span<const cplx> coeffs, cplx w);

/// Drop trailing (highest-degree) zero coefficients.
std::vector<cplx> trimmed(std::vector<cplx> coeffs);

/// All roots of a nonconstant polynomial (Aberth-Ehrlich), with repeats.
std::vector<cplx> roots(std::span<const cplx> coeffs);

struct RootCluster {
  cplx location;
  int multiplicity;
};

/// Group numerically repeated roots into clusters with multiplicities.
std::vector<RootCluster> cluster_roots(std::span<const cplx> coeffs);

}  // namespace anndyn::poly
