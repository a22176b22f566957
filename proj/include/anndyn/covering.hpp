#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

#include "anndyn/funcmodel.hpp"
#include "anndyn/hyperbolic.hpp"

namespace anndyn {

/// Gamma(1/4) to 25 significant digits. It can be recovered from
/// Gamma(1/4)^2 = (2 pi)^{3/2} / AGM(sqrt 2, 1).
inline constexpr long double kGammaQuarter = 3.625609908221908311930685L;

/// kappa = Gamma(1/4)^4 / (4 pi^2).
double kappa();

/// A = exp(-kappa + log((1 - x)/x) / delta) with delta = log((1 + s)/(1 - s)).
double bohr_inner_exp(double s, double x);
/// h(x, t) = A - t/A - 1 - t. Throws Error(Domain) outside s, x in (0,1), t > 1.
double bohr_h(double s, double x, double t);
/// Root in x of h(s, ., t) = 0 by bisection; every smaller x has h >= 0.
/// Throws Error(NoRoot) if h(s, 1e-15, t) < 0.
double bohr_constants(double s, double t);
/// [1 + ((1 + sqrt 2) e^kappa)^{log((1+s)/(1-s))}]^{-1}.
double bohr_cmax(double s);
/// Closed form for s = 1/2: [1 + (4 e^kappa)^{log 3}]^{-1}.
double bohr_c_closed_half();
/// Hayman's sharp circle constant (1 - s)^2 / (4 s), reference only.
double hayman_c(double s);

struct Disk {
  cplx center = 0.0;
  double radius = 1.0;
};
using Domain = std::variant<Disk, Annulus>;
nlohmann::json domain_json(const Domain& d);

struct CoverageGrid {
  int radial = 16;
  int angular = 32;
};

struct CoveragePoint {
  cplx w;
  std::optional<int> count;  // empty when skipped
  double winding = 0.0;
  double residual = 0.0;     // distance of the winding integral from an integer
  int boundary_points = 0;   // per circle at convergence
  bool skipped = false;      // |f - w| too small on the boundary
};

struct CoverageCertificate {
  Domain domain;
  Annulus target;
  CoverageGrid grid;
  std::vector<CoveragePoint> points;  // row-major: radial outer loop, angular inner
  int enclosed_poles = 0;
  bool verified = false;
  /// False when some winding integral is farther than 0.1 from an integer.
  bool valid = true;
  double max_residual = 0.0;
  int skipped = 0;

  nlohmann::json to_json() const;
};

/// Target points w_{ij} = target.center + inner (outer/inner)^{(i+1/2)/radial} e^{2 pi i j/angular}.
std::vector<cplx> coverage_targets(const Annulus& target, const CoverageGrid& grid);

/// Zero counts of f - w over the domain at every target point via the
/// argument principle, adding the enclosed poles. verified holds when every
/// point has count >= 1 and none was skipped; valid is false (and verified
/// with it) when any winding residual exceeds 0.1.
/// Throws Error(Domain) when a pole lies on a boundary circle.
CoverageCertificate coverage_certificate(const FunctionModel& model, const Domain& domain, const Annulus& target,
                                         const CoverageGrid& grid = {});

/// Zero count of f - w at a single point, same machinery as the certificate.
CoveragePoint coverage_count(const FunctionModel& model, const Domain& domain, cplx w);

/// Searches for a covered annulus A(R/t, R) with R >= c: first R = c, then
/// R = c * growth^k for k = 1..steps. Returns the first verified certificate.
std::optional<CoverageCertificate> covered_annulus_search(const FunctionModel& model, const Domain& domain,
                                                          double c, double t, const CoverageGrid& grid = {},
                                                          double growth = 2.0, int steps = 12);

}  // namespace anndyn
