#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anndyn/logpolar.hpp"

namespace anndyn {

/// A(center; inner, outer) = {inner < |z - center| < outer}.
struct Annulus {
  cplx center = 0.0;
  double inner = 1.0;
  double outer = 2.0;

  Annulus() = default;
  /// Throws Error(Domain) unless 0 < inner < outer.
  Annulus(double inner_, double outer_, cplx center_ = 0.0);

  double modulus() const;
  bool contains(cplx z) const;
  nlohmann::json to_json() const;
};

/// Hyperbolic density of the annulus at z. Throws Error(OutsideDomain).
double annulus_density(const Annulus& A, cplx z);

/// Hyperbolic distance between two points of the annulus, through the
/// universal cover w = log(z - center) onto a strip and then the upper
/// half-plane, minimized over deck translations |k| <= 16.
/// Throws Error(OutsideDomain).
double annulus_distance(const Annulus& A, cplx z1, cplx z2);

struct Lemma3Check {
  double d = 0.0, r = 0.0, theta1 = 0.0, theta2 = 0.0;
  double distance = 0.0, lower = 0.0, upper = 0.0;
  bool pass = false;
};

/// pi/3 <= d_A(z1, z2) <= 2 sqrt3 pi/9 + 2 sqrt3 pi^2/(9 log d) for
/// z1 = d^2 r e^{i theta1}, z2 = d r e^{i theta2} in A(r, d^3 r).
Lemma3Check lemma3_check(double d, double r, double theta1, double theta2);
double lemma3_lower();
double lemma3_upper(double d);

/// Batch over every (d, r) pair with `pairs` random angle pairs each, drawn
/// from a seeded mt19937_64.
std::vector<Lemma3Check> lemma3_batch(const std::vector<double>& ds, const std::vector<double>& rs, int pairs,
                                      std::uint64_t seed);
std::string lemma3_csv(const std::vector<Lemma3Check>& rows);

}  // namespace anndyn
