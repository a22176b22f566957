#include "anndyn/hyperbolic.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "anndyn/error.hpp"
#include "anndyn/report.hpp"

namespace anndyn {

namespace {

constexpr double kPi = std::numbers::pi;

struct StripPoint {
  double a;  // Re u
  double b;  // Im u in (0, pi)
};

StripPoint lift(const Annulus& A, cplx z) {
  cplx w = z - A.center;
  double M = A.modulus();
  return {-kPi * std::arg(w) / M, kPi * (std::log(std::abs(w)) - std::log(A.inner)) / M};
}

// Upper half-plane distance between e^{u1} and e^{u2}.
double half_plane_distance(double da, double b1, double b2) {
  double sa = std::sinh(0.5 * da), sb = std::sin(0.5 * (b1 - b2));
  double x = 2.0 * (sa * sa + sb * sb) / (std::sin(b1) * std::sin(b2));
  return std::log1p(x + std::sqrt(x * (x + 2.0)));
}

}  // namespace

Annulus::Annulus(double inner_, double outer_, cplx center_) : center(center_), inner(inner_), outer(outer_) {
  if (!(inner > 0.0) || !(outer > inner) || !std::isfinite(outer))
    throw Error(ErrorCode::Domain, "annulus needs 0 < inner < outer");
}

double Annulus::modulus() const { return std::log(outer / inner); }

bool Annulus::contains(cplx z) const {
  double a = std::abs(z - center);
  return inner < a && a < outer;
}

nlohmann::json Annulus::to_json() const {
  return {{"center", json_complex(center)}, {"inner", inner}, {"outer", outer}, {"modulus", modulus()}};
}

double annulus_density(const Annulus& A, cplx z) {
  if (!A.contains(z)) throw Error(ErrorCode::OutsideDomain, "point outside the annulus");
  double rho = std::abs(z - A.center);
  double M = A.modulus();
  return kPi / (rho * M * std::sin(kPi * std::log(A.outer / rho) / M));
}

double annulus_distance(const Annulus& A, cplx z1, cplx z2) {
  if (!A.contains(z1) || !A.contains(z2)) throw Error(ErrorCode::OutsideDomain, "point outside the annulus");
  if (z1 == z2) return 0.0;
  StripPoint p1 = lift(A, z1), p2 = lift(A, z2);
  const double shift = 2.0 * kPi * kPi / A.modulus();
  auto at = [&](int k) { return half_plane_distance(p1.a - k * shift - p2.a, p1.b, p2.b); };

  double best = at(0);
  for (int dir : {1, -1}) {
    double prev = best;
    int rising = 0;
    for (int j = 1; j <= 16 && rising < 3; ++j) {
      double v = at(dir * j);
      best = std::min(best, v);
      rising = v > prev ? rising + 1 : 0;
      prev = v;
    }
  }
  return best;
}

double lemma3_lower() { return kPi / 3.0; }

double lemma3_upper(double d) {
  const double s3 = std::sqrt(3.0);
  return 2.0 * s3 * kPi / 9.0 + 2.0 * s3 * kPi * kPi / (9.0 * std::log(d));
}

Lemma3Check lemma3_check(double d, double r, double theta1, double theta2) {
  if (!(d > 1.0) || !(r > 0.0)) throw Error(ErrorCode::Domain, "lemma3_check needs d > 1 and r > 0");
  Lemma3Check c{d, r, theta1, theta2};
  Annulus A(r, d * d * d * r);
  c.distance = annulus_distance(A, std::polar(d * d * r, theta1), std::polar(d * r, theta2));
  c.lower = lemma3_lower();
  c.upper = lemma3_upper(d);
  c.pass = c.lower - 1e-9 <= c.distance && c.distance <= c.upper + 1e-9;
  return c;
}

std::vector<Lemma3Check> lemma3_batch(const std::vector<double>& ds, const std::vector<double>& rs, int pairs,
                                      std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> ang(-kPi, kPi);
  std::vector<Lemma3Check> out;
  for (double d : ds) {
    // The same angle pairs are reused for every r so r-independence can be read off.
    std::vector<std::pair<double, double>> angles(pairs);
    for (auto& [t1, t2] : angles) {
      t1 = ang(rng);
      t2 = ang(rng);
    }
    for (double r : rs)
      for (auto [t1, t2] : angles) out.push_back(lemma3_check(d, r, t1, t2));
  }
  return out;
}

std::string lemma3_csv(const std::vector<Lemma3Check>& rows) {
  std::ostringstream os;
  os << "d,r,theta1,theta2,distance,lower,upper,pass\n";
  for (const auto& c : rows)
    os << format_double(c.d) << ',' << format_double(c.r) << ',' << format_double(c.theta1) << ','
       << format_double(c.theta2) << ',' << format_double(c.distance) << ',' << format_double(c.lower) << ','
       << format_double(c.upper) << ',' << (c.pass ? "true" : "false") << '\n';
  return os.str();
}

}  // namespace anndyn
