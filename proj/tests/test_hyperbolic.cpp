#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anndyn/error.hpp"
#include "anndyn/hyperbolic.hpp"

using namespace anndyn;
constexpr double kPi = std::numbers::pi;

namespace {

// Half-plane distance through v = e^u with the textbook formula, minimized
// over a wide deck window. Long double, no shared code with the library.
long double cover_oracle(long double inner, long double outer, std::complex<long double> z1,
                         std::complex<long double> z2) {
  const long double pi = std::numbers::pi_v<long double>;
  const long double M = std::log(outer / inner);
  auto u_of = [&](std::complex<long double> z, int k) {
    std::complex<long double> w(std::log(std::abs(z)), std::arg(z) + 2.0L * pi * k);
    return std::complex<long double>(0.0L, pi) * (w - std::log(inner)) / M;
  };
  long double best = 1e300L;
  for (int k = -50; k <= 50; ++k) {
    auto v1 = std::exp(u_of(z1, k)), v2 = std::exp(u_of(z2, 0));
    long double x = std::norm(v1 - v2) / (2.0L * v1.imag() * v2.imag());
    best = std::min(best, std::acosh(1.0L + x));
  }
  return best;
}

}  // namespace

TEST_CASE("annulus basics") {
  Annulus A(1.0, 8.0);
  CHECK(A.modulus() == doctest::Approx(std::log(8.0)));
  CHECK(A.contains(2.0));
  CHECK_FALSE(A.contains(1.0));
  CHECK_FALSE(A.contains(8.0));
  CHECK_THROWS_AS(Annulus(2.0, 1.0), Error);
  Annulus B(1.0, 2.0, cplx(5.0, 0.0));
  CHECK(B.contains(cplx(6.5, 0.0)));
  CHECK_FALSE(B.contains(1.5));
}

TEST_CASE("annulus_density examples") {
  Annulus A(1.0, std::exp(kPi));
  CHECK(annulus_density(A, std::exp(kPi / 2)) == doctest::Approx(std::exp(-kPi / 2)).epsilon(1e-14));
  CHECK(annulus_density(A, std::exp(kPi / 2)) == doctest::Approx(0.2079).epsilon(1e-3));
  Annulus B(1.0, std::exp(2.0 * kPi));
  CHECK(annulus_density(B, cplx(0.0, std::exp(kPi))) == doctest::Approx(std::exp(-kPi) / 2.0).epsilon(1e-14));
  CHECK(annulus_density(B, std::exp(kPi)) == doctest::Approx(0.02161).epsilon(1e-3));
  Annulus C(1.0, 8.0);
  CHECK(annulus_density(C, 8.0 - 1e-6) > 1e4);
  CHECK_THROWS_AS(annulus_density(C, 9.0), Error);
  // Centered annulus shifts the formula.
  Annulus D(1.0, std::exp(kPi), cplx(2.0, -1.0));
  CHECK(annulus_density(D, cplx(2.0, -1.0) + std::exp(kPi / 2)) == doctest::Approx(std::exp(-kPi / 2)));
}

TEST_CASE("annulus_distance examples") {
  CHECK(annulus_distance(Annulus(1.0, 8.0), 2.0, 4.0) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK(std::abs(annulus_distance(Annulus(1.0, 8.0), 2.0, 4.0) - std::log(3.0)) < 1e-9);
  CHECK(annulus_distance(Annulus(1.0, 8.0), cplx(1.5, 2.0), cplx(1.5, 2.0)) == 0.0);
  CHECK(annulus_distance(Annulus(10.0, 80.0), 20.0, 40.0) == doctest::Approx(std::log(3.0)).epsilon(1e-14));
  CHECK_THROWS_AS(annulus_distance(Annulus(1.0, 8.0), 0.5, 4.0), Error);
}

TEST_CASE("annulus_distance agrees with the covering oracle") {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(-kPi, kPi);
  for (int i = 0; i < 500; ++i) {
    double inner = std::exp(4.0 * u(rng) - 2.0);
    double outer = inner * (1.05 + 30.0 * u(rng));
    auto pt = [&] { return std::polar(inner * std::pow(outer / inner, 0.02 + 0.96 * u(rng)), ang(rng)); };
    cplx z1 = pt(), z2 = pt();
    double d = annulus_distance(Annulus(inner, outer), z1, z2);
    long double o = cover_oracle(inner, outer, z1, z2);
    CHECK(d == doctest::Approx(static_cast<double>(o)).epsilon(1e-9));
  }
}

TEST_CASE("distance invariants") {
  std::mt19937_64 rng(4242);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(-kPi, kPi);
  for (int i = 0; i < 300; ++i) {
    double inner = 0.5 + u(rng), outer = inner * (1.5 + 10.0 * u(rng));
    Annulus A(inner, outer);
    auto pt = [&] { return std::polar(inner * std::pow(outer / inner, 0.05 + 0.9 * u(rng)), ang(rng)); };
    cplx a = pt(), b = pt(), c = pt();
    double dab = annulus_distance(A, a, b);

    double lambda = std::pow(10.0, 6.0 * u(rng) - 3.0);
    CHECK(annulus_distance(Annulus(lambda * inner, lambda * outer), lambda * a, lambda * b) ==
          doctest::Approx(dab).epsilon(1e-10));

    cplx rot = std::polar(1.0, ang(rng));
    CHECK(std::abs(annulus_distance(A, rot * a, rot * b) - dab) <= 1e-10 * std::max(1.0, dab));

    CHECK(std::abs(annulus_distance(A, b, a) - dab) <= 1e-9);
    CHECK(annulus_distance(A, a, c) <= dab + annulus_distance(A, b, c) + 1e-9);
  }
}

TEST_CASE("density is the infinitesimal distance") {
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(0.0, 1.0), ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    double inner = 0.3 + u(rng), outer = inner * (2.0 + 20.0 * u(rng));
    Annulus A(inner, outer);
    cplx z = std::polar(inner * std::pow(outer / inner, 0.1 + 0.8 * u(rng)), ang(rng));
    cplx step = std::polar(1e-5 * std::abs(z), ang(rng));
    double ratio = annulus_distance(A, z - step / 2.0, z + step / 2.0) / std::abs(step);
    CHECK(ratio == doctest::Approx(annulus_density(A, z)).epsilon(1e-3));
  }
}

TEST_CASE("lemma3_check examples") {
  auto a = lemma3_check(2.0, 1.0, 0.0, 0.0);
  CHECK(a.distance == doctest::Approx(std::log(3.0)).epsilon(1e-12));
  CHECK(a.lower == doctest::Approx(1.04720).epsilon(1e-5));
  CHECK(a.upper == doctest::Approx(6.68973).epsilon(1e-5));
  CHECK(a.pass);
  // Bound arithmetic pieces.
  CHECK(2.0 * std::sqrt(3.0) * kPi / 9.0 == doctest::Approx(1.20920).epsilon(1e-5));
  CHECK(2.0 * std::sqrt(3.0) * kPi * kPi / 9.0 == doctest::Approx(3.798815).epsilon(1e-5));

  auto b = lemma3_check(2.0, 1000.0, 0.0, 0.0);
  CHECK(std::abs(b.distance - a.distance) < 1e-9);

  auto c = lemma3_check(1.5, 1.0, 0.0, kPi);
  CHECK(c.upper == doctest::Approx(1.20920 + 3.798815 / std::log(1.5)).epsilon(1e-5));
  CHECK(c.distance >= kPi / 3.0);
  CHECK(c.pass);
  CHECK(c.distance == doctest::Approx(static_cast<double>(cover_oracle(1.0L, 3.375L, 2.25L, -1.5L))).epsilon(1e-9));
}

TEST_CASE("lemma3 batch holds and is independent of r") {
  auto rows = lemma3_batch({1.5, 2.0, 4.0}, {1.0, 10.0, 1000.0}, 100, 1);
  REQUIRE(rows.size() == 900);
  for (const auto& c : rows) CHECK(c.pass);
  for (std::size_t block = 0; block < 3; ++block)
    for (std::size_t j = 0; j < 100; ++j) {
      double base = rows[block * 300 + j].distance;
      CHECK(std::abs(rows[block * 300 + 100 + j].distance - base) < 1e-9);
      CHECK(std::abs(rows[block * 300 + 200 + j].distance - base) < 1e-9);
    }
  auto csv = lemma3_csv(rows);
  CHECK(csv.rfind("d,r,theta1,theta2,distance,lower,upper,pass\n", 0) == 0);
  CHECK(lemma3_csv(lemma3_batch({2.0}, {1.0}, 5, 9)) == lemma3_csv(lemma3_batch({2.0}, {1.0}, 5, 9)));
}
