#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "anndyn/error.hpp"
#include "anndyn/funcmodel.hpp"

using namespace anndyn;
constexpr double kPi = std::numbers::pi;

namespace {

// Independent oracle: the defining series z^2 / (r^2 (z^2 - r^2)) summed in
// long double over radii generated separately from the model.
std::complex<long double> t4_series_oracle(std::complex<long double> z, long double r1, long double factor,
                                           int terms) {
  std::complex<long double> sum = 0.0L;
  long double r = r1;
  for (int i = 0; i < terms; ++i) {
    std::complex<long double> z2 = z * z;
    sum += z2 / (r * r * (z2 - r * r));
    r = factor * r * r;
  }
  return sum;
}

FunctionModel sample_rational() {
  // (z^2 + 1) / ((z - 2)(z + 3i)) = (z^2 + 1) / (z^2 + (3i - 2) z - 6i)
  return FunctionModel::rational({{1, 0}, {0, 0}, {1, 0}}, {{0, -6}, {-2, 3}, {1, 0}});
}

}  // namespace

TEST_CASE("eval examples") {
  CHECK(eval(FunctionModel::exp(), 0.0).value() == cplx(1.0, 0.0));

  auto t4 = FunctionModel::theorem4(8.0, 17.0, 6);
  CHECK(eval(t4, 0.0).value() == cplx(0.0, 0.0));

  auto t4b = FunctionModel::theorem4(8.0, 17.0, 2);
  auto v = eval(t4b, 16.0).value();
  auto oracle = t4_series_oracle(16.0L, 8.0L, 17.0L, 8);
  CHECK(v.real() == doctest::Approx(0.020833).epsilon(1e-4));
  CHECK(std::abs(v - cplx(static_cast<double>(oracle.real()), static_cast<double>(oracle.imag()))) < 1e-15);
  // First term alone is 256/12288; the rest is below 2e-10.
  CHECK(std::abs(v.real() - 256.0 / 12288.0) < 2e-10);
}

TEST_CASE("eval reports poles and overflow") {
  auto s = FunctionModel::entire_over_sin();
  CHECK_FALSE(eval(s, 3.0).has_value());
  CHECK_FALSE(eval(s, cplx(3.0 + 1e-13, 0.0)).has_value());
  CHECK(eval(s, cplx(3.0 + 1e-6, 0.0)).has_value());
  CHECK(eval(s, 0.0).value() == cplx(1.0, 0.0));
  CHECK_THROWS_AS(eval(FunctionModel::exp(), 800.0), Error);

  auto r = FunctionModel::rational({{1, 0}}, {{0, 0}, {1, 0}});
  CHECK_FALSE(eval(r, 0.0).has_value());
}

TEST_CASE("log_eval examples") {
  auto e = FunctionModel::exp();
  auto a = log_eval(e, LogPolar(std::log(10.0), 0.0));
  CHECK(a.value.logmod == doctest::Approx(10.0).epsilon(1e-14));
  CHECK(a.value.arg == 0.0);

  // z = i e^5: modulus 1, argument e^5 reduced into (-pi, pi].
  auto b = log_eval(e, LogPolar(5.0, kPi / 2));
  CHECK(std::abs(b.value.logmod) < 1e-12);
  long double phase = std::exp(5.0L);
  long double two_pi = 2.0L * std::numbers::pi_v<long double>;
  long double reduced = phase - two_pi * std::round(phase / two_pi);
  CHECK(b.value.arg == doctest::Approx(static_cast<double>(reduced)).epsilon(1e-12));
  CHECK(b.value.arg == doctest::Approx(-2.3832885).epsilon(1e-7));
  CHECK(b.value.arg_reliable);

  // z = 2i for pi z e^{z^2} / sin(pi z).
  auto s = FunctionModel::entire_over_sin();
  auto c = log_eval(s, LogPolar(std::log(2.0), kPi / 2));
  double oracle = -4.0 + std::log(kPi) + std::log(2.0) - std::log(std::sinh(2.0 * kPi));
  CHECK(c.value.logmod == doctest::Approx(oracle).epsilon(1e-13));
  // log sinh(2 pi) = 2 pi - log 2 + O(e^{-4 pi}), so log|f(2i)| is about -7.7522.
  CHECK(c.value.logmod == doctest::Approx(-7.7522).epsilon(1e-4));
  CHECK(c.errbound < 1e-12);
}

TEST_CASE("log_eval past the direct threshold") {
  auto e = FunctionModel::exp();
  auto a = log_eval(e, LogPolar(650.0, 0.3));
  CHECK(a.value.logmod == doctest::Approx(std::exp(650.0) * std::cos(0.3)).epsilon(1e-12));
  CHECK_FALSE(a.value.arg_reliable);

  auto s = FunctionModel::entire_over_sin();
  // log|f| = e^{800} cos(2 theta) is past double range.
  CHECK_THROWS_AS(log_eval(s, LogPolar(400.0, 0.3)), Error);
  auto big = eval_ext(s, ExtPoint::from_logpolar(LogPolar(400.0, 0.3)));
  auto loglog = big.modulus.log().log().to_double().value();
  CHECK(loglog == doctest::Approx(800.0 + std::log(std::cos(0.6))).epsilon(1e-13));

  // The expansion continues the direct formula across its threshold.
  double lz = std::log(1e149);
  auto direct = log_eval(s, LogPolar(lz, 0.3));
  auto above = log_eval(s, LogPolar(std::log(1.2e150), 0.3));
  CHECK(direct.value.logmod == doctest::Approx(1e298 * std::cos(0.6)).epsilon(1e-11));
  CHECK(above.value.logmod == doctest::Approx(1.44e300 * std::cos(0.6)).epsilon(1e-11));

  // Near the real axis there is no expansion at that scale.
  CHECK_THROWS_AS(eval_ext(s, ExtPoint::from_logpolar(LogPolar(400.0, 0.0))), Error);

  auto r = sample_rational();
  auto rr = log_eval(r, LogPolar(650.0, 1.0));
  CHECK(std::abs(rr.value.logmod) < 1e-10);  // degree gap 0, leading ratio 1
}

TEST_CASE("poles_within examples") {
  auto s = poles_within(FunctionModel::entire_over_sin(), 2.5);
  REQUIRE(s.size() == 4);
  CHECK(s[0].location == cplx(1, 0));
  CHECK(s[1].location == cplx(-1, 0));
  CHECK(s[2].location == cplx(2, 0));
  CHECK(s[3].location == cplx(-2, 0));
  for (auto& p : s) CHECK(p.multiplicity == 1);

  CHECK(poles_within(FunctionModel::exp(), 1e6).empty());

  auto t = poles_within(FunctionModel::theorem4(8.0, 17.0, 2), 100.0);
  REQUIRE(t.size() == 2);
  CHECK(t[0].location == cplx(8, 0));
  CHECK(t[1].location == cplx(-8, 0));
  // The generated r2 clears 16 r1^2.
  CHECK(FunctionModel::theorem4(8.0, 17.0, 2).t4_radii()[1] > 16.0 * 64.0);
}

TEST_CASE("rational poles carry multiplicity and cancel common factors") {
  // (z-1)^2 (z+2) = z^3 - 3z + 2
  auto m = FunctionModel::rational({{1, 0}}, {{2, 0}, {-3, 0}, {0, 0}, {1, 0}});
  auto p = poles_within(m, 10.0);
  REQUIRE(p.size() == 2);
  CHECK(std::abs(p[0].location - cplx(1, 0)) < 1e-6);
  CHECK(p[0].multiplicity == 2);
  CHECK(std::abs(p[1].location - cplx(-2, 0)) < 1e-10);
  CHECK(p[1].multiplicity == 1);

  // (z - 1) / ((z - 1)(z - 2)) keeps only the pole at 2.
  auto c = FunctionModel::rational({{-1, 0}, {1, 0}}, {{2, 0}, {-3, 0}, {1, 0}});
  auto q = poles_within(c, 10.0);
  REQUIRE(q.size() == 1);
  CHECK(std::abs(q[0].location - cplx(2, 0)) < 1e-10);
}

TEST_CASE("derivative_eval examples") {
  CHECK(derivative_eval(FunctionModel::exp(), 1.0).real() == doctest::Approx(std::exp(1.0)));
  auto inv = FunctionModel::rational({{1, 0}}, {{0, 0}, {1, 0}});
  CHECK(derivative_eval(inv, 2.0).real() == doctest::Approx(-0.25).epsilon(1e-15));
  CHECK_THROWS_AS(derivative_eval(inv, cplx(1e-10, 0)), Error);

  auto s = FunctionModel::entire_over_sin();
  const double h = 1e-5;
  cplx fd = (eval(s, 0.5 + h).value() - eval(s, 0.5 - h).value()) / (2.0 * h);
  cplx an = derivative_eval(s, 0.5);
  CHECK(std::abs(an - fd) / std::abs(an) < 1e-6);

  // The same check at random points for every family.
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (const auto& m : {FunctionModel::exp(), s, FunctionModel::theorem4(8.0, 17.0, 3), sample_rational()}) {
    for (int i = 0; i < 200; ++i) {
      cplx z(u(rng), u(rng));
      if (distance_to_nearest_pole(m, z) < 0.05) continue;
      cplx d = derivative_eval(m, z);
      cplx fd2 = (eval(m, z + h).value() - eval(m, z - h).value()) / (2.0 * h);
      CHECK(std::abs(d - fd2) <= 1e-6 * std::max(1.0, std::abs(d)));
      cplx f = eval(m, z).value();
      if (std::abs(f) > 1e-6) CHECK(std::abs(log_derivative(m, z) - d / f) <= 1e-9 * std::max(1.0, std::abs(d / f)));
    }
  }
}

TEST_CASE("log_eval agrees with eval on random points") {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> rad(0.0, 50.0), ang(-kPi, kPi);
  std::vector<FunctionModel> models = {FunctionModel::exp(), FunctionModel::entire_over_sin(),
                                       FunctionModel::theorem4(8.0, 17.0, 3), sample_rational()};
  for (const auto& m : models) {
    int compared = 0;
    for (int i = 0; i < 1000; ++i) {
      cplx z = std::polar(rad(rng), ang(rng));
      if (distance_to_nearest_pole(m, z) < 1e-3 || std::abs(z) == 0.0) continue;
      std::optional<cplx> direct;
      try {
        direct = eval(m, z);
      } catch (const Error&) {
        continue;  // not representable
      }
      if (!direct || std::abs(*direct) < 1e-8) continue;
      auto le = log_eval(m, LogPolar::from_complex(z));
      cplx via_log = std::polar(std::exp(le.value.logmod), le.value.arg);
      CHECK(std::abs(via_log - *direct) / std::abs(*direct) <= 1e-9);
      ++compared;
    }
    CHECK(compared > 300);
  }
}

TEST_CASE("Theorem4 partial sums stay inside earlier certified intervals") {
  auto m = FunctionModel::theorem4(8.0, 17.0, 4);
  std::mt19937_64 rng(11);
  std::uniform_real_distribution<double> rad(0.0, 7.5), ang(-kPi, kPi);
  for (int i = 0; i < 200; ++i) {
    cplx z = std::polar(rad(rng), ang(rng));
    auto prev = t4_partial_sum(m, z, 0);
    for (int n = 1; n <= static_cast<int>(m.t4_radii().size()); ++n) {
      auto cur = t4_partial_sum(m, z, n);
      CHECK(std::abs(cur.value - prev.value) + cur.tail_bound <= prev.tail_bound * (1.0 + 1e-9) + 1e-18);
      prev = cur;
    }
  }
  CHECK_THROWS_AS(t4_partial_sum(m, 20.0, 0), Error);
}

TEST_CASE("EntireOverSin matches the truncated Euler product") {
  auto s = FunctionModel::entire_over_sin();
  std::mt19937_64 rng(8);
  std::uniform_real_distribution<double> u(-5.0, 5.0);
  const int N = 10000;
  for (int i = 0; i < 40; ++i) {
    cplx z(u(rng), u(rng) * 0.5);
    if (std::abs(z) > 5.0 || distance_to_nearest_pole(s, z) < 0.05) continue;
    cplx prod = std::exp(z * z);
    for (int n = 1; n <= N; ++n) prod /= (1.0 - z * z / (double(n) * n));
    cplx f = eval(s, z).value();
    // prod_{n>N} (1 - z^2/n^2) = 1 + O(|z|^2 / N).
    double tail = 1.1 * std::norm(z) / N;
    CHECK(std::abs(prod / f - 1.0) <= tail + 1e-10);
  }
}

TEST_CASE("JSON construction") {
  auto m = FunctionModel::from_json(nlohmann::json::parse(R"({"family":"theorem4","r1":8,"factor":17,"count":6})"));
  CHECK(m.family() == Family::Theorem4);
  CHECK(m.t4_count() == 6);
  CHECK(m.t4_radii()[1] == 1088.0);
  auto r = FunctionModel::from_json(nlohmann::json::parse(R"({"family":"rational","num":[[1,0]],"den":[[0,0],[1,0]]})"));
  CHECK(r.rational_poles().size() == 1);
  CHECK(FunctionModel::from_json(r.to_json()).denominator().size() == 2);
  CHECK_THROWS_AS(FunctionModel::from_json(nlohmann::json::parse(R"({"family":"gamma"})")), Error);
  CHECK_THROWS_AS(FunctionModel::from_json(nlohmann::json::parse(R"({"fam":"exp"})")), Error);
}

TEST_CASE("eval_ext follows the real orbit of exp") {
  auto e = FunctionModel::exp();
  ExtPoint p = ExtPoint::from_complex(1.0);
  p = eval_ext(e, p);  // e
  CHECK(p.log_modulus().value() == doctest::Approx(1.0));
  p = eval_ext(e, p);  // e^e
  CHECK(p.log_modulus().value() == doctest::Approx(std::exp(1.0)));
  p = eval_ext(e, p);  // e^{e^e}
  CHECK(p.log_modulus().value() == doctest::Approx(std::exp(std::exp(1.0))).epsilon(1e-13));
  CHECK(p.arg_reliable);
  CHECK(p.modulus_lower_bound() <= p.modulus);
}
