// Acceptance run: one PASS/FAIL line per criterion, with its runtime.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "anndyn/cli.hpp"
#include "anndyn/counterexample.hpp"
#include "anndyn/covering.hpp"
#include "anndyn/escape.hpp"
#include "anndyn/hyperbolic.hpp"
#include "anndyn/nevanlinna.hpp"

using namespace anndyn;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool cond, const std::string& what) {
    if (!cond) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += what;
    }
  }
  void note(const std::string& what) {
    if (!detail.empty()) detail += "; ";
    detail += what;
  }
};

std::string fmt(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.10g", x);
  return buf;
}

int failures = 0;

void criterion(int n, const char* title, double limit_ms, const std::function<void(Outcome&)>& body) {
  Outcome o;
  auto t0 = std::chrono::steady_clock::now();
  try {
    body(o);
  } catch (const std::exception& e) {
    o.require(false, std::string("threw: ") + e.what());
  }
  double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  if (limit_ms > 0) o.require(ms < limit_ms, "runtime " + fmt(ms) + " ms over " + fmt(limit_ms) + " ms");
  if (!o.pass) ++failures;
  std::printf("%s criterion %d: %s [%.1f ms] %s\n", o.pass ? "PASS" : "FAIL", n, title, ms, o.detail.c_str());
  std::fflush(stdout);
}

// Gamma(1/4)^2 = (2 pi)^{3/2} / AGM(sqrt 2, 1)
long double kappa_oracle() {
  long double a = std::sqrt(2.0L), b = 1.0L;
  for (int i = 0; i < 40; ++i) {
    long double an = 0.5L * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  const long double pi = std::numbers::pi_v<long double>;
  long double g2 = std::pow(2.0L * pi, 1.5L) / a;
  return g2 * g2 / (4.0L * pi * pi);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// Every CLI subcommand with fixed parameters, written into `dir`.
std::vector<int> full_suite(const fs::path& dir, const std::string& seed) {
  const std::string exp = R"({"family": "exp"})";
  const std::string sin = R"({"family": "entire_over_sin"})";
  const std::string cubic = R"({"family": "rational", "num": [[0,0],[0,0],[4,0],[-4,0]], "den": [[1,0]]})";
  std::vector<std::vector<std::string>> runs = {
      {"bohr", "--s", "0.25", "0.5", "0.75", "--t", "1.5", "2.4", "4"},
      {"hypdist", "--d", "1.5", "2", "4", "--r", "1", "10", "1000", "--pairs", "100"},
      {"--name", "nevanlinna_exp", "nevanlinna", "--function", exp, "--r", "5", "10", "20"},
      {"--name", "nevanlinna_sin", "nevanlinna", "--function", sin, "--r", "10", "20", "40", "80"},
      {"cover", "--function", cubic, "--disk", "0.9", "--target", "0.0007400891839596695", "0.0017762140415032068"},
      {"--name", "chain_rstar", "chain", "--function", exp, "--r", "100", "--epsilon", "7", "--depth", "3"},
      {"--name", "chain_10", "chain", "--function", exp, "--r", "10", "--epsilon", "7", "--depth", "2"},
      {"eremenko", "--function", exp, "--r", "10", "--epsilon", "0.1", "--n-max", "3"},
      {"thm4", "--r1", "8", "--factor", "17", "--count", "3", "--N", "1", "2", "--n-iter", "20", "--samples", "256"},
  };
  std::vector<int> codes;
  for (auto args : runs) {
    args.insert(args.begin(), {"anndyn", "--out", dir.string(), "--seed", seed});
    std::ostringstream out, err;
    codes.push_back(cli::run(args, out, err));
  }
  return codes;
}

}  // namespace

int main() {
  criterion(1, "kappa = Gamma(1/4)^4/(4 pi^2)", 1.0, [](Outcome& o) {
    double k = kappa();
    o.require(std::abs(k - 4.376879) <= 1e-5, "kappa = " + fmt(k));
    o.require(std::abs(k - static_cast<double>(kappa_oracle())) <= 1e-12, "disagrees with the AGM oracle");
    o.note("kappa = " + fmt(k));
  });

  criterion(2, "closed-form covering constant at s = 1/2, t = 12/5", 10.0, [](Outcome& o) {
    double c = bohr_c_closed_half();
    double kap = static_cast<double>(kappa_oracle());
    double c_oracle = 1.0 / (1.0 + std::pow(4.0 * std::exp(kap), std::log(3.0)));
    o.require(std::abs(c / c_oracle - 1.0) < 1e-12, "closed form " + fmt(c) + " vs oracle " + fmt(c_oracle));
    o.require(std::abs(c - 1.776e-3) < 1e-6, "c = " + fmt(c));
    double h = bohr_h(0.5, c, 12.0 / 5.0);
    o.require(std::abs(h) <= 1e-9, "h(c, 12/5) = " + fmt(h));
    double inner = bohr_inner_exp(0.5, c);
    o.require(std::abs(inner - 4.0) <= 1e-10, "inner exponential = " + fmt(inner));
    double bis = bohr_constants(0.5, 12.0 / 5.0);
    o.require(std::abs(bis / c - 1.0) <= 1e-8, "bisection " + fmt(bis));
    double cmax = bohr_cmax(0.5);
    o.require(cmax < 0.125, "cmax = " + fmt(cmax));
    o.note("c = " + fmt(c) + ", cmax = " + fmt(cmax));
  });

  criterion(3, "two-point hyperbolic bounds in A(r, d^3 r)", 5000.0, [](Outcome& o) {
    std::vector<double> ds{1.5, 2.0, 4.0}, rs{1.0, 10.0, 1000.0};
    const int pairs = 100;
    auto rows = lemma3_batch(ds, rs, pairs, 0);
    o.require(rows.size() == ds.size() * rs.size() * pairs, "row count");
    double lo = kPi / 3.0 - 1e-9, worst = 0.0;
    for (const auto& r : rows) {
      double hi = 2.0 * std::sqrt(3.0) * kPi / 9.0 + 2.0 * std::sqrt(3.0) * kPi * kPi / (9.0 * std::log(r.d)) + 1e-9;
      if (!(r.distance >= lo && r.distance <= hi)) {
        o.require(false, "d_A = " + fmt(r.distance) + " at d = " + fmt(r.d) + ", r = " + fmt(r.r));
        break;
      }
    }
    // same angle pairs for every r: compare across r
    for (std::size_t di = 0; di < ds.size(); ++di)
      for (int p = 0; p < pairs; ++p) {
        double ref = rows[(di * rs.size()) * pairs + p].distance;
        for (std::size_t ri = 1; ri < rs.size(); ++ri) {
          const auto& row = rows[(di * rs.size() + ri) * pairs + p];
          worst = std::max(worst, std::abs(row.distance - ref));
        }
      }
    o.require(worst <= 1e-9, "r-dependence " + fmt(worst));
    double spot = annulus_distance(Annulus(1.0, 8.0), 2.0, 4.0);
    o.require(std::abs(spot - std::log(3.0)) <= 1e-9, "d_A(2, 4; A(1, 8)) = " + fmt(spot));
    o.note("max r-dependence " + fmt(worst) + ", spot " + fmt(spot));
  });

  criterion(4, "Nevanlinna functionals against closed forms, Hayman sandwich", 30000.0, [](Outcome& o) {
    double m = proximity(FunctionModel::exp(), kPi);
    o.require(std::abs(m - 1.0) <= 1e-6, "m(pi, e^z) = " + fmt(m));
    // 1/((z - 1)(z - 2))
    auto rat = FunctionModel::rational({1.0}, {2.0, -3.0, 1.0});
    double N = counting(rat, 3.0);
    o.require(std::abs(N - (std::log(3.0) + std::log(1.5))) <= 1e-12, "N(3) = " + fmt(N));
    for (const auto& f : {FunctionModel::exp(), FunctionModel::entire_over_sin()}) {
      for (double r : {5.0, 10.0, 20.0}) {
        auto h = hayman_sandwich(f, r);
        o.require(h.ok, "sandwich fails at r = " + fmt(r) + " (T = " + fmt(h.T_r) + ", log M = " + fmt(h.log_M) +
                            ", upper = " + fmt(h.upper) + ")");
      }
    }
    o.note("m = " + fmt(m) + ", N = " + fmt(N));
  });

  criterion(5, "T/(N log r) increasing with ratio(80)/ratio(10) > 3 for the entire-over-sine model", 60000.0,
            [](Outcome& o) {
              auto rep = growth_report(FunctionModel::entire_over_sin(), {10.0, 20.0, 40.0, 80.0});
              std::string ratios;
              for (double x : rep.ratio_11) ratios += (ratios.empty() ? "" : ", ") + fmt(x);
              o.require(rep.ratio_increasing, "ratios not strictly increasing: " + ratios);
              double q = rep.ratio_11.back() / rep.ratio_11.front();
              o.require(q > 3.0, "ratio(80)/ratio(10) = " + fmt(q));
              o.note("ratios " + ratios);
            });

  criterion(6, "argument-principle coverage", 60000.0, [](Outcome& o) {
    auto cube = FunctionModel::rational({0.0, 0.0, 0.0, 1.0}, {1.0});
    auto c1 = coverage_certificate(cube, Disk{0.0, 1.0}, Annulus(0.2, 0.8), {16, 32});
    bool all3 = c1.valid;
    for (const auto& p : c1.points) all3 = all3 && p.count && *p.count == 3;
    o.require(all3, "z^3 counts are not all 3");
    const double c = bohr_constants(0.5, 12.0 / 5.0), t = 12.0 / 5.0;
    auto f = FunctionModel::rational({0.0, 0.0, 4.0, -4.0}, {1.0});
    // image of B(0, 0.9) is contained in the image of the unit disk
    auto c2 = coverage_certificate(f, Disk{0.0, 0.9}, Annulus(c / t, c), {16, 32});
    o.require(c2.verified, "4z^2(1-z) annulus A(c/t, c) not verified");
    o.note("z^3: " + std::to_string(c1.points.size()) + " points; 4z^2(1-z) max residual " + fmt(c2.max_residual));
  });

  criterion(7, "covering chain for e^z", 120000.0, [](Outcome& o) {
    auto f = FunctionModel::exp();
    std::vector<double> grid;
    for (int k = 0; k < 8; ++k) grid.push_back(100.0 * std::ldexp(1.0, k));
    auto scan = margin_scan(f, grid, 2.0);
    auto rs = first_passing_radius(scan);
    o.require(rs.has_value(), "no passing radius on the scan grid");
    if (!rs) return;
    auto ch = chain_build(f, *rs, 7.0, 3);
    o.require(ch.all_passing && ch.steps.size() == 3, "chain from r* does not pass");
    auto it = characteristic_iterates(f, *rs, 3, ch.fit);
    for (std::size_t k = 0; k < ch.steps.size(); ++k) {
      o.require(ch.steps[k].rho >= it[k].log().scaled(1.0 - 1e-9).exp(), "rho_" + std::to_string(k) + " below T^_k(r*)");
      o.require(ch.steps[k].r_next >= it[k + 1].log().scaled(1.0 - 1e-9).exp(),
                "r_" + std::to_string(k + 1) + " below T^_" + std::to_string(k + 1) + "(r*)");
    }
    auto bad = chain_build(f, 10.0, 7.0, 2);
    o.require(!bad.all_passing && !bad.steps.empty() && bad.steps[0].margin1 < 0.0,
              "chain from 10 should fail at step 1 with margin1 < 0");
    o.note("r* = " + fmt(*rs) + ", r_3 = " + ch.steps.back().r_next.to_string() +
           ", step-1 margin1 at r = 10: " + fmt(bad.steps.empty() ? NAN : bad.steps[0].margin1));
  });

  criterion(8, "escaping point for e^z from A(10, 11)", 60000.0, [](Outcome& o) {
    auto f = FunctionModel::exp();
    auto res = eremenko_search(f, 10.0, 0.1, 3);
    double m = std::abs(res.z0);
    o.require(m >= 10.0 && m <= 11.0, "|z0| = " + fmt(m));
    auto v = verify_orbit(f, res.z0, 10.0, 3);
    o.require(v.verified_through == 3, "verified through " + std::to_string(v.verified_through));
    o.require(v.checks.size() == 3 && v.checks[2].lower.level() >= 2, "k = 3 not compared at level 2");
    o.note("z0 = " + fmt(res.z0.real()) + (res.z0.imag() < 0 ? " - " : " + ") + fmt(std::abs(res.z0.imag())) + "i, " +
           res.method + ", |f^3(z0)| >= " + (v.checks.empty() ? std::string("?") : v.checks.back().lower.to_string()));
  });

  criterion(9, "escape-free annuli of the counterexample family", 120000.0, [](Outcome& o) {
    auto seq = sequence_generate(8.0, 17.0, 3);
    auto disk = invariant_disk_check(seq);
    double arith = 1.0 / (64.0 * 63.0) + 1.0 / (1088.0 * 1088.0 * (1088.0 * 1088.0 - 1.0));
    o.require(std::abs(disk.bound / arith - 1.0) < 1e-9 && std::abs(disk.bound - 2.48e-4) < 1e-6 && disk.pass,
              "invariant disk bound " + fmt(disk.bound));
    for (int N : {1, 2}) {
      auto g = annulus_gap_check(seq, N);
      o.require(g.pass && g.sup_sampled < 1.0, "gap check N = " + std::to_string(N) + " sup " + fmt(g.sup_sampled));
    }
    auto rep = escape_disjoint_report(seq, 1, 20, 256);
    bool all = rep.orbits.size() == 256;
    for (const auto& orb : rep.orbits) all = all && orb.first_in_disk && orb.tail_in_disk;
    o.require(all && rep.pass, "sampled orbits leave the unit disk");
    o.note("bound " + fmt(disk.bound) + ", 256 orbits");
  });

  criterion(10, "byte-identical reports from two runs with the same seed", 0.0, [](Outcome& o) {
    auto base = fs::temp_directory_path() / "anndyn_acceptance";
    fs::remove_all(base);
    auto c1 = full_suite(base / "a", "11");
    auto c2 = full_suite(base / "b", "11");
    o.require(c1 == c2, "exit codes differ between runs");
    int files = 0;
    for (const auto& e : fs::directory_iterator(base / "a")) {
      ++files;
      auto other = base / "b" / e.path().filename();
      if (!fs::exists(other) || slurp(e.path()) != slurp(other)) o.require(false, e.path().filename().string() + " differs");
    }
    o.require(files >= 18, "only " + std::to_string(files) + " files written");
    o.note(std::to_string(files) + " files compared");
  });

  return failures == 0 ? 0 : 1;
}
