#include "anndyn/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "anndyn/counterexample.hpp"
#include "anndyn/covering.hpp"
#include "anndyn/error.hpp"
#include "anndyn/escape.hpp"
#include "anndyn/hyperbolic.hpp"
#include "anndyn/nevanlinna.hpp"
#include "anndyn/report.hpp"

namespace anndyn::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

struct Common {
  std::string out_dir = ".";
  std::string name;
  std::uint64_t seed = 0;
};

// A path to a JSON file, or the JSON text itself when it starts with '{'.
FunctionModel load_model(const std::string& spec) {
  json j;
  try {
    if (!spec.empty() && spec.front() == '{') {
      j = json::parse(spec);
    } else {
      std::ifstream in(spec);
      if (!in) throw Error(ErrorCode::Config, "cannot open function config " + spec);
      j = json::parse(in);
    }
  } catch (const json::parse_error& e) {
    throw Error(ErrorCode::Config, std::string("function config is not JSON: ") + e.what());
  }
  return FunctionModel::from_json(j);
}

class Emitter {
 public:
  Emitter(const Common& c, std::string command) : common_(c), base_(c.name.empty() ? std::move(command) : c.name) {}

  void report(json j) const {
    fs::create_directories(common_.out_dir);
    write_file_atomic(fs::path(common_.out_dir) / (base_ + ".report.json"), j.dump(2) + "\n");
  }
  void grid(const std::string& csv) const {
    fs::create_directories(common_.out_dir);
    write_file_atomic(fs::path(common_.out_dir) / (base_ + ".grid.csv"), csv);
  }

 private:
  const Common& common_;
  std::string base_;
};

json run_config(const std::string& command, json params, const Common& c) {
  return {{"command", command}, {"parameters", std::move(params)}, {"seed", c.seed}};
}

void fail_line(std::ostream& err, const std::string& what) { err << "FAIL " << what << '\n'; }

int cmd_nevanlinna(const Common& c, const std::string& fn, const std::vector<double>& grid, double K,
                   std::ostream& out, std::ostream& err) {
  auto f = load_model(fn);
  auto rep = growth_report(f, grid, K);
  bool ok = true;
  for (std::size_t i = 0; i < rep.r_grid.size(); ++i) {
    if (rep.hayman_ok[i] && !*rep.hayman_ok[i]) {
      ok = false;
      fail_line(err, "Hayman sandwich T(r) <= log M(r) <= ((R+r)/(R-r)) T(R), R = 2r, at r = " +
                         format_double(rep.r_grid[i]));
    }
  }
  Emitter e(c, "nevanlinna");
  json j = run_config("nevanlinna", {{"function", f.to_json()}, {"r", grid}, {"K", K}}, c);
  j["report"] = rep.to_json();
  j["pass"] = ok;
  e.report(j);
  e.grid(rep.to_csv());
  out << rep.to_csv();
  return ok ? kExitPass : kExitFail;
}

int cmd_hypdist(const Common& c, const std::vector<double>& ds, const std::vector<double>& rs, int pairs,
                std::ostream& out, std::ostream& err) {
  auto rows = lemma3_batch(ds, rs, pairs, c.seed);
  int failed = 0;
  double dmin = INFINITY, dmax = 0.0;
  for (const auto& r : rows) {
    dmin = std::min(dmin, r.distance);
    dmax = std::max(dmax, r.distance);
    if (!r.pass) {
      ++failed;
      fail_line(err, "two-point annulus bound pi/3 <= d_A(z1,z2) <= 2 sqrt3 pi/9 + 2 sqrt3 pi^2/(9 log d) at d = " +
                         format_double(r.d) + ", r = " + format_double(r.r));
    }
  }
  Emitter e(c, "hypdist");
  json j = run_config("hypdist", {{"d", ds}, {"r", rs}, {"pairs", pairs}}, c);
  j["rows"] = rows.size();
  j["failed"] = failed;
  j["min_distance"] = json_number(dmin);
  j["max_distance"] = dmax;
  j["lower_bound"] = lemma3_lower();
  json up = json::array();
  for (double d : ds) up.push_back({{"d", d}, {"upper_bound", lemma3_upper(d)}});
  j["upper_bounds"] = up;
  j["pass"] = failed == 0;
  e.report(j);
  e.grid(lemma3_csv(rows));
  out << rows.size() << " pairs, " << failed << " outside the bounds; distances in [" << format_double(dmin) << ", "
      << format_double(dmax) << "]\n";
  return failed == 0 ? kExitPass : kExitFail;
}

int cmd_bohr(const Common& c, const std::vector<double>& ss, const std::vector<double>& ts, std::ostream& out,
             std::ostream& err) {
  bool ok = true;
  json rows = json::array();
  std::ostringstream csv;
  csv << "s,t,c,cmax,h_residual,hayman_c\n";
  out << "kappa = " << format_double(kappa()) << '\n';
  for (double s : ss) {
    for (double t : ts) {
      double cst = bohr_constants(s, t);
      double cmax = bohr_cmax(s);
      double h = bohr_h(s, cst, t);
      bool row_ok = std::abs(h) < 1e-9 && cst <= cmax;
      if (!row_ok) {
        ok = false;
        fail_line(err, "covering constant h(c, t) = 0 with c <= [1 + ((1+sqrt2) e^kappa)^delta]^{-1} at s = " +
                           format_double(s) + ", t = " + format_double(t));
      }
      rows.push_back({{"s", s}, {"t", t}, {"c", cst}, {"cmax", cmax}, {"h_residual", h}, {"hayman_c", hayman_c(s)},
                      {"pass", row_ok}});
      csv << format_double(s) << ',' << format_double(t) << ',' << format_double(cst) << ',' << format_double(cmax)
          << ',' << format_double(h) << ',' << format_double(hayman_c(s)) << '\n';
      out << "s = " << format_double(s) << "  t = " << format_double(t) << "  c = " << format_double(cst)
          << "  cmax = " << format_double(cmax) << "  h = " << format_double(h) << '\n';
    }
  }
  // closed form at s = 1/2, t = 12/5: exp(-kappa + log((1-c)/c)/log 3) = 4
  double cc = bohr_c_closed_half();
  double identity = std::exp(-kappa() + std::log((1.0 - cc) / cc) / std::log(3.0));
  double residual = std::abs(identity - 4.0);
  bool identity_ok = residual < 1e-9;
  if (!identity_ok) {
    ok = false;
    fail_line(err, "closed-form identity exp(-kappa + log((1-c)/c)/log 3) = 4");
  }
  out << "closed form c(1/2) = " << format_double(cc) << ", identity residual = " << format_double(residual) << '\n';
  Emitter e(c, "bohr");
  json j = run_config("bohr", {{"s", ss}, {"t", ts}}, c);
  j["kappa"] = kappa();
  j["rows"] = rows;
  j["closed_form_half"] = {{"c", cc}, {"identity_value", identity}, {"identity_residual", residual},
                           {"pass", identity_ok}};
  j["pass"] = ok;
  e.report(j);
  e.grid(csv.str());
  return ok ? kExitPass : kExitFail;
}

Domain parse_domain(const std::vector<double>& disk, const std::vector<double>& annulus) {
  if (!disk.empty() && !annulus.empty()) throw Error(ErrorCode::Config, "give either --disk or --annulus, not both");
  if (!annulus.empty()) {
    if (annulus.size() != 2 && annulus.size() != 4)
      throw Error(ErrorCode::Config, "--annulus takes inner outer [center_re center_im]");
    cplx center = annulus.size() == 4 ? cplx(annulus[2], annulus[3]) : cplx(0.0);
    return Annulus(annulus[0], annulus[1], center);
  }
  if (disk.size() != 1 && disk.size() != 3) throw Error(ErrorCode::Config, "--disk takes radius [center_re center_im]");
  if (!(disk[0] > 0.0)) throw Error(ErrorCode::Config, "disk radius must be positive");
  Disk d;
  d.radius = disk[0];
  if (disk.size() == 3) d.center = cplx(disk[1], disk[2]);
  return d;
}

int cmd_cover(const Common& c, const std::string& fn, const std::vector<double>& disk,
              const std::vector<double>& annulus, const std::vector<double>& target, const CoverageGrid& grid,
              std::ostream& out, std::ostream& err) {
  auto f = load_model(fn);
  auto dom = parse_domain(disk, annulus);
  if (target.size() != 2) throw Error(ErrorCode::Config, "--target takes inner outer");
  Annulus tgt(target[0], target[1]);
  auto cert = coverage_certificate(f, dom, tgt, grid);
  std::ostringstream csv;
  csv << "re,im,count,winding,residual,boundary_points,skipped\n";
  for (const auto& p : cert.points) {
    csv << format_double(p.w.real()) << ',' << format_double(p.w.imag()) << ','
        << (p.count ? std::to_string(*p.count) : std::string("NA")) << ',' << format_double(p.winding) << ','
        << format_double(p.residual) << ',' << p.boundary_points << ',' << (p.skipped ? 1 : 0) << '\n';
  }
  Emitter e(c, "cover");
  json j = run_config("cover",
                      {{"function", f.to_json()},
                       {"domain", domain_json(dom)},
                       {"target", tgt.to_json()},
                       {"grid", {{"radial", grid.radial}, {"angular", grid.angular}}}},
                      c);
  j["certificate"] = cert.to_json();
  j["pass"] = cert.verified;
  e.report(j);
  e.grid(csv.str());
  std::string status = cert.to_json()["status"];
  out << "coverage " << status << ": " << cert.points.size() << " target points, max residual "
      << format_double(cert.max_residual) << ", skipped " << cert.skipped << '\n';
  if (!cert.verified)
    fail_line(err, "covering f(U) contains the target annulus: every target point needs a zero of f - w (" + status + ")");
  return cert.verified ? kExitPass : kExitFail;
}

int cmd_chain(const Common& c, const std::string& fn, double r, double eps, int depth, std::ostream& out,
              std::ostream& err) {
  auto f = load_model(fn);
  auto ch = chain_build(f, r, eps, depth);
  std::ostringstream csv;
  csv << "k,rho_level,rho_mantissa,mode,margin1,margin2,pole_case,passing\n";
  for (std::size_t k = 0; k < ch.steps.size(); ++k) {
    const auto& s = ch.steps[k];
    csv << k << ',' << s.rho.level() << ',' << format_double(s.rho.mantissa()) << ',' << to_string(s.mode) << ','
        << format_double(s.margin1) << ',' << format_double(s.margin2) << ',' << (s.pole_case ? 1 : 0) << ','
        << (s.passing ? 1 : 0) << '\n';
    out << "step " << k << "  rho = " << s.rho.to_string() << "  " << to_string(s.mode)
        << "  margin1 = " << format_double(s.margin1) << "  margin2 = " << format_double(s.margin2)
        << (s.passing ? "  PASSING" : "  NONPASSING") << '\n';
    if (!s.passing) {
      if (s.margin1 < 0.0)
        fail_line(err, "step " + std::to_string(k) +
                           " covering margin T(d^2 rho) - N(d^2 rho) >= T(d rho) + log(1 + 2(1+2C)^delta e^{kappa delta})"
                           " (margin1 = " + format_double(s.margin1) + ")");
      if (s.margin2 < 0.0)
        fail_line(err, "step " + std::to_string(k) + " growth margin T(d rho) - N(d rho) >= T(rho) + log 2C (margin2 = " +
                           format_double(s.margin2) + ")");
    }
  }
  if (ch.truncated) fail_line(err, "chain truncated: " + ch.truncation_reason);
  Emitter e(c, "chain");
  json j = run_config("chain", {{"function", f.to_json()}, {"r", r}, {"epsilon", eps}, {"depth", depth}}, c);
  j["certificate"] = ch.to_json();
  bool ok = ch.all_passing && !ch.truncated;
  j["pass"] = ok;
  e.report(j);
  e.grid(csv.str());
  return ok ? kExitPass : kExitFail;
}

int cmd_eremenko(const Common& c, const std::string& fn, double r, double eps, int n_max, bool require_chain,
                 std::ostream& out, std::ostream& err) {
  auto f = load_model(fn);
  EremenkoOptions opt;
  opt.require_chain = require_chain;
  auto res = eremenko_search(f, r, eps, n_max, opt);
  std::ostringstream csv;
  csv << "k,lower_level,lower_mantissa,threshold_level,threshold_mantissa,pass\n";
  for (const auto& ck : res.verification.checks) {
    csv << ck.k << ',' << ck.lower.level() << ',' << format_double(ck.lower.mantissa()) << ',' << ck.threshold.level()
        << ',' << format_double(ck.threshold.mantissa()) << ',' << (ck.pass ? 1 : 0) << '\n';
    if (!ck.pass)
      fail_line(err, "escape bound |f^k(z0)| >= T^_k(r) at k = " + std::to_string(ck.k) + " (" + ck.lower.to_string() +
                         " < " + ck.threshold.to_string() + ")");
  }
  Emitter e(c, "eremenko");
  json j = run_config("eremenko",
                      {{"function", f.to_json()}, {"r", r}, {"epsilon", eps}, {"n_max", n_max},
                       {"require_chain", require_chain}},
                      c);
  j["result"] = res.to_json();
  bool ok = res.verified_through >= n_max;
  j["pass"] = ok;
  e.report(j);
  e.grid(csv.str());
  out << "z0 = " << format_double(res.z0.real()) << (res.z0.imag() < 0 ? " - " : " + ")
      << format_double(std::abs(res.z0.imag())) << "i  (" << res.method << "), verified through k = "
      << res.verified_through << '\n';
  return ok ? kExitPass : kExitFail;
}

int cmd_thm4(const Common& c, double r1, double factor, int count, const std::vector<int>& Ns, int n_iter,
             int samples, const GapGrid& grid, std::ostream& out, std::ostream& err) {
  json j = run_config("thm4",
                      {{"r1", r1}, {"factor", factor}, {"count", count}, {"N", Ns}, {"n_iter", n_iter},
                       {"samples", samples}, {"grid", {{"radial", grid.radial}, {"angular", grid.angular}}}},
                      c);
  Emitter e(c, "thm4");
  T4Sequence seq;
  try {
    seq = sequence_generate(r1, factor, count);
  } catch (const Error& ex) {
    if (ex.code() != ErrorCode::ConstraintViolation) throw;
    fail_line(err, std::string("sequence constraint: ") + ex.what());
    j["error"] = ex.what();
    j["pass"] = false;
    e.report(j);
    return kExitFail;
  }
  bool ok = true;
  j["sequence"] = seq.to_json();
  auto disk = invariant_disk_check(seq);
  j["invariant_disk"] = disk.to_json();
  out << "invariant disk bound " << format_double(disk.bound) << (disk.pass ? " PASS" : " FAIL") << '\n';
  if (!disk.pass) {
    ok = false;
    fail_line(err, "invariant disk |f(z)| < sum 1/(r_n^2 (r_n^2 - 1)) < 1 on |z| < 1");
  }
  json per_N = json::array();
  std::string csv;
  for (int N : Ns) {
    auto gap = annulus_gap_check(seq, N, grid);
    auto rep = escape_disjoint_report(seq, N, n_iter, samples);
    if (!gap.pass) {
      ok = false;
      fail_line(err, "annulus gap sup |f| < 1 on A(2 r_N, 4 r_N^2) at N = " + std::to_string(N));
    }
    if (!rep.pass) {
      ok = false;
      fail_line(err, "sampled orbits from A(2 r_N, 4 r_N^2) stay in |z| < 1 at N = " + std::to_string(N));
    }
    json r = rep.to_json();
    r["annulus_gap"] = gap.to_json();
    r.erase("orbits");
    per_N.push_back(r);
    if (csv.empty()) {
      csv = "N," + gap.to_csv();
      csv.erase(csv.find('\n') + 1);
    }
    std::istringstream lines(gap.to_csv());
    std::string line;
    std::getline(lines, line);
    while (std::getline(lines, line)) csv += std::to_string(N) + "," + line + "\n";
    out << "N = " << N << "  sup_sampled = " << format_double(gap.sup_sampled)
        << "  proof_bound = " << format_double(gap.proof_bound) << "  orbits " << rep.orbits.size()
        << (rep.pass ? " PASS" : " FAIL") << '\n';
  }
  j["checks"] = per_N;
  j["statement_annulus_note"] =
      "the proof controls A(2 r_N, 4 r_N^2); the stated A(r_N, r_N^2) is not contained in it and is not verified";
  j["pass"] = ok;
  e.report(j);
  e.grid(csv);
  return ok ? kExitPass : kExitFail;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Nevanlinna characteristic, annulus covering and escaping-point verification"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--out", common.out_dir, "output directory")->capture_default_str();
  app.add_option("--name", common.name, "base name of output files (default: the subcommand)");
  app.add_option("--seed", common.seed, "seed for randomized sampling")->capture_default_str();
  app.fallthrough();

  std::string fn;
  std::vector<double> grid{5, 10, 20, 40};
  double K = 2.0;
  auto* nev = app.add_subcommand("nevanlinna", "m, N, T, log M and growth checks over a radius grid");
  nev->add_option("--function", fn, "function model JSON file or inline JSON")->required();
  nev->add_option("--r", grid, "radius grid")->capture_default_str();
  nev->add_option("--K", K, "radius factor for the log-convexity margin")->capture_default_str();

  std::vector<double> ds{1.1, 2, 10}, rs{1, 1000};
  int pairs = 100;
  auto* hyp = app.add_subcommand("hypdist", "hyperbolic distances between d^2 r and d r points of A(r, d^3 r)");
  hyp->add_option("--d", ds, "annulus parameters d > 1")->capture_default_str();
  hyp->add_option("--r", rs, "inner radii")->capture_default_str();
  hyp->add_option("--pairs", pairs, "random angle pairs per (d, r)")->capture_default_str();

  std::vector<double> ss{0.5}, ts{2.4};
  auto* bohr = app.add_subcommand("bohr", "covering constants c(s, t) and the closed form at s = 1/2");
  bohr->add_option("--s", ss, "disk radii s in (0, 1)")->capture_default_str();
  bohr->add_option("--t", ts, "annulus ratios t > 1")->capture_default_str();

  std::vector<double> disk, annulus, target;
  CoverageGrid cgrid;
  auto* cov = app.add_subcommand("cover", "argument-principle coverage certificate");
  cov->add_option("--function", fn, "function model JSON file or inline JSON")->required();
  cov->add_option("--disk", disk, "radius [center_re center_im]");
  cov->add_option("--annulus", annulus, "inner outer [center_re center_im]");
  cov->add_option("--target", target, "target annulus inner outer")->required()->expected(2);
  cov->add_option("--radial", cgrid.radial, "log-radial target points")->capture_default_str();
  cov->add_option("--angular", cgrid.angular, "angular target points")->capture_default_str();

  double r = 10.0, eps = 7.0;
  int depth = 2;
  auto* chain = app.add_subcommand("chain", "covering chain certificate");
  chain->add_option("--function", fn, "function model JSON file or inline JSON")->required();
  chain->add_option("--r", r, "starting radius")->required();
  chain->add_option("--epsilon", eps, "annulus width, d = (1 + epsilon)^{1/3}")->required();
  chain->add_option("--depth", depth, "number of steps")->capture_default_str();

  int n_max = 3;
  bool require_chain = false;
  auto* ere = app.add_subcommand("eremenko", "numerical escaping point with |f^k(z0)| >= T^_k(r)");
  ere->add_option("--function", fn, "function model JSON file or inline JSON")->required();
  ere->add_option("--r", r, "inner radius of the starting annulus")->required();
  ere->add_option("--epsilon", eps, "annulus width, A(r, (1 + epsilon) r)")->required();
  ere->add_option("--n-max", n_max, "iterates to verify")->capture_default_str();
  ere->add_flag("--require-chain", require_chain, "fail unless the covering chain passes");

  double r1 = 8.0, factor = 17.0;
  int count = 3, n_iter = 20, samples = 256;
  std::vector<int> Ns{1};
  GapGrid ggrid;
  auto* t4 = app.add_subcommand("thm4", "escape-free annuli of sum z^2/(r_n^2 (z^2 - r_n^2))");
  t4->add_option("--r1", r1, "first radius")->capture_default_str();
  t4->add_option("--factor", factor, "r_{n+1} = factor r_n^2")->capture_default_str();
  t4->add_option("--count", count, "listed radii")->capture_default_str();
  t4->add_option("--N", Ns, "annulus indices")->capture_default_str();
  t4->add_option("--n-iter", n_iter, "iterations after the first step")->capture_default_str();
  t4->add_option("--samples", samples, "sampled starting points per annulus")->capture_default_str();
  t4->add_option("--radial", ggrid.radial, "log-radial grid points")->capture_default_str();
  t4->add_option("--angular", ggrid.angular, "angular grid points")->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitPass;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitPass;
  } catch (const CLI::ParseError& e) {
    err << e.what() << "\n\n" << app.help("", CLI::AppFormatMode::All);
    return kExitUsage;
  }

  try {
    if (*nev) return cmd_nevanlinna(common, fn, grid, K, out, err);
    if (*hyp) return cmd_hypdist(common, ds, rs, pairs, out, err);
    if (*bohr) return cmd_bohr(common, ss, ts, out, err);
    if (*cov) return cmd_cover(common, fn, disk, annulus, target, cgrid, out, err);
    if (*chain) return cmd_chain(common, fn, r, eps, depth, out, err);
    if (*ere) return cmd_eremenko(common, fn, r, eps, n_max, require_chain, out, err);
    if (*t4) return cmd_thm4(common, r1, factor, count, Ns, n_iter, samples, ggrid, out, err);
  } catch (const Error& e) {
    err << e.what() << '\n';
    bool usage = e.code() == ErrorCode::Config || e.code() == ErrorCode::Domain;
    if (usage) err << '\n' << app.help("", CLI::AppFormatMode::All);
    return usage ? kExitUsage : kExitFail;
  } catch (const std::exception& e) {
    err << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace anndyn::cli
