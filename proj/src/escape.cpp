#include "anndyn/escape.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "anndyn/error.hpp"
#include "anndyn/hyperbolic.hpp"
#include "anndyn/parallel.hpp"
#include "anndyn/report.hpp"

namespace anndyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();

// log(1 + 2 (1 + 2C)^delta e^{kappa delta})
double covering_constant(double C, double delta) {
  double L = std::log(2.0) + delta * (std::log1p(2.0 * C) + kappa());
  return L > 0.0 ? L + std::log1p(std::exp(-L)) : std::log1p(std::exp(L));
}

// alpha rho^q - beta rho^p - K for rho given by its log (or only as ExtLog),
// with alpha, beta >= 0. Returns +-inf when the terms leave double range.
double power_difference(double alpha, double q, double beta, double p, double K, const ExtLog& rho) {
  double P = -kInf, Q = -kInf;
  if (auto L = rho.log_value()) {
    P = alpha > 0.0 ? std::log(alpha) + q * *L : -kInf;
    Q = beta > 0.0 ? std::log(beta) + p * *L : -kInf;
    double top = std::max(P, Q);
    if (top < 700.0) return std::exp(P) - std::exp(Q) - K;
    if (P == Q) return -K;
    return P > Q ? kInf : -kInf;
  }
  // log rho itself is beyond double range: the larger power wins.
  if (alpha <= 0.0 && beta <= 0.0) return -K;
  if (beta <= 0.0) return kInf;
  if (alpha <= 0.0) return -kInf;
  if (q != p) return q > p ? kInf : -kInf;
  return alpha > beta ? kInf : (alpha < beta ? -kInf : -K);
}

const GrowthFit& ensure_fit(const FunctionModel& model, std::optional<GrowthFit>* fit, std::optional<GrowthFit>& local) {
  std::optional<GrowthFit>& slot = fit ? *fit : local;
  if (!slot) slot = growth_fit(model);
  return *slot;
}

bool in_closed_annulus(cplx z, double inner, double outer) {
  double a = std::abs(z);
  return inner <= a && a <= outer;
}

}  // namespace

std::string to_string(StepMode m) { return m == StepMode::Numeric ? "NUMERIC" : "ASYMPTOTIC"; }

std::string to_string(OrbitStatus s) {
  switch (s) {
    case OrbitStatus::Complete:
      return "COMPLETE";
    case OrbitStatus::ArgUnreliable:
      return "ARG_UNRELIABLE";
    case OrbitStatus::BeyondRange:
      return "BEYOND_RANGE";
  }
  return "?";
}

StepCertificate step_hypothesis(const FunctionModel& model, const ExtLog& rho, double d, double C,
                                std::optional<GrowthFit>* fit) {
  if (!(d > 1.0)) throw Error(ErrorCode::Domain, "step needs d > 1");
  if (!(C >= d * d * d * (1.0 - 1e-12))) throw Error(ErrorCode::Domain, "step needs C >= d^3");
  if (rho.is_zero()) throw Error(ErrorCode::Domain, "step needs rho > 0");
  StepCertificate s;
  s.rho = rho;
  s.d = d;
  s.C = C;
  std::optional<GrowthFit> local;

  auto rho_d = rho.to_double();
  const double d3 = d * d * d;
  if (rho_d && d3 * *rho_d <= kNumericLimit) {
    s.mode = StepMode::Numeric;
    double r = *rho_d;
    auto c0 = characteristic_detail(model, r);
    auto c1 = characteristic_detail(model, d * r);
    auto c2 = characteristic_detail(model, d * d * r);
    s.T_rho = ExtLog::from_double(c0.T);
    s.T_drho = ExtLog::from_double(c1.T);
    s.N_drho = ExtLog::from_double(c1.N);
    s.T_d2rho = ExtLog::from_double(c2.T);
    s.N_d2rho = ExtLog::from_double(c2.N);

    // Maximizers on the (nudged) circles; log|f(z_i)| >= T - N there.
    double r1 = c2.radius.used, r2 = c1.radius.used;
    auto m1 = max_modulus(model, r1), m2 = max_modulus(model, r2);
    s.z1 = LogPolar(std::log(r1), m1.theta);
    s.z2 = LogPolar(std::log(r2), m2.theta);
    Annulus A(r, d3 * r);
    s.delta = annulus_distance(A, std::polar(r1, m1.theta), std::polar(r2, m2.theta));

    s.margin1 = c2.T - c2.N - c1.T - covering_constant(C, s.delta);
    s.margin2 = c1.T - c1.N - c0.T - std::log(2.0 * C);

    s.pole_case = pole_count_in_annulus(model, 0.0, r, d3 * r) > 0;
    s.r_next = characteristic_ext(model, rho).T.exp();
    if (s.pole_case) {
      auto r1v = s.r_next.to_double();
      if (r1v && d3 * *r1v <= kNumericLimit) {
        try {
          auto cert = coverage_certificate(model, Annulus(r, d3 * r), Annulus(*r1v, d3 * *r1v));
          s.pole_coverage = cert.verified;
        } catch (const Error&) {
          s.pole_coverage = false;
        }
      } else {
        s.unverified_hypothesis = true;
      }
    }
  } else {
    s.mode = StepMode::Asymptotic;
    const GrowthFit& g = ensure_fit(model, fit, local);
    if (!g.usable())
      throw Error(ErrorCode::AsymptoticUnavailable, "growth fit residual above 5%");
    s.delta = lemma3_upper(d);
    s.delta_is_bound = true;
    auto t0 = characteristic_ext(model, rho, g);
    auto t1 = characteristic_ext(model, rho.scaled(d), g);
    auto t2 = characteristic_ext(model, rho.scaled(d * d), g);
    s.T_rho = t0.T;
    s.T_drho = t1.T;
    s.N_drho = t1.N;
    s.T_d2rho = t2.T;
    s.N_d2rho = t2.N;
    // With T = a rho^q and N = b rho^p the margins are power differences.
    double dq = std::pow(d, g.q), dp = std::pow(d, g.p);
    s.margin1 = power_difference(g.a * dq * (dq - 1.0), g.q, g.b * dp * dp, g.p, covering_constant(C, s.delta), rho);
    s.margin2 = power_difference(g.a * (dq - 1.0), g.q, g.b * dp, g.p, std::log(2.0 * C), rho);
    s.r_next = t0.T.exp();

    auto inner = rho, outer = rho.scaled(d3);
    if (rho_d && std::isfinite(d3 * *rho_d)) {
      s.pole_case = pole_count_in_annulus(model, 0.0, *rho_d, d3 * *rho_d) > 0;
    } else {
      auto hit = pole_in_annulus_ext(model, inner, outer);
      s.pole_case = hit.value_or(false);
      if (!hit) s.unverified_hypothesis = true;
    }
    if (s.pole_case) s.unverified_hypothesis = true;
  }
  bool margins_ok = s.margin1 >= 0.0 && s.margin2 >= 0.0;
  s.passing = margins_ok || (s.pole_case && s.pole_coverage.value_or(false));
  return s;
}

nlohmann::json StepCertificate::to_json() const {
  nlohmann::json j = {{"rho", json_extlog(rho)},
                      {"d", d},
                      {"C", C},
                      {"delta", delta},
                      {"delta_is_lemma3_bound", delta_is_bound},
                      {"T_rho", json_extlog(T_rho)},
                      {"T_drho", json_extlog(T_drho)},
                      {"N_drho", json_extlog(N_drho)},
                      {"T_d2rho", json_extlog(T_d2rho)},
                      {"N_d2rho", json_extlog(N_d2rho)},
                      {"margin1", json_number(margin1)},
                      {"margin1_inequality", "T(d^2 rho) - N(d^2 rho) >= T(d rho) + log(1 + 2(1+2C)^delta e^{kappa delta})"},
                      {"margin2", json_number(margin2)},
                      {"margin2_inequality", "T(d rho) - N(d rho) >= T(rho) + log 2C"},
                      {"pole_case", pole_case},
                      {"unverified_hypothesis", unverified_hypothesis},
                      {"r_next", json_extlog(r_next)},
                      {"mode", to_string(mode)},
                      {"status", passing ? "PASSING" : "NONPASSING"}};
  j["z1"] = z1 ? json_logpolar(*z1) : nlohmann::json(nullptr);
  j["z2"] = z2 ? json_logpolar(*z2) : nlohmann::json(nullptr);
  j["pole_coverage"] = pole_coverage ? nlohmann::json(*pole_coverage) : nlohmann::json(nullptr);
  return j;
}

CoveringChainCertificate chain_build(const FunctionModel& model, double r, double epsilon, int depth) {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::Domain, "epsilon must be positive");
  if (depth < 1) throw Error(ErrorCode::Domain, "depth must be at least 1");
  if (!(r > 0.0)) throw Error(ErrorCode::Domain, "start radius must be positive");
  CoveringChainCertificate c;
  c.start_r = r;
  c.epsilon = epsilon;
  c.depth = depth;
  const double d = std::cbrt(1.0 + epsilon), C = d * d * d;
  ExtLog rho = ExtLog::from_double(r);
  for (int k = 0; k < depth; ++k) {
    try {
      c.steps.push_back(step_hypothesis(model, rho, d, C, &c.fit));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::AsymptoticUnavailable) throw;
      c.truncated = true;
      c.truncation_reason = e.what();
      break;
    }
    rho = c.steps.back().r_next;
  }
  c.all_passing = !c.truncated && !c.steps.empty();
  for (const auto& s : c.steps) c.all_passing = c.all_passing && s.passing;
  return c;
}

nlohmann::json CoveringChainCertificate::to_json() const {
  nlohmann::json st = nlohmann::json::array();
  for (const auto& s : steps) st.push_back(s.to_json());
  nlohmann::json j = {{"start_r", start_r},
                      {"epsilon", epsilon},
                      {"d", std::cbrt(1.0 + epsilon)},
                      {"depth", depth},
                      {"all_passing", all_passing},
                      {"truncated", truncated},
                      {"steps", st},
                      {"claim", "f^n(A(r, d^3 r)) covers A(r_n, d^3 r_n) with r_n >= T^_n(r, f)"}};
  if (truncated) j["truncation_reason"] = truncation_reason;
  if (fit) j["growth_fit"] = fit->to_json();
  return j;
}

std::vector<StepCertificate> margin_scan(const FunctionModel& model, const std::vector<double>& rho_grid, double d) {
  std::vector<StepCertificate> out(rho_grid.size());
  parallel_for(rho_grid.size(), [&](std::size_t i) {
    out[i] = step_hypothesis(model, ExtLog::from_double(rho_grid[i]), d, d * d * d);
  });
  return out;
}

std::optional<double> first_passing_radius(const std::vector<StepCertificate>& scan) {
  for (const auto& s : scan)
    if (s.margin1 >= 0.0 && s.margin2 >= 0.0) return s.rho.to_double();
  return std::nullopt;
}

OrbitLog orbit_log(const FunctionModel& model, cplx z0, int n) {
  if (n < 0) throw Error(ErrorCode::Domain, "orbit length must be nonnegative");
  OrbitLog out;
  LogPolar p = LogPolar::from_complex(z0);
  out.points.push_back(p);
  for (int k = 0; k < n; ++k) {
    if (p.logmod < 600.0) {
      cplx z = p.to_complex();
      if (distance_to_nearest_pole(model, z) <= 1e-9 * std::max(1.0, std::abs(z)))
        throw Error(ErrorCode::PoleHit, "orbit within 1e-9 of a pole at step " + std::to_string(k));
    }
    if (!p.arg_reliable) {
      out.status = OrbitStatus::ArgUnreliable;
      return out;
    }
    LogEval e;
    try {
      e = log_eval(model, p);
    } catch (const Error& err) {
      if (err.code() == ErrorCode::Overflow) {
        out.status = OrbitStatus::BeyondRange;
        return out;
      }
      if (err.code() == ErrorCode::ArgUnreliable || err.code() == ErrorCode::NoAsymptoticModel) {
        out.status = OrbitStatus::ArgUnreliable;
        return out;
      }
      throw;
    }
    p = e.value;
    out.points.push_back(p);
  }
  if (!out.points.back().arg_reliable && static_cast<int>(out.points.size()) <= n)
    out.status = OrbitStatus::ArgUnreliable;
  return out;
}

OrbitVerification verify_orbit(const FunctionModel& model, cplx z0, double r, int n,
                               const std::optional<GrowthFit>& fit) {
  OrbitVerification v;
  if (n <= 0) return v;
  auto thresholds = characteristic_iterates(model, r, n, fit);
  ExtPoint p = ExtPoint::from_complex(z0);
  bool ok = true;
  for (int k = 1; k <= n; ++k) {
    if (auto z = p.to_complex(); z && p.modulus.log_value().value_or(kInf) < 600.0) {
      if (distance_to_nearest_pole(model, *z) <= 1e-9 * std::max(1.0, std::abs(*z)))
        throw Error(ErrorCode::PoleHit, "orbit within 1e-9 of a pole");
    }
    try {
      p = eval_ext(model, p);
    } catch (const Error& e) {
      if (e.code() == ErrorCode::ArgUnreliable || e.code() == ErrorCode::NoAsymptoticModel) break;
      throw;
    }
    OrbitCheck c;
    c.k = k;
    c.lower = p.modulus_lower_bound();
    c.threshold = thresholds[k];
    c.pass = c.lower >= c.threshold;
    v.checks.push_back(c);
    ok = ok && c.pass;
    if (ok) v.verified_through = k;
  }
  return v;
}

namespace {

struct NewtonHit {
  cplx z;
  int start;
  double residual;
};

// Solves f(z) = w in log form, log f(z) - log w = 0 with the argument
// difference wrapped, from a row-major log-radial x angular start grid.
// Returns the distinct roots inside the annulus in order of first discovery.
std::vector<NewtonHit> pull_back(const FunctionModel& model, cplx w, double inner, double outer, bool closed,
                                 const EremenkoOptions& opt) {
  const cplx logw = std::log(w);
  const double lin = std::log(inner), lout = std::log(outer);
  std::vector<NewtonHit> hits;
  int index = 0;
  for (int i = 0; i < opt.radial_starts; ++i) {
    double rad = std::exp(lin + (lout - lin) * (i + 0.5) / opt.radial_starts);
    for (int j = 0; j < opt.angular_starts; ++j, ++index) {
      cplx z = std::polar(rad, 2.0 * kPi * j / opt.angular_starts);
      bool converged = false;
      double res = kInf;
      for (int it = 0; it < 60; ++it) {
        if (distance_to_nearest_pole(model, z) <= 1e-9 * std::max(1.0, std::abs(z))) break;
        cplx delta;
        try {
          auto le = log_eval(model, LogPolar::from_complex(z));
          delta = le.value.log() - logw;
          delta.imag(wrap_angle(delta.imag()));
        } catch (const Error&) {
          break;
        }
        res = std::abs(delta);
        if (res < 1e-13 * std::max(1.0, std::abs(logw))) {
          converged = true;
          break;
        }
        cplx g = log_derivative(model, z);
        if (!std::isfinite(g.real()) || g == cplx(0.0)) break;
        cplx step = delta / g;
        double cap = 0.5 * std::abs(z) + 1.0;
        if (std::abs(step) > cap) step *= cap / std::abs(step);
        z -= step;
        if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) break;
      }
      if (!converged) continue;
      bool inside = closed ? in_closed_annulus(z, inner, outer) : Annulus(inner, outer).contains(z);
      if (!inside) continue;
      bool seen = false;
      for (const auto& h : hits) seen = seen || std::abs(h.z - z) <= 1e-8 * std::max(1.0, std::abs(z));
      if (!seen) hits.push_back({z, index, res});
    }
  }
  return hits;
}

// Depth-first pullback from level k (target w in A_{k+1}) down to A_0.
bool pull_back_chain(const FunctionModel& model, const std::vector<double>& radii, double d3, int k, cplx w,
                     const EremenkoOptions& opt, std::vector<PullbackStage>& stages, int& budget) {
  if (k < 0) return true;
  if (--budget < 0) return false;
  double inner = radii[k];
  for (const auto& hit : pull_back(model, w, inner, d3 * inner, k == 0, opt)) {
    stages.push_back({k, w, hit.z, hit.start, hit.residual});
    if (pull_back_chain(model, radii, d3, k - 1, hit.z, opt, stages, budget)) return true;
    stages.pop_back();
    if (budget < 0) return false;
  }
  return false;
}

}  // namespace

EremenkoResult eremenko_search(const FunctionModel& model, double r, double epsilon, int n_max,
                               const EremenkoOptions& opt) {
  if (!(epsilon > 0.0) || !(r > 0.0) || n_max < 0) throw Error(ErrorCode::Domain, "bad eremenko_search arguments");
  EremenkoResult res;
  const double d = std::cbrt(1.0 + epsilon), d3 = 1.0 + epsilon;
  res.d = d;
  if (opt.require_chain) {
    auto chain = chain_build(model, r, epsilon, std::max(1, n_max));
    if (!chain.all_passing) throw Error(ErrorCode::ChainNotPassing, "covering chain does not pass at this scale");
  }
  if (n_max == 0) {
    res.z0 = r;
    res.orbit = {LogPolar::from_complex(res.z0)};
    res.radii = {ExtLog::from_double(r)};
    return res;
  }

  res.radii = characteristic_iterates(model, r, n_max);
  int K = 0;
  for (int k = 1; k <= n_max; ++k) {
    auto v = res.radii[k].to_double();
    if (!v || !std::isfinite(d3 * *v) || d3 * *v > 1e300) break;
    K = k;
  }
  res.pullback_depth = K;
  std::vector<double> radii(K + 1);
  for (int k = 0; k <= K; ++k) radii[k] = *res.radii[k].to_double();
  int budget = 512;
  for (int attempt = 0; attempt < opt.target_angles && budget > 0; ++attempt) {
    cplx w = std::polar(radii[K] * std::sqrt(d3), 2.0 * kPi * attempt / opt.target_angles);
    std::vector<PullbackStage> stages;
    if (!pull_back_chain(model, radii, d3, K - 1, w, opt, stages, budget)) continue;
    auto v = verify_orbit(model, stages.back().root, r, n_max);
    if (v.verified_through < n_max) continue;
    res.method = "pullback";
    res.z0 = stages.back().root;
    res.target_attempt = attempt;
    res.stages = std::move(stages);
    res.verification = v;
    break;
  }

  if (res.method.empty()) {
    // The annuli do not chain at this scale; scan the start grid of the
    // closed annulus forward instead and keep the deepest verified point.
    res.pullback_note = "no preimage chain through A_0 .. A_" + std::to_string(K);
    const double lin = std::log(r), lout = std::log(d3 * r);
    int best = -1, index = 0;
    for (int i = 0; i < opt.radial_starts && best < n_max; ++i) {
      double rad = std::exp(lin + (lout - lin) * (i + 0.5) / opt.radial_starts);
      for (int j = 0; j < opt.angular_starts; ++j, ++index) {
        cplx z = std::polar(rad, 2.0 * kPi * j / opt.angular_starts);
        if (j == 0) z = rad;  // exactly on the positive axis
        OrbitVerification v;
        try {
          v = verify_orbit(model, z, r, n_max);
        } catch (const Error& e) {
          if (e.code() != ErrorCode::PoleHit) throw;
          continue;
        }
        if (v.verified_through > best) {
          best = v.verified_through;
          res.z0 = z;
          res.verification = v;
          res.target_attempt = index;
          if (best == n_max) break;
        }
      }
    }
    if (best <= 0) throw Error(ErrorCode::PullbackFailed, res.pullback_note + " and no start point verifies |f(z0)| >= T^_1(r)");
    res.method = "forward_scan";
  }
  auto orbit = orbit_log(model, res.z0, n_max);
  res.orbit = orbit.points;
  res.orbit_status = orbit.status;
  res.verified_through = res.verification.verified_through;
  return res;
}

nlohmann::json EremenkoResult::to_json() const {
  nlohmann::json orb = nlohmann::json::array(), st = nlohmann::json::array(), rad = nlohmann::json::array(),
                 chk = nlohmann::json::array();
  for (const auto& p : orbit) orb.push_back(json_logpolar(p));
  for (const auto& s : stages)
    st.push_back({{"k", s.k}, {"target", json_complex(s.target)}, {"root", json_complex(s.root)},
                  {"start_index", s.start_index}, {"residual", s.residual}});
  for (const auto& r : radii) rad.push_back(json_extlog(r));
  for (const auto& c : verification.checks)
    chk.push_back({{"k", c.k}, {"lower", json_extlog(c.lower)}, {"threshold", json_extlog(c.threshold)}, {"pass", c.pass}});
  return {{"z0", json_complex(z0)},
          {"method", method},
          {"pullback_note", pullback_note},
          {"d", d},
          {"verified_through", verified_through},
          {"orbit", orb},
          {"orbit_status", to_string(orbit_status)},
          {"pullback_depth", pullback_depth},
          {"target_attempt", target_attempt},
          {"stages", st},
          {"radii", rad},
          {"checks", chk},
          {"claim", "|f^k(z0)| >= T^_k(r, f)"}};
}

}  // namespace anndyn
