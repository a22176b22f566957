#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "anndyn/covering.hpp"
#include "anndyn/extlog.hpp"
#include "anndyn/funcmodel.hpp"
#include "anndyn/nevanlinna.hpp"

namespace anndyn {

enum class StepMode { Numeric, Asymptotic };

struct StepCertificate {
  ExtLog rho;
  double d = 0.0, C = 0.0;
  std::optional<LogPolar> z1, z2;  // maximizers on |z| = d^2 rho and d rho (numeric mode)
  double delta = 0.0;               // hyperbolic distance in A(rho, d^3 rho), or the lemma3_upper bound
  bool delta_is_bound = false;
  ExtLog T_rho, T_drho, N_drho, T_d2rho, N_d2rho;
  double margin1 = 0.0;  // T(d^2 rho) - N(d^2 rho) - T(d rho) - log(1 + 2 (1+2C)^delta e^{kappa delta})
  double margin2 = 0.0;  // T(d rho) - N(d rho) - T(rho) - log 2C
  bool pole_case = false;
  std::optional<bool> pole_coverage;  // set when the pole-case covering was checked
  bool unverified_hypothesis = false;  // pole case that could not be checked at this scale
  ExtLog r_next;                        // exp T(rho)
  StepMode mode = StepMode::Numeric;
  bool passing = false;

  nlohmann::json to_json() const;
};

/// One step of the covering induction at scale rho. Requires d > 1 and
/// C >= d^3. NUMERIC mode when d^3 rho <= kNumericLimit, otherwise T and N
/// come from `fit` (computed on demand when absent) and delta is
/// lemma3_upper(d).
StepCertificate step_hypothesis(const FunctionModel& model, const ExtLog& rho, double d, double C,
                                std::optional<GrowthFit>* fit = nullptr);

struct CoveringChainCertificate {
  std::vector<StepCertificate> steps;
  double start_r = 0.0;
  double epsilon = 0.0;
  int depth = 0;
  bool all_passing = false;
  bool truncated = false;
  std::string truncation_reason;
  std::optional<GrowthFit> fit;

  nlohmann::json to_json() const;
};

/// Steps with d = (1 + epsilon)^{1/3}, C = d^3, rho_0 = r, rho_{k+1} = exp T(rho_k).
/// Stops early (truncated) at the first ASYMPTOTIC_UNAVAILABLE.
CoveringChainCertificate chain_build(const FunctionModel& model, double r, double epsilon, int depth);

/// Step certificates over a radius grid with fixed d and C = d^3.
std::vector<StepCertificate> margin_scan(const FunctionModel& model, const std::vector<double>& rho_grid, double d);
/// Smallest grid radius whose step passes with both margins >= 0.
std::optional<double> first_passing_radius(const std::vector<StepCertificate>& scan);

enum class OrbitStatus { Complete, ArgUnreliable, BeyondRange };

struct OrbitLog {
  std::vector<LogPolar> points;  // points[0] = z0
  OrbitStatus status = OrbitStatus::Complete;
};

/// z0, f(z0), ..., f^n(z0) in log-polar form. Stops early, with the status
/// set, when the argument is no longer reliable or log|f^k| leaves double
/// range. Throws Error(PoleHit) when the orbit comes within 1e-9 of a pole.
OrbitLog orbit_log(const FunctionModel& model, cplx z0, int n);

struct OrbitCheck {
  int k = 0;
  ExtLog lower;      // certified lower bound for |f^k(z0)|
  ExtLog threshold;  // T^_k(r)
  bool pass = false;
};

struct OrbitVerification {
  std::vector<OrbitCheck> checks;  // k = 1..n
  int verified_through = 0;
};

/// Checks |f^k(z0)| >= T^_k(r, f) for k = 1..n from certified lower bounds,
/// carrying the orbit as extended points (magnitudes only past double range).
OrbitVerification verify_orbit(const FunctionModel& model, cplx z0, double r, int n,
                               const std::optional<GrowthFit>& fit = std::nullopt);

struct EremenkoOptions {
  bool require_chain = false;  // fail with CHAIN_NOT_PASSING unless the chain passes
  int radial_starts = 32;
  int angular_starts = 64;
  int target_angles = 64;
};

struct PullbackStage {
  int k = 0;           // preimage taken in A(r_k, d^3 r_k)
  cplx target;         // w_{k+1}
  cplx root;           // z with f(z) = w_{k+1}
  int start_index = 0; // multistart index that converged
  double residual = 0.0;
};

struct EremenkoResult {
  cplx z0;
  int verified_through = 0;
  std::vector<LogPolar> orbit;
  OrbitStatus orbit_status = OrbitStatus::Complete;
  int pullback_depth = 0;    // deepest annulus used for the initial target
  int target_attempt = 0;    // target angle index (pullback) or start index (forward scan)
  /// "pullback" when the preimage chain through the annuli succeeded,
  /// "forward_scan" when the start grid of the first annulus was scanned forward.
  std::string method;
  std::string pullback_note;
  std::vector<PullbackStage> stages;
  std::vector<ExtLog> radii;  // r_k = T^_k(r)
  OrbitVerification verification;
  double d = 0.0;

  nlohmann::json to_json() const;
};

/// Numerical Eremenko point: pulls a target in the deepest representable
/// annulus A(r_K, d^3 r_K) back through A(r_k, d^3 r_k) by Newton
/// multistart (depth-first over distinct roots, target angles 0 then
/// j 2pi/64), then verifies |f^k(z0)| >= T^_k(r) forward. When no chain of
/// preimages exists (the annuli need not chain below the scale where the
/// step margins turn positive) the same start grid on the closed first
/// annulus is iterated forward and the first point verified to n_max wins.
/// Throws Error(PullbackFailed) when neither yields |f(z0)| >= T^_1(r), and
/// Error(ChainNotPassing) when options.require_chain is set and the chain fails.
EremenkoResult eremenko_search(const FunctionModel& model, double r, double epsilon, int n_max,
                               const EremenkoOptions& options = {});

std::string to_string(StepMode m);
std::string to_string(OrbitStatus s);

}  // namespace anndyn
