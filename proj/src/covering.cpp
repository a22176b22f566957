#include "anndyn/covering.hpp"

#include <cmath>
#include <limits>
#include <numbers>

#include "anndyn/error.hpp"
#include "anndyn/report.hpp"

namespace anndyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr int kMinBoundary = 1 << 10;
constexpr int kMaxBoundary = 1 << 18;
constexpr double kWindingChange = 1e-3;
constexpr double kResidualLimit = 0.1;
constexpr double kBoundaryTooClose = 1e-9;
constexpr double kDirectLog = 600.0;

double delta_of(double s) { return std::log((1.0 + s) / (1.0 - s)); }

void check_s(double s) {
  if (!(s > 0.0 && s < 1.0)) throw Error(ErrorCode::Domain, "s must lie in (0, 1)");
}

struct Circle {
  cplx center;
  double radius;
  double orientation;  // +1 counterclockwise
};

// Boundary samples of one circle, extended by doubling.
struct BoundarySamples {
  Circle circle;
  const FunctionModel* model = nullptr;
  // Representable samples keep f and f'(z)(z - c); others keep log f and
  // (f'/f)(z)(z - c).
  std::vector<bool> direct;
  std::vector<cplx> value, weight;

  int size() const { return static_cast<int>(value.size()); }

  void sample(int j, int n, cplx& v, cplx& wgt, bool& dir) const {
    double theta = 2.0 * kPi * j / n;
    cplx e = std::polar(1.0, theta);
    cplx z = circle.center + circle.radius * e;
    cplx dz = circle.radius * e;  // (z - c); the i from dz = i (z - c) dtheta cancels 2 pi i
    auto le = log_eval(*model, LogPolar::from_complex(z));
    if (le.value.logmod <= kDirectLog) {
      dir = true;
      v = std::exp(le.value.log());
      wgt = derivative_eval(*model, z) * dz;
      if (!std::isfinite(v.real())) v = eval(*model, z).value();
    } else {
      dir = false;
      v = le.value.log();
      wgt = log_derivative(*model, z) * dz;
    }
  }

  void ensure(int n) {
    if (size() >= n) return;
    int target = std::max(n, kMinBoundary);
    if (size() == 0) {
      direct.assign(target, false);
      value.resize(target);
      weight.resize(target);
      for (int j = 0; j < target; ++j) {
        bool d;
        sample(j, target, value[j], weight[j], d);
        direct[j] = d;
      }
      return;
    }
    while (size() < target) {
      int old = size(), n2 = 2 * old;
      std::vector<bool> d2(n2);
      std::vector<cplx> v2(n2), w2(n2);
      for (int j = 0; j < old; ++j) {
        d2[2 * j] = direct[j];
        v2[2 * j] = value[j];
        w2[2 * j] = weight[j];
        bool d;
        sample(2 * j + 1, n2, v2[2 * j + 1], w2[2 * j + 1], d);
        d2[2 * j + 1] = d;
      }
      direct.swap(d2);
      value.swap(v2);
      weight.swap(w2);
    }
  }

  // Trapezoid value of (1/2 pi) int f'(z)(z - c)/(f(z) - w) dtheta with n
  // nodes, and the smallest |f - w| seen.
  double winding(cplx w, int n, double& min_gap) {
    ensure(n);
    int stride = size() / n;
    cplx logw = std::log(w);
    cplx sum = 0.0;
    for (int j = 0; j < size(); j += stride) {
      if (direct[j]) {
        cplx diff = value[j] - w;
        min_gap = std::min(min_gap, std::abs(diff));
        sum += weight[j] / diff;
      } else {
        sum += weight[j] / (1.0 - std::exp(logw - value[j]));
      }
    }
    return circle.orientation * (sum / static_cast<double>(n)).real();
  }
};

std::vector<Circle> boundary_of(const Domain& d) {
  if (const auto* disk = std::get_if<Disk>(&d)) {
    if (!(disk->radius > 0.0)) throw Error(ErrorCode::Domain, "disk radius must be positive");
    return {{disk->center, disk->radius, 1.0}};
  }
  const auto& a = std::get<Annulus>(d);
  return {{a.center, a.outer, 1.0}, {a.center, a.inner, -1.0}};
}

int enclosed_poles(const FunctionModel& model, const Domain& d) {
  if (const auto* disk = std::get_if<Disk>(&d)) return pole_count_in_disk(model, disk->center, disk->radius);
  const auto& a = std::get<Annulus>(d);
  return pole_count_in_annulus(model, a.center, a.inner, a.outer);
}

void check_boundary_poles(const FunctionModel& model, const std::vector<Circle>& circles) {
  for (const auto& c : circles) {
    double reach = std::abs(c.center) + c.radius * (1.0 + 1e-6) + 1.0;
    for (const auto& p : poles_within(model, reach))
      if (std::abs(std::abs(p.location - c.center) - c.radius) <= 1e-9 * std::max(1.0, c.radius))
        throw Error(ErrorCode::Domain, "pole on the boundary of the coverage domain");
  }
}

CoveragePoint count_point(std::vector<BoundarySamples>& circles, int poles, cplx w) {
  CoveragePoint pt;
  pt.w = w;
  double total = 0.0;
  for (auto& bs : circles) {
    double gap = std::numeric_limits<double>::infinity();
    int n = kMinBoundary;
    double prev = bs.winding(w, n, gap);
    double cur = prev;
    while (n < kMaxBoundary) {
      n *= 2;
      cur = bs.winding(w, n, gap);
      if (std::abs(cur - prev) < kWindingChange) break;
      prev = cur;
    }
    if (gap < kBoundaryTooClose * std::abs(w)) {
      pt.skipped = true;
      return pt;
    }
    pt.boundary_points = std::max(pt.boundary_points, n);
    total += cur;
  }
  pt.winding = total;
  double nearest = std::round(total);
  pt.residual = std::abs(total - nearest);
  pt.count = static_cast<int>(nearest) + poles;
  return pt;
}

std::vector<BoundarySamples> make_samples(const FunctionModel& model, const Domain& domain) {
  auto circles = boundary_of(domain);
  check_boundary_poles(model, circles);
  std::vector<BoundarySamples> out;
  for (const auto& c : circles) {
    BoundarySamples bs;
    bs.circle = c;
    bs.model = &model;
    out.push_back(std::move(bs));
  }
  return out;
}

}  // namespace

double kappa() {
  const long double pi = std::numbers::pi_v<long double>;
  long double g2 = kGammaQuarter * kGammaQuarter;
  return static_cast<double>(g2 * g2 / (4.0L * pi * pi));
}

double bohr_inner_exp(double s, double x) {
  check_s(s);
  if (!(x > 0.0 && x < 1.0)) throw Error(ErrorCode::Domain, "x must lie in (0, 1)");
  return std::exp(-kappa() + std::log((1.0 - x) / x) / delta_of(s));
}

double bohr_h(double s, double x, double t) {
  if (!(t > 1.0)) throw Error(ErrorCode::Domain, "t must exceed 1");
  double A = bohr_inner_exp(s, x);
  return A - t / A - 1.0 - t;
}

double bohr_constants(double s, double t) {
  double lo = 1e-15, hi = 1.0 - 1e-15;
  if (bohr_h(s, lo, t) < 0.0) throw Error(ErrorCode::NoRoot, "h(s, 1e-15, t) < 0");
  if (bohr_h(s, hi, t) >= 0.0) return hi;
  // h decreases in x; bisect until the bracket stops shrinking.
  for (int i = 0; i < 400; ++i) {
    double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    (bohr_h(s, mid, t) >= 0.0 ? lo : hi) = mid;
  }
  return lo;
}

double bohr_cmax(double s) {
  check_s(s);
  return 1.0 / (1.0 + std::exp(std::log((1.0 + std::sqrt(2.0)) * std::exp(kappa())) * delta_of(s)));
}

double bohr_c_closed_half() { return 1.0 / (1.0 + std::pow(4.0 * std::exp(kappa()), std::log(3.0))); }

double hayman_c(double s) {
  check_s(s);
  return (1.0 - s) * (1.0 - s) / (4.0 * s);
}

nlohmann::json domain_json(const Domain& d) {
  if (const auto* disk = std::get_if<Disk>(&d))
    return {{"kind", "disk"}, {"center", json_complex(disk->center)}, {"radius", disk->radius}};
  auto j = std::get<Annulus>(d).to_json();
  j["kind"] = "annulus";
  return j;
}

std::vector<cplx> coverage_targets(const Annulus& target, const CoverageGrid& grid) {
  if (grid.radial < 1 || grid.angular < 1) throw Error(ErrorCode::Domain, "coverage grid must be nonempty");
  std::vector<cplx> out;
  out.reserve(static_cast<std::size_t>(grid.radial) * grid.angular);
  for (int i = 0; i < grid.radial; ++i) {
    double rad = target.inner * std::pow(target.outer / target.inner, (i + 0.5) / grid.radial);
    for (int j = 0; j < grid.angular; ++j) out.push_back(target.center + std::polar(rad, 2.0 * kPi * j / grid.angular));
  }
  return out;
}

CoveragePoint coverage_count(const FunctionModel& model, const Domain& domain, cplx w) {
  auto samples = make_samples(model, domain);
  return count_point(samples, enclosed_poles(model, domain), w);
}

CoverageCertificate coverage_certificate(const FunctionModel& model, const Domain& domain, const Annulus& target,
                                         const CoverageGrid& grid) {
  CoverageCertificate cert;
  cert.domain = domain;
  cert.target = target;
  cert.grid = grid;
  auto samples = make_samples(model, domain);
  cert.enclosed_poles = enclosed_poles(model, domain);
  bool all_covered = true;
  for (cplx w : coverage_targets(target, grid)) {
    CoveragePoint pt = count_point(samples, cert.enclosed_poles, w);
    if (pt.skipped) {
      ++cert.skipped;
      all_covered = false;
    } else {
      cert.max_residual = std::max(cert.max_residual, pt.residual);
      if (pt.residual > kResidualLimit) cert.valid = false;
      if (*pt.count < 1) all_covered = false;
    }
    cert.points.push_back(pt);
  }
  cert.verified = cert.valid && all_covered;
  return cert;
}

std::optional<CoverageCertificate> covered_annulus_search(const FunctionModel& model, const Domain& domain, double c,
                                                          double t, const CoverageGrid& grid, double growth,
                                                          int steps) {
  if (!(c > 0.0) || !(t > 1.0) || !(growth > 1.0)) throw Error(ErrorCode::Domain, "search needs c > 0, t > 1, growth > 1");
  double R = c;
  for (int k = 0; k <= steps; ++k, R *= growth) {
    auto cert = coverage_certificate(model, domain, Annulus(R / t, R), grid);
    if (cert.verified) return cert;
  }
  return std::nullopt;
}

nlohmann::json CoverageCertificate::to_json() const {
  nlohmann::json pts = nlohmann::json::array();
  for (const auto& p : points) {
    nlohmann::json j = {{"w", json_complex(p.w)}, {"skipped", p.skipped}};
    if (p.count) {
      j["count"] = *p.count;
      j["winding"] = p.winding;
      j["residual"] = p.residual;
      j["boundary_points"] = p.boundary_points;
    }
    pts.push_back(j);
  }
  return {{"domain", domain_json(domain)},
          {"target", target.to_json()},
          {"grid", {{"radial", grid.radial}, {"angular", grid.angular}}},
          {"enclosed_poles", enclosed_poles},
          {"verified", verified},
          {"valid", valid},
          {"status", !valid ? "INVALID" : (verified ? "VERIFIED" : "NOT_COVERED")},
          {"max_residual", max_residual},
          {"skipped", skipped},
          {"points", pts}};
}

}  // namespace anndyn
