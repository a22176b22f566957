#include "anndyn/nevanlinna.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <numeric>
#include <sstream>

#include "anndyn/error.hpp"
#include "anndyn/parallel.hpp"
#include "anndyn/quadrature.hpp"
#include "anndyn/report.hpp"

namespace anndyn {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kNearCircle = 1e-9;
constexpr double kNudge = 1e-6;

double log_abs_f(const FunctionModel& model, double log_r, double theta) {
  return log_eval(model, LogPolar(log_r, theta)).value.logmod;
}

/// Pole moduli within relative `rel` of r.
std::optional<double> nearest_pole_modulus(const FunctionModel& model, double r, double rel) {
  std::optional<double> best;
  for (const auto& p : poles_within(model, r * (1.0 + 2.0 * rel))) {
    double a = std::abs(p.location);
    if (std::abs(a - r) <= rel * r && (!best || std::abs(a - r) < std::abs(*best - r))) best = a;
  }
  return best;
}

struct Quad {
  double m;
  std::int64_t nodes;
};

Quad proximity_at(const FunctionModel& model, double r) {
  const double lr = std::log(r);
  auto integrand = [&](double t) { return std::max(0.0, log_abs_f(model, lr, t)); };
  auto q = adaptive_simpson(integrand, 0.0, 2.0 * kPi);
  return {q.value / (2.0 * kPi), q.nodes};
}

double counting_at(const FunctionModel& model, double r) {
  double n = 0.0;
  for (const auto& p : poles_within(model, r)) {
    double a = std::abs(p.location);
    n += p.multiplicity * (a == 0.0 ? std::log(r) : std::log(r / a));
  }
  return n;
}

double golden_max(const std::function<double(double)>& g, double a, double b, double& best_x) {
  const double invphi = (std::sqrt(5.0) - 1.0) / 2.0;
  double c = b - invphi * (b - a), d = a + invphi * (b - a);
  double fc = g(c), fd = g(d);
  while (b - a > 1e-13) {
    if (fc >= fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - invphi * (b - a);
      fc = g(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + invphi * (b - a);
      fd = g(d);
    }
  }
  best_x = fc >= fd ? c : d;
  return std::max(fc, fd);
}

}  // namespace

CircleRadius circle_radius(const FunctionModel& model, double r) {
  if (!(r > 0.0) || !std::isfinite(r)) throw Error(ErrorCode::Domain, "radius must be positive and finite");
  CircleRadius out{r, r};
  if (auto a = nearest_pole_modulus(model, r, kNearCircle)) out.used = *a > r ? r * (1.0 - kNudge) : r * (1.0 + kNudge);
  return out;
}

Characteristic characteristic_detail(const FunctionModel& model, double r) {
  Characteristic c;
  c.radius = circle_radius(model, r);
  auto q = proximity_at(model, c.radius.used);
  c.m = q.m;
  c.nodes = q.nodes;
  c.N = counting_at(model, c.radius.used);
  c.T = c.m + c.N;
  return c;
}

double proximity(const FunctionModel& model, double r) {
  return proximity_at(model, circle_radius(model, r).used).m;
}

double counting(const FunctionModel& model, double r) {
  return counting_at(model, circle_radius(model, r).used);
}

double characteristic(const FunctionModel& model, double r) { return characteristic_detail(model, r).T; }

MaxModulus max_modulus(const FunctionModel& model, double r) {
  if (!(r > 0.0)) throw Error(ErrorCode::Domain, "radius must be positive");
  if (nearest_pole_modulus(model, r, kNearCircle)) {
    // Only a problem when a pole actually lies on the circle, which for
    // every family means some pole modulus is within the cutoff.
    throw Error(ErrorCode::PoleOnCircle, "pole on |z| = r");
  }
  const double lr = std::log(r);
  constexpr int kSamples = 4096;
  const double h = 2.0 * kPi / kSamples;
  std::vector<double> v(kSamples);
  for (int k = 0; k < kSamples; ++k) v[k] = log_abs_f(model, lr, h * k);

  std::vector<int> idx(kSamples);
  std::iota(idx.begin(), idx.end(), 0);
  std::partial_sort(idx.begin(), idx.begin() + 3, idx.end(), [&](int a, int b) { return v[a] > v[b]; });

  MaxModulus out{v[idx[0]], h * idx[0]};
  auto g = [&](double t) { return log_abs_f(model, lr, t); };
  for (int j = 0; j < 3; ++j) {
    double theta = 0.0;
    double val = golden_max(g, h * idx[j] - h, h * idx[j] + h, theta);
    if (val > out.log_max) out = {val, wrap_angle(theta)};
  }
  return out;
}

nlohmann::json GrowthFit::to_json() const {
  return {{"T", {{"a", a}, {"q", q}, {"residual", residual_T}}},
          {"N", {{"b", b}, {"p", p}, {"residual", residual_N}}},
          {"usable", usable()}};
}

GrowthFit growth_fit(const FunctionModel& model) {
  constexpr int kPoints = 8;
  std::vector<double> rho(kPoints), T(kPoints), N(kPoints);
  for (int i = 0; i < kPoints; ++i) rho[i] = kNumericLimit / 10.0 * std::pow(10.0, static_cast<double>(i) / (kPoints - 1));
  parallel_for(kPoints, [&](std::size_t i) {
    auto c = characteristic_detail(model, rho[i]);
    T[i] = c.T;
    N[i] = c.N;
  });

  auto fit = [&](const std::vector<double>& y, double& coef, double& power, double& residual) {
    if (std::all_of(y.begin(), y.end(), [](double v) { return v == 0.0; })) {
      coef = 0.0;
      power = 0.0;
      residual = 0.0;
      return;
    }
    if (std::any_of(y.begin(), y.end(), [](double v) { return !(v > 0.0); })) {
      coef = 0.0;
      power = 0.0;
      residual = kInf;
      return;
    }
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (int i = 0; i < kPoints; ++i) {
      double x = std::log(rho[i]), l = std::log(y[i]);
      sx += x;
      sy += l;
      sxx += x * x;
      sxy += x * l;
    }
    power = (kPoints * sxy - sx * sy) / (kPoints * sxx - sx * sx);
    // Integer orders come back with O(1e-14) noise that would dominate
    // log T once rho is extrapolated far beyond double range.
    if (double n = std::round(power); n >= 1.0 && std::abs(power - n) < 1e-9) power = n;
    double log_coef = (sy - power * sx) / kPoints;
    coef = std::exp(log_coef);
    residual = 0.0;
    for (int i = 0; i < kPoints; ++i)
      residual = std::max(residual, std::abs(coef * std::pow(rho[i], power) / y[i] - 1.0));
  };

  GrowthFit g;
  fit(T, g.a, g.q, g.residual_T);
  fit(N, g.b, g.p, g.residual_N);
  return g;
}

ExtCharacteristic characteristic_ext(const FunctionModel& model, const ExtLog& rho,
                                     const std::optional<GrowthFit>& fit) {
  ExtCharacteristic out;
  if (auto x = rho.to_double(); x && *x <= kNumericLimit) {
    if (!(*x > 0.0)) throw Error(ErrorCode::Domain, "radius must be positive");
    auto c = characteristic_detail(model, *x);
    out.T = ExtLog::from_double(c.T);
    out.N = ExtLog::from_double(c.N);
    return out;
  }
  GrowthFit g = fit ? *fit : growth_fit(model);
  if (!g.usable())
    throw Error(ErrorCode::AsymptoticUnavailable,
                "power-law fit residual above 5% (T " + format_double(g.residual_T) + ", N " +
                    format_double(g.residual_N) + ")");
  out.T = rho.pow(g.q).scaled(g.a);
  out.N = g.b > 0.0 ? rho.pow(g.p).scaled(g.b) : ExtLog();
  out.extrapolated = true;
  return out;
}

std::vector<ExtLog> characteristic_iterates(const FunctionModel& model, double r, int n,
                                            const std::optional<GrowthFit>& fit) {
  if (!(r > 0.0)) throw Error(ErrorCode::Domain, "radius must be positive");
  if (n < 0) throw Error(ErrorCode::Domain, "iterate index must be nonnegative");
  std::vector<ExtLog> out{ExtLog::from_double(r)};
  std::optional<GrowthFit> g = fit;
  for (int k = 0; k < n; ++k) {
    const ExtLog& rho = out.back();
    auto x = rho.to_double();
    if (!(x && *x <= kNumericLimit) && !g) g = growth_fit(model);
    out.push_back(characteristic_ext(model, rho, g).T.exp());
  }
  return out;
}

ExtLog characteristic_iterate(const FunctionModel& model, double r, int n, const std::optional<GrowthFit>& fit) {
  return characteristic_iterates(model, r, n, fit).back();
}

HaymanSandwich hayman_sandwich(const FunctionModel& model, double r) {
  HaymanSandwich h;
  h.r = circle_radius(model, r).used;
  h.R = circle_radius(model, 2.0 * r).used;
  h.T_r = characteristic_detail(model, h.r).T;
  h.log_M = max_modulus(model, h.r).log_max;
  h.T_R = characteristic_detail(model, h.R).T;
  h.upper = (h.R + h.r) / (h.R - h.r) * h.T_R;
  h.ok = h.T_r <= h.log_M && h.log_M <= h.upper;
  return h;
}

GrowthReport growth_report(const FunctionModel& model, const std::vector<double>& r_grid, double K) {
  if (!(K > 1.0)) throw Error(ErrorCode::Domain, "K must exceed 1");
  if (r_grid.empty()) throw Error(ErrorCode::Domain, "empty radius grid");
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    if (!(r_grid[i] > 0.0)) throw Error(ErrorCode::Domain, "radii must be positive");
    if (i > 0 && !(r_grid[i] > r_grid[i - 1])) throw Error(ErrorCode::Domain, "radius grid must increase strictly");
  }
  const std::size_t n = r_grid.size();
  const bool entire = !model.has_poles();
  GrowthReport g;
  g.K = K;
  g.r_grid = r_grid;
  g.r_used.resize(n);
  g.m.resize(n);
  g.N.resize(n);
  g.T.resize(n);
  g.logM.resize(n);
  g.ratio_11.resize(n);
  g.lemma4_margin.resize(n);
  g.hayman_ok.resize(n);
  g.phi_hat.resize(n);

  parallel_for(n, [&](std::size_t i) {
    double r = r_grid[i];
    auto c = characteristic_detail(model, r);
    g.r_used[i] = c.radius.used;
    g.m[i] = c.m;
    g.N[i] = c.N;
    g.T[i] = c.T;
    double lr = std::log(c.radius.used);
    double denom = c.N * lr;
    g.ratio_11[i] = c.N == 0.0 ? kInf : c.T / denom;
    g.phi_hat[i] = g.ratio_11[i];
    double TK = characteristic(model, K * r);
    g.lemma4_margin[i] = TK - (1.0 + std::log(K) / lr) * c.T;
    if (entire) {
      auto h = hayman_sandwich(model, r);
      g.logM[i] = h.log_M;
      g.hayman_ok[i] = h.ok;
    }
  });

  g.ratio_increasing = true;
  for (std::size_t i = 1; i < n; ++i)
    if (!(g.ratio_11[i] > g.ratio_11[i - 1])) g.ratio_increasing = false;
  return g;
}

std::string GrowthReport::to_csv() const {
  std::ostringstream os;
  os << "r,m,N,T,logM,ratio_11,lemma4_margin,hayman_ok\n";
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    os << format_double(r_grid[i]) << ',' << format_double(m[i]) << ',' << format_double(N[i]) << ','
       << format_double(T[i]) << ',' << (logM[i] ? format_double(*logM[i]) : "NA") << ','
       << format_double(ratio_11[i]) << ',' << format_double(lemma4_margin[i]) << ','
       << (hayman_ok[i] ? (*hayman_ok[i] ? "true" : "false") : "NA") << '\n';
  }
  return os.str();
}

nlohmann::json GrowthReport::to_json() const {
  auto arr = [](const std::vector<double>& v) {
    nlohmann::json a = nlohmann::json::array();
    for (double x : v) a.push_back(json_number(x));
    return a;
  };
  nlohmann::json lm = nlohmann::json::array(), ho = nlohmann::json::array();
  for (std::size_t i = 0; i < r_grid.size(); ++i) {
    lm.push_back(logM[i] ? json_number(*logM[i]) : nlohmann::json(nullptr));
    ho.push_back(hayman_ok[i] ? nlohmann::json(*hayman_ok[i]) : nlohmann::json(nullptr));
  }
  return {{"r_grid", arr(r_grid)},
          {"r_used", arr(r_used)},
          {"m", arr(m)},
          {"N", arr(N)},
          {"T", arr(T)},
          {"logM", lm},
          {"ratio_11", arr(ratio_11)},
          {"phi_hat", arr(phi_hat)},
          {"lemma4_margin", arr(lemma4_margin)},
          {"K", K},
          {"hayman_ok", ho},
          {"ratio_11_increasing", ratio_increasing},
          {"condition_11", ratio_increasing ? "consistent with growth condition T >= N phi log r"
                                            : "ratio not increasing on this grid"}};
}

}  // namespace anndyn
