#include "anndyn/funcmodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "anndyn/error.hpp"
#include "anndyn/polynomial.hpp"

namespace anndyn {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();
constexpr double kPi = std::numbers::pi;
constexpr double kInf = std::numeric_limits<double>::infinity();
// Inputs with log|z| above this are handled by dominant-term expansions.
constexpr double kDirectLogThreshold = 600.0;
// z^2 must stay finite for the direct EntireOverSin formula.
const double kSinDirectLogThreshold = std::log(1e150);
constexpr double kPoleCutoff = 1e-12;
constexpr double kArgTolerance = 1e-3;

const cplx I(0.0, 1.0);

cplx cexpm1(cplx w) {
  double a = w.real(), b = w.imag();
  double s = std::sin(0.5 * b);
  return {std::expm1(a) * std::cos(b) - 2.0 * s * s, std::exp(a) * std::sin(b)};
}

// A branch of log sin(pi z), accurate for large |Im z| and near the zeros.
cplx log_sin_pi(cplx z) {
  const cplx log2i(std::log(2.0), 0.5 * kPi);
  if (z.imag() >= 0.0) return -I * kPi * z + std::log(cexpm1(2.0 * I * kPi * z)) - log2i;
  return I * kPi * z + std::log(-cexpm1(-2.0 * I * kPi * z)) - log2i;
}

cplx pi_cot_pi(cplx z) {
  if (z.imag() >= 0.0) {
    cplx q = std::exp(2.0 * I * kPi * z);
    return I * kPi * (q + 1.0) / cexpm1(2.0 * I * kPi * z);
  }
  cplx q = std::exp(-2.0 * I * kPi * z);
  return -I * kPi * (1.0 + q) / cexpm1(-2.0 * I * kPi * z);
}

// pi z / sin(pi z) near the origin.
cplx sinc_ratio_series(cplx z) {
  cplx w = kPi * z;
  cplx w2 = w * w;
  return 1.0 + w2 / 6.0 + 7.0 * w2 * w2 / 360.0;
}

cplx log_f_sin(cplx z) {
  if (std::abs(z) < 1e-4) return z * z + std::log(sinc_ratio_series(z));
  return z * z + std::log(kPi) + std::log(z) - log_sin_pi(z);
}

cplx t4_term(cplx z, double r) {
  if (std::abs(z) <= 2.0 * r) {
    cplx a = z / r;
    return (a / (z - r)) * (a / (z + r));
  }
  double inv = 1.0 / r;
  return 1.0 / (z - r) / (z + r) + inv * inv;
}

cplx t4_term_derivative(cplx z, double r) { return -2.0 * z / (z - r) / (z - r) / (z + r) / (z + r); }

struct RationalParts {
  int degree_gap;  // deg num - deg den
  cplx lead;       // leading coefficient ratio
};

RationalParts rational_parts(const FunctionModel& m) {
  const auto& n = m.numerator();
  const auto& d = m.denominator();
  return {static_cast<int>(n.size()) - static_cast<int>(d.size()), n.back() / d.back()};
}

cplx log_f_rational(const FunctionModel& m, cplx z) {
  const auto& n = m.numerator();
  const auto& d = m.denominator();
  if (std::abs(z) <= 1.0) return std::log(poly::eval(n, z)) - std::log(poly::eval(d, z));
  cplx w = 1.0 / z;
  int gap = static_cast<int>(n.size()) - static_cast<int>(d.size());
  return static_cast<double>(gap) * std::log(z) + std::log(poly::eval_reversed(n, w)) -
         std::log(poly::eval_reversed(d, w));
}

cplx rational_value(const FunctionModel& m, cplx z) {
  const auto& n = m.numerator();
  const auto& d = m.denominator();
  if (std::abs(z) <= 1.0) return poly::eval(n, z) / poly::eval(d, z);
  cplx w = 1.0 / z;
  int gap = static_cast<int>(n.size()) - static_cast<int>(d.size());
  return std::pow(z, gap) * poly::eval_reversed(n, w) / poly::eval_reversed(d, w);
}

// p'/p for a polynomial, stable for large |z|.
cplx poly_log_derivative(const std::vector<cplx>& c, cplx z) {
  if (c.size() <= 1) return 0.0;
  if (std::abs(z) <= 1.0) {
    auto [p, dp] = poly::eval_with_derivative(c, z);
    return dp / p;
  }
  std::vector<cplx> rev(c.rbegin(), c.rend());
  cplx w = 1.0 / z;
  auto [p, dp] = poly::eval_with_derivative(rev, w);
  double deg = static_cast<double>(c.size() - 1);
  return w * (deg - w * dp / p);
}

bool pole_sort_less(const PoleRecord& a, const PoleRecord& b) {
  double ma = std::abs(a.location), mb = std::abs(b.location);
  if (ma != mb) return ma < mb;
  return std::arg(a.location) < std::arg(b.location);
}

cplx parse_complex(const nlohmann::json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2) return {j[0].get<double>(), j[1].get<double>()};
  throw Error(ErrorCode::Config, "coefficient must be a number or [re, im]");
}

// Direct-path evaluation result shared by log_eval and eval_ext.
struct Core {
  std::optional<double> logmod;
  ExtLog modulus;
  double arg = 0.0;
  bool arg_reliable = true;
  double log_rel_err = 0.0;
};

double direct_threshold(Family f) {
  return f == Family::EntireOverSin ? kSinDirectLogThreshold : kDirectLogThreshold;
}

double rounding_error(const FunctionModel& m, cplx z, cplx logf) {
  double az = std::abs(z);
  switch (m.family()) {
    case Family::Exp:
      return 2.0 * kEps * az;
    case Family::EntireOverSin:
      return 8.0 * kEps * (az * az + kPi * az + std::abs(std::log(std::max(az, 1e-300))) + 4.0);
    case Family::Rational: {
      auto parts = rational_parts(m);
      double deg = static_cast<double>(m.numerator().size() + m.denominator().size());
      return 32.0 * kEps * deg * (1.0 + std::abs(parts.degree_gap * std::log(std::max(az, 1e-300))));
    }
    case Family::Theorem4: {
      double sum_abs = 0.0;
      for (double r : m.t4_radii()) sum_abs += std::abs(t4_term(z, r));
      auto sv = t4_eval(m, z);
      double mag = std::exp(logf.real());
      return (sv.tail_bound + 8.0 * kEps * sum_abs) / std::max(mag, 1e-300);
    }
  }
  return 0.0;
}

cplx family_log(const FunctionModel& m, cplx z) {
  switch (m.family()) {
    case Family::Exp:
      return z;
    case Family::EntireOverSin:
      return log_f_sin(z);
    case Family::Rational:
      return log_f_rational(m, z);
    case Family::Theorem4:
      return std::log(t4_eval(m, z).value);
  }
  return 0.0;
}

Core core_eval(const FunctionModel& m, const ExtPoint& p, std::optional<double> exact_logmod) {
  if (!p.arg_reliable)
    throw Error(ErrorCode::ArgUnreliable, "magnitude map needs a reliable argument");
  std::optional<double> lz = exact_logmod ? exact_logmod : p.log_modulus();
  Core out;

  if (lz && *lz <= direct_threshold(m.family())) {
    cplx z = std::isinf(*lz) ? cplx(0.0) : std::polar(std::exp(*lz), p.arg);
    double az = std::abs(z);
    if (distance_to_nearest_pole(m, z) <= kPoleCutoff * std::max(1.0, az))
      throw Error(ErrorCode::Pole, "evaluation at a pole");
    cplx L = family_log(m, z);
    double abs_in = p.log_rel_err * std::max(1.0, std::abs(*lz));
    double cond = (abs_in > 0.0 && az > 0.0) ? std::abs(z * log_derivative(m, z)) : 0.0;
    double abs_out = cond * abs_in + rounding_error(m, z, L);
    out.logmod = L.real();
    out.modulus = ExtLog::from_log(L.real());
    out.arg = wrap_angle(L.imag());
    out.arg_reliable = abs_out < kArgTolerance && std::isfinite(L.imag());
    if (m.family() == Family::Exp && z.imag() == 0.0) {
      out.arg = 0.0;
      out.arg_reliable = true;
    }
    out.log_rel_err = abs_out / std::max(1.0, std::abs(L.real()));
    return out;
  }

  // Dominant-term expansions past the direct threshold.
  double log_abs_z = lz ? *lz : kInf;
  double abs_in_factor = p.log_rel_err * log_abs_z;  // absolute error of log z
  switch (m.family()) {
    case Family::Exp: {
      double c = std::cos(p.arg), s = std::sin(p.arg);
      if (c <= 0.0) {
        out.logmod = lz ? std::exp(*lz) * c : -kInf;
        out.modulus = ExtLog();
      } else {
        ExtLog logf = p.modulus.scaled(c);
        out.logmod = logf.to_double();
        out.modulus = logf.exp();
      }
      out.arg_reliable = (s == 0.0);
      out.arg = 0.0;
      out.log_rel_err = (abs_in_factor + 2.0 * kEps) / std::max(std::abs(c), 1e-300);
      return out;
    }
    case Family::EntireOverSin: {
      double s = std::sin(p.arg);
      double im_size = lz ? std::exp(*lz) * std::abs(s) : (s != 0.0 ? kInf : 0.0);
      if (!(im_size > 20.0))
        throw Error(ErrorCode::NoAsymptoticModel, "EntireOverSin near the real axis at large modulus");
      double c2 = std::cos(2.0 * p.arg);
      if (c2 <= 0.0) {
        out.logmod = lz ? std::exp(2.0 * *lz) * c2 : -kInf;
        out.modulus = ExtLog();
      } else {
        ExtLog logf = p.modulus.pow(2.0).scaled(c2);
        out.logmod = logf.to_double();
        out.modulus = logf.exp();
      }
      out.arg_reliable = false;
      out.arg = 0.0;
      out.log_rel_err = (2.0 * abs_in_factor + 8.0 * kEps) / std::max(std::abs(c2), 1e-300);
      return out;
    }
    case Family::Rational: {
      auto parts = rational_parts(m);
      double k = parts.degree_gap;
      double log_lead = std::log(std::abs(parts.lead));
      if (lz) {
        out.logmod = k * *lz + log_lead;
        out.modulus = ExtLog::from_log(*out.logmod);
      } else if (k > 0) {
        out.modulus = p.modulus.pow(k).scaled(std::abs(parts.lead));
        out.logmod = out.modulus.log_value();
      } else {
        out.logmod = k < 0 ? std::optional<double>(-kInf) : log_lead;
        out.modulus = k < 0 ? ExtLog() : ExtLog::from_double(std::abs(parts.lead));
      }
      double abs_err = std::abs(k) * abs_in_factor + 64.0 * kEps * (1.0 + std::abs(k) * log_abs_z);
      out.arg = wrap_angle(k * p.arg + std::arg(parts.lead));
      out.arg_reliable = abs_err < kArgTolerance;
      double denom = out.logmod ? std::max(1.0, std::abs(*out.logmod)) : kInf;
      out.log_rel_err = std::isinf(denom) ? (std::abs(k) > 0 ? p.log_rel_err + 64.0 * kEps : 0.0)
                                          : abs_err / denom;
      return out;
    }
    case Family::Theorem4:
      throw Error(ErrorCode::NoAsymptoticModel, "Theorem4 series beyond the generated radii");
  }
  throw Error(ErrorCode::NoAsymptoticModel, "unknown family");
}

}  // namespace

FunctionModel FunctionModel::exp() {
  FunctionModel m;
  m.family_ = Family::Exp;
  return m;
}

FunctionModel FunctionModel::entire_over_sin() {
  FunctionModel m;
  m.family_ = Family::EntireOverSin;
  return m;
}

FunctionModel FunctionModel::theorem4(double r1, double factor, int count) {
  if (!(r1 > 1.0) || !(factor > 1.0) || count < 1)
    throw Error(ErrorCode::Config, "theorem4 needs r1 > 1, factor > 1, count >= 1");
  FunctionModel m;
  m.family_ = Family::Theorem4;
  m.t4_r1_ = r1;
  m.t4_factor_ = factor;
  m.t4_count_ = count;
  for (double r = r1; std::isfinite(r); r = factor * r * r) m.t4_radii_.push_back(r);
  if (static_cast<int>(m.t4_radii_.size()) < count)
    throw Error(ErrorCode::Config, "theorem4 listed radii overflow double range");
  return m;
}

FunctionModel FunctionModel::rational(std::vector<cplx> num, std::vector<cplx> den) {
  FunctionModel m;
  m.family_ = Family::Rational;
  m.num_ = poly::trimmed(std::move(num));
  m.den_ = poly::trimmed(std::move(den));
  if (m.num_.empty()) throw Error(ErrorCode::Config, "rational numerator is identically zero");
  if (m.den_.empty()) throw Error(ErrorCode::Config, "rational denominator is identically zero");
  if (m.den_.size() > 1) {
    auto den_roots = poly::cluster_roots(m.den_);
    std::vector<poly::RootCluster> num_roots;
    if (m.num_.size() > 1) num_roots = poly::cluster_roots(m.num_);
    for (const auto& dr : den_roots) {
      int mult = dr.multiplicity;
      for (const auto& nr : num_roots)
        if (std::abs(nr.location - dr.location) <= 1e-4 * std::max(1.0, std::abs(dr.location)))
          mult -= nr.multiplicity;
      if (mult > 0) m.rational_poles_.push_back({dr.location, mult});
    }
    std::sort(m.rational_poles_.begin(), m.rational_poles_.end(), pole_sort_less);
  }
  return m;
}

FunctionModel FunctionModel::from_json(const nlohmann::json& j) {
  if (!j.is_object() || !j.contains("family"))
    throw Error(ErrorCode::Config, "function model JSON needs a \"family\" field");
  std::string fam = j.at("family").get<std::string>();
  try {
    if (fam == "exp") return exp();
    if (fam == "entire_over_sin") return entire_over_sin();
    if (fam == "theorem4")
      return theorem4(j.value("r1", 8.0), j.value("factor", 17.0), j.value("count", 3));
    if (fam == "rational") {
      std::vector<cplx> num, den;
      for (const auto& c : j.at("num")) num.push_back(parse_complex(c));
      for (const auto& c : j.at("den")) den.push_back(parse_complex(c));
      return rational(std::move(num), std::move(den));
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::Config, std::string("bad function model JSON: ") + e.what());
  }
  throw Error(ErrorCode::Config, "unknown family \"" + fam + "\"");
}

nlohmann::json FunctionModel::to_json() const {
  using nlohmann::json;
  switch (family_) {
    case Family::Exp:
      return {{"family", "exp"}};
    case Family::EntireOverSin:
      return {{"family", "entire_over_sin"}};
    case Family::Theorem4:
      return {{"family", "theorem4"}, {"r1", t4_r1_}, {"factor", t4_factor_}, {"count", t4_count_}};
    case Family::Rational: {
      json num = json::array(), den = json::array();
      for (const cplx& c : num_) num.push_back({c.real(), c.imag()});
      for (const cplx& c : den_) den.push_back({c.real(), c.imag()});
      return {{"family", "rational"}, {"num", num}, {"den", den}};
    }
  }
  return {};
}

bool FunctionModel::has_poles() const {
  switch (family_) {
    case Family::Exp: return false;
    case Family::Rational: return !rational_poles_.empty();
    default: return true;
  }
}

double distance_to_nearest_pole(const FunctionModel& m, cplx z) {
  switch (m.family()) {
    case Family::Exp:
      return kInf;
    case Family::EntireOverSin: {
      double n = std::round(z.real());
      if (n != 0.0) return std::abs(z - n);
      return std::min(std::abs(z - 1.0), std::abs(z + 1.0));
    }
    case Family::Theorem4: {
      double best = kInf;
      for (double r : m.t4_radii()) best = std::min({best, std::abs(z - r), std::abs(z + r)});
      return best;
    }
    case Family::Rational: {
      double best = kInf;
      for (const auto& p : m.rational_poles()) best = std::min(best, std::abs(z - p.location));
      return best;
    }
  }
  return kInf;
}

std::optional<cplx> eval(const FunctionModel& m, cplx z) {
  if (distance_to_nearest_pole(m, z) <= kPoleCutoff * std::max(1.0, std::abs(z))) return std::nullopt;
  cplx v;
  switch (m.family()) {
    case Family::Exp:
      v = std::exp(z);
      break;
    case Family::Rational:
      v = rational_value(m, z);
      break;
    case Family::EntireOverSin: {
      if (std::abs(z) < 1e-4) {
        v = std::exp(z * z) * sinc_ratio_series(z);
      } else if (std::abs((z * z).real()) < 650.0 && kPi * std::abs(z.imag()) < 650.0) {
        v = kPi * z * std::exp(z * z) / std::sin(kPi * z);
      } else {
        cplx L = log_f_sin(z);
        if (L.real() > 709.0) throw Error(ErrorCode::Overflow, "|f(z)| beyond double range");
        v = std::exp(L);
      }
      break;
    }
    case Family::Theorem4:
      v = t4_eval(m, z).value;
      break;
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::Overflow, "|f(z)| beyond double range");
  return v;
}

LogEval log_eval(const FunctionModel& m, const LogPolar& p) {
  ExtPoint in;
  in.modulus = ExtLog::from_log(p.logmod);
  in.arg = p.arg;
  in.arg_reliable = p.arg_reliable;
  Core c = core_eval(m, in, p.logmod);
  if (!c.logmod) throw Error(ErrorCode::Overflow, "log|f| beyond double range; use eval_ext");
  LogEval out;
  out.value = LogPolar(*c.logmod, c.arg, c.arg_reliable);
  out.errbound = c.log_rel_err * std::max(1.0, std::abs(*c.logmod));
  return out;
}

ExtPoint eval_ext(const FunctionModel& m, const ExtPoint& p) {
  Core c = core_eval(m, p, std::nullopt);
  ExtPoint out;
  out.modulus = c.modulus;
  out.arg = c.arg;
  out.arg_reliable = c.arg_reliable;
  out.log_rel_err = c.log_rel_err;
  return out;
}

std::vector<PoleRecord> poles_within(const FunctionModel& m, double radius) {
  if (!(radius > 0.0)) throw Error(ErrorCode::Domain, "poles_within requires radius > 0");
  std::vector<PoleRecord> out;
  switch (m.family()) {
    case Family::Exp:
      break;
    case Family::EntireOverSin: {
      if (radius > 1e8) throw Error(ErrorCode::Domain, "EntireOverSin pole list too long");
      for (double n = 1.0; n <= radius; n += 1.0) {
        out.push_back({cplx(n, 0.0), 1});
        out.push_back({cplx(-n, 0.0), 1});
      }
      break;
    }
    case Family::Theorem4:
      for (double r : m.t4_radii()) {
        if (r > radius) break;
        out.push_back({cplx(r, 0.0), 1});
        out.push_back({cplx(-r, 0.0), 1});
      }
      break;
    case Family::Rational:
      for (const auto& p : m.rational_poles())
        if (std::abs(p.location) <= radius) out.push_back(p);
      break;
  }
  std::stable_sort(out.begin(), out.end(), pole_sort_less);
  return out;
}

int pole_count_in_annulus(const FunctionModel& m, cplx center, double inner, double outer) {
  auto inside = [&](cplx p) {
    double d = std::abs(p - center);
    return d > inner && d < outer;
  };
  int count = 0;
  switch (m.family()) {
    case Family::Exp:
      break;
    case Family::EntireOverSin: {
      double lo = std::floor(center.real() - outer), hi = std::ceil(center.real() + outer);
      if (hi - lo > 1e8) throw Error(ErrorCode::Domain, "annulus too large for pole enumeration");
      for (double n = lo; n <= hi; n += 1.0)
        if (n != 0.0 && inside(cplx(n, 0.0))) ++count;
      break;
    }
    case Family::Theorem4:
      for (double r : m.t4_radii()) count += inside(cplx(r, 0.0)) + inside(cplx(-r, 0.0));
      break;
    case Family::Rational:
      for (const auto& p : m.rational_poles())
        if (inside(p.location)) count += p.multiplicity;
      break;
  }
  return count;
}

int pole_count_in_disk(const FunctionModel& m, cplx center, double radius) {
  return pole_count_in_annulus(m, center, -1.0, radius);
}

std::optional<bool> pole_in_annulus_ext(const FunctionModel& m, const ExtLog& inner, const ExtLog& outer) {
  auto in_range = [&](double modulus) {
    ExtLog e = ExtLog::from_double(modulus);
    return inner < e && e < outer;
  };
  switch (m.family()) {
    case Family::Exp:
      return false;
    case Family::Rational:
      for (const auto& p : m.rational_poles())
        if (in_range(std::abs(p.location))) return true;
      return false;
    case Family::EntireOverSin: {
      auto lo = inner.to_double(), hi = outer.to_double();
      if (lo && hi) return std::floor(*lo) + 1.0 < *hi;
      // Any annulus with outer/inner bounded away from 1 at this scale is wider than 1.
      return inner < outer ? std::optional<bool>(true) : std::nullopt;
    }
    case Family::Theorem4: {
      for (double r : m.t4_radii())
        if (in_range(r)) return true;
      ExtLog last = ExtLog::from_double(m.t4_radii().back());
      if (outer <= last) return false;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

cplx log_derivative(const FunctionModel& m, cplx z) {
  switch (m.family()) {
    case Family::Exp:
      return 1.0;
    case Family::EntireOverSin: {
      if (std::abs(z) < 1e-3) {
        constexpr double p2 = kPi * kPi;
        cplx z2 = z * z;
        return 2.0 * z + z * (p2 / 3.0 + z2 * (p2 * p2 / 45.0 + z2 * 2.0 * p2 * p2 * p2 / 945.0));
      }
      return 2.0 * z + 1.0 / z - pi_cot_pi(z);
    }
    case Family::Rational:
      return poly_log_derivative(m.numerator(), z) - poly_log_derivative(m.denominator(), z);
    case Family::Theorem4: {
      cplx f = 0.0, df = 0.0;
      for (double r : m.t4_radii()) {
        f += t4_term(z, r);
        df += t4_term_derivative(z, r);
      }
      return df / f;
    }
  }
  return 0.0;
}

cplx derivative_eval(const FunctionModel& m, cplx z) {
  if (distance_to_nearest_pole(m, z) < 1e-9) throw Error(ErrorCode::PoleTooClose, "derivative near a pole");
  cplx v;
  switch (m.family()) {
    case Family::Exp:
      v = std::exp(z);
      break;
    case Family::Rational: {
      auto [p, dp] = poly::eval_with_derivative(m.numerator(), z);
      auto [q, dq] = poly::eval_with_derivative(m.denominator(), z);
      v = (dp * q - p * dq) / (q * q);
      break;
    }
    case Family::EntireOverSin:
      v = *eval(m, z) * log_derivative(m, z);
      break;
    case Family::Theorem4:
      v = 0.0;
      for (double r : m.t4_radii()) v += t4_term_derivative(z, r);
      break;
  }
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw Error(ErrorCode::Overflow, "|f'(z)| beyond double range");
  return v;
}

SeriesValue t4_partial_sum(const FunctionModel& m, cplx z, int terms) {
  if (m.family() != Family::Theorem4) throw Error(ErrorCode::Domain, "t4_partial_sum on a non-Theorem4 model");
  const auto& radii = m.t4_radii();
  const int total = static_cast<int>(radii.size());
  terms = std::clamp(terms, 0, total);
  SeriesValue out;
  double sum_abs = 0.0;
  for (int i = 0; i < terms; ++i) {
    cplx t = t4_term(z, radii[i]);
    out.value += t;
    sum_abs += std::abs(t);
  }
  double az = std::abs(z);
  double tail = 0.0;
  for (int i = terms; i < total; ++i) {
    double r = radii[i];
    if (!(r > az)) throw Error(ErrorCode::Domain, "omitted Theorem4 radius does not exceed |z|");
    double q = az / r;
    tail += q * q / ((r - az) * (r + az));
  }
  out.tail_bound = tail + 8.0 * kEps * sum_abs;
  return out;
}

SeriesValue t4_eval(const FunctionModel& m, cplx z) {
  return t4_partial_sum(m, z, static_cast<int>(m.t4_radii().size()));
}

}  // namespace anndyn
