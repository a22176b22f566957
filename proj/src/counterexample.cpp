#include "anndyn/counterexample.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "anndyn/error.hpp"
#include "anndyn/parallel.hpp"
#include "anndyn/report.hpp"

namespace anndyn {

namespace {

constexpr double kPi = std::numbers::pi;
const double kGoldenAngle = kPi * (3.0 - std::sqrt(5.0));

double inv_sq(double r) { return 1.0 / (r * r); }

// |partial sum| + tail bound, an upper bound for |f(z)|.
double abs_f_upper(const FunctionModel& f, cplx z) {
  auto sv = t4_eval(f, z);
  return std::abs(sv.value) + sv.tail_bound;
}

}  // namespace

double continuation_tail(double r_count, double factor) {
  double next = factor * r_count * r_count;
  if (!std::isfinite(next)) return 0.0;
  // 1/r_{n+1}^2 = (1/r_n^2) / (factor^2 r_n^2), a ratio that only shrinks.
  double q = 1.0 / (factor * factor * next * next);
  return inv_sq(next) / (1.0 - q);
}

FunctionModel T4Sequence::model() const { return FunctionModel::theorem4(r1, factor, count); }

nlohmann::json T4Sequence::to_json() const {
  nlohmann::json r = nlohmann::json::array();
  for (double x : radii) r.push_back(x);
  return {{"r1", r1},       {"factor", factor},          {"count", count}, {"radii", r},
          {"tail", tail},   {"sum_inv_sq", sum_inv_sq}, {"sum_limit", 2.0 / 7.0}};
}

T4Sequence sequence_generate(double r1, double factor, int count) {
  if (count < 1) throw Error(ErrorCode::Config, "count must be at least 1");
  if (!std::isfinite(r1) || !std::isfinite(factor)) throw Error(ErrorCode::Config, "r1 and factor must be finite");
  T4Sequence s;
  s.r1 = r1;
  s.factor = factor;
  s.count = count;
  double r = r1;
  for (int n = 1; n <= count; ++n) {
    if (!std::isfinite(r)) throw Error(ErrorCode::Config, "radius r_" + std::to_string(n) + " overflows");
    s.radii.push_back(r);
    r = factor * r * r;
  }
  for (int n = 1; n <= count; ++n)
    if (!(s.radii[n - 1] > n))
      throw Error(ErrorCode::ConstraintViolation, "r_n > n fails at n = " + std::to_string(n) + " (r_n = " +
                                                      format_double(s.radii[n - 1]) + ")");
  // the continuation keeps r_n > n once it holds for the last listed radius
  for (int n = 1; n <= count; ++n) {
    double rn = s.radii[n - 1];
    double next = n < count ? s.radii[n] : factor * rn * rn;
    if (!(next > 16.0 * rn * rn))
      throw Error(ErrorCode::ConstraintViolation, "r_{n+1} > 16 r_n^2 fails at n = " + std::to_string(n) + " (" +
                                                      format_double(next) + " vs " + format_double(16.0 * rn * rn) + ")");
  }
  s.tail = continuation_tail(s.radii.back(), factor);
  double sum = 0.0;
  for (double x : s.radii) sum += inv_sq(x);
  s.sum_inv_sq = sum + s.tail;
  if (!(s.sum_inv_sq < 2.0 / 7.0))
    throw Error(ErrorCode::ConstraintViolation,
                "sum 1/r_n^2 < 2/7 fails (sum = " + format_double(s.sum_inv_sq) + ")");
  return s;
}

nlohmann::json InvariantDiskCheck::to_json() const {
  return {{"bound", bound}, {"sampled_max", sampled_max}, {"samples", samples},
          {"samples_ok", samples_ok}, {"pass", pass}};
}

InvariantDiskCheck invariant_disk_check(const T4Sequence& seq, int samples) {
  InvariantDiskCheck out;
  for (double r : seq.radii) out.bound += inv_sq(r) / (r * r - 1.0);
  if (seq.tail > 0.0) {
    double next = seq.factor * seq.radii.back() * seq.radii.back();
    out.bound += seq.tail / (next * next - 1.0);
  }
  auto f = seq.model();
  out.samples = std::max(samples, 0);
  std::vector<double> v(out.samples);
  parallel_for(out.samples, [&](std::size_t i) {
    double rho = std::sqrt((i + 0.5) / out.samples);
    v[i] = abs_f_upper(f, std::polar(rho, kGoldenAngle * static_cast<double>(i)));
  });
  out.sampled_max = v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
  out.samples_ok = out.sampled_max <= out.bound;
  out.pass = out.bound < 1.0 && out.samples_ok;
  return out;
}

double generic_proof_bound() { return 2.0 / 7.0 + 1.0 / 3.0 + 2.0 / 7.0 * 4.0 / 3.0; }

AnnulusGapCheck annulus_gap_check(const T4Sequence& seq, int N, const GapGrid& grid) {
  if (N < 1 || N > seq.count) throw Error(ErrorCode::Domain, "N must lie in 1 .. count");
  if (grid.radial < 2 || grid.angular < 1) throw Error(ErrorCode::Config, "gap grid needs radial >= 2, angular >= 1");
  AnnulusGapCheck out;
  out.N = N;
  out.grid = grid;
  const double rN = seq.radii[N - 1];
  out.inner = 2.0 * rN;
  out.outer = 4.0 * rN * rN;

  double beyond = seq.tail;
  for (int n = N + 1; n <= seq.count; ++n) beyond += inv_sq(seq.radii[n - 1]);
  out.first_part = seq.sum_inv_sq;
  out.second_part = N / (3.0 * rN * rN);
  out.third_part = 4.0 / 3.0 * beyond;
  out.proof_bound = out.first_part + out.second_part + out.third_part;

  auto f = seq.model();
  const double lin = std::log(out.inner), lout = std::log(out.outer);
  out.samples.resize(static_cast<std::size_t>(grid.radial) * grid.angular);
  parallel_for(out.samples.size(), [&](std::size_t k) {
    int i = static_cast<int>(k) / grid.angular, j = static_cast<int>(k) % grid.angular;
    double rad = std::exp(lin + (lout - lin) * i / (grid.radial - 1));
    if (i == 0) rad = out.inner;
    if (i == grid.radial - 1) rad = out.outer;
    cplx z = std::polar(rad, 2.0 * kPi * j / grid.angular);
    out.samples[k] = {z, abs_f_upper(f, z)};
  });
  for (const auto& s : out.samples) out.sup_sampled = std::max(out.sup_sampled, s.abs_f);
  out.pass = out.sup_sampled < 1.0 && out.proof_bound <= 1.0;
  return out;
}

nlohmann::json AnnulusGapCheck::to_json() const {
  return {{"N", N},
          {"annulus", {{"inner", inner}, {"outer", outer}}},
          {"grid", {{"radial", grid.radial}, {"angular", grid.angular}}},
          {"sup_sampled", sup_sampled},
          {"proof_bound", proof_bound},
          {"proof_parts", {{"sum_inv_sq", first_part}, {"inner_terms", second_part}, {"outer_terms", third_part}}},
          {"generic_bound", generic_proof_bound()},
          {"pass", pass}};
}

std::string AnnulusGapCheck::to_csv() const {
  std::ostringstream os;
  os << "re,im,abs_f\n";
  for (const auto& s : samples)
    os << format_double(s.z.real()) << ',' << format_double(s.z.imag()) << ',' << format_double(s.abs_f) << '\n';
  return os.str();
}

EscapeDisjointReport escape_disjoint_report(const T4Sequence& seq, int N, int n_iter, const std::vector<cplx>& points) {
  if (n_iter < 0) throw Error(ErrorCode::Config, "n_iter must be nonnegative");
  EscapeDisjointReport out;
  out.N = N;
  out.n_iter = n_iter;
  out.disk = invariant_disk_check(seq);
  out.gap = annulus_gap_check(seq, N);
  const double rN = seq.radii[N - 1];
  out.statement_annulus_contained = rN >= out.gap.inner && rN * rN <= out.gap.outer;

  auto f = seq.model();
  out.orbits.resize(points.size());
  parallel_for(points.size(), [&](std::size_t i) {
    EscapeOrbit& o = out.orbits[i];
    o.z = points[i];
    auto step = [&](cplx z) {
      auto v = eval(f, z);
      if (!v) throw Error(ErrorCode::PoleHit, "orbit lands on a pole");
      return *v;
    };
    cplx w = step(o.z);
    o.first_modulus = std::abs(w);
    o.first_in_disk = o.first_modulus < 1.0;
    o.tail_in_disk = true;
    for (int k = 0; k < n_iter && o.first_in_disk; ++k) {
      w = step(w);
      o.tail_max = std::max(o.tail_max, std::abs(w));
      if (!(std::abs(w) < 1.0)) {
        o.tail_in_disk = false;
        break;
      }
    }
    if (!o.first_in_disk) o.tail_in_disk = false;
  });
  out.pass = out.disk.pass && out.gap.pass &&
             std::all_of(out.orbits.begin(), out.orbits.end(), [](const EscapeOrbit& o) { return o.first_in_disk && o.tail_in_disk; });
  return out;
}

EscapeDisjointReport escape_disjoint_report(const T4Sequence& seq, int N, int n_iter, int samples) {
  if (N < 1 || N > seq.count) throw Error(ErrorCode::Domain, "N must lie in 1 .. count");
  if (samples < 0) throw Error(ErrorCode::Config, "samples must be nonnegative");
  const double rN = seq.radii[N - 1];
  const double lin = std::log(2.0 * rN), lout = std::log(4.0 * rN * rN);
  std::vector<cplx> pts(samples);
  for (int i = 0; i < samples; ++i)
    pts[i] = std::polar(std::exp(lin + (lout - lin) * (i + 0.5) / samples), kGoldenAngle * i);
  return escape_disjoint_report(seq, N, n_iter, pts);
}

nlohmann::json EscapeDisjointReport::to_json() const {
  nlohmann::json orb = nlohmann::json::array();
  double first_max = 0.0, tail_max_all = 0.0;
  for (const auto& o : orbits) {
    first_max = std::max(first_max, o.first_modulus);
    tail_max_all = std::max(tail_max_all, o.tail_max);
    orb.push_back({{"z", json_complex(o.z)},
                   {"first_modulus", o.first_modulus},
                   {"tail_max", o.tail_max},
                   {"first_in_disk", o.first_in_disk},
                   {"tail_in_disk", o.tail_in_disk}});
  }
  return {{"N", N},
          {"n_iter", n_iter},
          {"invariant_disk", disk.to_json()},
          {"annulus_gap", gap.to_json()},
          {"samples", orbits.size()},
          {"max_first_modulus", first_max},
          {"max_tail_modulus", tail_max_all},
          {"orbits", orb},
          {"statement_annulus", {{"inner", gap.inner / 2.0}, {"outer", gap.outer / 4.0}}},
          {"statement_annulus_contained", statement_annulus_contained},
          {"pass", pass}};
}

}  // namespace anndyn
