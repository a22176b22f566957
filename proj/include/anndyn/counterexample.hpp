#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "anndyn/funcmodel.hpp"

namespace anndyn {

/// Radii r_1 < ... < r_count with r_{n+1} = factor r_n^2. The unlisted
/// continuation follows the same recursion and enters every sum through
/// `tail`.
struct T4Sequence {
  std::vector<double> radii;
  double r1 = 0.0, factor = 0.0;
  int count = 0;
  double tail = 0.0;        // bound on sum_{n > count} 1/r_n^2
  double sum_inv_sq = 0.0;  // sum over listed radii plus tail

  /// The meromorphic function sum z^2 / (r_n^2 (z^2 - r_n^2)) of this sequence.
  FunctionModel model() const;
  nlohmann::json to_json() const;
};

/// Throws Error(ConstraintViolation) naming the first failing constraint:
/// r_n > n, r_{n+1} > 16 r_n^2 (strict, on the generated numbers), or
/// sum 1/r_n^2 < 2/7 with the tail included.
T4Sequence sequence_generate(double r1, double factor = 17.0, int count = 3);

/// Sum over n > count of 1/r_n^2 for the continuation r_{n+1} = factor r_n^2
/// started from r_count, bounded by a geometric series.
double continuation_tail(double r_count, double factor);

struct InvariantDiskCheck {
  double bound = 0.0;        // sum 1/(r_n^2 (r_n^2 - 1)) + tail
  double sampled_max = 0.0;  // max of |f| + series tail over the sample points in |z| < 1
  int samples = 0;
  bool samples_ok = false;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// |f| on the unit disk against the series bound, plus `samples` points in
/// |z| < 1 on a golden-angle spiral.
InvariantDiskCheck invariant_disk_check(const T4Sequence& seq, int samples = 1000);

struct GapGrid {
  int radial = 16;
  int angular = 32;
};

struct GapSample {
  cplx z;
  double abs_f = 0.0;  // |partial sum| + tail bound
};

struct AnnulusGapCheck {
  int N = 0;
  double inner = 0.0, outer = 0.0;  // 2 r_N, 4 r_N^2
  GapGrid grid;
  double sup_sampled = 0.0;
  /// Three-part estimate with the sequence's own numbers:
  /// sum 1/r_n^2 + N/(3 r_N^2) + (4/3) sum_{n > N} 1/r_n^2.
  double proof_bound = 0.0;
  double first_part = 0.0, second_part = 0.0, third_part = 0.0;
  std::vector<GapSample> samples;
  bool pass = false;

  nlohmann::json to_json() const;
  std::string to_csv() const;  // re,im,abs_f
};

/// The same estimate with the generic constants 2/7 + 1/3 + (2/7)(4/3).
double generic_proof_bound();

AnnulusGapCheck annulus_gap_check(const T4Sequence& seq, int N, const GapGrid& grid = {});

struct EscapeOrbit {
  cplx z;
  double first_modulus = 0.0;  // |f(z)|
  double tail_max = 0.0;       // max |f^k(z)| over k = 2 .. n_iter + 1
  bool first_in_disk = false;
  bool tail_in_disk = false;
};

struct EscapeDisjointReport {
  int N = 0;
  int n_iter = 0;
  InvariantDiskCheck disk;
  AnnulusGapCheck gap;
  std::vector<EscapeOrbit> orbits;
  /// A(r_N, r_N^2) from the statement is not contained in the annulus
  /// A(2 r_N, 4 r_N^2) the estimate controls.
  bool statement_annulus_contained = false;
  bool pass = false;

  nlohmann::json to_json() const;
};

/// Orbits of `samples` points of A(2 r_N, 4 r_N^2) (log-radial, golden-angle)
/// for n_iter iterations past the first step.
EscapeDisjointReport escape_disjoint_report(const T4Sequence& seq, int N, int n_iter, int samples);
/// Same, for explicit starting points.
EscapeDisjointReport escape_disjoint_report(const T4Sequence& seq, int N, int n_iter, const std::vector<cplx>& points);

}  // namespace anndyn
