#include "anndyn/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "anndyn/error.hpp"

namespace anndyn {

namespace {

struct Panel {
  double a, b, fa, fm, fb, whole, tol;
  int depth;
};

double simpson(double a, double b, double fa, double fm, double fb) { return (b - a) / 6.0 * (fa + 4.0 * fm + fb); }

}  // namespace

QuadResult adaptive_simpson(const std::function<double(double)>& f, double a, double b, const QuadOptions& opt) {
  const int n = std::max(1, opt.initial_panels);
  const double h = (b - a) / n;
  QuadResult out;

  std::vector<double> edge(n + 1), mid(n);
  for (int i = 0; i <= n; ++i) edge[i] = f(a + h * i);
  for (int i = 0; i < n; ++i) mid[i] = f(a + h * (i + 0.5));
  out.nodes = 2 * n + 1;

  double coarse = 0.0;
  for (int i = 0; i < n; ++i) coarse += simpson(a + h * i, a + h * (i + 1), edge[i], mid[i], edge[i + 1]);
  const double tol = opt.rel_tol * std::max(1.0, std::abs(coarse));

  std::vector<Panel> stack;
  for (int i = n - 1; i >= 0; --i) {
    double pa = a + h * i, pb = a + h * (i + 1);
    stack.push_back({pa, pb, edge[i], mid[i], edge[i + 1], simpson(pa, pb, edge[i], mid[i], edge[i + 1]), tol / n, 0});
  }

  // Kahan-compensated accumulation keeps the sum stable over many panels.
  double sum = 0.0, comp = 0.0, err = 0.0;
  auto add = [&](double v) {
    double y = v - comp;
    double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  };

  while (!stack.empty()) {
    Panel p = stack.back();
    stack.pop_back();
    double m = 0.5 * (p.a + p.b);
    double lm = f(0.5 * (p.a + m)), rm = f(0.5 * (m + p.b));
    out.nodes += 2;
    if (out.nodes > opt.max_nodes)
      throw Error(ErrorCode::QuadratureNonconvergent, "adaptive quadrature exceeded its node budget");
    double left = simpson(p.a, m, p.fa, lm, p.fm), right = simpson(m, p.b, p.fm, rm, p.fb);
    double diff = left + right - p.whole;
    bool tiny = (p.b - p.a) <= 1e-14 * std::max(1.0, std::abs(b - a));
    if (std::abs(diff) <= 15.0 * p.tol || tiny || !std::isfinite(diff)) {
      add(left + right + diff / 15.0);
      err += std::abs(diff) / 15.0;
      continue;
    }
    stack.push_back({m, p.b, p.fm, rm, p.fb, right, 0.5 * p.tol, p.depth + 1});
    stack.push_back({p.a, m, p.fa, lm, p.fm, left, 0.5 * p.tol, p.depth + 1});
  }
  out.value = sum;
  out.error_estimate = err;
  return out;
}

}  // namespace anndyn
