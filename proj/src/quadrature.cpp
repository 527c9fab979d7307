// Apache License, Version 2.0, refer to LICENSE.txt

#include "opaque/quadrature.hpp"

#include <cmath>
#include <stdexcept>
#include <vector>

namespace opaque {

namespace {

double eval_checked(const std::function<double(double)>& f, double x) {
  const double y = f(x);
  if (!std::isfinite(y))
    throw std::domain_error("integrate: non-finite function value");
  return y;
}

struct Adaptive {
  const std::function<double(double)>& f;
  bool converged = true;

  double simpson(double a, double fa, double fm, double b, double fb) const {
    return (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  }

  double run(double a, double fa, double m, double fm, double b, double fb,
             double whole, double tol, int depth) {
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = eval_checked(f, lm);
    const double frm = eval_checked(f, rm);
    const double left = simpson(a, fa, flm, m, fm);
    const double right = simpson(m, fm, frm, b, fb);
    const double delta = left + right - whole;
    if (std::fabs(delta) <= 15.0 * tol) return left + right + delta / 15.0;
    if (depth <= 0) {
      converged = false;
      return left + right + delta / 15.0;
    }
    return run(a, fa, lm, flm, m, fm, left, 0.5 * tol, depth - 1) +
           run(m, fm, rm, frm, b, fb, right, 0.5 * tol, depth - 1);
  }
};

}  // namespace

IntegrationResult integrate_adaptive(const std::function<double(double)>& f, double lo,
                                     double hi, QuadratureRule rule) {
  if (!(lo < hi)) throw std::invalid_argument("integrate: requires lo < hi");
  // A fixed composite split first: a narrow feature inside a wide interval is
  // invisible to the three seed points of plain adaptive Simpson.
  constexpr int kPanels = 16;
  Adaptive state{f};
  const double h = (hi - lo) / kPanels;
  double value = 0.0;
  for (int k = 0; k < kPanels; ++k) {
    const double a = lo + k * h;
    const double b = k + 1 == kPanels ? hi : a + h;
    const double m = 0.5 * (a + b);
    const double fa = eval_checked(f, a);
    const double fm = eval_checked(f, m);
    const double fb = eval_checked(f, b);
    const double whole = state.simpson(a, fa, fm, b, fb);
    value += state.run(a, fa, m, fm, b, fb, whole, rule.abs_tol / kPanels,
                       rule.max_depth);
  }
  return {value, state.converged};
}

double integrate(const std::function<double(double)>& f, double lo, double hi,
                 QuadratureRule rule) {
  return integrate_adaptive(f, lo, hi, rule).value;
}

double integrate2d(const std::function<double(double, double)>& f, double xlo,
                   double xhi, double ylo, double yhi, int n) {
  if (!(xlo < xhi && ylo < yhi)) throw std::invalid_argument("integrate2d: bad bounds");
  if (n < 2) n = 2;
  if (n % 2 == 1) ++n;  // Simpson needs an even interval count
  const double hx = (xhi - xlo) / n;
  const double hy = (yhi - ylo) / n;
  auto weight = [n](int i) { return i == 0 || i == n ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0); };
  double total = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double x = xlo + i * hx;
    double row = 0.0;
    for (int j = 0; j <= n; ++j) {
      const double v = f(x, ylo + j * hy);
      if (!std::isfinite(v))
        throw std::domain_error("integrate2d: non-finite function value");
      row += weight(j) * v;
    }
    total += weight(i) * row;
  }
  return total * hx * hy / 9.0;
}

}  // namespace opaque
