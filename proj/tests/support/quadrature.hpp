#pragma once

#include <cmath>
#include <functional>

namespace rfssm::testing {

// Adaptive Simpson quadrature; independent of any library integration code.
inline double adaptive_simpson_impl(const std::function<double(double)>& f,
                                    double a, double b, double fa, double fm,
                                    double fb, double whole, double tol,
                                    int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * tol)
    return left + right + delta / 15.0;
  return adaptive_simpson_impl(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         adaptive_simpson_impl(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

inline double integrate(const std::function<double(double)>& f, double a,
                        double b, double tol = 1e-10, int max_depth = 48) {
  const double m = 0.5 * (a + b);
  const double fa = f(a);
  const double fm = f(m);
  const double fb = f(b);
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return adaptive_simpson_impl(f, a, b, fa, fm, fb, whole, tol, max_depth);
}

}  // namespace rfssm::testing
