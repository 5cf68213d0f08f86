#pragma once

// Independent reference implementations used only by the tests. None of
// these call into the library's special functions or integrators.

#include <cmath>
#include <complex>
#include <functional>

namespace test_oracles {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEulerGamma = 0.57721566490153286061;

// Ei(x) = gamma + ln x + sum x^k / (k k!), x > 0 (fine for x up to ~30).
inline double ei_series(double x) {
  long double term = 1.0L, sum = 0.0L;
  for (int k = 1; k < 500; ++k) {
    term *= static_cast<long double>(x) / k;
    const long double add = term / k;
    sum += add;
    if (std::fabs(add) < 1e-21L * std::fabs(sum)) break;
  }
  return static_cast<double>(kEulerGamma + std::log(x) + sum);
}

// E1(x) from the continued fraction e^{-x} / (x + 1 / (1 + 1 / (x + 2 / (1 + ...)))),
// evaluated bottom-up with a fixed depth.
inline double e1_continued_fraction(double x, int depth = 4000) {
  double tail = 0.0;
  for (int k = depth; k >= 1; --k) {
    tail = k / (1.0 + k / (x + tail));
  }
  return std::exp(-x) / (x + tail);
}

// Composite Simpson rule with n (even) panels.
template <typename F>
auto simpson(F&& f, double a, double b, int n) {
  const double h = (b - a) / n;
  auto sum = f(a) + f(b);
  for (int i = 1; i < n; ++i) sum += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return sum * (h / 3.0);
}

// Ohmic self-energy shift written out with the test-side Ei: for w < 0 uses
// -E1, for w > 0 the series.
inline double lamb_shift(double w, double eta, double omega_c) {
  const double x = w / omega_c;
  const double ei = x > 0 ? ei_series(x) : -e1_continued_fraction(-x);
  return eta * (w * std::exp(-x) * ei - omega_c);
}

// First sign change of f on a uniform scan of [lo, hi], refined by bisection.
inline double scan_root(const std::function<double(double)>& f, double lo, double hi, int n) {
  double a = lo, fa = f(lo);
  for (int i = 1; i <= n; ++i) {
    const double b = lo + (hi - lo) * i / n;
    const double fb = f(b);
    if ((fa < 0) != (fb < 0)) {
      double l = a, r = b, fl = fa;
      for (int it = 0; it < 200; ++it) {
        const double m = 0.5 * (l + r);
        const double fm = f(m);
        if ((fm < 0) == (fl < 0)) {
          l = m;
          fl = fm;
        } else {
          r = m;
        }
      }
      return 0.5 * (l + r);
    }
    a = b;
    fa = fb;
  }
  return std::nan("");
}

}  // namespace test_oracles
