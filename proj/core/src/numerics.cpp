#include "nonmarkov/numerics.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <queue>
#include <string>
#include <vector>

#include "nonmarkov/errors.hpp"

namespace nonmarkov::numerics {

namespace {

// 21-point Kronrod abscissae on [-1, 1] (positive half, descending) with the
// embedded 10-point Gauss rule on the odd entries.
constexpr std::array<double, 11> kKronrodNodes = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kKronrodWeights = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077208932299524, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kGaussWeights = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

struct Panel {
  double lo;
  double hi;
  Complex value;
  double error;
};

struct ByError {
  bool operator()(const Panel& a, const Panel& b) const {
    if (a.error != b.error) return a.error < b.error;
    return a.lo > b.lo;
  }
};

Panel kronrod21(const ComplexIntegrand& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const Complex fc = f(center);
  Complex kronrod = fc * kKronrodWeights[10];
  Complex gauss{0.0, 0.0};
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kKronrodNodes[j];
    const Complex fsum = f(center - dx) + f(center + dx);
    kronrod += kKronrodWeights[j] * fsum;
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * fsum;
  }
  kronrod *= half;
  gauss *= half;
  return Panel{lo, hi, kronrod, std::abs(kronrod - gauss)};
}

double tolerance_for(const Complex& value, const Quadrature& q) {
  return std::max(q.absolute_tolerance, q.relative_tolerance * std::abs(value));
}

}  // namespace

void Quadrature::validate() const {
  if (!(relative_tolerance > 0.0) || !(absolute_tolerance > 0.0)) {
    throw ConfigError("quadrature tolerances must be strictly positive");
  }
  if (max_subdivisions < 1) {
    throw ConfigError("quadrature max_subdivisions must be at least 1");
  }
}

IntegralResult integrate_finite(const ComplexIntegrand& f, double lo, double hi,
                                const Quadrature& q) {
  const std::array<double, 2> limits{lo, hi};
  return integrate_finite(f, limits, q);
}

IntegralResult integrate_finite(const ComplexIntegrand& f,
                                std::span<const double> breakpoints,
                                const Quadrature& q) {
  q.validate();
  if (breakpoints.size() < 2) {
    throw DomainError("integrate_finite needs at least two limits");
  }
  if (!(breakpoints.front() < breakpoints.back())) {
    throw DomainError("integrate_finite requires lo < hi");
  }

  std::priority_queue<Panel, std::vector<Panel>, ByError> queue;
  Complex total{0.0, 0.0};
  double total_error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (!(breakpoints[i] < breakpoints[i + 1])) continue;
    Panel p = kronrod21(f, breakpoints[i], breakpoints[i + 1]);
    total += p.value;
    total_error += p.error;
    queue.push(p);
  }

  std::vector<Panel> settled;
  std::size_t splits = 0;
  while (!queue.empty() && total_error > tolerance_for(total, q) &&
         splits < q.max_subdivisions) {
    Panel worst = queue.top();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (!(mid > worst.lo && mid < worst.hi) ||
        (worst.hi - worst.lo) <= 1e-14 * std::max(1.0, std::abs(mid))) {
      // Cannot be resolved further in double precision.
      queue.pop();
      settled.push_back(worst);
      continue;
    }
    queue.pop();
    const Panel left = kronrod21(f, worst.lo, mid);
    const Panel right = kronrod21(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++splits;
  }

  while (!queue.empty()) {
    settled.push_back(queue.top());
    queue.pop();
  }
  std::sort(settled.begin(), settled.end(),
            [](const Panel& a, const Panel& b) { return a.lo < b.lo; });

  IntegralResult result;
  for (const Panel& p : settled) {
    result.value += p.value;
    result.error_estimate += p.error;
  }
  result.converged = result.error_estimate <= tolerance_for(result.value, q);
  return result;
}

double truncation_point(const ComplexIntegrand& f, double lo, double decay_scale,
                        const Quadrature& q) {
  if (!(decay_scale > 0.0)) {
    throw DomainError("decay_scale must be positive");
  }
  const double bound = q.absolute_tolerance / 10.0;
  double span = 40.0 * decay_scale;
  while (std::abs(f(lo + span)) * decay_scale >= bound && span < 1e4 * decay_scale) {
    span *= 2.0;
  }
  return lo + span;
}

IntegralResult integrate_semiinfinite(const ComplexIntegrand& f, double lo,
                                      double decay_scale, const Quadrature& q,
                                      std::span<const double> interior_breakpoints) {
  const double hi = truncation_point(f, lo, decay_scale, q);
  std::vector<double> points;
  points.reserve(interior_breakpoints.size() + 2);
  points.push_back(lo);
  for (double x : interior_breakpoints) {
    if (x > lo && x < hi) points.push_back(x);
  }
  points.push_back(hi);
  std::sort(points.begin(), points.end());
  return integrate_finite(f, points, q);
}

double principal_value_integral(const RealFunction& f, double pole, double lo, double hi,
                                const Quadrature& q) {
  if (!(lo < hi)) throw DomainError("principal_value_integral requires lo < hi");
  if (pole == lo || pole == hi) {
    throw DomainError("principal value pole coincides with an integration limit");
  }
  if (pole < lo || pole > hi) {
    const auto plain = integrate_finite(
        [&](double x) { return Complex{f(x) / (x - pole), 0.0}; }, lo, hi, q);
    return plain.value.real();
  }
  const double f_pole = f(pole);
  const auto subtracted = [&](double x) {
    if (x == pole) return Complex{0.0, 0.0};
    return Complex{(f(x) - f_pole) / (x - pole), 0.0};
  };
  const std::array<double, 3> points{lo, pole, hi};
  const auto regular = integrate_finite(subtracted, points, q);
  return regular.value.real() + f_pole * std::log((hi - pole) / (pole - lo));
}

double principal_value_semiinfinite(const RealFunction& f, double pole, double lo,
                                    double decay_scale, const Quadrature& q) {
  if (pole == lo) {
    throw DomainError("principal value pole coincides with the lower limit");
  }
  const auto ratio = [&](double x) { return Complex{f(x) / (x - pole), 0.0}; };
  if (pole < lo) {
    return integrate_semiinfinite(ratio, lo, decay_scale, q).value.real();
  }
  const double window = 2.0 * pole - lo;
  const double inner = principal_value_integral(f, pole, lo, window, q);
  const double tail = integrate_semiinfinite(ratio, window, decay_scale, q).value.real();
  return inner + tail;
}

double find_bracketed_root(const RealFunction& f, double lo, double hi, double tol) {
  double a = lo;
  double b = hi;
  double fa = f(a);
  double fb = f(b);
  if (fa == 0.0) return a;
  if (fb == 0.0) return b;
  if ((fa > 0.0) == (fb > 0.0)) {
    throw DomainError("find_bracketed_root: no sign change on [" + std::to_string(lo) +
                      ", " + std::to_string(hi) + "]");
  }

  constexpr double kEps = std::numeric_limits<double>::epsilon();
  double c = b;
  double fc = fb;
  double d = b - a;
  double e = d;
  for (int iter = 0; iter < 200; ++iter) {
    if ((fb > 0.0) == (fc > 0.0)) {
      c = a;
      fc = fa;
      d = b - a;
      e = d;
    }
    if (std::abs(fc) < std::abs(fb)) {
      a = b;
      b = c;
      c = a;
      fa = fb;
      fb = fc;
      fc = fa;
    }
    const double tol1 = 2.0 * kEps * std::abs(b) + 0.5 * tol;
    const double xm = 0.5 * (c - b);
    if (std::abs(xm) <= tol1 || fb == 0.0) return b;

    if (std::abs(e) >= tol1 && std::abs(fa) > std::abs(fb)) {
      const double s = fb / fa;
      double p;
      double qq;
      if (a == c) {
        p = 2.0 * xm * s;
        qq = 1.0 - s;
      } else {
        const double qa = fa / fc;
        const double r = fb / fc;
        p = s * (2.0 * xm * qa * (qa - r) - (b - a) * (r - 1.0));
        qq = (qa - 1.0) * (r - 1.0) * (s - 1.0);
      }
      if (p > 0.0) qq = -qq;
      p = std::abs(p);
      const double min1 = 3.0 * xm * qq - std::abs(tol1 * qq);
      const double min2 = std::abs(e * qq);
      if (2.0 * p < std::min(min1, min2)) {
        e = d;
        d = p / qq;
      } else {
        d = xm;
        e = d;
      }
    } else {
      d = xm;
      e = d;
    }
    a = b;
    fa = fb;
    b += (std::abs(d) > tol1) ? d : (xm > 0.0 ? tol1 : -tol1);
    fb = f(b);
  }
  throw ConvergenceError("find_bracketed_root: iteration limit reached");
}

double exponential_integral_e1(double x) {
  if (!(x > 0.0)) throw DomainError("E1(x) requires x > 0");
  constexpr double kEps = 1e-17;
  if (x <= 2.0) {
    // -gamma - ln x - sum_{k>=1} (-x)^k / (k k!)
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 200; ++k) {
      term *= -x / k;
      const double contrib = term / k;
      sum += contrib;
      if (std::abs(contrib) < kEps * std::abs(sum)) break;
    }
    return -kEulerGamma - std::log(x) - sum;
  }
  // Continued fraction, modified Lentz.
  constexpr double kTiny = 1e-300;
  double b = x + 1.0;
  double c = 1.0 / kTiny;
  double d = 1.0 / b;
  double h = d;
  for (int i = 1; i < 500; ++i) {
    const double an = -static_cast<double>(i) * i;
    b += 2.0;
    d = 1.0 / (an * d + b);
    c = b + an / c;
    const double delta = c * d;
    h *= delta;
    if (std::abs(delta - 1.0) < kEps) break;
  }
  return h * std::exp(-x);
}

double exponential_integral(double x) {
  if (x == 0.0) throw DomainError("Ei(x) has a logarithmic singularity at x = 0");
  if (x < 0.0) return -exponential_integral_e1(-x);
  if (x <= 40.0) {
    double term = 1.0;
    double sum = 0.0;
    for (int k = 1; k < 500; ++k) {
      term *= x / k;
      const double contrib = term / k;
      sum += contrib;
      if (contrib < 1e-17 * sum) break;
    }
    return kEulerGamma + std::log(x) + sum;
  }
  // Asymptotic e^x / x * sum k!/x^k, truncated at the smallest term.
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 100; ++k) {
    const double next = term * k / x;
    if (next > term || next < 1e-17 * sum) break;
    term = next;
    sum += term;
  }
  return std::exp(x) / x * sum;
}

Complex trigamma(Complex z) {
  if (!(z.real() > 0.0)) throw DomainError("trigamma requires Re z > 0");
  Complex shift{0.0, 0.0};
  while (std::abs(z) < 20.0) {
    shift += 1.0 / (z * z);
    z += 1.0;
  }
  // Bernoulli numbers B2..B14.
  constexpr std::array<double, 7> kBernoulli = {1.0 / 6.0,  -1.0 / 30.0,    1.0 / 42.0,
                                                -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0,
                                                7.0 / 6.0};
  const Complex inv = 1.0 / z;
  const Complex inv2 = inv * inv;
  Complex series{0.0, 0.0};
  Complex power = inv2 * inv;
  for (double bk : kBernoulli) {
    series += bk * power;
    power *= inv2;
  }
  return shift + inv + 0.5 * inv2 + series;
}

}  // namespace nonmarkov::numerics
