#include "narrowflux/specfun.hpp"

#include <algorithm>
#include <limits>
#include <numbers>
#include <queue>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;

// Power series, fine for |x| <= 8 (loses at most ~3 digits to cancellation).
BesselPair bessel_series(double x) {
  const double q = -0.25 * x * x;
  double t0 = 1.0;
  double t1 = 0.5 * x;
  double s0 = t0;
  double s1 = t1;
  for (int k = 1; k < 60; ++k) {
    t0 *= q / (double(k) * k);
    t1 *= q / (double(k) * (k + 1));
    s0 += t0;
    s1 += t1;
    if (std::abs(t0) < 1e-17 * std::abs(s0) && std::abs(t1) < 1e-17 * std::abs(s1) + 1e-300) break;
  }
  return {s0, s1};
}

// Miller's backward recurrence normalised by J0 + 2 sum J_2k = 1.
BesselPair bessel_miller(double x) {
  int n = static_cast<int>(x) + 40;
  if (n % 2) ++n;
  double jp1 = 0.0;
  double j = 1e-300;
  double norm = 0.0;
  double j0 = 0.0;
  double j1 = 0.0;
  for (int k = n; k >= 1; --k) {
    const double jm1 = 2.0 * k / x * j - jp1;
    jp1 = j;
    j = jm1;
    // j now holds J_{k-1}.
    if ((k - 1) % 2 == 0 && k - 1 > 0) norm += 2.0 * j;
    if (std::abs(j) > 1e250) {
      j *= 1e-250;
      jp1 *= 1e-250;
      norm *= 1e-250;
    }
    if (k == 1) {
      j0 = j;
      j1 = jp1;
    }
  }
  norm += j0;
  return {j0 / norm, j1 / norm};
}

// Hankel asymptotic expansion, used for x > 25 where it is good to ~1e-16.
BesselPair bessel_hankel(double x) {
  const double inv8x = 1.0 / (8.0 * x);
  auto pq = [&](double mu, double& P, double& Q) {
    P = 1.0;
    Q = 0.0;
    double term = 1.0;
    for (int k = 1; k < 40; ++k) {
      const double odd = 2.0 * k - 1.0;
      term *= (mu - odd * odd) * inv8x / k;
      if (k % 2 == 1) {
        Q += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
      } else {
        P += ((k / 2) % 2 == 0 ? 1.0 : -1.0) * term;
      }
      if (std::abs(term) < 1e-17) break;
    }
  };
  double P0, Q0, P1, Q1;
  pq(0.0, P0, Q0);
  pq(4.0, P1, Q1);
  const double s = std::sin(x);
  const double c = std::cos(x);
  // cos(x - pi/4), sin(x - pi/4), cos(x - 3pi/4), sin(x - 3pi/4) times sqrt(2).
  const double c0 = c + s;
  const double s0 = s - c;
  const double c1 = s - c;
  const double s1 = -(s + c);
  const double amp = std::sqrt(1.0 / (kPi * x));  // sqrt(2/(pi x)) / sqrt(2)
  return {amp * (P0 * c0 - Q0 * s0), amp * (P1 * c1 - Q1 * s1)};
}

struct Interval {
  double a, b, value, error;
  bool operator<(const Interval& o) const { return error < o.error; }
};

Interval gk21(const std::function<double(double)>& f, double a, double b) {
  using GK = boost::math::quadrature::gauss_kronrod<double, 21>;
  using G = boost::math::quadrature::gauss<double, 10>;
  const auto& xk = GK::abscissa();
  const auto& wk = GK::weights();
  const auto& wg = G::weights();
  const double mid = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(mid);
  double kron = wk[0] * fc;
  double gauss = 0.0;
  for (std::size_t i = 1; i < xk.size(); ++i) {
    const double fs = f(mid - half * xk[i]) + f(mid + half * xk[i]);
    kron += wk[i] * fs;
    // Odd Kronrod nodes coincide with the 10 Gauss nodes.
    if (i % 2 == 1) gauss += wg[i / 2] * fs;
  }
  kron *= half;
  gauss *= half;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace

void QuadratureSpec::check() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw ConfigError("quadrature tolerances must be positive");
  if (max_subdivisions < 10) throw ConfigError("max_subdivisions must be at least 10");
  if (tail.max_segments < 2 * tail.window || tail.window < 4) throw ConfigError("invalid tail policy");
}

double ellipk(double k) {
  if (!(k >= 0.0) || !(k < 1.0)) throw DomainError("ellipk: modulus must lie in [0, 1)");
  double a = 1.0;
  double b = std::sqrt((1.0 - k) * (1.0 + k));
  for (int i = 0; i < 60 && std::abs(a - b) > 1e-15 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (a + b);
}

BesselPair bessel_j01(double x) {
  const double ax = std::abs(x);
  BesselPair r;
  if (ax <= 8.0) {
    r = bessel_series(ax);
  } else if (ax <= 25.0) {
    r = bessel_miller(ax);
  } else {
    r = bessel_hankel(ax);
  }
  if (x < 0.0) r.j1 = -r.j1;
  return r;
}

double bessel_j(int order, double x) {
  if (order != 0 && order != 1) throw DomainError("bessel_j: only orders 0 and 1 are supported");
  if (!(x >= 0.0)) throw DomainError("bessel_j: x must be non-negative");
  const BesselPair p = bessel_j01(x);
  return order == 0 ? p.j0 : p.j1;
}

double integrate_adaptive(const std::function<double(double)>& f, double a, double b, const QuadratureSpec& spec) {
  spec.check();
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) throw DomainError("integrate_adaptive: need finite a < b");
  std::priority_queue<Interval> heap;
  Interval first = gk21(f, a, b);
  double total = first.value;
  double err = first.error;
  heap.push(first);
  for (int n = 1; n < spec.max_subdivisions; ++n) {
    if (!std::isfinite(total)) throw NonConvergence("integrate_adaptive: integrand produced a non-finite value");
    if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) return total;
    Interval worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a) || !(mid < worst.b)) break;  // interval exhausted in floating point
    Interval left = gk21(f, worst.a, mid);
    Interval right = gk21(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Recompute the sums to shed accumulated rounding before the final check.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  if (err <= std::max(spec.abs_tol, spec.rel_tol * std::abs(total))) return total;
  throw NonConvergence("integrate_adaptive: error estimate " + std::to_string(err) + " after " +
                       std::to_string(spec.max_subdivisions) + " subdivisions");
}

double wynn_epsilon(const double* s, std::size_t n) {
  if (n == 0) return 0.0;
  std::vector<double> prev(n + 1, 0.0);
  std::vector<double> cur(s, s + n);
  double best = s[n - 1];
  for (std::size_t k = 1; cur.size() > 1; ++k) {
    std::vector<double> next(cur.size() - 1);
    for (std::size_t i = 0; i + 1 < cur.size(); ++i) {
      const double d = cur[i + 1] - cur[i];
      if (d == 0.0) return k % 2 == 1 ? cur[i + 1] : best;
      next[i] = prev[i + 1] + 1.0 / d;
      if (!std::isfinite(next[i])) return best;
    }
    if (k % 2 == 0) best = next.back();
    prev = std::move(cur);
    cur = std::move(next);
  }
  return best;
}

const std::array<QuadratureNode, kSegmentNodes>& segment_rule() {
  static const std::array<QuadratureNode, kSegmentNodes> rule = [] {
    using G = boost::math::quadrature::gauss<double, kSegmentNodes>;
    const auto& x = G::abscissa();
    const auto& w = G::weights();
    std::array<QuadratureNode, kSegmentNodes> r{};
    const int h = kSegmentNodes / 2;
    for (int i = 0; i < h; ++i) {
      r[h - 1 - i] = {-x[i], w[i]};
      r[h + i] = {x[i], w[i]};
    }
    return r;
  }();
  return rule;
}

double laplace_segment_length(double omega, double z) {
  if (!(omega > 0.0)) throw DomainError("oscillation bound must be positive");
  double h = kPi / omega;
  if (z > 0.0) h = std::min(h, 8.0 / z);
  return h;
}

LaplaceTransformResult<1> integrate_bessel_laplace_detailed(const std::function<double(double)>& g, double z,
                                                            const QuadratureSpec& spec, double omega) {
  spec.check();
  const double h = laplace_segment_length(omega, z);
  return integrate_laplace_segments<1>([&](double m, std::size_t) { return std::array<double, 1>{g(m)}; }, z, h,
                                       spec);
}

double integrate_bessel_laplace(const std::function<double(double)>& g, double z, const QuadratureSpec& spec,
                                double omega) {
  return integrate_bessel_laplace_detailed(g, z, spec, omega).value[0];
}

}  // namespace narrowflux
