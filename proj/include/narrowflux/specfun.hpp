#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "narrowflux/diagnostics.hpp"
#include "narrowflux/errors.hpp"

namespace narrowflux {

/// How ∫₀^∞ e^{-mz} g(m) dm is cut into pieces and summed.
struct TailPolicy {
  double exp_cutoff = 40.0;   // stop once m z exceeds this
  int max_segments = 4000;
  int window = 16;            // partial sums fed to the epsilon algorithm
};

struct QuadratureSpec {
  double abs_tol = 1e-10;
  double rel_tol = 1e-10;
  int max_subdivisions = 2000;
  TailPolicy tail;

  /// Throws ConfigError on non-positive tolerances or fewer than 10 subdivisions.
  void check() const;
};

/// Complete elliptic integral of the first kind, modulus convention:
/// K(k) = ∫₀^{π/2} dθ / √(1 − k² sin²θ). Throws DomainError unless 0 ≤ k < 1.
double ellipk(double k);

struct BesselPair {
  double j0;
  double j1;
};

/// J₀(x) and J₁(x) together. Accepts negative x (J₀ even, J₁ odd).
BesselPair bessel_j01(double x);

/// J_order(x) for order 0 or 1 and x ≥ 0.
double bessel_j(int order, double x);

/// Globally adaptive Gauss–Kronrod (10/21) on [a, b]. Endpoints are never
/// evaluated, so integrable endpoint singularities are fine.
double integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                          const QuadratureSpec& spec = {});

/// Richardson-style limit of a slowly converging sequence by Wynn's epsilon
/// algorithm. Returns the highest even-column entry.
double wynn_epsilon(const double* s, std::size_t n);

template <std::size_t K>
struct LaplaceTransformResult {
  std::array<double, K> value{};
  double error_estimate = 0.0;
  int segments = 0;
  bool extrapolated = false;
};

/// Nodes per segment used by the semi-infinite integrator.
inline constexpr int kSegmentNodes = 16;

struct QuadratureNode {
  double node;
  double weight;
};

/// 16-point Gauss–Legendre rule on [-1, 1], nodes in increasing order.
const std::array<QuadratureNode, kSegmentNodes>& segment_rule();

/// Vector form of ∫₀^∞ e^{-mz} f(m) dm for K integrands sharing their
/// evaluation points. [0, ∞) is split into segments of length h, each done
/// with 16-point Gauss–Legendre. `f(m, node)` receives the global node index
/// (segment * 16 + j) so callers can cache kernel values on a fixed grid.
/// For z > 0 summation stops once m z passes the cutoff; otherwise the partial
/// sums are accelerated with the epsilon algorithm.
template <std::size_t K, class F>
LaplaceTransformResult<K> integrate_laplace_segments(F&& f, double z, double h, const QuadratureSpec& spec) {
  const auto& rule = segment_rule();
  if (!(z >= 0.0)) throw DomainError("integrate_bessel_laplace: z must be non-negative");
  if (!(h > 0.0)) throw DomainError("integrate_bessel_laplace: segment length must be positive");

  const int window = std::max(spec.tail.window, 4);
  std::array<std::vector<double>, K> partial;
  std::array<double, K> sum{};
  std::array<double, K> last_est{};
  bool have_est = false;
  int agree = 0;

  LaplaceTransformResult<K> out;
  for (int seg = 0; seg < spec.tail.max_segments; ++seg) {
    const double a = seg * h;
    const double mid = a + 0.5 * h;
    const double half = 0.5 * h;
    std::array<double, K> piece{};
    for (int j = 0; j < kSegmentNodes; ++j) {
      const double m = mid + half * rule[j].node;
      const double damp = z > 0.0 ? std::exp(-m * z) : 1.0;
      const std::array<double, K> v = f(m, static_cast<std::size_t>(seg) * kSegmentNodes + j);
      for (std::size_t c = 0; c < K; ++c) piece[c] += rule[j].weight * damp * v[c];
    }
    for (std::size_t c = 0; c < K; ++c) {
      sum[c] += half * piece[c];
      partial[c].push_back(sum[c]);
    }
    out.segments = seg + 1;

    if (z > 0.0 && (seg + 1) * h * z > spec.tail.exp_cutoff) {
      out.value = sum;
      out.error_estimate = 0.0;
      return out;
    }
    if (seg + 1 < window) continue;

    std::array<double, K> est{};
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      est[c] = wynn_epsilon(partial[c].data() + partial[c].size() - window, window);
      if (have_est) diff = std::max(diff, std::abs(est[c] - last_est[c]));
      scale = std::max(scale, std::abs(est[c]));
    }
    const double tol = std::max(spec.abs_tol, spec.rel_tol * scale);
    if (have_est && diff <= tol) {
      if (++agree >= 2) {
        out.value = est;
        out.error_estimate = diff;
        out.extrapolated = true;
        return out;
      }
    } else {
      agree = 0;
    }
    last_est = est;
    have_est = true;
  }

  if (have_est && partial[0].size() >= static_cast<std::size_t>(2 * window)) {
    // Compare the final estimate with the one a window earlier.
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t c = 0; c < K; ++c) {
      const auto& p = partial[c];
      const double e0 = wynn_epsilon(p.data() + p.size() - 2 * window, window);
      diff = std::max(diff, std::abs(last_est[c] - e0));
      scale = std::max(scale, std::abs(last_est[c]));
    }
    if (diff <= 1e3 * std::max(spec.abs_tol, spec.rel_tol * scale)) {
      diagnostics::warn("SlowDecay: semi-infinite integral accepted after " +
                        std::to_string(spec.tail.max_segments) + " segments, error ~" + std::to_string(diff));
      out.value = last_est;
      out.error_estimate = diff;
      out.extrapolated = true;
      return out;
    }
  }
  throw NonConvergence("integrate_bessel_laplace: no convergence after " + std::to_string(spec.tail.max_segments) +
                       " segments");
}

/// ∫₀^∞ e^{-mz} g(m) dm. `omega` bounds the oscillation frequency of g in m
/// (for Bessel products J(ma)J(mb) use a + b); it sets the segment length.
LaplaceTransformResult<1> integrate_bessel_laplace_detailed(const std::function<double(double)>& g, double z,
                                                            const QuadratureSpec& spec = {}, double omega = 1.0);

double integrate_bessel_laplace(const std::function<double(double)>& g, double z, const QuadratureSpec& spec = {},
                                double omega = 1.0);

/// Segment length used for a given frequency bound and damping.
double laplace_segment_length(double omega, double z);

}  // namespace narrowflux
