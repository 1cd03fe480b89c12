#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "narrowflux/asymptotics.hpp"
#include "narrowflux/geometry.hpp"

namespace narrowflux {

/// How window self-interactions are integrated.
///   split:      Green's function replaced by g(r) + v on its own window (the
///               model the series expansion is built from).
///   exact_self: the full sphere Green's function is integrated on each
///               window's own cap; cross terms stay point evaluations.
enum class KernelMode { split, exact_self };

/// [(π/2) I + ε M] C = −ū 1 − π ε² b, Σ C = −ε/2.
struct InteractionSystem {
  Eigen::MatrixXd M;
  Eigen::VectorXd b;
  Eigen::MatrixXd greens;            // N x N table of G_s between window centers, zero diagonal
  std::vector<std::size_t> exits;    // configuration index of each row
  std::size_t influx = 0;
  double eps = 0.0;
  double influx_self = 0.0;          // ∫ over the influx cap of G_s(x; x1)
  KernelMode mode = KernelMode::split;
};

InteractionSystem build_system(const ValidatedConfig& cfg, KernelMode mode = KernelMode::split);

struct ExactSolution {
  double ubar = 0.0;
  FluxVector flux;
  double condition = 0.0;
};

/// Direct solve of the augmented (N x N) system. Throws SingularSystem when
/// the condition number exceeds 1e12.
ExactSolution solve_exact(const InteractionSystem& sys);

/// u(x1) = ū + ∫ G_s(x; x1) over the influx cap + 2π ε Σ C_j G_s(x_j; x1).
double u_at_influx_exact(const InteractionSystem& sys, double ubar, const FluxVector& flux);

/// Self integrals on a cap of chord radius eps of the unit sphere.
/// Plain: 2π ∫₀^ε G_s(r) r dr. Weber: 2π ∫₀^ε G_s(r) r dr / √(ε² − r²).
double sphere_cap_self_integral(double eps);
double sphere_cap_weber_integral(double eps);

}  // namespace narrowflux
