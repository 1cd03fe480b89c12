#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include <Eigen/Core>

#include "narrowflux/geometry.hpp"

namespace narrowflux {

enum class ExpansionOrder { two_term, three_term };

/// Term-by-term value of an expansion in ε: leading O(ε), log O(ε² log ε)
/// and, for three-term formulas, quadratic O(ε²).
struct ExpansionResult {
  double leading = 0.0;
  double log_term = 0.0;
  std::optional<double> quad_term;
  double total = 0.0;
  ExpansionOrder order = ExpansionOrder::two_term;

  static ExpansionResult two(double leading, double log_term);
  static ExpansionResult three(double leading, double log_term, double quad_term);
};

/// Per-exit Weber constants C_j and total fluxes Φ_j = 2π ε C_j.
struct FluxVector {
  std::vector<std::size_t> windows;  // configuration index of each exit
  std::vector<double> weber_constants;
  std::vector<double> fluxes;

  static FluxVector from_constants(std::vector<std::size_t> windows, std::vector<double> c, double eps);
  double total_flux() const;
};

/// Green's function data needed for the third term of the two-window drop.
struct NeumannQuadData {
  double v1 = 0.0;
  double v2 = 0.0;
  double gs12 = 0.0;
};

ExpansionResult drop_two_window_neumann_general(double H1, double H2, double eps,
                                                const std::optional<NeumannQuadData>& quad = std::nullopt);

/// Green's data for u(x1) − u(y) with y inside the domain. The Vs values are
/// regular parts V_s(y; x_j) of the interior Green's function.
struct InteriorGreensData {
  double v1 = 0.0;
  double g21 = 0.0;
  double vs_y1 = 0.0;
  double vs_y2 = 0.0;
};

double drop_interior_point(double H1, double H2, double eps, const Vec3& y, const Vec3& x1, const Vec3& x2,
                           const InteriorGreensData& data);

/// Unit-ball version; all Green's data come from the sphere formulas.
double drop_interior_point_sphere(double eps, const Vec3& y, const Vec3& x1, const Vec3& x2);

/// Windows at distance l = η ε. No ε² log ε term.
ExpansionResult drop_close_windows(double eps, double eta, double H1, double H2);

/// Leading coefficient of the close-window drop, 2 − (4/π)∫₀¹ u/(η+u) K(2√(ηu)/(η+u)) du.
double close_window_leading_coefficient(double eta);

/// (1/8π)∫₀^{2π}∫₀¹ log(η² − 2ηu cos θ + u²) u du dθ by nested quadrature.
double close_window_log_integral(double eta);

/// Two-term u(x1) with window 1 influx and windows 2..N absorbing; H[0] is H(x1).
ExpansionResult drop_mixed_general(const std::vector<double>& H, double eps);

ExpansionResult sphere_drop_neumann(double eps, double l);
ExpansionResult sphere_drop_absorbing(double eps, double l);

/// u(x1) on the unit sphere for N absorbing-exit windows. `influx` indexes
/// the influx window in `dist`.
ExpansionResult sphere_drop_N(double eps, const DistanceMatrix& dist, std::size_t influx = 0);

/// Two-term window fluxes on the unit sphere.
FluxVector sphere_fluxes(double eps, const DistanceMatrix& dist, std::size_t influx = 0);

double d_coeff(double H, double eps, double v);

struct UbarFlux {
  double ubar = 0.0;
  FluxVector flux;
};

/// Series for ū and the C_j. `greens` is the full N×N table G_s(x_i; x_j)
/// (diagonal ignored), `d` has one entry per exit in the order of `exits`.
UbarFlux ubar_cj_expansion(double eps, const Eigen::MatrixXd& greens, const std::vector<double>& d,
                           std::size_t influx = 0);

/// Pairwise interaction s(l) = 2π(G_s(l) − v) = 1/l − ½ log(l²/2 + l).
double sphere_interaction(double l);

}  // namespace narrowflux
