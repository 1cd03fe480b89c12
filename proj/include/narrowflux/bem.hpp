#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "narrowflux/asymptotics.hpp"
#include "narrowflux/geometry.hpp"

namespace narrowflux {

/// Per-window discretisation. Rings are uniform in t = asin(r/ε); the
/// innermost ring is one disk element, the others have `n_sectors` sectors.
struct BemResolution {
  int n_rings = 8;
  int n_sectors = 16;

  /// Resolution `level` doublings above the default.
  static BemResolution at_level(int level);
  BemResolution refined() const { return {2 * n_rings, 2 * n_sectors}; }
};

struct BemElement {
  std::size_t window = 0;
  double t0 = 0.0, t1 = 0.0;
  double phi0 = 0.0, phi1 = 0.0;
  bool central = false;
  Vec3 collocation;
  Vec3 centroid;          // parameter-space midpoint, mapped to the sphere
  double diameter = 0.0;
  double area = 0.0;    // ∫ dA, chord polar coordinates
  double weight = 0.0;  // ∫ dA / √(ε² − r²)
};

struct BemMesh {
  double eps = 0.0;
  BemResolution resolution;
  std::vector<Vec3> centers;
  std::vector<std::pair<Vec3, Vec3>> frames;
  std::vector<BemElement> elements;
  /// Elements of window w occupy [offsets[w], offsets[w + 1]).
  std::vector<std::size_t> offsets;

  static BemMesh build(const std::vector<Vec3>& centers, double eps, BemResolution res);
  Vec3 point(std::size_t window, double t, double phi) const;
};

/// One discrete solve.
struct BemLevel {
  BemResolution resolution;
  std::vector<double> u_centers;
  std::vector<double> fluxes;  // per window, influx included
  double ubar = 0.0;
  double drop = 0.0;
};

struct BemSolution {
  BoundaryProblem problem = BoundaryProblem::unsupported;
  double eps = 0.0;
  std::size_t influx = 0;
  std::vector<std::size_t> exits;
  std::vector<double> u_centers;  // Richardson-extrapolated
  FluxVector flux;
  double ubar = 0.0;
  /// u(x1) − u(x2) for the Neumann pair, u(x1) for the mixed problem.
  double drop = 0.0;
  double richardson_order = 0.0;
  BemLevel coarse;
  BemLevel fine;

  // Fine-level data kept for interior evaluation.
  BemMesh mesh;
  Eigen::VectorXd density;  // Weber modulation per absorbing element, zero elsewhere
};

/// Empirical convergence order used for two-level Richardson extrapolation.
inline constexpr double kBemRichardsonOrder = 3.0;

/// Boundary-integral solve on the unit sphere (Sphere(R) configs are rescaled
/// first; results are in dimensionless units). Neumann pairs are handled by
/// direct quadrature of the representation formula; mixed configurations by
/// Weber-weighted collocation. Solves at `res` and at twice that resolution
/// and extrapolates. Throws ResolutionError when n_rings < 2 or n_sectors < 3.
BemSolution bem_solve(const ValidatedConfig& cfg, BemResolution res = {});

/// Single-level solve, no extrapolation.
BemLevel bem_solve_level(const ValidatedConfig& cfg, BemResolution res);

/// u at a point of the closed ball from a solved configuration (fine level,
/// same additive constant as u_centers).
double bem_evaluate(const BemSolution& sol, const ValidatedConfig& cfg, const Vec3& y);

}  // namespace narrowflux
