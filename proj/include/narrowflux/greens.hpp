#pragma once

#include "narrowflux/geometry.hpp"

namespace narrowflux {

/// Singular part g(r) = 1/(2πr) − H log(r)/(4π) plus the regular value v at
/// the singularity.
struct GreensSplit {
  double v = 0.0;
  double H = 1.0;
  double singular(double r) const;
};

/// Surface-to-surface Neumann Green's function of the unit ball as a
/// function of the chord r = ‖x − y‖.
double gs_sphere_surface_r(double r);

/// Same, from two points on the unit sphere. Throws SingularityError when r < 1e-12.
double gs_sphere_surface(const Vec3& x, const Vec3& y);

/// Interior-to-surface Green's function: x in the closed ball, y on the sphere.
double gs_sphere_interior(const Vec3& x, const Vec3& y);

/// Decomposition of the surface Green's function near its singularity.
GreensSplit greens_split_sphere();

/// Coulomb plus curvature-log kernel for a user-supplied mean curvature.
double general_singular(double H, double r);

}  // namespace narrowflux
