#include "narrowflux/greens.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "narrowflux/errors.hpp"

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kSingularRadius = 1e-12;

}  // namespace

double GreensSplit::singular(double r) const { return general_singular(H, r); }

double gs_sphere_surface_r(double r) {
  if (!(r >= kSingularRadius)) throw SingularityError("surface Green's function evaluated at its singularity");
  return 1.0 / (2.0 * kPi * r) - std::log(0.5 * r * r + r) / (4.0 * kPi) + std::log(2.0) / (4.0 * kPi) -
         9.0 / (20.0 * kPi);
}

double gs_sphere_surface(const Vec3& x, const Vec3& y) { return gs_sphere_surface_r((x - y).norm()); }

double gs_sphere_interior(const Vec3& x, const Vec3& y) {
  const double d = (x - y).norm();
  if (d < kSingularRadius) throw SingularityError("interior Green's function evaluated at its singularity");
  const double rx = x.norm();
  // |x| cos(gamma) is just x.y for unit y; clamping guards the rounding at |x| ~ 1.
  const double rcos = rx > 0.0 ? rx * std::clamp(x.dot(y) / rx, -1.0, 1.0) : 0.0;
  return 1.0 / (2.0 * kPi * d) + (rx * rx + 1.0) / (8.0 * kPi) + std::log(2.0 / (1.0 - rcos + d)) / (4.0 * kPi) -
         7.0 / (10.0 * kPi);
}

GreensSplit greens_split_sphere() { return {std::log(2.0) / (4.0 * kPi) - 9.0 / (20.0 * kPi), 1.0}; }

double general_singular(double H, double r) {
  if (!(r > 0.0)) throw DomainError("general_singular: r must be positive");
  return 1.0 / (2.0 * kPi * r) - H * std::log(r) / (4.0 * kPi);
}

}  // namespace narrowflux
