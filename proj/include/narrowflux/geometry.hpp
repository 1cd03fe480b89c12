#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>
#include <cstddef>
#include <string_view>
#include <vector>

namespace narrowflux {

using Vec3 = Eigen::Vector3d;

enum class WindowRole { influx, outflux_neumann, absorbing };

std::string_view to_string(WindowRole role);
WindowRole parse_role(std::string_view name);

enum class DomainKind { unit_sphere, sphere, half_space };

struct Domain {
  DomainKind kind = DomainKind::unit_sphere;
  double radius = 1.0;  // R for spheres; unused for the half-space

  static Domain unit_sphere() { return {DomainKind::unit_sphere, 1.0}; }
  static Domain sphere(double R) { return {DomainKind::sphere, R}; }
  static Domain half_space() { return {DomainKind::half_space, 1.0}; }

  bool is_sphere() const { return kind != DomainKind::half_space; }
};

/// A circular window on the domain boundary. On spheres the center is a unit
/// direction and the window is the set of boundary points within chord
/// distance `radius` of it; on the half-space the center lies in z = 0.
struct WindowSpec {
  Vec3 center = Vec3::UnitZ();
  double radius = 0.0;
  WindowRole role = WindowRole::absorbing;

  /// Sphere window from (colatitude, azimuth) in radians.
  static WindowSpec on_sphere(double colatitude, double azimuth, double radius, WindowRole role);
  static WindowSpec on_plane(double x, double y, double radius, WindowRole role);
};

struct WindowConfig {
  Domain domain;
  std::vector<WindowSpec> windows;
  double current = 1.0;
  double diffusion = 1.0;
};

/// Symmetric matrix of chord distances between window centers, in domain units.
using DistanceMatrix = Eigen::MatrixXd;

enum class BoundaryProblem {
  neumann_pair,  // one influx, one Neumann outflux window
  mixed,         // one influx, every other window absorbing
  unsupported,   // any other role combination
};

/// A configuration that passed `validate_config`. Immutable.
class ValidatedConfig {
 public:
  const WindowConfig& config() const { return config_; }
  const DistanceMatrix& distances() const { return distances_; }
  std::size_t size() const { return config_.windows.size(); }
  const WindowSpec& window(std::size_t i) const { return config_.windows[i]; }

  std::size_t influx_index() const { return influx_; }
  /// Indices of all non-influx windows, in configuration order.
  const std::vector<std::size_t>& exit_indices() const { return exits_; }
  BoundaryProblem problem() const { return problem_; }

  /// Shared window radius; throws DomainError when radii differ.
  double common_radius() const;

 private:
  friend ValidatedConfig validate_config(WindowConfig cfg);
  WindowConfig config_;
  DistanceMatrix distances_;
  std::size_t influx_ = 0;
  std::vector<std::size_t> exits_;
  BoundaryProblem problem_ = BoundaryProblem::unsupported;
};

/// Checks roles, overlap and placement; normalizes sphere centers.
/// Throws RoleError, OverlapError or DomainError.
ValidatedConfig validate_config(WindowConfig cfg);

DistanceMatrix distance_matrix(const WindowConfig& cfg);

struct Nondimensionalized {
  WindowConfig config;  // unit-sphere instance, radii divided by R
  double scale = 1.0;   // I R / D, so that c = scale * u
};

/// Rescales a Sphere(R) configuration onto the unit ball. Unit-sphere input is
/// returned unchanged with scale I/D.
Nondimensionalized nondimensionalize(const WindowConfig& cfg);

/// Chord length between two points of the unit sphere separated by `colatitude`.
double chord_from_colatitude(double colatitude);
double colatitude_from_chord(double chord);

/// Orthonormal tangent frame (e1, e2) at a unit vector c.
std::pair<Vec3, Vec3> tangent_frame(const Vec3& c);

/// Point of the unit sphere at chord distance r and azimuth phi from c, using
/// the frame from `tangent_frame`. In these coordinates dA = r dr dphi exactly.
Vec3 cap_point(const Vec3& c, const Vec3& e1, const Vec3& e2, double r, double phi);

}  // namespace narrowflux
