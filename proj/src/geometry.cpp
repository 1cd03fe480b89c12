#include "narrowflux/geometry.hpp"

#include <cmath>
#include <sstream>
#include <string>

#include "narrowflux/errors.hpp"

namespace narrowflux {

namespace {

constexpr double kCenterNormTolerance = 1e-6;
constexpr double kOverlapSlack = 1e-12;

std::string fmt_pair(std::size_t i, std::size_t j) {
  std::ostringstream os;
  os << "windows " << i << " and " << j;
  return os.str();
}

}  // namespace

std::string_view to_string(WindowRole role) {
  switch (role) {
    case WindowRole::influx:
      return "influx";
    case WindowRole::outflux_neumann:
      return "outflux_neumann";
    case WindowRole::absorbing:
      return "absorbing";
  }
  return "unknown";
}

WindowRole parse_role(std::string_view name) {
  if (name == "influx") return WindowRole::influx;
  if (name == "outflux_neumann" || name == "outflux") return WindowRole::outflux_neumann;
  if (name == "absorbing") return WindowRole::absorbing;
  throw ConfigError("unknown window role '" + std::string(name) + "'");
}

WindowSpec WindowSpec::on_sphere(double colatitude, double azimuth, double radius, WindowRole role) {
  const double s = std::sin(colatitude);
  return {Vec3(s * std::cos(azimuth), s * std::sin(azimuth), std::cos(colatitude)), radius, role};
}

WindowSpec WindowSpec::on_plane(double x, double y, double radius, WindowRole role) {
  return {Vec3(x, y, 0.0), radius, role};
}

double ValidatedConfig::common_radius() const {
  const double eps = config_.windows.front().radius;
  for (const auto& w : config_.windows) {
    if (std::abs(w.radius - eps) > 1e-12 * eps) {
      throw DomainError("windows do not share a common radius");
    }
  }
  return eps;
}

DistanceMatrix distance_matrix(const WindowConfig& cfg) {
  const auto n = static_cast<Eigen::Index>(cfg.windows.size());
  const double scale = cfg.domain.kind == DomainKind::sphere ? cfg.domain.radius : 1.0;
  DistanceMatrix l = DistanceMatrix::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double d = scale * (cfg.windows[i].center - cfg.windows[j].center).norm();
      l(i, j) = d;
      l(j, i) = d;
    }
  }
  return l;
}

ValidatedConfig validate_config(WindowConfig cfg) {
  if (cfg.windows.size() < 2) throw RoleError("at least two windows are required");
  if (!(cfg.current > 0.0) && !(cfg.current < 0.0)) throw DomainError("current must be non-zero");
  if (!(cfg.diffusion > 0.0)) throw DomainError("diffusion coefficient must be positive");
  if (cfg.domain.is_sphere() && !(cfg.domain.radius > 0.0)) throw DomainError("sphere radius must be positive");

  std::size_t influx_count = 0;
  std::size_t influx = 0;
  for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
    if (cfg.windows[i].role == WindowRole::influx) {
      ++influx_count;
      influx = i;
    }
  }
  if (influx_count == 0) throw RoleError("no influx window");
  if (influx_count > 1) throw RoleError("more than one influx window");

  const double R = cfg.domain.is_sphere() ? cfg.domain.radius : 1.0;
  for (auto& w : cfg.windows) {
    if (!(w.radius > 0.0)) throw DomainError("window radius must be positive");
    if (cfg.domain.is_sphere()) {
      if (!(w.radius < R)) throw DomainError("window radius must be smaller than the sphere radius");
      const double norm = w.center.norm();
      // Centers may be given as unit directions or as points on the sphere of radius R.
      if (std::abs(norm - 1.0) > kCenterNormTolerance && std::abs(norm - R) > kCenterNormTolerance * R) {
        throw DomainError("window center is not on the sphere surface");
      }
      w.center /= norm;
    } else {
      if (std::abs(w.center.z()) > 1e-12) throw DomainError("half-space window center must lie in z = 0");
      w.center.z() = 0.0;
    }
  }

  DistanceMatrix l = distance_matrix(cfg);
  for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
    for (std::size_t j = i + 1; j < cfg.windows.size(); ++j) {
      const double min_gap = cfg.windows[i].radius + cfg.windows[j].radius;
      if (l(i, j) < min_gap * (1.0 - kOverlapSlack)) {
        throw OverlapError(fmt_pair(i, j) + " overlap (center distance below the sum of radii)");
      }
    }
  }

  ValidatedConfig out;
  out.influx_ = influx;
  for (std::size_t i = 0; i < cfg.windows.size(); ++i) {
    if (i != influx) out.exits_.push_back(i);
  }
  std::size_t neumann = 0;
  std::size_t absorbing = 0;
  for (auto i : out.exits_) {
    if (cfg.windows[i].role == WindowRole::outflux_neumann) ++neumann;
    if (cfg.windows[i].role == WindowRole::absorbing) ++absorbing;
  }
  if (neumann == 1 && absorbing == 0) {
    out.problem_ = BoundaryProblem::neumann_pair;
  } else if (neumann == 0 && absorbing >= 1) {
    out.problem_ = BoundaryProblem::mixed;
  } else {
    out.problem_ = BoundaryProblem::unsupported;
  }
  out.config_ = std::move(cfg);
  out.distances_ = std::move(l);
  return out;
}

Nondimensionalized nondimensionalize(const WindowConfig& cfg) {
  if (!cfg.domain.is_sphere()) throw DomainError("nondimensionalize requires a sphere domain");
  const double R = cfg.domain.radius;
  if (!(R > 0.0)) throw DomainError("sphere radius must be positive");
  if (!(cfg.diffusion > 0.0)) throw DomainError("diffusion coefficient must be positive");
  Nondimensionalized out;
  out.config = cfg;
  out.config.domain = Domain::unit_sphere();
  for (auto& w : out.config.windows) {
    w.radius /= R;
    const double norm = w.center.norm();
    if (norm > 0.0) w.center /= norm;
  }
  out.scale = cfg.current * R / cfg.diffusion;
  return out;
}

double chord_from_colatitude(double colatitude) { return 2.0 * std::sin(0.5 * colatitude); }

double colatitude_from_chord(double chord) { return 2.0 * std::asin(0.5 * chord); }

std::pair<Vec3, Vec3> tangent_frame(const Vec3& c) {
  // Any vector not parallel to c seeds the frame.
  const Vec3 seed = std::abs(c.z()) < 0.9 ? Vec3::UnitZ() : Vec3::UnitX();
  Vec3 e1 = seed.cross(c).normalized();
  Vec3 e2 = c.cross(e1);
  return {e1, e2};
}

Vec3 cap_point(const Vec3& c, const Vec3& e1, const Vec3& e2, double r, double phi) {
  const double axial = 1.0 - 0.5 * r * r;
  const double radial = r * std::sqrt(std::max(0.0, 1.0 - 0.25 * r * r));
  return axial * c + radial * (std::cos(phi) * e1 + std::sin(phi) * e2);
}

}  // namespace narrowflux
