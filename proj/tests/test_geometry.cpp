#include <doctest.h>

#include <cmath>
#include <numbers>

#include "narrowflux/errors.hpp"
#include "narrowflux/geometry.hpp"

using namespace narrowflux;

namespace {

constexpr double kPi = std::numbers::pi;

WindowConfig antipodal(double eps, WindowRole exit_role = WindowRole::absorbing) {
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, eps, WindowRole::influx), WindowSpec::on_sphere(kPi, 0.0, eps, exit_role)};
  return c;
}

}  // namespace

TEST_CASE("role names round trip") {
  for (auto r : {WindowRole::influx, WindowRole::outflux_neumann, WindowRole::absorbing}) {
    CHECK(parse_role(to_string(r)) == r);
  }
  CHECK(parse_role("outflux") == WindowRole::outflux_neumann);
  CHECK_THROWS_AS(parse_role("sink"), ConfigError);
}

TEST_CASE("chord and colatitude are inverse") {
  CHECK(chord_from_colatitude(kPi) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(chord_from_colatitude(kPi / 3.0) == doctest::Approx(1.0).epsilon(1e-15));
  for (double t : {0.01, 0.5, 1.0, 2.0, 3.0}) {
    CHECK(colatitude_from_chord(chord_from_colatitude(t)) == doctest::Approx(t).epsilon(1e-13));
  }
}

TEST_CASE("distance matrix is symmetric with chord entries") {
  WindowConfig c = antipodal(0.1);
  c.windows.push_back(WindowSpec::on_sphere(kPi / 2.0, 0.0, 0.1, WindowRole::absorbing));
  const auto l = distance_matrix(c);
  CHECK(l(0, 1) == doctest::Approx(2.0).epsilon(1e-15));
  CHECK(l(0, 2) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(l(2, 0) == l(0, 2));
  CHECK(l(1, 1) == 0.0);

  c.domain = Domain::sphere(3.0);
  CHECK(distance_matrix(c)(0, 1) == doctest::Approx(6.0));
}

TEST_CASE("validation classifies boundary problems") {
  CHECK(validate_config(antipodal(0.1)).problem() == BoundaryProblem::mixed);
  CHECK(validate_config(antipodal(0.1, WindowRole::outflux_neumann)).problem() == BoundaryProblem::neumann_pair);

  WindowConfig c = antipodal(0.1, WindowRole::outflux_neumann);
  c.windows.push_back(WindowSpec::on_sphere(kPi / 2.0, 0.0, 0.1, WindowRole::absorbing));
  const auto v = validate_config(c);
  CHECK(v.problem() == BoundaryProblem::unsupported);
  CHECK(v.influx_index() == 0);
  CHECK(v.exit_indices() == std::vector<std::size_t>{1, 2});
}

TEST_CASE("validation rejects bad configurations") {
  WindowConfig c = antipodal(0.1);
  c.windows[1].role = WindowRole::influx;
  CHECK_THROWS_AS(validate_config(c), RoleError);

  c = antipodal(0.1);
  c.windows[0].role = WindowRole::absorbing;
  CHECK_THROWS_AS(validate_config(c), RoleError);

  c = antipodal(0.1);
  c.windows.pop_back();
  CHECK_THROWS_AS(validate_config(c), RoleError);

  c = antipodal(0.1);
  c.windows[1] = WindowSpec::on_sphere(0.15, 0.0, 0.1, WindowRole::absorbing);
  CHECK_THROWS_AS(validate_config(c), OverlapError);

  c = antipodal(0.1);
  c.windows[1].center = Vec3(0.0, 0.0, -1.5);
  CHECK_THROWS_AS(validate_config(c), DomainError);

  c = antipodal(-0.1);
  CHECK_THROWS_AS(validate_config(c), DomainError);
}

TEST_CASE("tangent windows are accepted") {
  const double eps = 0.1;
  WindowConfig c = antipodal(eps);
  c.windows[1] = WindowSpec::on_sphere(colatitude_from_chord(2.0 * eps), 0.0, eps, WindowRole::absorbing);
  CHECK_NOTHROW(validate_config(c));
}

TEST_CASE("centers on a sphere of radius R are normalized") {
  WindowConfig c;
  c.domain = Domain::sphere(2.0);
  c.windows = {{Vec3(0, 0, 2), 0.2, WindowRole::influx}, {Vec3(0, 0, -2), 0.2, WindowRole::absorbing}};
  const auto v = validate_config(c);
  CHECK(v.window(0).center.norm() == doctest::Approx(1.0));
  CHECK(v.distances()(0, 1) == doctest::Approx(4.0));
}

TEST_CASE("common radius") {
  WindowConfig c = antipodal(0.1);
  CHECK(validate_config(c).common_radius() == 0.1);
  c.windows[1].radius = 0.2;
  CHECK_THROWS_AS(validate_config(c).common_radius(), DomainError);
}

TEST_CASE("nondimensionalize rescales radii and the concentration") {
  WindowConfig c = antipodal(0.3);
  c.domain = Domain::sphere(3.0);
  c.current = 2.0;
  c.diffusion = 4.0;
  const auto nd = nondimensionalize(c);
  CHECK(nd.config.domain.kind == DomainKind::unit_sphere);
  CHECK(nd.config.windows[0].radius == doctest::Approx(0.1));
  CHECK(nd.scale == doctest::Approx(2.0 * 3.0 / 4.0));

  WindowConfig h = c;
  h.domain = Domain::half_space();
  CHECK_THROWS_AS(nondimensionalize(h), DomainError);
}

TEST_CASE("cap points sit at the requested chord") {
  const Vec3 c = Vec3(1.0, 2.0, -0.5).normalized();
  const auto [e1, e2] = tangent_frame(c);
  CHECK(std::abs(e1.dot(c)) < 1e-15);
  CHECK(std::abs(e2.dot(c)) < 1e-15);
  CHECK(std::abs(e1.dot(e2)) < 1e-15);
  for (double r : {0.0, 0.05, 0.5, 1.9}) {
    for (double phi : {0.0, 1.0, 4.0}) {
      const Vec3 p = cap_point(c, e1, e2, r, phi);
      CHECK(p.norm() == doctest::Approx(1.0).epsilon(1e-14));
      CHECK((p - c).norm() == doctest::Approx(r).epsilon(1e-13));
    }
  }
}
