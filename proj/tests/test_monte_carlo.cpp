#include <doctest.h>

#include <cmath>
#include <numbers>

#include "narrowflux/diagnostics.hpp"
#include "narrowflux/errors.hpp"
#include "narrowflux/monte_carlo.hpp"

using namespace narrowflux;

namespace {

constexpr double kPi = std::numbers::pi;

ValidatedConfig symmetric_exits(double eps) {
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, eps, WindowRole::influx),
               WindowSpec::on_sphere(kPi / 2.0, 0.0, eps, WindowRole::absorbing),
               WindowSpec::on_sphere(kPi / 2.0, kPi, eps, WindowRole::absorbing)};
  return validate_config(c);
}

McConfig small(std::size_t n, std::uint64_t seed = 7) {
  McConfig mc;
  mc.n_particles = n;
  mc.master_seed = seed;
  return mc;
}

}  // namespace

TEST_CASE("splitmix64 reference outputs") {
  // First outputs of the SplitMix64 generator seeded with 0.
  CHECK(splitmix64(0) == 0xe220a8397b1dcdafULL);
  CHECK(splitmix64(0x9e3779b97f4a7c15ULL) == 0x6e789e6aa1b965f4ULL);
}

TEST_CASE("config checks") {
  McConfig mc;
  CHECK(mc.step_for(0.1) == doctest::Approx(0.01 / 1280.0));
  mc.dt = 1e-4;
  CHECK(mc.step_for(0.1) == 1e-4);
  CHECK_NOTHROW(mc.check(0.1));
  mc.dt = 0.002;
  CHECK_THROWS_AS(mc.check(0.1), DomainError);
  mc = small(0);
  CHECK_THROWS_AS(mc.check(0.1), DomainError);
}

TEST_CASE("probabilities sum to one and runs are reproducible") {
  const auto cfg = symmetric_exits(0.2);
  const auto a = mc_flux_split(cfg, small(400));
  const auto b = mc_flux_split(cfg, small(400));
  REQUIRE(a.p.size() == 2);
  CHECK(a.p[0] + a.p[1] == 1.0);
  CHECK(a.counts == b.counts);
  CHECK(a.p == b.p);
  CHECK(a.mean_exit_time == b.mean_exit_time);
  CHECK(a.absorbed + a.timeouts == a.n_particles);
  CHECK(a.counts[0] + a.counts[1] == a.absorbed);
  const auto c = mc_flux_split(cfg, small(400, 8));
  CHECK(c.mean_exit_time != a.mean_exit_time);
}

TEST_CASE("symmetric exits split evenly") {
  const auto r = mc_flux_split(symmetric_exits(0.2), small(2000));
  CHECK(std::abs(r.p[0] - 0.5) < 4.0 * r.stderr_p[0]);
  CHECK(r.stderr_p[0] == doctest::Approx(std::sqrt(r.p[0] * r.p[1] / r.absorbed)).epsilon(1e-12));
  CHECK(r.timeouts == 0);
}

TEST_CASE("halving the step leaves the split unchanged") {
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, 0.2, WindowRole::influx),
               WindowSpec::on_sphere(kPi / 3.0, 0.0, 0.2, WindowRole::absorbing),
               WindowSpec::on_sphere(kPi, 0.0, 0.2, WindowRole::absorbing)};
  const auto cfg = validate_config(c);
  McConfig mc = small(3000);
  const auto a = mc_flux_split(cfg, mc);
  mc.dt = 0.5 * mc.step_for(0.2);
  mc.master_seed = 99;
  const auto b = mc_flux_split(cfg, mc);
  CHECK(std::abs(a.p[0] - b.p[0]) < 3.0 * std::hypot(a.stderr_p[0], b.stderr_p[0]));
  CHECK(a.p[0] > a.p[1]);
}

TEST_CASE("step budget exhaustion") {
  McConfig mc = small(50);
  mc.max_steps = 1;
  diagnostics::ScopedWarningCapture cap;
  CHECK_THROWS_AS(mc_flux_split(symmetric_exits(0.2), mc), Timeout);
}

TEST_CASE("wrong problem types") {
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, 0.1, WindowRole::influx),
               WindowSpec::on_sphere(kPi, 0.0, 0.1, WindowRole::outflux_neumann)};
  CHECK_THROWS_AS(mc_flux_split(validate_config(c), small(10)), RoleError);

  WindowConfig h;
  h.domain = Domain::half_space();
  h.windows = {WindowSpec::on_plane(-0.1, 0.0, 0.05, WindowRole::influx),
               WindowSpec::on_plane(0.1, 0.0, 0.05, WindowRole::absorbing)};
  CHECK_THROWS_AS(mc_flux_split(validate_config(h), small(10)), DomainError);
}
