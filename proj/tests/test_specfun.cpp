#include <doctest.h>

#include <cmath>
#include <numbers>
#include <vector>

#include "narrowflux/errors.hpp"
#include "narrowflux/specfun.hpp"

using namespace narrowflux;

namespace {
constexpr double kPi = std::numbers::pi;
}

TEST_CASE("ellipk reference values") {
  CHECK(ellipk(0.0) == doctest::Approx(kPi / 2.0).epsilon(1e-15));
  CHECK(ellipk(0.5) == doctest::Approx(1.685750354812596).epsilon(1e-14));
  CHECK(ellipk(1.0 / std::sqrt(2.0)) == doctest::Approx(1.854074677301372).epsilon(1e-14));
  CHECK(ellipk(0.99) == doctest::Approx(3.356600523361192).epsilon(1e-13));
  CHECK_THROWS_AS(ellipk(1.0), DomainError);
  CHECK_THROWS_AS(ellipk(-0.1), DomainError);
}

TEST_CASE("ellipk grows logarithmically near 1") {
  const double k = 1.0 - 1e-10;
  const double kp = std::sqrt(1.0 - k * k);
  CHECK(ellipk(k) == doctest::Approx(std::log(4.0 / kp)).epsilon(1e-8));
}

TEST_CASE("Bessel J0 and J1") {
  const auto b = bessel_j01(1.0);
  CHECK(b.j0 == doctest::Approx(0.7651976865579666).epsilon(1e-14));
  CHECK(b.j1 == doctest::Approx(0.4400505857449335).epsilon(1e-14));
  const auto big = bessel_j01(50.0);
  CHECK(big.j0 == doctest::Approx(0.05581232766925182).epsilon(1e-12));
  CHECK(big.j1 == doctest::Approx(-0.09751182812517113).epsilon(1e-12));
  const auto neg = bessel_j01(-3.0);
  CHECK(neg.j0 == doctest::Approx(bessel_j(0, 3.0)));
  CHECK(neg.j1 == doctest::Approx(-bessel_j(1, 3.0)));
  CHECK(bessel_j(1, 0.0) == 0.0);
  CHECK(bessel_j(0, 0.0) == 1.0);
}

TEST_CASE("adaptive quadrature with endpoint singularities") {
  CHECK(integrate_adaptive([](double x) { return std::log(x); }, 0.0, 1.0) == doctest::Approx(-1.0).epsilon(1e-10));
  CHECK(integrate_adaptive([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0) ==
        doctest::Approx(2.0).epsilon(1e-9));
  CHECK(integrate_adaptive([](double x) { return std::sin(x); }, 0.0, kPi) == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("tangent-window elliptic integral") {
  QuadratureSpec spec;
  spec.abs_tol = 1e-13;
  spec.rel_tol = 1e-13;
  const double eta = 2.0;
  const double v = integrate_adaptive(
      [eta](double u) { return u / (eta + u) * ellipk(2.0 * std::sqrt(eta * u) / (eta + u)); }, 0.0, 1.0, spec);
  CHECK(v == doctest::Approx(0.406298886459960).epsilon(1e-12));
}

TEST_CASE("quadrature settings validation") {
  QuadratureSpec s;
  CHECK_NOTHROW(s.check());
  s.abs_tol = 0.0;
  CHECK_THROWS_AS(s.check(), ConfigError);
  s = {};
  s.max_subdivisions = 5;
  CHECK_THROWS_AS(s.check(), ConfigError);
}

TEST_CASE("Wynn epsilon accelerates an alternating series") {
  std::vector<double> partial;
  double sum = 0.0;
  for (int k = 1; k <= 20; ++k) {
    sum += (k % 2 ? 1.0 : -1.0) / k;
    partial.push_back(sum);
  }
  CHECK(std::abs(partial.back() - std::log(2.0)) > 1e-2);
  CHECK(wynn_epsilon(partial.data(), partial.size()) == doctest::Approx(std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("Bessel-Laplace transforms") {
  for (double z : {0.1, 0.5, 2.0}) {
    const double v = integrate_bessel_laplace([](double m) { return bessel_j(0, m); }, z);
    CHECK(v == doctest::Approx(1.0 / std::sqrt(1.0 + z * z)).epsilon(1e-9));
  }
}

TEST_CASE("undamped oscillatory integrals use extrapolation") {
  const auto r = integrate_bessel_laplace_detailed([](double m) { return bessel_j(1, m) / m; }, 0.0);
  CHECK(r.value[0] == doctest::Approx(1.0).epsilon(1e-8));
  CHECK(r.extrapolated);
  const double s = integrate_bessel_laplace([](double m) { return std::sin(m) / m; }, 0.0);
  CHECK(s == doctest::Approx(kPi / 2.0).epsilon(1e-8));
  // Discontinuous Weber-Schafheitlin integral: 1/a inside, 0 outside.
  const double a = 0.05;
  const double inside = integrate_bessel_laplace([&](double m) { return bessel_j(1, m * a) * bessel_j(0, m * 0.02); },
                                                 0.0, {}, a + 0.02);
  CHECK(inside == doctest::Approx(1.0 / a).epsilon(1e-7));
}

TEST_CASE("negative damping is rejected") {
  CHECK_THROWS_AS(integrate_bessel_laplace([](double) { return 1.0; }, -1.0), DomainError);
  CHECK(laplace_segment_length(2.0, 0.0) > 0.0);
}
