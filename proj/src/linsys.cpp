#include "narrowflux/linsys.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <numbers>
#include <sstream>

#include "narrowflux/errors.hpp"
#include "narrowflux/greens.hpp"
#include "narrowflux/specfun.hpp"

namespace narrowflux {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kMaxCondition = 1e12;

QuadratureSpec tight_spec() {
  QuadratureSpec s;
  s.abs_tol = 1e-15;
  s.rel_tol = 1e-14;
  return s;
}

}  // namespace

double sphere_cap_self_integral(double eps) {
  if (!(eps > 0.0) || !(eps < 2.0)) throw DomainError("cap radius must lie in (0, 2)");
  // G_s(r) r is bounded at r = 0, so the quadrature is straightforward.
  return 2.0 * kPi * integrate_adaptive([](double r) { return gs_sphere_surface_r(r) * r; }, 0.0, eps, tight_spec());
}

double sphere_cap_weber_integral(double eps) {
  if (!(eps > 0.0) || !(eps < 2.0)) throw DomainError("cap radius must lie in (0, 2)");
  // r = eps sin t removes the inverse square root at the rim.
  return 2.0 * kPi *
         integrate_adaptive(
             [eps](double t) {
               const double r = eps * std::sin(t);
               return gs_sphere_surface_r(r) * r;
             },
             0.0, 0.5 * kPi, tight_spec());
}

InteractionSystem build_system(const ValidatedConfig& cfg, KernelMode mode) {
  if (!cfg.config().domain.is_sphere()) throw DomainError("build_system: sphere domain required");
  if (cfg.problem() != BoundaryProblem::mixed) throw RoleError("build_system: all exit windows must be absorbing");
  const double R = cfg.config().domain.radius;
  const double eps = cfg.common_radius() / R;
  const auto n = static_cast<Eigen::Index>(cfg.size());

  InteractionSystem sys;
  sys.eps = eps;
  sys.mode = mode;
  sys.influx = cfg.influx_index();
  sys.exits = cfg.exit_indices();
  sys.greens = Eigen::MatrixXd::Zero(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = i + 1; j < n; ++j) {
      const double g = gs_sphere_surface(cfg.window(i).center, cfg.window(j).center);
      sys.greens(i, j) = g;
      sys.greens(j, i) = g;
    }
  }

  const GreensSplit split = greens_split_sphere();
  const double d_split = d_coeff(split.H, eps, split.v);
  const double d = mode == KernelMode::split ? d_split : (sphere_cap_weber_integral(eps) - 0.5 * kPi) / eps;
  sys.influx_self = mode == KernelMode::split
                        ? eps - 0.25 * eps * eps * std::log(eps) + 0.125 * eps * eps + kPi * split.v * eps * eps
                        : sphere_cap_self_integral(eps);

  const auto m = static_cast<Eigen::Index>(sys.exits.size());
  sys.M = Eigen::MatrixXd::Zero(m, m);
  sys.b = Eigen::VectorXd::Zero(m);
  for (Eigen::Index a = 0; a < m; ++a) {
    sys.b(a) = sys.greens(sys.influx, sys.exits[a]);
    for (Eigen::Index c = 0; c < m; ++c) {
      sys.M(a, c) = a == c ? d : 2.0 * kPi * sys.greens(sys.exits[a], sys.exits[c]);
    }
  }
  return sys;
}

ExactSolution solve_exact(const InteractionSystem& sys) {
  const auto m = sys.M.rows();
  if (m < 1 || sys.b.size() != m) throw DimensionMismatch("solve_exact: malformed system");
  const double eps = sys.eps;
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(m + 1, m + 1);
  A.topLeftCorner(m, m) = 0.5 * kPi * Eigen::MatrixXd::Identity(m, m) + eps * sys.M;
  A.block(0, m, m, 1).setOnes();
  A.block(m, 0, 1, m).setOnes();
  Eigen::VectorXd rhs(m + 1);
  rhs.head(m) = -kPi * eps * eps * sys.b;
  rhs(m) = -0.5 * eps;

  Eigen::JacobiSVD<Eigen::MatrixXd> svd(A);
  const auto& sv = svd.singularValues();
  const double cond = sv(sv.size() - 1) > 0.0 ? sv(0) / sv(sv.size() - 1) : INFINITY;
  if (!(cond <= kMaxCondition)) {
    std::ostringstream os;
    os << "solve_exact: condition number " << cond << " exceeds 1e12";
    throw SingularSystem(os.str());
  }
  const Eigen::VectorXd x = A.partialPivLu().solve(rhs);

  ExactSolution out;
  out.condition = cond;
  out.ubar = x(m);
  std::vector<double> c(x.data(), x.data() + m);
  out.flux = FluxVector::from_constants(sys.exits, std::move(c), eps);
  return out;
}

double u_at_influx_exact(const InteractionSystem& sys, double ubar, const FluxVector& flux) {
  if (flux.weber_constants.size() != sys.exits.size()) throw DimensionMismatch("u_at_influx_exact: flux size");
  double cross = 0.0;
  for (std::size_t a = 0; a < sys.exits.size(); ++a) {
    cross += flux.weber_constants[a] * sys.greens(sys.exits[a], sys.influx);
  }
  return ubar + sys.influx_self + 2.0 * kPi * sys.eps * cross;
}

}  // namespace narrowflux
