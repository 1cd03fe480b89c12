#include "cli.hpp"

#include <CLI11.hpp>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <optional>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "narrowflux/asymptotics.hpp"
#include "narrowflux/bem.hpp"
#include "narrowflux/config_io.hpp"
#include "narrowflux/errors.hpp"
#include "narrowflux/geometry.hpp"
#include "narrowflux/halfspace.hpp"
#include "narrowflux/linsys.hpp"
#include "narrowflux/monte_carlo.hpp"
#include "narrowflux/parallel.hpp"

namespace narrowflux::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kPi = std::numbers::pi;

struct Options {
  std::string command;
  std::string config;
  std::vector<double> eps;
  std::vector<double> l;
  std::vector<std::string> methods;
  std::string out_dir;
  std::uint64_t seed = 1;
  int mesh_level = 0;
  std::size_t particles = 100000;
  std::string bc = "neumann";
  std::string kernel = "exact";
  double current = 1.0;
  bool fit = false;
  std::string manifest;
};

using Row = std::vector<std::string>;

struct Table {
  Row header;
  std::vector<Row> rows;
};

std::string num(double x) {
  std::ostringstream s;
  s << std::setprecision(12) << x;
  return s.str();
}

void write_csv(std::ostream& out, const Table& t) {
  auto line = [&](const Row& r) {
    for (std::size_t i = 0; i < r.size(); ++i) out << (i ? "," : "") << r[i];
    out << '\n';
  };
  line(t.header);
  for (const auto& r : t.rows) line(r);
}

std::ofstream open_output(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write " + path.string());
  return f;
}

KernelMode kernel_mode(const std::string& name) { return name == "split" ? KernelMode::split : KernelMode::exact_self; }

// A sweep point: one unit-sphere configuration with its reporting parameters.
struct Point {
  double eps = 0.0;
  double l = 0.0;  // chord between the influx and the first exit
  double scale = 1.0;
  ValidatedConfig cfg;
};

WindowConfig pair_config(double eps, double l, WindowRole exit_role) {
  if (!(l > 0.0 && l <= 2.0)) throw DomainError("--l must be a chord length in (0, 2]");
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, eps, WindowRole::influx),
               WindowSpec::on_sphere(colatitude_from_chord(l), 0.0, eps, exit_role)};
  return c;
}

// Default flux layout: exits at colatitude π/3 and at the South pole.
WindowConfig three_window_config(double eps) {
  WindowConfig c;
  c.windows = {WindowSpec::on_sphere(0.0, 0.0, eps, WindowRole::influx),
               WindowSpec::on_sphere(kPi / 3.0, 0.0, eps, WindowRole::absorbing),
               WindowSpec::on_sphere(kPi, 0.0, eps, WindowRole::absorbing)};
  return c;
}

Point make_point(WindowConfig cfg) {
  const auto nd = nondimensionalize(cfg);
  ValidatedConfig v = validate_config(nd.config);
  const std::size_t first_exit = v.exit_indices().front();
  return {v.common_radius(), v.distances()(static_cast<Eigen::Index>(v.influx_index()),
                                           static_cast<Eigen::Index>(first_exit)),
          nd.scale, std::move(v)};
}

// Sweep points from either --config (with optional --eps overrides) or the
// built-in layout `fallback(eps, l)`.
template <class Fallback>
std::vector<Point> sweep_points(const Options& o, Fallback&& fallback) {
  std::vector<Point> pts;
  if (!o.config.empty()) {
    if (!o.l.empty()) throw ConfigError("--l cannot be combined with --config");
    const WindowConfig base = load_config(o.config);
    if (o.eps.empty()) {
      pts.push_back(make_point(base));
      return pts;
    }
    for (double e : o.eps) {
      WindowConfig c = base;
      for (auto& w : c.windows) w.radius = e * c.domain.radius;
      pts.push_back(make_point(c));
    }
    return pts;
  }
  if (o.eps.empty()) throw ConfigError("give --eps or --config");
  const std::vector<double> ls = o.l.empty() ? std::vector<double>{0.0} : o.l;
  for (double e : o.eps) {
    for (double l : ls) pts.push_back(make_point(fallback(e, l)));
  }
  return pts;
}

// Evaluates f(point, method) over the sweep, keeping rows in sweep order.
template <class F>
std::vector<Row> run_sweep(const std::vector<Point>& pts, const std::vector<std::string>& methods, F&& f) {
  const std::size_t n = pts.size() * methods.size();
  std::vector<std::vector<Row>> blocks(n);
  parallel_for(n, [&](std::size_t k) {
    blocks[k] = f(k / methods.size(), pts[k / methods.size()], methods[k % methods.size()]);
  });
  std::vector<Row> rows;
  for (auto& b : blocks) rows.insert(rows.end(), b.begin(), b.end());
  return rows;
}

Table cmd_drop(const Options& o) {
  const WindowRole exit_role = o.bc == "mixed" ? WindowRole::absorbing : WindowRole::outflux_neumann;
  const auto pts = sweep_points(o, [&](double e, double l) { return pair_config(e, l, exit_role); });
  Table t{{"index", "eps", "l", "method", "value", "leading", "log_term", "quad_term", "physical"}, {}};
  t.rows = run_sweep(pts, o.methods, [&](std::size_t i, const Point& p, const std::string& m) {
    std::optional<ExpansionResult> series;
    double value = 0.0;
    const bool neumann = p.cfg.problem() == BoundaryProblem::neumann_pair;
    if (m == "asym2" || m == "asym3") {
      if (!neumann && p.cfg.problem() != BoundaryProblem::mixed) throw RoleError("drop: unsupported window roles");
      series = neumann ? sphere_drop_neumann(p.eps, p.l) : sphere_drop_N(p.eps, p.cfg.distances(), p.cfg.influx_index());
      value = m == "asym2" ? series->leading + series->log_term : series->total;
    } else if (m == "linsys") {
      const auto sys = build_system(p.cfg, kernel_mode(o.kernel));
      const auto sol = solve_exact(sys);
      value = u_at_influx_exact(sys, sol.ubar, sol.flux);
    } else {
      value = bem_solve(p.cfg, BemResolution::at_level(o.mesh_level)).drop;
    }
    Row r{std::to_string(i), num(p.eps), num(p.l), m, num(value)};
    if (series) {
      r.push_back(num(series->leading));
      r.push_back(num(series->log_term));
      r.push_back(m == "asym3" && series->quad_term ? num(*series->quad_term) : "");
    } else {
      r.insert(r.end(), {"", "", ""});
    }
    r.push_back(num(value * p.scale));
    return std::vector<Row>{r};
  });
  return t;
}

Table cmd_flux(const Options& o) {
  const auto pts = sweep_points(o, [](double e, double) { return three_window_config(e); });
  Table t{{"index", "eps", "window", "method", "flux", "fraction", "stderr"}, {}};
  t.rows = run_sweep(pts, o.methods, [&](std::size_t i, const Point& p, const std::string& m) {
    if (p.cfg.problem() != BoundaryProblem::mixed) throw RoleError("flux: every exit must be absorbing");
    const double influx = kPi * p.eps * p.eps;
    std::vector<Row> rows;
    if (m == "mc") {
      McConfig mc;
      mc.n_particles = o.particles;
      mc.master_seed = o.seed;
      const auto res = mc_flux_split(p.cfg, mc);
      for (std::size_t j = 0; j < res.windows.size(); ++j) {
        rows.push_back({std::to_string(i), num(p.eps), std::to_string(res.windows[j]), m, num(-influx * res.p[j]),
                        num(res.p[j]), num(res.stderr_p[j])});
      }
      return rows;
    }
    const FluxVector f = m == "asym" ? sphere_fluxes(p.eps, p.cfg.distances(), p.cfg.influx_index())
                                     : solve_exact(build_system(p.cfg, kernel_mode(o.kernel))).flux;
    for (std::size_t j = 0; j < f.windows.size(); ++j) {
      rows.push_back({std::to_string(i), num(p.eps), std::to_string(f.windows[j]), m, num(f.fluxes[j]),
                      num(-f.fluxes[j] / influx), ""});
    }
    return rows;
  });
  return t;
}

Table cmd_trace(const Options& o, std::ostream& err) {
  if (o.eps.empty()) throw ConfigError("trace: give --eps");
  std::vector<HalfSpacePair> pairs;
  for (double e : o.eps) {
    for (double l : o.l) {
      HalfSpacePair p{e, l, o.current, parse_halfspace_bc(o.bc), 0.0};
      p.check();
      pairs.push_back(p);
    }
  }
  std::vector<FlowTrace> traces(pairs.size());
  parallel_for(pairs.size(), [&](std::size_t k) { traces[k] = trace_flow(pairs[k]); });

  Table t{{"index", "eps", "l", "I", "bc", "L_pe", "T_tr", "terminal_x", "terminated"}, {}};
  json summary = json::array();
  std::vector<TraceSample> samples;
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    const auto& p = pairs[k];
    const auto& tr = traces[k];
    t.rows.push_back({std::to_string(k), num(p.eps), num(p.l), num(p.current), to_string(p.bc), num(tr.L_pe),
                      num(tr.T_tr), num(tr.terminal_x), to_string(tr.terminated)});
    summary.push_back(trace_summary(p, tr));
    samples.push_back({p.eps, p.l, p.current, tr.L_pe, tr.T_tr});
    if (!o.out_dir.empty()) {
      auto f = open_output(fs::path(o.out_dir) / ("trace_" + std::to_string(k) + ".csv"));
      write_trace_csv(f, tr);
    }
  }
  if (!o.out_dir.empty()) save_json(fs::path(o.out_dir) / "summary.json", summary);
  if (o.fit) {
    const auto fit = fit_constants(samples);
    err << "fit: a=" << num(fit.a) << " b=" << num(fit.b) << '\n';
    if (!o.out_dir.empty()) save_json(fs::path(o.out_dir) / "fit.json", {{"a", fit.a}, {"b", fit.b}});
  }
  return t;
}

json manifest(const Options& o, const std::vector<std::string>& args) {
  json m = {{"tool", "narrowflux"},
            {"version", kVersion},
            {"command", o.command},
            {"argv", args},
            {"config", o.config.empty() ? json(nullptr) : json(o.config)},
            {"sweep", {{"eps", o.eps}, {"l", o.l}}},
            {"methods", o.methods},
            {"out", o.out_dir.empty() ? json(nullptr) : json(o.out_dir)},
            {"seed", o.seed},
            {"mesh_level", o.mesh_level},
            {"particles", o.particles}};
  return m;
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int rerun(const Options& o, std::ostream& out, std::ostream& err) {
  std::ifstream f(o.manifest);
  if (!f) throw IoError("cannot read manifest " + o.manifest);
  json m;
  try {
    f >> m;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed manifest: ") + e.what());
  }
  auto args = m.at("argv").get<std::vector<std::string>>();
  if (args.size() < 2 || args[1] == "rerun") throw ConfigError("manifest does not record a runnable command");
  if (!o.out_dir.empty()) {
    // Redirect the output of the recorded run.
    for (std::size_t i = 0; i + 1 < args.size(); ++i) {
      if (args[i] == "--out") args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    }
    args.push_back("--out");
    args.push_back(o.out_dir);
  }
  return execute(args, out, err);
}

void add_common(CLI::App* cmd, Options& o) {
  cmd->add_option("--config", o.config, "Window configuration (JSON)");
  cmd->add_option("--eps", o.eps, "Window radius, or comma-separated sweep")->delimiter(',');
  cmd->add_option("--out", o.out_dir, "Output directory for CSV, JSON and the run manifest");
}

int execute(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"Concentration drops and fluxes between narrow windows"};
  app.set_version_flag("--version", kVersion);
  app.require_subcommand(1);

  auto* drop = app.add_subcommand("drop", "Concentration drop u(x1) - u(x2), or u(x1) with absorbing exits");
  add_common(drop, o);
  drop->add_option("--l", o.l, "Chord distance between the two windows (unit sphere)")->delimiter(',');
  drop->add_option("--method", o.methods, "asym2, asym3, linsys, bem")
      ->delimiter(',')
      ->check(CLI::IsMember({"asym2", "asym3", "linsys", "bem"}));
  drop->add_option("--bc", o.bc, "Second window: neumann or mixed")->check(CLI::IsMember({"neumann", "mixed"}));
  drop->add_option("--mesh-level", o.mesh_level, "BEM resolution level")->check(CLI::Range(0, 4));
  drop->add_option("--kernel", o.kernel, "linsys self terms: exact or split")->check(CLI::IsMember({"exact", "split"}));

  auto* flux = app.add_subcommand("flux", "Per-window fluxes for absorbing exits");
  add_common(flux, o);
  flux->add_option("--method", o.methods, "asym, linsys, mc")->delimiter(',')->check(CLI::IsMember({"asym", "linsys", "mc"}));
  flux->add_option("--seed", o.seed, "Monte Carlo master seed");
  flux->add_option("--particles", o.particles, "Monte Carlo particles")->check(CLI::PositiveNumber);
  flux->add_option("--kernel", o.kernel, "linsys self terms: exact or split")->check(CLI::IsMember({"exact", "split"}));

  auto* trace = app.add_subcommand("trace", "Half-space flow lines, penetration length and travel time");
  trace->add_option("--eps", o.eps, "Window radius, or comma-separated sweep")->delimiter(',')->required();
  trace->add_option("--l", o.l, "Window separation, or comma-separated sweep")->delimiter(',');
  trace->add_option("--I", o.current, "Influx amplitude")->check(CLI::PositiveNumber);
  trace->add_option("--bc", o.bc, "neumann or mixed")->check(CLI::IsMember({"neumann", "mixed"}));
  trace->add_flag("--fit", o.fit, "Fit a and b over the traced grid");
  trace->add_option("--out", o.out_dir, "Output directory for traces, summaries and the run manifest");

  auto* again = app.add_subcommand("rerun", "Repeat the run recorded in a manifest");
  again->add_option("manifest", o.manifest, "manifest.json")->required();
  again->add_option("--out", o.out_dir, "Write outputs here instead of the recorded directory");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : static_cast<int>(ErrorClass::config);
  }

  o.command = app.get_subcommands().front()->get_name();
  if (o.command == "rerun") return rerun(o, out, err);
  // Defaults are filled in here so the manifest records what actually ran.
  if (o.methods.empty() && o.command != "trace") o.methods = {o.command == "drop" ? "asym3" : "asym"};
  if (o.l.empty() && o.config.empty() && o.command != "flux") o.l = {o.command == "drop" ? 2.0 : 0.2};

  Table table;
  if (o.command == "drop") table = cmd_drop(o);
  if (o.command == "flux") table = cmd_flux(o);
  if (o.command == "trace") {
    if (!o.out_dir.empty()) fs::create_directories(o.out_dir);
    table = cmd_trace(o, err);
  }

  const json m = manifest(o, args);
  if (o.out_dir.empty()) {
    write_csv(out, table);
    err << "manifest: " << m.dump() << '\n';
  } else {
    fs::create_directories(o.out_dir);
    auto f = open_output(fs::path(o.out_dir) / (o.command + ".csv"));
    write_csv(f, table);
    save_json(fs::path(o.out_dir) / "manifest.json", m);
    err << "wrote " << (fs::path(o.out_dir) / (o.command + ".csv")).string() << '\n';
  }
  return 0;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    return execute(args, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(e.error_class());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::io);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return static_cast<int>(ErrorClass::convergence);
  }
}

}  // namespace narrowflux::cli
