#include "narrowflux/config_io.hpp"

#include <fstream>

#include "narrowflux/errors.hpp"

namespace narrowflux {

using nlohmann::json;

namespace {

Domain parse_domain(const json& d) {
  const std::string type = d.at("type").get<std::string>();
  if (type == "sphere") {
    const double R = d.value("R", 1.0);
    return R == 1.0 ? Domain::unit_sphere() : Domain::sphere(R);
  }
  if (type == "unit_sphere") return Domain::unit_sphere();
  if (type == "half_space" || type == "halfspace") return Domain::half_space();
  throw ConfigError("unknown domain type '" + type + "'");
}

WindowSpec parse_window(const json& w, const Domain& domain) {
  const double radius = w.at("radius").get<double>();
  const WindowRole role = parse_role(w.at("role").get<std::string>());
  if (w.contains("center")) {
    const auto c = w.at("center").get<std::vector<double>>();
    if (c.size() == 3) return {Vec3(c[0], c[1], c[2]), radius, role};
    if (c.size() == 2 && !domain.is_sphere()) return WindowSpec::on_plane(c[0], c[1], radius, role);
    throw ConfigError("window center must have 3 components (2 allowed on the half-space)");
  }
  if (w.contains("colatitude")) {
    if (!domain.is_sphere()) throw ConfigError("colatitude only applies to sphere domains");
    return WindowSpec::on_sphere(w.at("colatitude").get<double>(), w.value("azimuth", 0.0), radius, role);
  }
  throw ConfigError("window needs a center or a colatitude");
}

}  // namespace

WindowConfig config_from_json(const json& j) {
  try {
    WindowConfig cfg;
    cfg.domain = parse_domain(j.at("domain"));
    cfg.current = j.value("current", 1.0);
    cfg.diffusion = j.value("diffusion", 1.0);
    for (const auto& w : j.at("windows")) cfg.windows.push_back(parse_window(w, cfg.domain));
    return cfg;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
}

json config_to_json(const WindowConfig& cfg) {
  json d;
  switch (cfg.domain.kind) {
    case DomainKind::unit_sphere:
      d = {{"type", "sphere"}, {"R", 1.0}};
      break;
    case DomainKind::sphere:
      d = {{"type", "sphere"}, {"R", cfg.domain.radius}};
      break;
    case DomainKind::half_space:
      d = {{"type", "half_space"}};
      break;
  }
  json windows = json::array();
  for (const auto& w : cfg.windows) {
    windows.push_back({{"center", {w.center.x(), w.center.y(), w.center.z()}},
                       {"radius", w.radius},
                       {"role", std::string(to_string(w.role))}});
  }
  return {{"domain", d}, {"current", cfg.current}, {"diffusion", cfg.diffusion}, {"windows", windows}};
}

WindowConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file " + path.string());
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void save_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot write " + path.string());
  out << j.dump(2) << '\n';
  if (!out) throw IoError("write failed for " + path.string());
}

}  // namespace narrowflux
