#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "narrowflux/geometry.hpp"

namespace narrowflux {

// JSON layout:
//   {"domain": {"type": "sphere", "R": 1.0}, "current": 1.0, "diffusion": 1.0,
//    "windows": [{"center": [0, 0, 1], "radius": 0.05, "role": "influx"}, ...]}
// Sphere windows may give "colatitude"/"azimuth" (radians) instead of "center".
WindowConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const WindowConfig& cfg);

WindowConfig load_config(const std::filesystem::path& path);
void save_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace narrowflux
