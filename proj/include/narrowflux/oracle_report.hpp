#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace narrowflux {

/// Signed percent error 100·(asym − num)/num. Throws DivisionByZero when num is 0.
double relative_error(double asym, double num);

struct OracleReport {
  std::string case_name;
  double eps = 0.0;
  double asymptotic = 0.0;
  double numeric = 0.0;
  double relative_error_percent = 0.0;
  std::optional<double> stderr_value;  // Monte Carlo rows only

  static OracleReport make(std::string case_name, double eps, double asym, double num,
                           std::optional<double> stderr_value = std::nullopt);
  nlohmann::json to_json() const;
};

nlohmann::json to_json(const std::vector<OracleReport>& rows);

}  // namespace narrowflux
