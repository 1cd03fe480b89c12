#include "narrowflux/oracle_report.hpp"

#include <utility>

#include "narrowflux/errors.hpp"

namespace narrowflux {

double relative_error(double asym, double num) {
  if (num == 0.0) throw DivisionByZero("relative_error: numeric value is zero");
  return 100.0 * (asym - num) / num;
}

OracleReport OracleReport::make(std::string case_name, double eps, double asym, double num,
                                std::optional<double> stderr_value) {
  return {std::move(case_name), eps, asym, num, relative_error(asym, num), stderr_value};
}

nlohmann::json OracleReport::to_json() const {
  nlohmann::json j = {{"case", case_name},
                      {"eps", eps},
                      {"asym", asymptotic},
                      {"num", numeric},
                      {"re_percent", relative_error_percent}};
  j["stderr"] = stderr_value ? nlohmann::json(*stderr_value) : nlohmann::json(nullptr);
  return j;
}

nlohmann::json to_json(const std::vector<OracleReport>& rows) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : rows) out.push_back(r.to_json());
  return out;
}

}  // namespace narrowflux
