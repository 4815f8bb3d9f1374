#pragma once

#include <string>

#include <json.hpp>

#include "hiermc/selection.hpp"

namespace hiermc {

nlohmann::json report_to_json(const FitReport& report);
FitReport report_from_json(const nlohmann::json& j);

void write_report_json(const FitReport& report, const std::string& path);
FitReport read_report_json(const std::string& path);

}  // namespace hiermc
