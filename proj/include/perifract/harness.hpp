#pragma once

#include <filesystem>
#include <vector>

#include <nlohmann/json.hpp>

#include "perifract/config.hpp"

namespace perifract {

// Scaled-down notched plate: 0.05 x 0.075 m, 140 us, two horizons.
RunConfig desk_scale_preset();
std::vector<double> desk_scale_epsilons();

// Runs `base` once per horizon (sorted descending) under root/eps<k>_<epsilon>,
// records the outcome in root/study.json and builds the comparison report.
// A failed sub-run is recorded and the remaining horizons still run.
nlohmann::json run_convergence_study(const RunConfig& base, const std::vector<double>& epsilons,
                                     const std::filesystem::path& root);

// Rebuilds report.json, tip_comparison.csv and l2_differences.csv from the
// files stored under root; repeated calls give identical bytes.
nlohmann::json build_report(const std::filesystem::path& root);

}  // namespace perifract
