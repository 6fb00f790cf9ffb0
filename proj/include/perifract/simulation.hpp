#pragma once

#include <filesystem>
#include <optional>
#include <vector>

#include "perifract/config.hpp"
#include "perifract/diagnostics.hpp"

namespace perifract {

struct RunResult {
  std::size_t nodes = 0;
  long steps = 0;
  double gc_effective = 0.0;  // closed-form toughness of the calibrated potential

  std::vector<CrackTipSample> tips;
  std::vector<EnergyLedger> energy;
  std::vector<PowerBalanceSample> power;
  KineticReport kinetic;

  double symmetry_max_dev = 0.0;
  OpeningCount opening;            // accumulated over frames with a growing crack
  double strain_violation_max = 0.0;
  bool hypothesis2_all = true;
  double prefailure_drift = 0.0;    // max |residual| / max(E, W_ext) before the first break
  long first_break_step = -1;
  double max_u_l2 = 0.0;

  // Pre-crack power balance: max |residual| over max |flux term|.
  std::optional<double> power_precrack_ratio;
  // Median of flux_adv / (-Gc V) over the steady window.
  std::optional<double> advective_ratio_median;
};

// Runs one configuration. When `write_files` is set the bundle goes to
// config.output_dir: config.ini, crack_tip.csv, energy.csv, power.csv,
// summary.json and, on request, fields/ and snapshots/.
RunResult run_simulation(const RunConfig& config, bool write_files = true);

void write_summary_json(const std::filesystem::path& path, const RunConfig& config,
                        const RunResult& result);

}  // namespace perifract
