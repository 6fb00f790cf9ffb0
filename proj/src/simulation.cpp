#include "perifract/simulation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>

#include <nlohmann/json.hpp>
#include <omp.h>

#include "perifract/output.hpp"

namespace perifract {

namespace {

std::vector<Vec2> initial_field(const std::string& spec, std::size_t n) {
  if (spec == "zero") return std::vector<Vec2>(n);
  return read_node_vectors(spec, n);
}

std::string step_name(const char* prefix, long step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06ld.%s", prefix, step, ext);
  return buf;
}

nlohmann::json optional_json(const std::optional<double>& v) {
  return v ? nlohmann::json(*v) : nlohmann::json(nullptr);
}

}  // namespace

RunResult run_simulation(const RunConfig& config, bool write_files) {
  if (config.threads > 0) omp_set_num_threads(config.threads);
  const std::filesystem::path dir = config.output_dir;

  const MaterialModel model = config.material_model();
  const Grid grid = build_grid(config.domain);
  BondTable bonds = build_bonds(grid, config.domain);
  const double eps = config.domain.epsilon;
  const double ell0 = config.domain.ell0;

  RunResult res;
  res.nodes = grid.size();
  res.gc_effective = gc_closed_form(model);

  Stepper stepper(grid, bonds, model, config.load, config.time,
                  initial_field(config.init_u0, grid.size()),
                  initial_field(config.init_v0, grid.size()));
  const KernelTable& kernel = stepper.kernel();
  CrackTracker tracker(grid, ell0);
  PowerBalanceTracker power(grid, bonds, kernel, model, config.box_half_widths());

  if (write_files) {
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "config.ini", std::ios::binary) << echo_config(config);
  }

  long frame_index = 0;
  double drift_num = 0.0;
  double drift_den = 0.0;

  const auto on_frame = [&](const SimState& s) {
    const SofteningReport sz = softening_zone(s.u, grid, bonds, kernel, tracker.ell(), 2.0 * eps);
    CrackTipSample tip;
    tip.t = s.t;
    tip.ell = tracker.ell();
    tip.n_soft = sz.soft.size();
    tip.n_failed = sz.failed.size();
    res.tips.push_back(tip);

    const EnergyLedger e = energy_ledger(s, grid, bonds, kernel, model);
    res.energy.push_back(e);
    if (stepper.ledger().empty()) {
      drift_num = std::max(drift_num, std::abs(e.residual));
      drift_den = std::max({drift_den, e.kinetic + e.potential, std::abs(e.external_work)});
    }

    power.observe_frame(s, tracker.ell(), !stepper.ledger().empty());

    res.symmetry_max_dev = std::max(res.symmetry_max_dev, mode_one_symmetry_deviation(s.u, grid));
    res.hypothesis2_all = res.hypothesis2_all && sz.soft_within_failed_or_front;
    res.strain_violation_max =
        std::max(res.strain_violation_max, strain_bound_violation(s.u, grid, bonds, kernel));
    if (tracker.ell() > ell0 + eps) {
      const OpeningCount oc = opening_direction(s.u, grid, ell0, tracker.ell());
      res.opening.checked += oc.checked;
      res.opening.opening += oc.opening;
    }
    double l2 = 0.0;
    for (const Vec2& u : s.u) l2 += dot(u, u);
    res.max_u_l2 = std::max(res.max_u_l2, std::sqrt(l2 * grid.node_volume));

    if (write_files && config.field_every > 0 && frame_index % config.field_every == 0) {
      std::vector<std::uint8_t> soft(grid.size(), 0);
      for (std::int32_t i : sz.soft) soft[i] = 1;
      write_field_csv(dir / "fields" / step_name("u", s.step, "csv"), grid, s.u, soft);
    }
    if (write_files && config.write_vtk) {
      write_vtk(dir / "snapshots" / step_name("u", s.step, "vtk"), grid, s.u, damage_field(bonds),
                s.t);
    }
    ++frame_index;
  };

  tracker.add(stepper.state().broken_this_step);
  power.observe_step(stepper.state());
  on_frame(stepper.state());
  while (!stepper.done()) {
    stepper.step();
    const SimState& s = stepper.state();
    tracker.add(s.broken_this_step);
    if (res.first_break_step < 0 && !stepper.ledger().empty()) res.first_break_step = s.step;
    power.observe_step(s);
    if (s.step % config.time.output_every == 0) on_frame(s);
  }
  res.steps = stepper.state().step;
  res.prefailure_drift = drift_den > 0.0 ? drift_num / drift_den : 0.0;

  smooth_tip_velocity(res.tips, config.tip_window);
  res.power = power.samples();
  res.kinetic = kinetic_relation_report(res.tips, res.power, res.gc_effective);

  double pre_res = 0.0;
  double pre_flux = 0.0;
  bool any_pre = false;
  for (const PowerBalanceSample& p : res.power) {
    if (p.cracked) continue;
    any_pre = true;
    pre_res = std::max(pre_res, std::abs(p.residual));
    pre_flux = std::max({pre_flux, std::abs(p.dEdt), std::abs(p.flux_advective),
                         std::abs(p.flux_nonlocal)});
  }
  if (any_pre && pre_flux > 0.0) res.power_precrack_ratio = pre_res / pre_flux;

  std::vector<double> adv;
  for (std::size_t k = res.kinetic.steady_begin; k < res.kinetic.steady_end; ++k) {
    const KineticRow& row = res.kinetic.rows[k];
    const auto it = std::find_if(res.power.begin(), res.power.end(),
                                 [&](const PowerBalanceSample& p) { return p.t == row.t; });
    if (it != res.power.end() && row.GcV > 0.0) adv.push_back(it->flux_advective / -row.GcV);
  }
  if (!adv.empty()) res.advective_ratio_median = median(adv);

  if (write_files) {
    write_crack_tip_csv(dir / "crack_tip.csv", res.tips);
    write_energy_csv(dir / "energy.csv", res.energy);
    write_power_csv(dir / "power.csv", res.power);
    write_summary_json(dir / "summary.json", config, res);
  }
  return res;
}

void write_summary_json(const std::filesystem::path& path, const RunConfig& config,
                        const RunResult& r) {
  nlohmann::json j;
  j["epsilon"] = config.domain.epsilon;
  j["nodes"] = r.nodes;
  j["steps"] = r.steps;
  j["gc_effective"] = r.gc_effective;
  j["final_ell_m"] = r.tips.empty() ? config.domain.ell0 : r.tips.back().ell;
  j["crack_growth_m"] = r.tips.empty() ? 0.0 : r.tips.back().ell - config.domain.ell0;
  j["n_failed_final"] = r.tips.empty() ? 0 : r.tips.back().n_failed;
  j["first_break_step"] = r.first_break_step;
  j["symmetry_max_dev"] = r.symmetry_max_dev;
  j["opening_checked"] = r.opening.checked;
  j["opening_fraction"] =
      r.opening.checked ? nlohmann::json(double(r.opening.opening) / double(r.opening.checked))
                        : nlohmann::json(nullptr);
  j["hypothesis2_all_frames"] = r.hypothesis2_all;
  j["strain_bound_violation_max"] = r.strain_violation_max;
  j["prefailure_energy_drift"] = r.prefailure_drift;
  j["max_u_l2"] = r.max_u_l2;
  j["power_precrack_ratio"] = optional_json(r.power_precrack_ratio);
  j["advective_ratio_median"] = optional_json(r.advective_ratio_median);
  j["kinetic_ratio_median"] = optional_json(r.kinetic.median_ratio);
  j["steady_frames"] = r.kinetic.steady_end - r.kinetic.steady_begin;
  std::ofstream(path, std::ios::binary) << j.dump(2) << "\n";
}

}  // namespace perifract
