#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "perifract/dynamics.hpp"
#include "perifract/geometry.hpp"
#include "perifract/material.hpp"

namespace perifract {

struct MaterialConfig {
  double E = 3.24e9;   // Pa
  double Gc = 500.0;   // J/m^2
  double rho = 1200.0;  // kg/m^3
  double nu = 0.25;
  CalibrationMode calibration = CalibrationMode::SelfConsistent;
  std::optional<double> c;     // only with calibration = paper
  std::optional<double> beta;

  bool operator==(const MaterialConfig&) const = default;
};

struct RunConfig {
  MaterialConfig material;
  DomainSpec domain;
  bool d_auto = true;      // notch half-width follows epsilon
  bool delta_auto = true;  // layer thickness follows epsilon
  LoadSchedule load;
  int gauss_order = 64;
  StepperConfig time;
  std::string init_u0 = "zero";
  std::string init_v0 = "zero";
  std::string output_dir = "perifract_out";
  bool write_vtk = false;
  std::uint64_t seed = 20240601;
  int field_every = 0;  // output frames between field CSVs; 0 disables
  int threads = 0;      // 0 = runtime default
  std::optional<double> box_half_x;  // m; default 4 epsilon
  std::optional<double> box_half_y;
  int tip_window = 5;

  std::vector<std::string> warnings;

  // Applies the epsilon-following defaults and keeps load.delta in step.
  void resolve();
  void validate() const;
  MaterialModel material_model() const;
  Vec2 box_half_widths() const;

  bool operator==(const RunConfig& o) const;
};

RunConfig parse_config_string(const std::string& text);
RunConfig parse_config(const std::string& path);

// Every key with its resolved value; parse_config_string(echo) == config.
std::string echo_config(const RunConfig& config);

std::string format_double(double v);

}  // namespace perifract
