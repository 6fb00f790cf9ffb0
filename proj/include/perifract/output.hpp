#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "perifract/diagnostics.hpp"
#include "perifract/geometry.hpp"
#include "perifract/vec2.hpp"

namespace perifract {

inline constexpr const char* kCrackTipHeader = "t_us,ell_m,V_mps,n_soft,n_failed";
inline constexpr const char* kEnergyHeader =
    "t_us,kinetic_J,potential_J,external_work_J,dissipated_J,residual_J";
inline constexpr const char* kPowerHeader = "t_us,dEdt_W,flux_adv_W,flux_nonlocal_W,residual_W";
inline constexpr const char* kFieldHeader = "x1,x2,u1,u2,sz";

void write_crack_tip_csv(const std::filesystem::path& path, std::span<const CrackTipSample> rows);
void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyLedger> rows);
void write_power_csv(const std::filesystem::path& path, std::span<const PowerBalanceSample> rows);

struct FieldFrame {
  std::vector<Vec2> x;
  std::vector<Vec2> u;
  std::vector<std::uint8_t> soft;
};

void write_field_csv(const std::filesystem::path& path, const Grid& grid, std::span<const Vec2> u,
                     std::span<const std::uint8_t> soft);
FieldFrame read_field_csv(const std::filesystem::path& path);

// Broken bonds over bonds present at t = 0, per node.
std::vector<double> damage_field(const BondTable& bonds);

// Legacy ASCII POLYDATA with displacement vectors and the damage scalar.
void write_vtk(const std::filesystem::path& path, const Grid& grid, std::span<const Vec2> u,
               std::span<const double> damage, double t);

// Reads rows of a numeric CSV with the given header.
std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          const std::string& expected_header);

// Per-node vectors from a CSV with one "a,b" row per node after a header line.
std::vector<Vec2> read_node_vectors(const std::filesystem::path& path, std::size_t n);

}  // namespace perifract
