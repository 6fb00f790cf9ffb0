#include "perifract/output.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "perifract/config.hpp"
#include "perifract/errors.hpp"

namespace perifract {

namespace {

std::ofstream open_out(const std::filesystem::path& path) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

std::vector<double> split_numbers(const std::string& line, const std::filesystem::path& path) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cell, &used));
    } catch (const std::exception&) {
      throw std::runtime_error(path.string() + ": bad number '" + cell + "'");
    }
  }
  return out;
}

}  // namespace

void write_crack_tip_csv(const std::filesystem::path& path, std::span<const CrackTipSample> rows) {
  std::ofstream out = open_out(path);
  out << kCrackTipHeader << "\n";
  for (const CrackTipSample& r : rows) {
    out << format_double(r.t * 1e6) << ',' << format_double(r.ell) << ',' << format_double(r.V)
        << ',' << r.n_soft << ',' << r.n_failed << "\n";
  }
}

void write_energy_csv(const std::filesystem::path& path, std::span<const EnergyLedger> rows) {
  std::ofstream out = open_out(path);
  out << kEnergyHeader << "\n";
  for (const EnergyLedger& r : rows) {
    out << format_double(r.t * 1e6) << ',' << format_double(r.kinetic) << ','
        << format_double(r.potential) << ',' << format_double(r.external_work) << ','
        << format_double(r.dissipated) << ',' << format_double(r.residual) << "\n";
  }
}

void write_power_csv(const std::filesystem::path& path, std::span<const PowerBalanceSample> rows) {
  std::ofstream out = open_out(path);
  out << kPowerHeader << "\n";
  for (const PowerBalanceSample& r : rows) {
    out << format_double(r.t * 1e6) << ',' << format_double(r.dEdt) << ','
        << format_double(r.flux_advective) << ',' << format_double(r.flux_nonlocal) << ','
        << format_double(r.residual) << "\n";
  }
}

void write_field_csv(const std::filesystem::path& path, const Grid& grid, std::span<const Vec2> u,
                     std::span<const std::uint8_t> soft) {
  std::ofstream out = open_out(path);
  out << kFieldHeader << "\n";
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(grid.x[i].x) << ',' << format_double(grid.x[i].y) << ','
        << format_double(u[i].x) << ',' << format_double(u[i].y) << ',' << int(soft[i]) << "\n";
  }
}

FieldFrame read_field_csv(const std::filesystem::path& path) {
  FieldFrame f;
  for (const std::vector<double>& row : read_csv(path, kFieldHeader)) {
    if (row.size() != 5) throw std::runtime_error(path.string() + ": expected 5 columns");
    f.x.push_back({row[0], row[1]});
    f.u.push_back({row[2], row[3]});
    f.soft.push_back(row[4] != 0.0 ? 1 : 0);
  }
  return f;
}

std::vector<double> damage_field(const BondTable& bonds) {
  std::vector<double> d(bonds.nodes(), 0.0);
  for (std::size_t i = 0; i < bonds.nodes(); ++i) {
    int present = 0;
    int broken = 0;
    for (BondState s : bonds.states_of(i)) {
      if (s == BondState::None) continue;
      ++present;
      if (s != BondState::Alive) ++broken;
    }
    d[i] = present ? static_cast<double>(broken) / present : 0.0;
  }
  return d;
}

void write_vtk(const std::filesystem::path& path, const Grid& grid, std::span<const Vec2> u,
               std::span<const double> damage, double t) {
  std::ofstream out = open_out(path);
  const std::size_t n = grid.size();
  out << "# vtk DataFile Version 3.0\n"
      << "perifract t_us=" << format_double(t * 1e6) << "\n"
      << "ASCII\nDATASET POLYDATA\n"
      << "POINTS " << n << " double\n";
  for (const Vec2& x : grid.x) out << format_double(x.x) << ' ' << format_double(x.y) << " 0\n";
  out << "VERTICES " << n << ' ' << 2 * n << "\n";
  for (std::size_t i = 0; i < n; ++i) out << "1 " << i << "\n";
  out << "POINT_DATA " << n << "\n"
      << "VECTORS displacement double\n";
  for (const Vec2& v : u) out << format_double(v.x) << ' ' << format_double(v.y) << " 0\n";
  out << "SCALARS damage double 1\nLOOKUP_TABLE default\n";
  for (double d : damage) out << format_double(d) << "\n";
}

std::vector<std::vector<double>> read_csv(const std::filesystem::path& path,
                                          const std::string& expected_header) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path.string());
  std::string line;
  if (!std::getline(in, line) || line != expected_header) {
    throw std::runtime_error(path.string() + ": unexpected header");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    rows.push_back(split_numbers(line, path));
  }
  return rows;
}

std::vector<Vec2> read_node_vectors(const std::filesystem::path& path, std::size_t n) {
  std::ifstream in(path);
  if (!in) throw ConfigError("init", "cannot read initial field '" + path.string() + "'");
  std::string line;
  std::getline(in, line);
  std::vector<Vec2> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const std::vector<double> row = split_numbers(line, path);
    if (row.size() != 2) throw ConfigError("init", path.string() + ": expected two columns per row");
    out.push_back({row[0], row[1]});
  }
  if (out.size() != n) {
    throw ConfigError("init", path.string() + ": has " + std::to_string(out.size()) +
                                  " rows, grid has " + std::to_string(n) + " nodes");
  }
  return out;
}

}  // namespace perifract
