#include <doctest.h>

#include <fstream>
#include <sstream>

#include "perifract/errors.hpp"
#include "perifract/output.hpp"
#include "support.hpp"

using namespace perifract;
namespace fs = std::filesystem;

namespace {

std::string first_line(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  return line;
}

}  // namespace

TEST_CASE("csv headers are exact") {
  const fs::path dir = test_support::scratch("headers");
  write_crack_tip_csv(dir / "tip.csv", {});
  write_energy_csv(dir / "energy.csv", {});
  write_power_csv(dir / "power.csv", {});
  CHECK(first_line(dir / "tip.csv") == "t_us,ell_m,V_mps,n_soft,n_failed");
  CHECK(first_line(dir / "energy.csv") == "t_us,kinetic_J,potential_J,external_work_J,dissipated_J,residual_J");
  CHECK(first_line(dir / "power.csv") == "t_us,dEdt_W,flux_adv_W,flux_nonlocal_W,residual_W");
}

TEST_CASE("crack tip rows") {
  const fs::path dir = test_support::scratch("tip_rows");
  const std::vector<CrackTipSample> rows = {{1e-6, 0.0125, 0.0, 3, 0}, {2e-6, 0.013, 250.5, 40, 12}};
  write_crack_tip_csv(dir / "tip.csv", rows);
  const auto back = read_csv(dir / "tip.csv", kCrackTipHeader);
  REQUIRE(back.size() == 2);
  CHECK(back[1][0] == test_support::approx(2.0));
  CHECK(back[1][1] == 0.013);
  CHECK(back[1][2] == 250.5);
  CHECK(back[1][3] == 40);
  CHECK(back[1][4] == 12);
  CHECK_THROWS(read_csv(dir / "tip.csv", kEnergyHeader));
  CHECK_THROWS(read_csv(dir / "missing.csv", kEnergyHeader));
}

TEST_CASE("field csv round trip is exact") {
  const DomainSpec spec = test_support::small_spec();
  const Grid g = build_grid(spec);
  std::vector<Vec2> u(g.size());
  std::vector<std::uint8_t> soft(g.size(), 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    u[i] = {std::sin(1.0 + i) * 1e-5, std::cos(0.3 * i) / 3.0 * 1e-6};
    soft[i] = i % 5 == 0;
  }
  const fs::path dir = test_support::scratch("field");
  write_field_csv(dir / "f.csv", g, u, soft);
  CHECK(first_line(dir / "f.csv") == "x1,x2,u1,u2,sz");
  const FieldFrame f = read_field_csv(dir / "f.csv");
  REQUIRE(f.x.size() == g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(f.x[i] == g.x[i]);
    CHECK(f.u[i] == u[i]);
    CHECK(f.soft[i] == soft[i]);
  }
}

TEST_CASE("damage field") {
  const DomainSpec spec = test_support::small_spec();
  const Grid g = build_grid(spec);
  BondTable bonds = build_bonds(g, spec);
  for (double d : damage_field(bonds)) CHECK(d == 0.0);
  const std::size_t i = g.node_at(g.nx / 2, g.ny / 2);
  std::size_t present = 0;
  for (std::size_t k = 0; k < bonds.width(); ++k) present += bonds.state(i, k) != BondState::None;
  for (std::size_t k = 0; k < 3; ++k) {
    REQUIRE(bonds.alive(i, k));
    bonds.set_state(i, k, BondState::Broken);
  }
  CHECK(damage_field(bonds)[i] == test_support::approx(3.0 / present));
}

TEST_CASE("legacy vtk polydata") {
  const DomainSpec spec = test_support::small_spec();
  const Grid g = build_grid(spec);
  const BondTable bonds = build_bonds(g, spec);
  const std::vector<Vec2> u(g.size(), Vec2{1e-6, -2e-6});
  const fs::path dir = test_support::scratch("vtk");
  write_vtk(dir / "s.vtk", g, u, damage_field(bonds), 5e-6);
  std::ifstream in(dir / "s.vtk");
  std::vector<std::string> lines;
  for (std::string l; std::getline(in, l);) lines.push_back(l);
  const std::size_t n = g.size();
  REQUIRE(lines.size() == 4 + 1 + n + 1 + n + 2 + n + 2 + n);
  CHECK(lines[0] == "# vtk DataFile Version 3.0");
  CHECK(lines[1] == "perifract t_us=5");
  CHECK(lines[2] == "ASCII");
  CHECK(lines[3] == "DATASET POLYDATA");
  CHECK(lines[4] == "POINTS " + std::to_string(n) + " double");
  CHECK(lines[5 + n] == "VERTICES " + std::to_string(n) + " " + std::to_string(2 * n));
  CHECK(lines[6 + 2 * n] == "POINT_DATA " + std::to_string(n));
  CHECK(lines[7 + 2 * n] == "VECTORS displacement double");
  CHECK(lines[8 + 2 * n] == "9.9999999999999995e-07 -1.9999999999999999e-06 0");
  CHECK(lines[8 + 3 * n] == "SCALARS damage double 1");
}

TEST_CASE("initial field files") {
  const fs::path dir = test_support::scratch("init");
  std::ofstream(dir / "u0.csv") << "u1,u2\n1e-6,2e-6\n3e-6,-4e-6\n";
  const std::vector<Vec2> v = read_node_vectors(dir / "u0.csv", 2);
  CHECK(v[1] == Vec2{3e-6, -4e-6});
  CHECK_THROWS_AS(read_node_vectors(dir / "u0.csv", 3), ConfigError);
  CHECK_THROWS_AS(read_node_vectors(dir / "nope.csv", 3), ConfigError);
}
