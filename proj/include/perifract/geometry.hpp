#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perifract/vec2.hpp"

namespace perifract {

// Notched rectangle R = (0, a) x (-b/2, b/2) with a slot of half-width d and
// length ell0 (circular tip) entering from x1 = 0.
struct DomainSpec {
  double a = 0.1;
  double b = 0.3;
  double ell0 = 0.025;
  double d = 2.5e-3;
  double epsilon = 2.5e-3;
  int h_ratio = 4;
  double delta = 2.5e-3;  // body-force layer thickness
  int n_sub = 8;          // subsamples per axis for the area correction

  double h() const { return epsilon / h_ratio; }
  void validate() const;
};

enum class Layer : std::uint8_t { None = 0, Top = 1, Bottom = 2 };

struct Grid {
  DomainSpec spec;
  double h = 0.0;
  int nx = 0;  // lattice columns along x1
  int ny = 0;  // lattice rows along x2
  double node_volume = 0.0;

  std::vector<Vec2> x;              // active node positions, row-major (x2 then x1)
  std::vector<std::int32_t> ix;     // lattice column per node
  std::vector<std::int32_t> iy;     // lattice row per node
  std::vector<Layer> layer;         // body-force layer membership
  std::vector<std::int32_t> lattice_to_node;  // nx*ny, -1 inside the notch

  std::size_t size() const { return x.size(); }
  // Node id at lattice cell (cx, cy); -1 outside the lattice or inside the notch.
  std::int32_t node_at(int cx, int cy) const {
    if (cx < 0 || cy < 0 || cx >= nx || cy >= ny) return -1;
    return lattice_to_node[static_cast<std::size_t>(cy) * nx + cx];
  }
  double x1_of_column(int cx) const { return (cx + 0.5) * h; }
  // Row coordinates are exact mirror images about x2 = 0.
  double x2_of_row(int cy) const { return (cy - 0.5 * (ny - 1)) * h; }
};

// Open notch slot test (points on the slot boundary belong to the domain).
bool inside_notch(const Vec2& p, const DomainSpec& spec);

Grid build_grid(const DomainSpec& spec);

// Fraction of the square cell of side 1 centered at `offset` (lattice units)
// lying inside the disk of radius `radius` about the origin, by n_sub x n_sub
// midpoint subsampling.
double cell_area_fraction(double offset_x, double offset_y, double radius, int n_sub);

struct StencilEntry {
  int dx = 0;
  int dy = 0;
  double length = 0.0;    // rest length, m
  Vec2 e;                 // unit direction from node to neighbor
  double area_fraction = 0.0;
  double weight = 0.0;    // V_j * area_fraction, m^2
  int reverse = -1;       // slot index of (-dx, -dy)
};

// Lattice offsets strictly inside the horizon, arranged in groups so that each
// group holds an offset and its mirror image across x2 = 0; group g spans
// entries [group_begin[g], group_begin[g+1]).
struct Stencil {
  std::vector<StencilEntry> entries;
  std::vector<int> group_begin;

  std::size_t size() const { return entries.size(); }
  std::size_t groups() const { return group_begin.size() - 1; }
};

Stencil build_stencil(const DomainSpec& spec);

enum class BondState : std::uint8_t {
  None = 0,     // no neighbor in this slot, or the segment crosses the notch
  Alive = 1,
  Broken = 2,   // failed irreversibly
  Breaking = 3  // failed during the current step, not yet merged into the ledger
};

struct BondView {
  std::int32_t j;
  double rest_length;
  Vec2 e;
  double weight;
  bool alive;
};

// Per-node fixed-width neighbor table in stencil order.
class BondTable {
 public:
  BondTable() = default;
  BondTable(Stencil stencil, std::size_t n_nodes);

  const Stencil& stencil() const { return stencil_; }
  std::size_t nodes() const { return n_nodes_; }
  std::size_t width() const { return stencil_.size(); }

  std::int32_t neighbor(std::size_t i, std::size_t k) const { return neighbor_[i * width() + k]; }
  BondState state(std::size_t i, std::size_t k) const { return state_[i * width() + k]; }
  void set_state(std::size_t i, std::size_t k, BondState s) { state_[i * width() + k] = s; }
  bool alive(std::size_t i, std::size_t k) const { return state(i, k) == BondState::Alive; }
  BondView bond(std::size_t i, std::size_t k) const;

  std::span<const std::int32_t> neighbors_of(std::size_t i) const {
    return {neighbor_.data() + i * width(), width()};
  }
  std::span<const BondState> states_of(std::size_t i) const {
    return {state_.data() + i * width(), width()};
  }
  std::span<BondState> states_of(std::size_t i) { return {state_.data() + i * width(), width()}; }

  std::vector<std::int32_t>& raw_neighbors() { return neighbor_; }
  std::vector<BondState>& raw_states() { return state_; }
  const std::vector<BondState>& raw_states() const { return state_; }

  std::size_t count(BondState s) const;

 private:
  Stencil stencil_;
  std::size_t n_nodes_ = 0;
  std::vector<std::int32_t> neighbor_;
  std::vector<BondState> state_;
};

BondTable build_bonds(const Grid& grid, const DomainSpec& spec);

// Segment [x, y] meets the notch: the open slot, or the closed centerline
// {0 <= x1 <= ell0, x2 = 0}.
bool segment_crosses_notch(const Vec2& x, const Vec2& y, const DomainSpec& spec);

// Segment [x, y] meets the closed interval {lo <= x1 <= hi, x2 = 0}.
bool segment_crosses_centerline(const Vec2& x, const Vec2& y, double lo, double hi);

// Abscissa where the segment crosses x2 = 0; requires endpoints on opposite sides.
double centerline_intersection(const Vec2& x, const Vec2& y);

struct LoadSchedule {
  double f0 = 3.5e6;         // plateau traction, Pa
  double t_ramp = 350e-6;    // s; 0 applies the full load from t = 0
  double delta = 2.5e-3;     // layer thickness, m

  double ramp(double t) const;
};

// Body force density on each node: +-f0 ramp(t) / delta e2 in the top/bottom layers.
std::vector<Vec2> body_force(const Grid& grid, double t, const LoadSchedule& schedule);
void body_force(const Grid& grid, double t, const LoadSchedule& schedule, std::span<Vec2> out);

}  // namespace perifract
