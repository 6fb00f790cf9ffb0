#include "perifract/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>

#include "perifract/errors.hpp"

namespace perifract {

namespace {

int commensurate_count(double length, double h, const char* what) {
  const double ratio = length / h;
  const double n = std::round(ratio);
  if (n < 1.0 || std::abs(ratio - n) > 1e-9 * std::max(1.0, ratio)) {
    throw SpecError(std::string("grid spacing does not divide ") + what);
  }
  return static_cast<int>(n);
}

bool segment_meets_open_box(const Vec2& p, const Vec2& q, double x_lo, double x_hi, double y_lo,
                            double y_hi) {
  if (!(x_lo < x_hi) || !(y_lo < y_hi)) return false;
  double t_enter = 0.0;
  double t_exit = 1.0;
  const double lo[2] = {x_lo, y_lo};
  const double hi[2] = {x_hi, y_hi};
  const double origin[2] = {p.x, p.y};
  const double dir[2] = {q.x - p.x, q.y - p.y};
  for (int axis = 0; axis < 2; ++axis) {
    if (dir[axis] == 0.0) {
      if (!(origin[axis] > lo[axis] && origin[axis] < hi[axis])) return false;
      continue;
    }
    double t1 = (lo[axis] - origin[axis]) / dir[axis];
    double t2 = (hi[axis] - origin[axis]) / dir[axis];
    if (t1 > t2) std::swap(t1, t2);
    t_enter = std::max(t_enter, t1);
    t_exit = std::min(t_exit, t2);
  }
  return t_enter < t_exit;
}

bool segment_meets_open_disk(const Vec2& p, const Vec2& q, const Vec2& center, double radius) {
  if (!(radius > 0.0)) return false;
  const Vec2 dir = q - p;
  const double len2 = dot(dir, dir);
  double t = 0.0;
  if (len2 > 0.0) t = std::clamp(dot(center - p, dir) / len2, 0.0, 1.0);
  const Vec2 closest = p + t * dir;
  const Vec2 r = closest - center;
  return dot(r, r) < radius * radius;
}

}  // namespace

void DomainSpec::validate() const {
  if (!(a > 0.0) || !(b > 0.0)) throw SpecError("domain extents must be positive");
  if (!(epsilon > 0.0)) throw SpecError("horizon must be positive");
  if (h_ratio < 2) throw SpecError("h_ratio must be an integer >= 2");
  if (!(ell0 >= 0.0) || !(ell0 < a)) throw SpecError("notch length must satisfy 0 <= ell0 < a");
  if (!(d >= 0.0) || d > epsilon * (1.0 + 1e-12)) {
    throw SpecError("notch half-width must satisfy 0 <= d <= epsilon");
  }
  if (!(delta > 0.0) || !(delta < 0.5 * b)) throw SpecError("layer thickness must satisfy 0 < delta < b/2");
  if (n_sub < 1) throw SpecError("n_sub must be >= 1");
}

bool inside_notch(const Vec2& p, const DomainSpec& spec) {
  if (!(spec.ell0 > 0.0) || !(spec.d > 0.0)) return false;
  if (!(std::abs(p.y) < spec.d)) return false;
  const double tip = spec.ell0 - spec.d + std::sqrt(spec.d * spec.d - p.y * p.y);
  return p.x < tip;
}

Grid build_grid(const DomainSpec& spec) {
  spec.validate();
  Grid g;
  g.spec = spec;
  g.h = spec.h();
  g.nx = commensurate_count(spec.a, g.h, "the plate width a");
  g.ny = commensurate_count(spec.b, g.h, "the plate height b");
  g.node_volume = g.h * g.h;
  g.lattice_to_node.assign(static_cast<std::size_t>(g.nx) * g.ny, -1);

  const double top_edge = 0.5 * spec.b - spec.delta;
  for (int cy = 0; cy < g.ny; ++cy) {
    const double x2 = g.x2_of_row(cy);
    for (int cx = 0; cx < g.nx; ++cx) {
      const Vec2 p{g.x1_of_column(cx), x2};
      if (inside_notch(p, spec)) continue;
      g.lattice_to_node[static_cast<std::size_t>(cy) * g.nx + cx] =
          static_cast<std::int32_t>(g.x.size());
      g.x.push_back(p);
      g.ix.push_back(cx);
      g.iy.push_back(cy);
      Layer layer = Layer::None;
      if (x2 > top_edge) {
        layer = Layer::Top;
      } else if (x2 < -top_edge) {
        layer = Layer::Bottom;
      }
      g.layer.push_back(layer);
    }
  }
  return g;
}

double cell_area_fraction(double offset_x, double offset_y, double radius, int n_sub) {
  if (n_sub < 1) throw DomainError("cell_area_fraction: n_sub must be >= 1");
  const double r2 = radius * radius;
  long inside = 0;
  for (int sy = 0; sy < n_sub; ++sy) {
    const double py = offset_y + (sy + 0.5) / n_sub - 0.5;
    for (int sx = 0; sx < n_sub; ++sx) {
      const double px = offset_x + (sx + 0.5) / n_sub - 0.5;
      if (px * px + py * py < r2) ++inside;
    }
  }
  return static_cast<double>(inside) / (static_cast<double>(n_sub) * n_sub);
}

Stencil build_stencil(const DomainSpec& spec) {
  const int m = spec.h_ratio;
  const double h = spec.h();
  Stencil st;
  auto push = [&](int dx, int dy) {
    StencilEntry en;
    en.dx = dx;
    en.dy = dy;
    const double r = std::sqrt(static_cast<double>(dx * dx + dy * dy));
    en.length = h * r;
    en.e = {dx / r, dy / r};
    // Depends on |dx|, |dy| only, so mirrored and reversed slots agree exactly.
    en.area_fraction = cell_area_fraction(std::abs(dx), std::abs(dy), m, spec.n_sub);
    en.weight = h * h * en.area_fraction;
    st.entries.push_back(en);
  };
  for (int dy = 0; dy < m; ++dy) {
    for (int dx = -m + 1; dx < m; ++dx) {
      if (dx * dx + dy * dy >= m * m) continue;
      if (dx == 0 && dy == 0) continue;
      st.group_begin.push_back(static_cast<int>(st.entries.size()));
      push(dx, dy);
      if (dy > 0) push(dx, -dy);
    }
  }
  st.group_begin.push_back(static_cast<int>(st.entries.size()));
  for (std::size_t k = 0; k < st.entries.size(); ++k) {
    for (std::size_t q = 0; q < st.entries.size(); ++q) {
      if (st.entries[q].dx == -st.entries[k].dx && st.entries[q].dy == -st.entries[k].dy) {
        st.entries[k].reverse = static_cast<int>(q);
        break;
      }
    }
  }
  return st;
}

BondTable::BondTable(Stencil stencil, std::size_t n_nodes)
    : stencil_(std::move(stencil)),
      n_nodes_(n_nodes),
      neighbor_(n_nodes * stencil_.size(), -1),
      state_(n_nodes * stencil_.size(), BondState::None) {}

BondView BondTable::bond(std::size_t i, std::size_t k) const {
  const StencilEntry& en = stencil_.entries[k];
  return {neighbor(i, k), en.length, en.e, en.weight, alive(i, k)};
}

std::size_t BondTable::count(BondState s) const {
  return static_cast<std::size_t>(std::count(state_.begin(), state_.end(), s));
}

BondTable build_bonds(const Grid& grid, const DomainSpec& spec) {
  BondTable table(build_stencil(spec), grid.size());
  const Stencil& st = table.stencil();
  auto& nbr = table.raw_neighbors();
  auto& state = table.raw_states();
  const std::size_t w = st.size();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < w; ++k) {
      const StencilEntry& en = st.entries[k];
      const std::int32_t j = grid.node_at(grid.ix[i] + en.dx, grid.iy[i] + en.dy);
      if (j < 0) continue;
      nbr[i * w + k] = j;
      state[i * w + k] =
          segment_crosses_notch(grid.x[i], grid.x[j], spec) ? BondState::None : BondState::Alive;
    }
  }
  return table;
}

bool segment_crosses_centerline(const Vec2& x, const Vec2& y, double lo, double hi) {
  if ((x.y > 0.0 && y.y > 0.0) || (x.y < 0.0 && y.y < 0.0)) return false;
  if (x.y == 0.0 && y.y == 0.0) {
    return std::max(std::min(x.x, y.x), lo) <= std::min(std::max(x.x, y.x), hi);
  }
  const double x1 = centerline_intersection(x, y);
  return lo <= x1 && x1 <= hi;
}

double centerline_intersection(const Vec2& x, const Vec2& y) {
  const double t = x.y / (x.y - y.y);
  return x.x + t * (y.x - x.x);
}

bool segment_crosses_notch(const Vec2& x, const Vec2& y, const DomainSpec& spec) {
  if (!(spec.ell0 > 0.0)) return false;
  if (segment_crosses_centerline(x, y, 0.0, spec.ell0)) return true;
  const double d = spec.d;
  if (!(d > 0.0)) return false;
  if (segment_meets_open_box(x, y, 0.0, spec.ell0 - d, -d, d)) return true;
  return segment_meets_open_disk(x, y, {spec.ell0 - d, 0.0}, d);
}

double LoadSchedule::ramp(double t) const {
  if (!(t_ramp > 0.0)) return t >= 0.0 ? 1.0 : 0.0;
  if (!(t > 0.0)) return 0.0;
  return std::min(t / t_ramp, 1.0);
}

void body_force(const Grid& grid, double t, const LoadSchedule& schedule, std::span<Vec2> out) {
  const double magnitude = schedule.f0 * schedule.ramp(t) / schedule.delta;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    switch (grid.layer[i]) {
      case Layer::Top:
        out[i] = {0.0, magnitude};
        break;
      case Layer::Bottom:
        out[i] = {0.0, -magnitude};
        break;
      case Layer::None:
        out[i] = {0.0, 0.0};
        break;
    }
  }
}

std::vector<Vec2> body_force(const Grid& grid, double t, const LoadSchedule& schedule) {
  std::vector<Vec2> out(grid.size());
  body_force(grid, t, schedule, out);
  return out;
}

}  // namespace perifract
