#include <doctest.h>

#include <cmath>
#include <set>

#include "perifract/errors.hpp"
#include "perifract/geometry.hpp"
#include "support.hpp"

using namespace perifract;

TEST_CASE("default lattice has 160 x 480 cells") {
  const DomainSpec spec;
  const Grid g = build_grid(spec);
  CHECK(g.nx == 160);
  CHECK(g.ny == 480);
  CHECK(g.nx * g.ny == 76800);
  CHECK(g.size() < 76800u);
  CHECK(g.h == test_support::approx(6.25e-4));
  for (const Vec2& p : g.x) {
    CHECK(p.y > -0.5 * spec.b);
    CHECK(p.y < 0.5 * spec.b);
    CHECK(!inside_notch(p, spec));
  }
}

TEST_CASE("rows are exact mirror images") {
  const Grid g = build_grid(test_support::small_spec());
  for (int cy = 0; cy < g.ny; ++cy) CHECK(g.x2_of_row(cy) == -g.x2_of_row(g.ny - 1 - cy));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const std::int32_t m = g.node_at(g.ix[i], g.ny - 1 - g.iy[i]);
    REQUIRE(m >= 0);
    CHECK(g.x[m].x == g.x[i].x);
    CHECK(g.x[m].y == -g.x[i].y);
  }
}

TEST_CASE("zero-length notch keeps the full rectangle") {
  const DomainSpec spec = test_support::small_spec(0.0);
  const Grid g = build_grid(spec);
  CHECK(g.size() == static_cast<std::size_t>(g.nx * g.ny));
  const BondTable bonds = build_bonds(g, spec);
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      if (bonds.neighbor(i, k) >= 0) CHECK(bonds.state(i, k) == BondState::Alive);
    }
  }
  CHECK(bonds.count(BondState::Broken) == 0);
}

TEST_CASE("inconsistent specs are rejected") {
  DomainSpec s = test_support::small_spec();
  s.ell0 = s.a;
  CHECK_THROWS_AS(build_grid(s), SpecError);
  s = test_support::small_spec();
  s.a = 0.0201;
  CHECK_THROWS_AS(build_grid(s), SpecError);
  s = test_support::small_spec();
  s.d = 2 * s.epsilon;
  CHECK_THROWS_AS(build_grid(s), SpecError);
  s = test_support::small_spec();
  s.delta = 0.5 * s.b;
  CHECK_THROWS_AS(build_grid(s), SpecError);
}

TEST_CASE("cell area fraction") {
  CHECK(cell_area_fraction(0.0, 0.0, 4.0, 8) == 1.0);
  CHECK(cell_area_fraction(2.0, 1.0, 4.0, 8) == 1.0);
  CHECK(cell_area_fraction(6.0, 0.0, 4.0, 8) == 0.0);
  CHECK(std::abs(cell_area_fraction(4.0, 0.0, 4.0, 8) - 0.5) <= 2.0 / 64.0);
  CHECK(std::abs(cell_area_fraction(0.0, 4.0, 4.0, 8) - 0.5) <= 2.0 / 64.0);
  CHECK_THROWS_AS(cell_area_fraction(0.0, 0.0, 1.0, 0), DomainError);
}

TEST_CASE("stencil weights and the cut-off cells tile the horizon disk") {
  for (int ratio : {4, 8}) {
    DomainSpec spec;
    spec.h_ratio = ratio;
    const Stencil st = build_stencil(spec);
    const double h = spec.h();
    // own cell plus the partial cells whose centers lie on or beyond the horizon
    double rest = h * h * cell_area_fraction(0.0, 0.0, ratio, spec.n_sub);
    for (int dy = -ratio - 1; dy <= ratio + 1; ++dy) {
      for (int dx = -ratio - 1; dx <= ratio + 1; ++dx) {
        if (dx * dx + dy * dy >= ratio * ratio) rest += h * h * cell_area_fraction(dx, dy, ratio, spec.n_sub);
      }
    }
    double sum = rest;
    for (const StencilEntry& e : st.entries) {
      sum += e.weight;
      CHECK(e.area_fraction > 0.0);
      CHECK(e.area_fraction <= 1.0);
      CHECK(e.length < spec.epsilon);
      CHECK(!(e.dx == 0 && e.dy == 0));
    }
    const double disk = M_PI * spec.epsilon * spec.epsilon;
    CHECK(std::abs(sum - disk) / disk <= 0.01);
  }
}

TEST_CASE("stencil groups hold mirror pairs and reverse slots") {
  const Stencil st = build_stencil(DomainSpec{});
  REQUIRE(st.group_begin.front() == 0);
  REQUIRE(static_cast<std::size_t>(st.group_begin.back()) == st.size());
  std::set<std::pair<int, int>> seen;
  for (std::size_t g = 0; g < st.groups(); ++g) {
    const int b = st.group_begin[g];
    const int e = st.group_begin[g + 1];
    REQUIRE((e - b == 1 || e - b == 2));
    if (e - b == 2) {
      CHECK(st.entries[b].dx == st.entries[b + 1].dx);
      CHECK(st.entries[b].dy == -st.entries[b + 1].dy);
    } else {
      CHECK(st.entries[b].dy == 0);
    }
  }
  for (std::size_t k = 0; k < st.size(); ++k) {
    const StencilEntry& s = st.entries[k];
    CHECK(seen.insert({s.dx, s.dy}).second);
    const StencilEntry& r = st.entries[s.reverse];
    CHECK(r.dx == -s.dx);
    CHECK(r.dy == -s.dy);
    CHECK(r.weight == s.weight);
    CHECK(norm(s.e) == test_support::approx(1.0));
  }
}

TEST_CASE("bonds never cross the notch") {
  DomainSpec spec = test_support::small_spec();
  spec.d = 0.0;
  const Grid g = build_grid(spec);
  const BondTable bonds = build_bonds(g, spec);
  std::size_t cut = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      const std::int32_t j = bonds.neighbor(i, k);
      if (j < 0) continue;
      const bool crosses = segment_crosses_notch(g.x[i], g.x[j], spec);
      CHECK((bonds.state(i, k) == BondState::None) == crosses);
      if (crosses) ++cut;
      CHECK(bonds.state(j, bonds.stencil().entries[k].reverse) == bonds.state(i, k));
    }
  }
  CHECK(cut > 0);
}

TEST_CASE("notch crossing predicate") {
  DomainSpec spec;
  spec.ell0 = 0.025;
  const double h = spec.h();
  CHECK(segment_crosses_notch({0.02, 0.5 * h}, {0.02, -0.5 * h}, spec));
  CHECK(!segment_crosses_notch({0.02, 0.003}, {0.021, 0.004}, spec));
  CHECK(segment_crosses_notch({0.02, 0.5 * h}, {0.021, 1.5 * h}, spec));
  CHECK(segment_crosses_notch({0.01, 0.0}, {0.011, 0.001}, spec));
  CHECK(segment_crosses_notch({0.026, 0.0005}, {0.024, -0.0005}, spec));
  CHECK(!segment_crosses_notch({0.03, 0.5 * h}, {0.03, -0.5 * h}, spec));
  CHECK(segment_crosses_centerline({0.5, 1.0}, {0.5, -1.0}, 0.0, 0.5));
  CHECK(!segment_crosses_centerline({0.5, 1.0}, {0.5, -1.0}, 0.0, 0.25));
  CHECK(centerline_intersection({0.0, 1.0}, {1.0, -3.0}) == test_support::approx(0.25));
}

TEST_CASE("body force ramp and balance") {
  const DomainSpec spec = test_support::small_spec();
  const Grid g = build_grid(spec);
  LoadSchedule load;
  load.f0 = 2e6;
  load.t_ramp = 350e-6;
  load.delta = spec.delta;

  for (const Vec2& b : body_force(g, 0.0, load)) CHECK(b == Vec2{});

  const std::vector<Vec2> full = body_force(g, 400e-6, load);
  Vec2 total{};
  std::size_t top = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    total += g.node_volume * full[i];
    CHECK(full[i].x == 0.0);
    if (g.layer[i] == Layer::Top) {
      ++top;
      CHECK(full[i].y == test_support::approx(load.f0 / load.delta).epsilon(1e-15));
    } else if (g.layer[i] == Layer::Bottom) {
      CHECK(full[i].y == test_support::approx(-load.f0 / load.delta).epsilon(1e-15));
    } else {
      CHECK(full[i].y == 0.0);
    }
  }
  CHECK(top == static_cast<std::size_t>(g.nx * 4));
  CHECK(total.y == 0.0);

  CHECK(load.ramp(175e-6) == test_support::approx(0.5));
  CHECK(load.ramp(350e-6) == 1.0);
  CHECK(load.ramp(560e-6) == 1.0);
}
