#include "perifract/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "perifract/errors.hpp"

namespace perifract {

namespace {

// dW/dS times the bond weight, over the rest length: the scalar multiplying e
// in the pair force, without the factor 2.
inline double bond_flux_coef(const KernelTable& kt, std::size_t k, double s) {
  const double r = kt.sqrt_length[k] * s;
  return 0.5 * kt.force_coef[k] * kt.two_c_beta * r * std::exp(-kt.beta * r * r);
}

double node_energy_density(const KernelTable& kt, const BondTable& bonds, std::span<const Vec2> u,
                           std::size_t i, bool include_failed) {
  const double saturated = kt.potential.g(kt.potential.r_plus());
  double sum = 0.0;
  for (std::size_t k = 0; k < bonds.width(); ++k) {
    const BondState s = bonds.state(i, k);
    if (s == BondState::Alive) {
      const double strain = bond_strain(u[i], u[bonds.neighbor(i, k)], kt.length[k], kt.e[k]);
      sum += kt.energy_coef[k] * kt.potential.g(kt.sqrt_length[k] * strain);
    } else if (include_failed && s != BondState::None) {
      sum += kt.energy_coef[k] * saturated;
    }
  }
  return sum;
}

bool crosses_centerline(const Vec2& p, const Vec2& q) {
  if (p.y == 0.0 && q.y == 0.0) return false;
  return (p.y <= 0.0 && q.y >= 0.0) || (p.y >= 0.0 && q.y <= 0.0);
}

}  // namespace

double kinetic_energy(std::span<const Vec2> v, const Grid& grid, const MaterialModel& model) {
  double sum = 0.0;
  for (const Vec2& vi : v) sum += dot(vi, vi);
  return 0.5 * model.rho * grid.node_volume * sum;
}

double potential_energy(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                        const KernelTable& kernel) {
  const std::vector<double> w = node_potential_density(kernel, bonds, u, false);
  double sum = 0.0;
  for (double wi : w) sum += wi;
  return grid.node_volume * sum;
}

EnergyLedger energy_ledger(const SimState& state, const Grid& grid, const BondTable& bonds,
                           const KernelTable& kernel, const MaterialModel& model) {
  EnergyLedger e;
  e.t = state.t;
  e.kinetic = kinetic_energy(state.v, grid, model);
  e.potential = potential_energy(state.u, grid, bonds, kernel);
  e.external_work = state.external_work;
  e.dissipated = state.dissipated;
  e.residual = e.kinetic + e.potential + e.dissipated - state.initial_energy - e.external_work;
  return e;
}

SofteningReport softening_zone(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                               const KernelTable& kernel, double tip_x1, double front_radius) {
  SofteningReport rep;
  std::vector<std::uint8_t> failed(grid.size(), 0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    bool soft = false;
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      const BondState s = bonds.state(i, k);
      if (s == BondState::Broken || s == BondState::Breaking) {
        failed[i] = 1;
      } else if (s == BondState::Alive && !soft) {
        const double strain = bond_strain(u[i], u[bonds.neighbor(i, k)], kernel.length[k], kernel.e[k]);
        soft = std::abs(strain) >= kernel.s_c[k];
      }
    }
    if (soft) rep.soft.push_back(static_cast<std::int32_t>(i));
    if (failed[i]) rep.failed.push_back(static_cast<std::int32_t>(i));
  }
  const Vec2 tip{tip_x1, 0.0};
  for (std::int32_t i : rep.soft) {
    if (failed[i]) continue;
    if (norm(grid.x[i] - tip) > front_radius) {
      rep.soft_within_failed_or_front = false;
      break;
    }
  }
  return rep;
}

void CrackTracker::add(std::span<const BrokenBond> broken) {
  for (const BrokenBond& b : broken) {
    const Vec2& p = grid_->x[b.i];
    const Vec2& q = grid_->x[b.j];
    if (!crosses_centerline(p, q)) continue;
    ell_ = std::max(ell_, centerline_intersection(p, q));
  }
}

double crack_length(const Grid& grid, std::span<const BrokenBond> broken, double ell0) {
  CrackTracker t(grid, ell0);
  t.add(broken);
  return t.ell();
}

void smooth_tip_velocity(std::vector<CrackTipSample>& samples, int window) {
  if (window < 1) throw DomainError("tip window must be at least one frame");
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(samples.size());
  const std::ptrdiff_t half = window / 2;
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const std::ptrdiff_t w = std::min({half, k, n - 1 - k});
    if (w == 0) {
      samples[k].V = 0.0;
      continue;
    }
    const CrackTipSample& lo = samples[k - w];
    const CrackTipSample& hi = samples[k + w];
    samples[k].V = std::max(0.0, (hi.ell - lo.ell) / (hi.t - lo.t));
  }
}

StrainSplit strain_split(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                         const KernelTable& kernel, std::span<const double> phi) {
  StrainSplit out;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (phi[i] == 0.0) continue;
    double minus = 0.0;
    double plus = 0.0;
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      if (!bonds.alive(i, k)) continue;
      const double s = bond_strain(u[i], u[bonds.neighbor(i, k)], kernel.length[k], kernel.e[k]);
      // (l/eps) J w / (eps^2 pi) = l * energy_coef
      const double term = kernel.length[k] * kernel.energy_coef[k] * s;
      if (std::abs(s) < kernel.s_c[k]) {
        minus += term;
      } else {
        plus += term;
      }
    }
    out.minus += phi[i] * minus;
    out.plus += phi[i] * plus;
  }
  out.minus *= grid.node_volume;
  out.plus *= grid.node_volume;
  return out;
}

DivergenceCheck nonlocal_divergence_check(std::span<const Vec2> u, std::span<const Vec2> w,
                                          const Grid& grid, const BondTable& bonds,
                                          const KernelTable& kernel, const ContourSpec& box) {
  DivergenceCheck out;
  std::vector<std::uint8_t> in(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) in[i] = box.contains(grid.x[i]) ? 1 : 0;

  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      if (!bonds.alive(i, k)) continue;
      const std::int32_t j = bonds.neighbor(i, k);
      if (!in[i] && !in[j]) continue;
      const double s = bond_strain(u[i], u[j], kernel.length[k], kernel.e[k]);
      const double q = bond_flux_coef(kernel, k, s);
      const Vec2 e = kernel.e[k];
      if (in[i]) {
        // w_j . e_ji - w_i . e_ij
        const double term = q * (dot(w[j], -e) - dot(w[i], e));
        out.lhs += term;
        out.scale += std::abs(term);
      } else {
        const double term = q * dot(w[i] + w[j], e);
        out.rhs += term;
        out.scale += std::abs(term);
      }
    }
  }
  out.lhs *= grid.node_volume;
  out.rhs *= grid.node_volume;
  out.scale *= grid.node_volume;
  return out;
}

double nonlocal_flux(const SimState& state, const Grid& grid, const BondTable& bonds,
                     const KernelTable& kernel, const ContourSpec& box) {
  double sum = 0.0;
  for (std::size_t j = 0; j < grid.size(); ++j) {
    if (!box.contains(grid.x[j])) continue;
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      if (!bonds.alive(j, k)) continue;
      const std::int32_t i = bonds.neighbor(j, k);
      if (box.contains(grid.x[i])) continue;
      const double s = bond_strain(state.u[j], state.u[i], kernel.length[k], kernel.e[k]);
      // e_ij points from the exterior node i to j, opposite to slot k of j
      sum -= bond_flux_coef(kernel, k, s) * dot(state.v[i] + state.v[j], kernel.e[k]);
    }
  }
  return sum * grid.node_volume;
}

double box_energy(const SimState& state, const Grid& grid, const BondTable& bonds,
                  const KernelTable& kernel, const MaterialModel& model, const ContourSpec& box) {
  double sum = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!box.contains(grid.x[i])) continue;
    sum += 0.5 * model.rho * dot(state.v[i], state.v[i]) +
           node_energy_density(kernel, bonds, state.u, i, true);
  }
  return sum * grid.node_volume;
}

double collar_energy(const SimState& state, const Grid& grid, const BondTable& bonds,
                     const KernelTable& kernel, const MaterialModel& model,
                     const ContourSpec& box) {
  double sum = 0.0;
  const double front = box.center.x + box.half.x - grid.h;
  const double rear = box.center.x - box.half.x + grid.h;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2& x = grid.x[i];
    if (!box.contains(x)) continue;
    double sign = 0.0;
    if (x.x > front) sign = 1.0;
    if (x.x < rear) sign = -1.0;
    if (sign == 0.0) continue;
    sum += sign * (0.5 * model.rho * dot(state.v[i], state.v[i]) +
                   node_energy_density(kernel, bonds, state.u, i, true));
  }
  return sum * grid.h;
}

PowerBalanceTracker::PowerBalanceTracker(const Grid& grid, const BondTable& bonds,
                                         const KernelTable& kernel, const MaterialModel& model,
                                         Vec2 half_widths)
    : grid_(grid), bonds_(bonds), kernel_(kernel), model_(model) {
  const DomainSpec& s = grid.spec;
  box_.half = half_widths;
  if (!(half_widths.x > 0.0) || !(half_widths.y > 0.0)) {
    throw DomainError("power-balance box half-widths must be positive");
  }
  if (half_widths.y + s.epsilon > 0.5 * s.b - s.delta) {
    throw DomainError("power-balance box reaches the loading layers");
  }
  if (2.0 * (half_widths.x + s.epsilon) > s.a) {
    throw DomainError("power-balance box is wider than the plate");
  }
  box_.center = {place(s.ell0), 0.0};
}

double PowerBalanceTracker::place(double tip_x1) const {
  const double h = grid_.h;
  const double lo = std::ceil((box_.half.x + grid_.spec.epsilon) / h - 1e-9) * h;
  const double hi = std::floor((grid_.spec.a - box_.half.x - grid_.spec.epsilon) / h + 1e-9) * h;
  return std::clamp(std::round(tip_x1 / h) * h, lo, std::max(lo, hi));
}

void PowerBalanceTracker::observe_step(const SimState& state) {
  const double f = nonlocal_flux(state, grid_, bonds_, kernel_, box_);
  if (started_) flux_integral_ += 0.5 * (state.t - last_t_) * (last_flux_ + f);
  started_ = true;
  last_flux_ = f;
  last_t_ = state.t;
}

void PowerBalanceTracker::observe_frame(const SimState& state, double tip_x1, bool cracked) {
  Frame fr;
  fr.t = state.t;
  fr.flux_integral = flux_integral_;
  fr.cracked = cracked;
  box_.center.x = place(tip_x1);
  fr.center = box_.center.x;
  fr.energy = box_energy(state, grid_, bonds_, kernel_, model_, box_);
  fr.collar = collar_energy(state, grid_, bonds_, kernel_, model_, box_);
  frames_.push_back(fr);
  flux_integral_ = 0.0;
  last_flux_ = nonlocal_flux(state, grid_, bonds_, kernel_, box_);
}

std::vector<PowerBalanceSample> PowerBalanceTracker::samples() const {
  std::vector<PowerBalanceSample> out;
  for (std::size_t k = 1; k + 1 < frames_.size(); ++k) {
    const Frame& lo = frames_[k - 1];
    const Frame& mid = frames_[k];
    const Frame& hi = frames_[k + 1];
    const double span = hi.t - lo.t;
    PowerBalanceSample s;
    s.t = mid.t;
    s.dEdt = (hi.energy - lo.energy) / span;
    s.flux_nonlocal = (mid.flux_integral + hi.flux_integral) / span;
    s.V = (hi.center - lo.center) / span;
    s.flux_advective = s.V * mid.collar;
    s.residual = s.dEdt - (s.flux_advective - s.flux_nonlocal);
    s.cracked = mid.cracked;
    out.push_back(s);
  }
  return out;
}

LocalLimitReport local_limit_error(const MaterialModel& model, std::span<const double> epsilons,
                                   std::span<const int> h_ratios, double amplitude) {
  if (epsilons.size() != h_ratios.size() || epsilons.empty()) {
    throw DomainError("local_limit_error: need matching, nonempty epsilon and h_ratio lists");
  }
  LocalLimitReport rep;
  const double mu = model.mu;
  const double lam = model.lambda;

  struct Quadratic {
    double a1, b1, c1, a2, b2, c2;
    Vec2 at(const Vec2& p) const {
      return {a1 * p.x * p.x + b1 * p.x * p.y + c1 * p.y * p.y,
              a2 * p.x * p.x + b2 * p.x * p.y + c2 * p.y * p.y};
    }
    Vec2 laplacian() const { return {2 * a1 + 2 * c1, 2 * a2 + 2 * c2}; }
    Vec2 grad_div() const { return {2 * a1 + b2, b1 + 2 * c2}; }
  };
  const auto div_sigma = [&](const Quadratic& q) {
    return mu * q.laplacian() + (lam + mu) * q.grad_div();
  };
  const Quadratic general{amplitude, 0.5 * amplitude, -0.25 * amplitude,
                          -0.5 * amplitude, 0.75 * amplitude, amplitude};
  const Quadratic stretch{amplitude, 0, 0, 0, 0, 0};  // u1 = x1^2
  const Quadratic shear{0, 0, amplitude, 0, 0, 0};    // u1 = x2^2

  for (std::size_t r = 0; r < epsilons.size(); ++r) {
    DomainSpec spec;
    spec.epsilon = epsilons[r];
    spec.h_ratio = h_ratios[r];
    const double h = spec.h();
    const int cells = 2 * (spec.h_ratio + 2);
    spec.a = cells * h;
    spec.b = cells * h;
    spec.ell0 = 0.0;
    spec.d = 0.0;
    spec.delta = h;
    const Grid grid = build_grid(spec);
    const BondTable bonds = build_bonds(grid, spec);
    const KernelTable kt = make_kernel_table(bonds.stencil(), model, spec.epsilon);
    const Vec2 center{0.5 * spec.a, 0.0};

    std::vector<std::int32_t> probes;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      if (norm(grid.x[i] - center) < grid.h) probes.push_back(static_cast<std::int32_t>(i));
    }

    const auto force_at_probes = [&](const Quadratic& q) {
      std::vector<Vec2> u(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) u[i] = q.at(grid.x[i] - center);
      std::vector<Vec2> f(grid.size());
      assemble_force(kt, bonds, u, f);
      std::vector<Vec2> out;
      for (std::int32_t i : probes) out.push_back(f[i]);
      return out;
    };

    LocalLimitRow row;
    row.epsilon = spec.epsilon;
    row.h = h;
    const Vec2 target = div_sigma(general);
    row.scale = norm(target);
    for (const Vec2& f : force_at_probes(general)) row.error = std::max(row.error, norm(f - target));
    if (r > 0) {
      const LocalLimitRow& prev = rep.rows.back();
      row.order = std::log(prev.error / row.error) / std::log(prev.epsilon / row.epsilon);
    }
    rep.rows.push_back(row);

    if (r + 1 == epsilons.size()) {
      // F1 = 2a + 2b and F2 = 2a in the x1 component, a = mu, b = lambda + mu
      double f1 = 0.0;
      double f2 = 0.0;
      const std::vector<Vec2> s1 = force_at_probes(stretch);
      const std::vector<Vec2> s2 = force_at_probes(shear);
      for (std::size_t p = 0; p < probes.size(); ++p) {
        f1 += s1[p].x;
        f2 += s2[p].x;
      }
      f1 /= static_cast<double>(probes.size()) * amplitude;
      f2 /= static_cast<double>(probes.size()) * amplitude;
      rep.mu_fit = 0.5 * f2;
      rep.lambda_fit = 0.5 * (f1 - f2) - rep.mu_fit;
    }
  }
  return rep;
}

std::pair<std::size_t, std::size_t> steady_window(std::span<const double> V, std::size_t min_frames) {
  std::size_t best_begin = 0;
  std::size_t best_len = 0;
  std::size_t k = 0;
  while (k < V.size()) {
    if (!(V[k] > 0.0)) {
      ++k;
      continue;
    }
    std::size_t end = k;
    while (end < V.size() && V[end] > 0.0) ++end;
    if (end - k > best_len) {
      best_len = end - k;
      best_begin = k;
    }
    k = end;
  }
  if (best_len < min_frames) return {0, 0};
  return {best_begin, best_begin + best_len};
}

double median(std::vector<double> values) {
  if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  return n % 2 ? values[n / 2] : 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

KineticReport kinetic_relation_report(std::span<const CrackTipSample> tips,
                                      std::span<const PowerBalanceSample> power, double Gc,
                                      std::size_t min_frames) {
  KineticReport rep;
  std::size_t t_idx = 0;
  for (const PowerBalanceSample& p : power) {
    while (t_idx < tips.size() && tips[t_idx].t < p.t) ++t_idx;
    if (t_idx == tips.size() || tips[t_idx].t != p.t) continue;
    KineticRow row;
    row.t = p.t;
    row.V = tips[t_idx].V;
    row.J = -p.flux_nonlocal;
    row.GcV = Gc * row.V;
    if (row.GcV > 0.0) row.ratio = row.J / row.GcV;
    rep.rows.push_back(row);
  }
  std::vector<double> V;
  for (const KineticRow& r : rep.rows) V.push_back(r.V);
  const auto [b, e] = steady_window(V, min_frames);
  rep.steady_begin = b;
  rep.steady_end = e;
  std::vector<double> ratios;
  for (std::size_t k = b; k < e; ++k) {
    if (rep.rows[k].ratio) ratios.push_back(*rep.rows[k].ratio);
  }
  if (!ratios.empty()) rep.median_ratio = median(ratios);
  return rep;
}

double mode_one_symmetry_deviation(std::span<const Vec2> u, const Grid& grid) {
  double scale = 0.0;
  for (const Vec2& ui : u) scale = std::max({scale, std::abs(ui.x), std::abs(ui.y)});
  if (scale == 0.0) return 0.0;
  double dev = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const std::int32_t m = grid.node_at(grid.ix[i], grid.ny - 1 - grid.iy[i]);
    if (m < 0) continue;
    dev = std::max({dev, std::abs(u[i].x - u[m].x), std::abs(u[i].y + u[m].y)});
  }
  return dev / scale;
}

OpeningCount opening_direction(std::span<const Vec2> u, const Grid& grid, double ell0, double tip) {
  OpeningCount c;
  const double eps = grid.spec.epsilon;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2& x = grid.x[i];
    if (x.y == 0.0 || std::abs(x.y) >= eps) continue;
    if (x.x < ell0 || x.x > tip - eps) continue;
    ++c.checked;
    if ((x.y > 0.0 && u[i].y > 0.0) || (x.y < 0.0 && u[i].y < 0.0)) ++c.opening;
  }
  return c;
}

double strain_bound_violation(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                              const KernelTable& kernel) {
  const double rc = kernel.potential.r_c();
  std::size_t total = 0;
  std::size_t bad = 0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      if (!bonds.alive(i, k)) continue;
      const std::int32_t j = bonds.neighbor(i, k);
      if (crosses_centerline(grid.x[i], grid.x[j])) continue;
      ++total;
      const double s = bond_strain(u[i], u[j], kernel.length[k], kernel.e[k]);
      if (std::abs(s) * kernel.sqrt_length[k] > rc) ++bad;
    }
  }
  return total ? static_cast<double>(bad) / static_cast<double>(total) : 0.0;
}

}  // namespace perifract
