#include "perifract/dynamics.hpp"

#include <cmath>
#include <cstdio>
#include <numbers>

#include "perifract/errors.hpp"

namespace perifract {

namespace {

constexpr double kPi = std::numbers::pi;

template <bool CheckFailure>
void force_kernel(const KernelTable& kt, const BondTable& bonds, std::span<const Vec2> u,
                  std::span<Vec2> out, std::span<BondState> states, std::span<std::uint8_t> tripped) {
  const Stencil& st = bonds.stencil();
  const std::int64_t n = static_cast<std::int64_t>(bonds.nodes());
  const std::size_t width = bonds.width();
  const std::size_t n_groups = st.groups();
  const std::int32_t* nbr_all = bonds.neighbors_of(0).data();
  const BondState* state_all = bonds.raw_states().data();

#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const std::int32_t* nbr = nbr_all + i * width;
    const Vec2 ui = u[i];
    Vec2 acc{};
    bool any = false;
    for (std::size_t g = 0; g < n_groups; ++g) {
      Vec2 part{};
      for (int k = st.group_begin[g]; k < st.group_begin[g + 1]; ++k) {
        if (state_all[i * width + k] != BondState::Alive) continue;
        const Vec2 du = u[nbr[k]] - ui;
        const Vec2 e = kt.e[k];
        const double s = (du.x * e.x + du.y * e.y) / kt.length[k];
        if constexpr (CheckFailure) {
          if (s > kt.s_plus[k]) {
            states[i * width + k] = BondState::Breaking;
            any = true;
            continue;
          }
        }
        const double r = kt.sqrt_length[k] * s;
        const double f = kt.force_coef[k] * kt.two_c_beta * r * std::exp(-kt.beta * r * r);
        part.x += f * e.x;
        part.y += f * e.y;
      }
      acc += part;
    }
    out[i] = acc;
    if constexpr (CheckFailure) tripped[i] = any ? 1 : 0;
  }
}

// Moves Breaking slots to Broken, closing both orientations of each pair.
// Returns the number of pairs and the energy released, in node order.
std::size_t merge_failures(const KernelTable& kt, BondTable& bonds, std::span<const Vec2> u, std::span<const std::uint8_t> tripped,
                           double node_volume, long step, std::vector<BrokenBond>& out,
                           double& released) {
  const Stencil& st = bonds.stencil();
  const std::size_t width = bonds.width();
  std::size_t count = 0;
  for (std::size_t i = 0; i < bonds.nodes(); ++i) {
    if (!tripped[i]) continue;
    for (std::size_t k = 0; k < width; ++k) {
      if (bonds.state(i, k) != BondState::Breaking) continue;
      const std::int32_t j = bonds.neighbor(i, k);
      const std::size_t rk = static_cast<std::size_t>(st.entries[k].reverse);
      bonds.set_state(i, k, BondState::Broken);
      bonds.set_state(static_cast<std::size_t>(j), rk, BondState::Broken);
      const double s = bond_strain(u[i], u[j], kt.length[k], kt.e[k]);
      released += 2.0 * node_volume * kt.energy_coef[k] * kt.potential.g(kt.sqrt_length[k] * s);
      out.push_back({step, static_cast<std::int32_t>(std::min<std::size_t>(i, j)),
                     static_cast<std::int32_t>(std::max<std::size_t>(i, j))});
      ++count;
    }
  }
  return count;
}

bool all_finite(std::span<const Vec2> u) {
  for (const Vec2& p : u) {
    if (!std::isfinite(p.x) || !std::isfinite(p.y)) return false;
  }
  return true;
}

}  // namespace

long StepperConfig::total_steps() const { return std::lround(t_end / dt); }

double StepperConfig::stable_dt(double h, const MaterialModel& model) const {
  return stability_factor * h / model.cl;
}

double bond_strain(const Vec2& u_i, const Vec2& u_j, double rest_length, const Vec2& e) {
  if (!(rest_length > 0.0)) throw DomainError("bond_strain: rest length must be positive");
  const Vec2 du = u_j - u_i;
  return (du.x * e.x + du.y * e.y) / rest_length;
}

KernelTable make_kernel_table(const Stencil& stencil, const MaterialModel& model, double epsilon) {
  KernelTable kt;
  kt.epsilon = epsilon;
  kt.potential = model.potential;
  kt.beta = model.potential.beta;
  kt.two_c_beta = 2.0 * model.potential.c * model.potential.beta;
  const double eps3 = epsilon * epsilon * epsilon;
  for (const StencilEntry& en : stencil.entries) {
    const double l = en.length;
    const double J = model.influence(l / epsilon);
    const double sl = std::sqrt(l);
    kt.length.push_back(l);
    kt.sqrt_length.push_back(sl);
    kt.e.push_back(en.e);
    kt.force_coef.push_back(2.0 * J / (eps3 * kPi * l) * sl * en.weight);
    kt.energy_coef.push_back(J / (eps3 * kPi) * en.weight);
    const CriticalStrains cs = critical_strains(model.potential, l);
    kt.s_c.push_back(cs.s_c);
    kt.s_plus.push_back(cs.s_plus);
  }
  return kt;
}

void assemble_force(const KernelTable& kernel, const BondTable& bonds, std::span<const Vec2> u,
                    std::span<Vec2> out) {
  force_kernel<false>(kernel, bonds, u, out, {}, {});
}

std::vector<Vec2> assemble_force(const Grid& grid, const BondTable& bonds, std::span<const Vec2> u,
                                 const MaterialModel& model, double epsilon) {
  const KernelTable kt = make_kernel_table(bonds.stencil(), model, epsilon);
  std::vector<Vec2> out(grid.size());
  assemble_force(kt, bonds, u, out);
  return out;
}

std::vector<Vec2> assemble_force_serial(const Grid& grid, const BondTable& bonds,
                                        std::span<const Vec2> u, const MaterialModel& model,
                                        double epsilon) {
  std::vector<Vec2> out(grid.size());
  const double omega2 = kPi;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    Vec2 sum{};
    for (std::size_t k = 0; k < bonds.width(); ++k) {
      const BondView b = bonds.bond(i, k);
      if (!b.alive) continue;
      const Vec2 xi = grid.x[i];
      const Vec2 xj = grid.x[b.j];
      const double l = norm(xj - xi);
      const Vec2 e = (1.0 / l) * (xj - xi);
      const double s = bond_strain(u[i], u[b.j], l, e);
      // d/dS of J/(eps^3 w2 l) g(sqrt(l) S)
      const double dW = model.influence(l / epsilon) / (epsilon * epsilon * epsilon * omega2 * l) *
                        eval_g_prime(model.potential, std::sqrt(l) * s) * std::sqrt(l);
      sum += (2.0 * dW * b.weight) * e;
    }
    out[i] = sum;
  }
  return out;
}

std::size_t update_failure(SimState& state, const Grid& grid, BondTable& bonds,
                           const MaterialModel& model) {
  const KernelTable kt = make_kernel_table(bonds.stencil(), model, grid.spec.epsilon);
  std::vector<Vec2> scratch(grid.size());
  std::vector<std::uint8_t> tripped(grid.size(), 0);
  force_kernel<true>(kt, bonds, state.u, scratch, bonds.raw_states(), tripped);
  double released = 0.0;
  const std::size_t n = merge_failures(kt, bonds, state.u, tripped, grid.node_volume,
                                       state.step, state.broken_this_step, released);
  state.dissipated += released;
  return n;
}

double lipschitz_probe(const Grid& grid, const BondTable& bonds, const MaterialModel& model,
                       std::span<const Vec2> u1, std::span<const Vec2> u2) {
  double du2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 d = u1[i] - u2[i];
    du2 += dot(d, d);
  }
  if (!(du2 > 0.0)) throw DomainError("lipschitz_probe: fields must differ");
  const KernelTable kt = make_kernel_table(bonds.stencil(), model, grid.spec.epsilon);
  std::vector<Vec2> f1(grid.size());
  std::vector<Vec2> f2(grid.size());
  assemble_force(kt, bonds, u1, f1);
  assemble_force(kt, bonds, u2, f2);
  double df2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const Vec2 d = f1[i] - f2[i];
    df2 += dot(d, d);
  }
  return std::sqrt(df2 / du2);
}

std::vector<double> node_potential_density(const KernelTable& kt, const BondTable& bonds,
                                           std::span<const Vec2> u, bool include_failed) {
  const std::int64_t n = static_cast<std::int64_t>(bonds.nodes());
  const std::size_t width = bonds.width();
  const double saturated = kt.potential.g(kt.potential.r_plus());
  std::vector<double> w(bonds.nodes());
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    double sum = 0.0;
    for (std::size_t k = 0; k < width; ++k) {
      const BondState s = bonds.state(i, k);
      if (s == BondState::Alive) {
        const double strain = bond_strain(u[i], u[bonds.neighbor(i, k)], kt.length[k], kt.e[k]);
        sum += kt.energy_coef[k] * kt.potential.g(kt.sqrt_length[k] * strain);
      } else if (include_failed && (s == BondState::Broken || s == BondState::Breaking)) {
        sum += kt.energy_coef[k] * saturated;
      }
    }
    w[i] = sum;
  }
  return w;
}

Stepper::Stepper(const Grid& grid, BondTable& bonds, const MaterialModel& model,
                 const LoadSchedule& load, const StepperConfig& config, std::vector<Vec2> u0,
                 std::vector<Vec2> v0)
    : grid_(grid),
      bonds_(bonds),
      model_(model),
      load_(load),
      config_(config),
      kernel_(make_kernel_table(bonds.stencil(), model, grid.spec.epsilon)) {
  if (!(config.dt > 0.0)) throw DomainError("time step must be positive");
  const std::size_t n = grid.size();
  if (u0.empty()) u0.assign(n, Vec2{});
  if (v0.empty()) v0.assign(n, Vec2{});
  if (u0.size() != n || v0.size() != n) throw DomainError("initial data size does not match grid");

  frame_.u = std::move(u0);
  frame_.v = std::move(v0);
  frame_.a.assign(n, Vec2{});
  u_next_.assign(n, Vec2{});
  u_after_.assign(n, Vec2{});
  force_.assign(n, Vec2{});
  body_.assign(n, Vec2{});
  tripped_.assign(n, 0);

  force_kernel<true>(kernel_, bonds_, frame_.u, force_, bonds_.raw_states(), tripped_);
  apply_failures(0);
  body_force(grid_, 0.0, load_, body_);
  const double dt = config_.dt;
  const double inv_rho = 1.0 / model_.rho;
  for (std::size_t i = 0; i < n; ++i) {
    frame_.a[i] = inv_rho * (force_[i] + body_[i]);
    u_next_[i] = frame_.u[i] + dt * frame_.v[i] + (0.5 * dt * dt) * frame_.a[i];
  }
  power_ = load_power(body_, frame_.v);

  const std::vector<double> w = node_potential_density(kernel_, bonds_, frame_.u, false);
  double energy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    energy += grid_.node_volume * (w[i] + 0.5 * model_.rho * dot(frame_.v[i], frame_.v[i]));
  }
  frame_.initial_energy = energy;
}

double Stepper::load_power(std::span<const Vec2> b, std::span<const Vec2> v) const {
  double p = 0.0;
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (grid_.layer[i] != Layer::None) p += dot(b[i], v[i]);
  }
  return p * grid_.node_volume;
}

void Stepper::apply_failures(long step) {
  frame_.broken_this_step.clear();
  double released = 0.0;
  const std::size_t before = ledger_.size();
  merge_failures(kernel_, bonds_, frame_.u, tripped_,
                 grid_.node_volume, step, ledger_, released);
  frame_.broken_this_step.assign(ledger_.begin() + static_cast<std::ptrdiff_t>(before),
                                 ledger_.end());
  frame_.dissipated += released;
}

void Stepper::step() {
  const std::int64_t n = static_cast<std::int64_t>(grid_.size());
  const double dt = config_.dt;
  const long next = frame_.step + 1;
  const double t_next = next * dt;

  force_kernel<true>(kernel_, bonds_, u_next_, force_, bonds_.raw_states(), tripped_);

  std::vector<Vec2> u_prev = std::move(frame_.u);
  frame_.u = std::move(u_next_);
  apply_failures(next);

  body_force(grid_, t_next, load_, body_);
  const double inv_rho = 1.0 / model_.rho;
  const double dt2 = dt * dt;
  const double inv_2dt = 0.5 / dt;
  std::vector<Vec2>& u_after = u_after_;
  const std::vector<Vec2>& u_now = frame_.u;
#pragma omp parallel for schedule(static)
  for (std::int64_t i = 0; i < n; ++i) {
    const Vec2 acc = inv_rho * (force_[i] + body_[i]);
    frame_.a[i] = acc;
    u_after[i] = 2.0 * u_now[i] - u_prev[i] + dt2 * acc;
    frame_.v[i] = inv_2dt * (u_after[i] - u_prev[i]);
  }
  if (!all_finite(u_after)) throw SimulationError(next, "non-finite displacement");

  const double p = load_power(body_, frame_.v);
  frame_.external_work += 0.5 * dt * (power_ + p);
  power_ = p;
  frame_.t = t_next;
  frame_.step = next;
  u_next_ = std::move(u_after_);
  u_after_ = std::move(u_prev);
}

}  // namespace perifract
