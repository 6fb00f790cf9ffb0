#include "perifract/verify.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <random>
#include <sstream>

#include "perifract/diagnostics.hpp"
#include "perifract/dynamics.hpp"

namespace perifract {

namespace {

template <class F>
CheckResult timed(F&& body) {
  const auto t0 = std::chrono::steady_clock::now();
  CheckResult r = body();
  r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return r;
}

// Largest force magnitude a node can feel: every slot at the peak of g'.
double force_scale(const KernelTable& kt) {
  const double rc = kt.potential.r_c();
  const double peak = kt.two_c_beta * rc * std::exp(-kt.beta * rc * rc);
  double sum = 0.0;
  for (double c : kt.force_coef) sum += c * peak;
  return sum;
}

}  // namespace

CheckResult check_divergence_identity(const MaterialModel& model, std::uint64_t seed, int pairs) {
  return timed([&] {
    DomainSpec spec;
    spec.a = 0.03;
    spec.b = 0.03;
    spec.ell0 = 0.0075;
    const Grid grid = build_grid(spec);
    BondTable bonds = build_bonds(grid, spec);
    const KernelTable kt = make_kernel_table(bonds.stencil(), model, spec.epsilon);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    std::uniform_real_distribution<double> pick(0.0, 1.0);

    // fail about a tenth of the pairs, both orientations
    for (std::size_t i = 0; i < grid.size(); ++i) {
      for (std::size_t k = 0; k < bonds.width(); ++k) {
        if (!bonds.alive(i, k) || pick(rng) > 0.05) continue;
        bonds.set_state(i, k, BondState::Broken);
        bonds.set_state(bonds.neighbor(i, k), bonds.stencil().entries[k].reverse, BondState::Broken);
      }
    }

    const double s_scale = kt.s_c.front() * kt.length.front();
    double worst = 0.0;
    for (int p = 0; p < pairs; ++p) {
      std::vector<Vec2> u(grid.size());
      std::vector<Vec2> w(grid.size());
      for (std::size_t i = 0; i < grid.size(); ++i) {
        u[i] = {s_scale * unit(rng), s_scale * unit(rng)};
        w[i] = {unit(rng), unit(rng)};
      }
      ContourSpec box;
      box.half = {spec.a * (0.05 + 0.4 * pick(rng)), spec.b * (0.05 + 0.4 * pick(rng))};
      box.center = {spec.a * pick(rng), spec.b * (pick(rng) - 0.5)};
      const DivergenceCheck d = nonlocal_divergence_check(u, w, grid, bonds, kt, box);
      worst = std::max(worst, d.relative());
    }
    CheckResult r;
    r.name = "divergence_identity";
    r.value = worst;
    r.threshold = 1e-10;
    r.pass = worst <= r.threshold;
    r.detail = std::to_string(pairs) + " random field/box pairs, worst relative residual";
    return r;
  });
}

CheckResult check_rigid_invariance(const MaterialModel& model, int cells) {
  return timed([&] {
    DomainSpec spec;
    const double h = spec.h();
    spec.a = cells * h;
    spec.b = cells * h;
    spec.ell0 = 0.25 * spec.a;
    const Grid grid = build_grid(spec);
    const BondTable bonds = build_bonds(grid, spec);
    const KernelTable kt = make_kernel_table(bonds.stencil(), model, spec.epsilon);
    const double theta = 1e-3;
    const Vec2 shift{3e-4, -2e-4};
    std::vector<Vec2> u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
      const Vec2& x = grid.x[i];
      u[i] = shift + Vec2{-theta * x.y, theta * x.x};
    }
    std::vector<Vec2> f(grid.size());
    assemble_force(kt, bonds, u, f);
    double fmax = 0.0;
    for (const Vec2& fi : f) fmax = std::max(fmax, norm(fi));
    CheckResult r;
    r.name = "rigid_invariance";
    r.value = fmax / force_scale(kt);
    r.threshold = 1e-12;
    r.pass = r.value <= r.threshold;
    r.detail = std::to_string(cells) + "x" + std::to_string(cells) +
               " lattice, infinitesimal rotation plus translation";
    return r;
  });
}

CheckResult check_toughness(const MaterialModel& model, int n_quad) {
  return timed([&] {
    const double closed = gc_closed_form(model);
    double spread = 0.0;
    double vs_closed = 0.0;
    const double g0 = gc_direct_quadrature(model, 2.5e-3, n_quad);
    for (double eps : {2.5e-3, 1.25e-3, 0.625e-3}) {
      const double g = gc_direct_quadrature(model, eps, n_quad);
      spread = std::max(spread, std::abs(g - g0) / std::abs(g0));
      vs_closed = std::max(vs_closed, std::abs(g - closed) / closed);
    }
    CheckResult r;
    r.name = "toughness_horizon_independence";
    r.value = std::max(spread / 1e-6, vs_closed / 1e-5);
    r.threshold = 1.0;
    r.pass = spread <= 1e-6 && vs_closed <= 1e-5;
    std::ostringstream d;
    d << "spread " << spread << " (<= 1e-6), vs closed form " << vs_closed << " (<= 1e-5), Gc "
      << closed;
    r.detail = d.str();
    return r;
  });
}

namespace {

const std::vector<double> kLimitEps = {4e-3, 2e-3, 1e-3, 0.5e-3};
const std::vector<int> kLimitRatio = {4, 8, 16, 32};

}  // namespace

CheckResult check_local_limit(const MaterialModel& model, std::string* table) {
  return timed([&] {
    const LocalLimitReport rep = local_limit_error(model, kLimitEps, kLimitRatio, 1e-3);
    double worst = 1e300;
    std::ostringstream t;
    t << "epsilon_m,h_m,rel_error,order\n";
    for (std::size_t k = 0; k < rep.rows.size(); ++k) {
      const LocalLimitRow& row = rep.rows[k];
      t << row.epsilon << ',' << row.h << ',' << row.error / row.scale << ',' << row.order << "\n";
      if (k > 0) worst = std::min(worst, row.order);
    }
    if (table) *table = t.str();
    CheckResult r;
    r.name = "local_limit_order";
    r.value = worst;
    r.threshold = 0.9;
    r.pass = worst >= r.threshold;
    r.detail = "minimum observed order over epsilon halvings with h/epsilon halving too";
    return r;
  });
}

CheckResult check_lame_ratio(const MaterialModel& model) {
  return timed([&] {
    const LocalLimitReport rep = local_limit_error(model, kLimitEps, kLimitRatio, 1e-3);
    CheckResult r;
    r.name = "lame_ratio_fit";
    r.value = rep.lambda_fit / rep.mu_fit;
    r.threshold = 0.05;
    r.pass = std::abs(r.value - 1.0) <= r.threshold;
    std::ostringstream d;
    d << "mu_fit " << rep.mu_fit << ", lambda_fit " << rep.lambda_fit << ", model mu " << model.mu;
    r.detail = d.str();
    return r;
  });
}

CheckResult check_energy_balance(const MaterialModel& model, long steps) {
  return timed([&] {
    DomainSpec spec;
    spec.a = 0.04;
    spec.b = 0.04;
    spec.ell0 = 0.01;
    const Grid grid = build_grid(spec);
    BondTable bonds = build_bonds(grid, spec);
    LoadSchedule load;
    load.f0 = 1e6;
    load.t_ramp = 20e-6;
    load.delta = spec.delta;
    StepperConfig cfg;
    cfg.dt = 0.02e-6;
    cfg.t_end = steps * cfg.dt;
    Stepper st(grid, bonds, model, load, cfg);
    double num = 0.0;
    double den = 0.0;
    while (!st.done()) {
      st.step();
      if (st.state().step % 10 != 0) continue;
      const EnergyLedger e = energy_ledger(st.state(), grid, bonds, st.kernel(), model);
      num = std::max(num, std::abs(e.residual));
      den = std::max({den, e.kinetic + e.potential, std::abs(e.external_work)});
    }
    CheckResult r;
    r.name = "energy_balance_prefailure";
    r.value = den > 0.0 ? num / den : 0.0;
    r.threshold = 1e-3;
    r.pass = st.ledger().empty() && r.value <= r.threshold;
    r.detail = std::to_string(steps) + " steps, " + std::to_string(st.ledger().size()) +
               " failed bonds";
    return r;
  });
}

std::vector<CheckResult> run_verification_suite(const RunConfig& config) {
  const MaterialModel model = config.material_model();
  std::vector<CheckResult> out;
  out.push_back(check_divergence_identity(model, config.seed));
  out.push_back(check_rigid_invariance(model));
  out.push_back(check_toughness(model, std::max(config.gauss_order, 128)));
  out.push_back(check_local_limit(model));
  out.push_back(check_lame_ratio(model));
  out.push_back(check_energy_balance(model));
  return out;
}

nlohmann::json to_json(const std::vector<CheckResult>& checks) {
  nlohmann::json j = nlohmann::json::array();
  for (const CheckResult& c : checks) {
    j.push_back({{"name", c.name},
                 {"pass", c.pass},
                 {"value", c.value},
                 {"threshold", c.threshold},
                 {"detail", c.detail},
                 {"seconds", c.seconds}});
  }
  return j;
}

}  // namespace perifract
