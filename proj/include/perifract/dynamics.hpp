#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "perifract/geometry.hpp"
#include "perifract/material.hpp"
#include "perifract/vec2.hpp"

namespace perifract {

struct StepperConfig {
  double dt = 0.02e-6;   // s
  double t_end = 560e-6;  // s
  int output_every = 50;  // steps between output frames
  double stability_factor = 0.5;

  long total_steps() const;
  // Largest recommended step, stability_factor * h / c_l.
  double stable_dt(double h, const MaterialModel& model) const;
};

struct BrokenBond {
  long step;
  std::int32_t i;
  std::int32_t j;
};

// Complete state at time t = step * dt. The velocity is the centered difference
// (u^{n+1} - u^{n-1}) / (2 dt), so a frame becomes complete one step after its
// displacement is known.
struct SimState {
  double t = 0.0;
  long step = 0;
  std::vector<Vec2> u;
  std::vector<Vec2> v;
  std::vector<Vec2> a;
  double external_work = 0.0;  // J per unit thickness
  double dissipated = 0.0;     // energy of failed bonds at break
  double initial_energy = 0.0;
  std::vector<BrokenBond> broken_this_step;
};

// ((u_j - u_i) / |x_j - x_i|) . e
double bond_strain(const Vec2& u_i, const Vec2& u_j, double rest_length, const Vec2& e);

// Per-slot constants of the bond kernel for one horizon.
struct KernelTable {
  double epsilon = 0.0;
  double beta = 0.0;
  double two_c_beta = 0.0;
  BondPotential potential;
  std::vector<double> length;
  std::vector<double> sqrt_length;
  std::vector<Vec2> e;
  std::vector<double> force_coef;   // 2 J/(eps^3 pi l) sqrt(l) w; times g'(sqrt(l) S)
  std::vector<double> energy_coef;  // J/(eps^3 pi) w; times g(sqrt(l) S)
  std::vector<double> s_c;
  std::vector<double> s_plus;
};

KernelTable make_kernel_table(const Stencil& stencil, const MaterialModel& model, double epsilon);

// Nodal force density L_h(u) (N/m^3) over live bonds. OpenMP-parallel over nodes;
// each node sums its stencil groups in a fixed order, so the result does not
// depend on the thread count.
void assemble_force(const KernelTable& kernel, const BondTable& bonds, std::span<const Vec2> u,
                    std::span<Vec2> out);
std::vector<Vec2> assemble_force(const Grid& grid, const BondTable& bonds, std::span<const Vec2> u,
                                 const MaterialModel& model, double epsilon);

// Straightforward single-threaded evaluation of the same operator, written
// directly from the pair potential; kept as the reference for the kernel.
std::vector<Vec2> assemble_force_serial(const Grid& grid, const BondTable& bonds,
                                        std::span<const Vec2> u, const MaterialModel& model,
                                        double epsilon);

// Marks every live bond with S > S+ as broken. Returns the number of newly
// broken bonds (unordered pairs) and appends them to state.broken_this_step.
std::size_t update_failure(SimState& state, const Grid& grid, BondTable& bonds,
                           const MaterialModel& model);

// ||L(u1) - L(u2)|| / ||u1 - u2|| in the root-mean-square nodal norm.
double lipschitz_probe(const Grid& grid, const BondTable& bonds, const MaterialModel& model,
                       std::span<const Vec2> u1, std::span<const Vec2> u2);

class Stepper {
 public:
  Stepper(const Grid& grid, BondTable& bonds, const MaterialModel& model, const LoadSchedule& load,
          const StepperConfig& config, std::vector<Vec2> u0 = {}, std::vector<Vec2> v0 = {});

  const SimState& state() const { return frame_; }
  const KernelTable& kernel() const { return kernel_; }
  const Grid& grid() const { return grid_; }
  const BondTable& bonds() const { return bonds_; }
  const MaterialModel& model() const { return model_; }
  const StepperConfig& config() const { return config_; }
  const std::vector<BrokenBond>& ledger() const { return ledger_; }

  // Advances the complete frame by one time step.
  void step();
  bool done() const { return frame_.step >= config_.total_steps(); }

 private:
  void apply_failures(long step);
  double load_power(std::span<const Vec2> b, std::span<const Vec2> v) const;

  const Grid& grid_;
  BondTable& bonds_;
  const MaterialModel& model_;
  LoadSchedule load_;
  StepperConfig config_;
  KernelTable kernel_;

  SimState frame_;
  std::vector<Vec2> u_next_;
  std::vector<Vec2> u_after_;
  std::vector<Vec2> force_;
  std::vector<Vec2> body_;
  std::vector<std::uint8_t> tripped_;
  std::vector<BrokenBond> ledger_;
  double power_ = 0.0;
};

// Per-node potential energy density W(x_i) = sum_j w_ij |x_j - x_i| W_eps(S_ij).
// Failed bonds count at the saturation level g(r+) when include_failed is set.
std::vector<double> node_potential_density(const KernelTable& kernel, const BondTable& bonds,
                                           std::span<const Vec2> u, bool include_failed);

}  // namespace perifract
