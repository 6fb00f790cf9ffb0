#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "perifract/dynamics.hpp"
#include "perifract/geometry.hpp"
#include "perifract/material.hpp"
#include "perifract/vec2.hpp"

namespace perifract {

struct EnergyLedger {
  double t = 0.0;
  double kinetic = 0.0;
  double potential = 0.0;
  double external_work = 0.0;
  double dissipated = 0.0;
  // kinetic + potential + dissipated - initial - external_work
  double residual = 0.0;
};

EnergyLedger energy_ledger(const SimState& state, const Grid& grid, const BondTable& bonds,
                           const KernelTable& kernel, const MaterialModel& model);

double kinetic_energy(std::span<const Vec2> v, const Grid& grid, const MaterialModel& model);
double potential_energy(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                        const KernelTable& kernel);

struct SofteningReport {
  std::vector<std::int32_t> soft;    // nodes with a live bond at |S| >= S_c
  std::vector<std::int32_t> failed;  // nodes owning a bond broken during the run
  bool soft_within_failed_or_front = true;
};

// Hypothesis-2 flag: every soft node is failed or lies within `front_radius`
// of the crack tip (tip_x1, 0).
SofteningReport softening_zone(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                               const KernelTable& kernel, double tip_x1, double front_radius);

struct CrackTipSample {
  double t = 0.0;
  double ell = 0.0;
  double V = 0.0;
  std::size_t n_soft = 0;
  std::size_t n_failed = 0;
};

// Running max of the centerline crossings of failed bonds.
class CrackTracker {
 public:
  CrackTracker(const Grid& grid, double ell0) : grid_(&grid), ell_(ell0) {}

  void add(std::span<const BrokenBond> broken);
  double ell() const { return ell_; }

 private:
  const Grid* grid_;
  double ell_;
};

double crack_length(const Grid& grid, std::span<const BrokenBond> broken, double ell0);

// Centered difference of ell over `window` output frames, narrowed at the ends
// of the record; negative rates are clamped to zero.
void smooth_tip_velocity(std::vector<CrackTipSample>& samples, int window);

struct StrainSplit {
  double minus = 0.0;
  double plus = 0.0;
};

// Discrete sub- and super-critical strain integrals against a nodal test field.
StrainSplit strain_split(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                         const KernelTable& kernel, std::span<const double> phi);

struct ContourSpec {
  Vec2 center;
  Vec2 half;
  Vec2 velocity;

  bool contains(const Vec2& p) const {
    return std::abs(p.x - center.x) < half.x && std::abs(p.y - center.y) < half.y;
  }
};

struct DivergenceCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  double scale = 0.0;  // sum of |terms|, for relative comparison
  double residual() const { return std::abs(lhs - rhs); }
  double relative() const { return scale > 0.0 ? residual() / scale : 0.0; }
};

// Both sides of the discrete nonlocal divergence identity for the bond field
// q_ij = dW/dS(S_ij(u)) and the vector field w, over the box and its exterior.
DivergenceCheck nonlocal_divergence_check(std::span<const Vec2> u, std::span<const Vec2> w,
                                          const Grid& grid, const BondTable& bonds,
                                          const KernelTable& kernel, const ContourSpec& box);

struct PowerBalanceSample {
  double t = 0.0;
  double dEdt = 0.0;
  double flux_advective = 0.0;
  double flux_nonlocal = 0.0;
  double residual = 0.0;
  double V = 0.0;       // box speed
  bool cracked = false;  // any bond failed by this frame
};

// Energy E^eps(Gamma) carried by live bonds from the exterior into the box.
double nonlocal_flux(const SimState& state, const Grid& grid, const BondTable& bonds,
                     const KernelTable& kernel, const ContourSpec& box);

// Energy of the box with failed bonds held at their saturated level.
double box_energy(const SimState& state, const Grid& grid, const BondTable& bonds,
                  const KernelTable& kernel, const MaterialModel& model, const ContourSpec& box);

// (T + W)(e1 . n) h summed over the front and rear one-cell collars.
double collar_energy(const SimState& state, const Grid& grid, const BondTable& bonds,
                     const KernelTable& kernel, const MaterialModel& model,
                     const ContourSpec& box);

// Tracks a box following the crack tip. observe_step is called for every
// complete frame; observe_frame marks output frames.
class PowerBalanceTracker {
 public:
  PowerBalanceTracker(const Grid& grid, const BondTable& bonds, const KernelTable& kernel,
                      const MaterialModel& model, Vec2 half_widths);

  void observe_step(const SimState& state);
  void observe_frame(const SimState& state, double tip_x1, bool cracked);
  std::vector<PowerBalanceSample> samples() const;
  ContourSpec box() const { return box_; }

 private:
  double place(double tip_x1) const;

  const Grid& grid_;
  const BondTable& bonds_;
  const KernelTable& kernel_;
  const MaterialModel& model_;
  ContourSpec box_;
  bool started_ = false;
  double last_flux_ = 0.0;
  double last_t_ = 0.0;
  double flux_integral_ = 0.0;

  struct Frame {
    double t;
    double center;
    double energy;
    double collar;
    double flux_integral;  // since the previous frame
    bool cracked;
  };
  std::vector<Frame> frames_;
};

struct LocalLimitRow {
  double epsilon = 0.0;
  double h = 0.0;
  double error = 0.0;   // max |L(u) - div sigma| over probe nodes
  double scale = 0.0;   // |div sigma|
  double order = 0.0;   // observed order against the previous row
};

struct LocalLimitReport {
  std::vector<LocalLimitRow> rows;
  double mu_fit = 0.0;
  double lambda_fit = 0.0;
};

// Manufactured quadratic fields on a small unnotched patch for each (epsilon,
// h_ratio) pair; force at nodes near the patch center is compared with div sigma.
LocalLimitReport local_limit_error(const MaterialModel& model, std::span<const double> epsilons,
                                   std::span<const int> h_ratios, double amplitude);

struct KineticRow {
  double t = 0.0;
  double V = 0.0;
  double J = 0.0;
  double GcV = 0.0;
  std::optional<double> ratio;
};

struct KineticReport {
  std::vector<KineticRow> rows;
  std::optional<double> median_ratio;
  std::size_t steady_begin = 0;
  std::size_t steady_end = 0;
};

// Longest run of frames with V > 0 of at least min_frames frames.
std::pair<std::size_t, std::size_t> steady_window(std::span<const double> V, std::size_t min_frames);

KineticReport kinetic_relation_report(std::span<const CrackTipSample> tips,
                                      std::span<const PowerBalanceSample> power, double Gc,
                                      std::size_t min_frames = 10);

// Largest |u1(x1,x2) - u1(x1,-x2)| and |u2(x1,x2) + u2(x1,-x2)| over mirrored
// node pairs, relative to max |u|.
double mode_one_symmetry_deviation(std::span<const Vec2> u, const Grid& grid);

struct OpeningCount {
  std::size_t checked = 0;
  std::size_t opening = 0;
};

// Nodes within epsilon of the centerline and at least epsilon behind the tip:
// counts those with sign(u2) = sign(x2).
OpeningCount opening_direction(std::span<const Vec2> u, const Grid& grid, double ell0, double tip);

// Fraction of live bonds off the centerline with |S| sqrt(l) > r_c.
double strain_bound_violation(std::span<const Vec2> u, const Grid& grid, const BondTable& bonds,
                              const KernelTable& kernel);

double median(std::vector<double> values);

}  // namespace perifract
