#pragma once

#include <string>

namespace perifract {

// Radial weight J(r) on the normalized distance r = |y - x| / epsilon.
enum class InfluenceKind { LinearDecay };

class InfluenceFunction {
 public:
  explicit InfluenceFunction(InfluenceKind kind = InfluenceKind::LinearDecay);

  InfluenceKind kind() const noexcept { return kind_; }

  // J(r); zero for r >= 1 and for r < 0.
  double operator()(double r) const noexcept;

  // M = int_0^1 r^2 J(r) dr, evaluated once by quadrature.
  double moment() const noexcept { return moment_; }

 private:
  InfluenceKind kind_;
  double moment_;
};

// Cohesive potential g(r) = c (1 - exp(-beta r^2)) = h(r^2), h concave.
struct BondPotential {
  double c = 0.0;     // energy scale, asymptote C+ of g
  double beta = 0.0;  // 1 / r^2 scale

  double g(double r) const noexcept;
  double g_prime(double r) const noexcept;
  double h(double s) const noexcept;
  double h_prime(double s) const noexcept;

  // Inflection point of g, where g' is maximal.
  double r_c() const noexcept;
  // Failure argument, 10 r_c.
  double r_plus() const noexcept;
  double c_plus() const noexcept { return c; }
};

double eval_g(const BondPotential& pot, double r) noexcept;
double eval_g_prime(const BondPotential& pot, double r) noexcept;

struct CriticalStrains {
  double s_c;     // softening onset
  double s_plus;  // failure
};

// Bond strain thresholds for a bond of the given rest length (m).
CriticalStrains critical_strains(const BondPotential& pot, double bond_length);

enum class CalibrationMode { SelfConsistent, Paper };

std::string to_string(CalibrationMode mode);
CalibrationMode calibration_mode_from_string(const std::string& s);

struct MaterialModel {
  double rho = 0.0;     // kg/m^3
  double E = 0.0;       // nominal Young modulus, Pa
  double nu = 0.25;     // fixed for the bond-based model
  double Gc = 0.0;      // nominal critical energy release rate, J/m^2
  double mu = 0.0;      // Lame moduli realised by the potential, Pa
  double lambda = 0.0;
  BondPotential potential;
  InfluenceFunction influence;
  double cs = 0.0;  // shear wave speed, m/s
  double cl = 0.0;  // longitudinal wave speed, m/s
  CalibrationMode mode = CalibrationMode::SelfConsistent;
};

// Shear modulus realised by the potential at small strain,
// mu = lambda = M h'(0) / 2 for the energy sum over ordered point pairs.
double potential_shear_modulus(const BondPotential& pot, const InfluenceFunction& influence);

// Inverts the moduli and toughness formulas for (c, beta) given E and Gc (nu = 1/4).
MaterialModel calibrate(double E, double Gc, double rho, const InfluenceFunction& influence);

// Uses prescribed (c, beta); moduli and wave speeds follow from the potential.
MaterialModel calibrate_with_constants(double E, double Gc, double rho,
                                       const InfluenceFunction& influence, double c, double beta);

// Closed-form toughness (4/pi) int_0^1 g(r+) r^2 J(r) dr; independent of the horizon.
double gc_closed_form(const MaterialModel& model);

// Energy per unit crack length needed to remove every interaction across a
// straight line, integrated directly over the horizon geometry.
double gc_direct_quadrature(const MaterialModel& model, double epsilon, int n_quad);

// Energy flowing into a crack tip moving at speed V under mode-I stress
// intensity K_I (Freund's representation), in W/m.
double freund_energy_rate(const MaterialModel& model, double V, double K_I);

// Root of D(V) = 4 a_s a_l - (1 + a_s^2)^2 in (0, c_s).
double rayleigh_speed(const MaterialModel& model);

// Toughness implied by the kinetic relation Gc = J / V.
double kinetic_toughness(double J, double V);

}  // namespace perifract
