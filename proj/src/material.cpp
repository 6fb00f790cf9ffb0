#include "perifract/material.hpp"

#include <cmath>
#include <numbers>

#include "perifract/errors.hpp"
#include "perifract/quadrature.hpp"

namespace perifract {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kNu = 0.25;
constexpr int kMomentOrder = 64;

double influence_value(InfluenceKind kind, double r) {
  if (r < 0.0 || r >= 1.0) return 0.0;
  switch (kind) {
    case InfluenceKind::LinearDecay:
      return 1.0 - r;
  }
  return 0.0;
}

void fill_wave_speeds(MaterialModel& m) {
  m.cs = std::sqrt(m.mu / m.rho);
  m.cl = std::sqrt((m.lambda + 2.0 * m.mu) / m.rho);
}

// h(r+^2) / c; r+ = 10 r_c puts beta r+^2 at 50 independently of beta.
double saturation_fraction() { return -std::expm1(-50.0); }

}  // namespace

InfluenceFunction::InfluenceFunction(InfluenceKind kind) : kind_(kind), moment_(0.0) {
  const GaussRule rule = gauss_legendre(kMomentOrder);
  moment_ = integrate(rule, 0.0, 1.0, [kind](double r) { return r * r * influence_value(kind, r); });
}

double InfluenceFunction::operator()(double r) const noexcept { return influence_value(kind_, r); }

double BondPotential::g(double r) const noexcept { return -c * std::expm1(-beta * r * r); }

double BondPotential::g_prime(double r) const noexcept {
  return 2.0 * c * beta * r * std::exp(-beta * r * r);
}

double BondPotential::h(double s) const noexcept { return -c * std::expm1(-beta * s); }

double BondPotential::h_prime(double s) const noexcept { return c * beta * std::exp(-beta * s); }

double BondPotential::r_c() const noexcept { return 1.0 / std::sqrt(2.0 * beta); }

double BondPotential::r_plus() const noexcept { return 10.0 * r_c(); }

double eval_g(const BondPotential& pot, double r) noexcept { return pot.g(r); }

double eval_g_prime(const BondPotential& pot, double r) noexcept { return pot.g_prime(r); }

CriticalStrains critical_strains(const BondPotential& pot, double bond_length) {
  if (!(bond_length > 0.0)) throw DomainError("critical_strains: bond length must be positive");
  const double s_c = pot.r_c() / std::sqrt(bond_length);
  return {s_c, 10.0 * s_c};
}

std::string to_string(CalibrationMode mode) {
  return mode == CalibrationMode::Paper ? "paper" : "self_consistent";
}

CalibrationMode calibration_mode_from_string(const std::string& s) {
  if (s == "self_consistent") return CalibrationMode::SelfConsistent;
  if (s == "paper") return CalibrationMode::Paper;
  throw DomainError("unknown calibration mode '" + s + "'");
}

double potential_shear_modulus(const BondPotential& pot, const InfluenceFunction& influence) {
  return 0.5 * influence.moment() * pot.h_prime(0.0);
}

MaterialModel calibrate(double E, double Gc, double rho, const InfluenceFunction& influence) {
  if (!(E > 0.0)) throw CalibrationError("calibrate: Young modulus must be positive");
  if (!(Gc > 0.0)) throw CalibrationError("calibrate: Gc must be positive");
  if (!(rho > 0.0)) throw CalibrationError("calibrate: density must be positive");
  const double M = influence.moment();
  if (!(M > 0.0)) throw CalibrationError("calibrate: influence function has zero moment");

  MaterialModel m;
  m.influence = influence;
  m.rho = rho;
  m.E = E;
  m.nu = kNu;
  m.Gc = Gc;
  m.mu = E / (2.0 * (1.0 + kNu));
  m.lambda = m.mu;
  // Gc = (4/pi) M c (1 - e^-50);  mu = M c beta / 2.
  m.potential.c = Gc * kPi / (4.0 * M * saturation_fraction());
  m.potential.beta = 2.0 * m.mu / (M * m.potential.c);
  m.mode = CalibrationMode::SelfConsistent;
  fill_wave_speeds(m);
  return m;
}

MaterialModel calibrate_with_constants(double E, double Gc, double rho,
                                       const InfluenceFunction& influence, double c, double beta) {
  if (!(rho > 0.0)) throw CalibrationError("calibrate: density must be positive");
  if (!(c > 0.0) || !(beta > 0.0)) throw CalibrationError("calibrate: c and beta must be positive");
  MaterialModel m;
  m.influence = influence;
  m.rho = rho;
  m.E = E;
  m.nu = kNu;
  m.Gc = Gc;
  m.potential = {c, beta};
  m.mu = potential_shear_modulus(m.potential, influence);
  m.lambda = m.mu;
  m.mode = CalibrationMode::Paper;
  fill_wave_speeds(m);
  return m;
}

double gc_closed_form(const MaterialModel& model) {
  const BondPotential& pot = model.potential;
  // g(sqrt(l) S+) = g(r+) for every bond length.
  return 4.0 / kPi * pot.g(pot.r_plus()) * model.influence.moment();
}

double gc_direct_quadrature(const MaterialModel& model, double epsilon, int n_quad) {
  if (!(epsilon > 0.0)) throw DomainError("gc_direct_quadrature: epsilon must be positive");
  if (n_quad < 16) throw DomainError("gc_direct_quadrature: need at least 16 points per axis");
  const GaussRule rule = gauss_legendre(n_quad);
  const BondPotential& pot = model.potential;
  const InfluenceFunction& J = model.influence;
  const double eps3 = epsilon * epsilon * epsilon;

  // Pair potential per unit length at the failure strain of a bond of length zeta.
  auto pair_potential_at_failure = [&](double zeta) {
    const double s_plus = pot.r_plus() / std::sqrt(zeta);
    return J(zeta / epsilon) / (eps3 * kPi * zeta) * pot.g(std::sqrt(zeta) * s_plus);
  };

  // x sits at depth z below the line; y ranges over the cap above it.
  // zeta = z + (eps - z) s^2 removes the square-root behaviour of arccos(z/zeta) at zeta = z.
  const double one_sided = integrate(rule, 0.0, epsilon, [&](double z) {
    const double span = epsilon - z;
    return integrate(rule, 0.0, 1.0, [&](double s) {
      const double zeta = z + span * s * s;
      const double jac = 2.0 * span * s;
      const double psi_max = std::acos(std::min(1.0, z / zeta));
      const double w = pair_potential_at_failure(zeta);
      const double angular =
          integrate(rule, 0.0, psi_max, [&](double) { return w * zeta * zeta; });
      return angular * jac;
    });
  });
  // 2 for the two half-caps (psi of either sign), 2 for the two orientations of
  // each pair in the potential energy double integral.
  return 2.0 * 2.0 * one_sided;
}

namespace {

struct RayleighTerms {
  double numer_over_v2;  // (16 as^2 al^2 - (1+as^2)^4) / V^2
  double denom;          // 4 as al + (1+as^2)^2
  double alpha_s;
  double alpha_l;
};

RayleighTerms rayleigh_terms(const MaterialModel& m, double V) {
  const double p = 1.0 / (m.cs * m.cs);
  const double q = 1.0 / (m.cl * m.cl);
  const double V2 = V * V;
  const double a = V2 * p;
  RayleighTerms t{};
  t.alpha_s = std::sqrt(1.0 - a);
  t.alpha_l = std::sqrt(1.0 - V2 * q);
  t.numer_over_v2 = 16.0 * p - 16.0 * q + 16.0 * V2 * p * q - 24.0 * V2 * p * p +
                    8.0 * V2 * V2 * p * p * p - V2 * V2 * V2 * p * p * p * p;
  t.denom = 4.0 * t.alpha_s * t.alpha_l + (2.0 - a) * (2.0 - a);
  return t;
}

}  // namespace

double rayleigh_speed(const MaterialModel& model) {
  double lo = 0.0;
  double hi = model.cs;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (rayleigh_terms(model, mid).numer_over_v2 > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

double freund_energy_rate(const MaterialModel& model, double V, double K_I) {
  if (!(V >= 0.0) || !(V < model.cs)) {
    throw DomainError("freund_energy_rate: crack speed must lie in [0, c_s)");
  }
  if (V >= rayleigh_speed(model)) {
    throw DomainError("freund_energy_rate: crack speed must be below the Rayleigh speed");
  }
  const RayleighTerms t = rayleigh_terms(model, V);
  // V^3 / D = V * denom / numer_over_v2, finite as V -> 0.
  const double v3_over_d = V * t.denom / t.numer_over_v2;
  return (1.0 + model.nu) / model.E * v3_over_d / (model.cs * model.cs) * t.alpha_l * K_I * K_I;
}

double kinetic_toughness(double J, double V) {
  if (!(V > 0.0)) throw DomainError("kinetic_toughness: crack speed must be positive");
  return J / V;
}

}  // namespace perifract
