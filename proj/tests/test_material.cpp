#include <doctest.h>

#include <cmath>

#include "perifract/errors.hpp"
#include "perifract/material.hpp"
#include "perifract/quadrature.hpp"
#include "support.hpp"

using namespace perifract;

TEST_CASE("gauss-legendre integrates polynomials of degree 2n-1 exactly") {
  const GaussRule rule = gauss_legendre(5);
  const double v = integrate(rule, 0.0, 2.0, [](double x) { return std::pow(x, 9) - 3.0 * x * x; });
  CHECK(v == test_support::approx(1024.0 / 10.0 - 8.0).epsilon(1e-13));
}

TEST_CASE("linear-decay influence moment is 1/12") {
  const InfluenceFunction J;
  CHECK(J.moment() == test_support::approx(1.0 / 12.0).epsilon(1e-14));
  CHECK(J(0.0) == 1.0);
  CHECK(J(0.25) == test_support::approx(0.75));
  CHECK(J(1.0) == 0.0);
  CHECK(J(1.5) == 0.0);
}

TEST_CASE("eval_g") {
  const BondPotential pot{392.7, 1.3201e7};
  CHECK(eval_g(pot, 0.0) == 0.0);
  CHECK(eval_g(pot, 1.0) == test_support::approx(392.7).epsilon(1e-15));
  const double rc = 1.0 / std::sqrt(2.0 * 1.3201e7);
  CHECK(pot.r_c() == test_support::approx(rc).epsilon(1e-15));
  CHECK(eval_g(pot, rc) == test_support::approx(392.7 * (1.0 - std::exp(-0.5))).epsilon(1e-14));
  CHECK(eval_g(pot, rc) == test_support::approx(154.5).epsilon(1e-3));
  for (double r : {1e-5, 3e-4, 2e-3}) CHECK(eval_g(pot, -r) == eval_g(pot, r));
}

TEST_CASE("eval_g_prime peaks at r_c and is odd") {
  const BondPotential pot{392.7, 1.3201e7};
  CHECK(eval_g_prime(pot, 0.0) == 0.0);
  const double rc = pot.r_c();
  double best_r = 0.0;
  double best = -1.0;
  for (int k = 1; k <= 20000; ++k) {
    const double r = k * 1e-3 * rc;
    if (eval_g_prime(pot, r) > best) {
      best = eval_g_prime(pot, r);
      best_r = r;
    }
    CHECK(eval_g_prime(pot, r) > 0.0);
    CHECK(eval_g_prime(pot, -r) == -eval_g_prime(pot, r));
  }
  CHECK(best_r == test_support::approx(rc).epsilon(1e-3));
  // derivative of g by central difference
  const double r = 0.7 * rc;
  const double d = 1e-6 * rc;
  CHECK(eval_g_prime(pot, r) ==
        test_support::approx((eval_g(pot, r + d) - eval_g(pot, r - d)) / (2 * d)).epsilon(1e-7));
}

TEST_CASE("critical strains") {
  BondPotential unit;
  unit.c = 1.0;
  unit.beta = 1.0 / (2.0 * 0.1 * 0.1);
  const CriticalStrains s = critical_strains(unit, 1.0);
  CHECK(s.s_c == test_support::approx(0.1).epsilon(1e-14));
  CHECK(s.s_plus == test_support::approx(1.0).epsilon(1e-14));
  CHECK(critical_strains(unit, 4.0).s_c == test_support::approx(0.5 * critical_strains(unit, 1.0).s_c));

  const BondPotential pot{392.7, 1.3201e7};
  CHECK(critical_strains(pot, 1e-3).s_c == test_support::approx(6.158e-3).epsilon(1e-3));
  CHECK_THROWS_AS(critical_strains(pot, 0.0), DomainError);
}

TEST_CASE("self-consistent calibration") {
  const MaterialModel m = test_support::default_model();
  CHECK(m.mu == test_support::approx(1.296e9).epsilon(1e-13));
  CHECK(m.lambda == m.mu);
  CHECK(m.nu == 0.25);
  CHECK(m.cs == test_support::approx(std::sqrt(m.mu / m.rho)).epsilon(1e-14));
  CHECK(m.cl == test_support::approx(std::sqrt((m.lambda + 2 * m.mu) / m.rho)).epsilon(1e-14));
  CHECK(gc_closed_form(m) == test_support::approx(500.0).epsilon(1e-12));
  CHECK(potential_shear_modulus(m.potential, m.influence) == test_support::approx(m.mu).epsilon(1e-12));
  CHECK(m.mode == CalibrationMode::SelfConsistent);
}

TEST_CASE("calibration round trip recovers c and beta") {
  const InfluenceFunction J;
  for (auto [c, beta] : {std::pair{392.7, 1.3201e7}, std::pair{1000.0, 2e6}, std::pair{17.5, 4e8}}) {
    const MaterialModel fwd = calibrate_with_constants(1.0, 1.0, 1200.0, J, c, beta);
    const double E = 2.5 * fwd.mu;
    const MaterialModel back = calibrate(E, gc_closed_form(fwd), 1200.0, J);
    CHECK(back.potential.c == test_support::approx(c).epsilon(1e-10));
    CHECK(back.potential.beta == test_support::approx(beta).epsilon(1e-10));
  }
}

TEST_CASE("calibration rejects nonpositive inputs") {
  const InfluenceFunction J;
  CHECK_THROWS_AS(calibrate(0.0, 500.0, 1200.0, J), CalibrationError);
  CHECK_THROWS_AS(calibrate(3.24e9, -1.0, 1200.0, J), CalibrationError);
  CHECK_THROWS_AS(calibrate_with_constants(3.24e9, 500.0, 1200.0, J, 0.0, 1.0), CalibrationError);
}

TEST_CASE("closed-form toughness") {
  const InfluenceFunction J;
  const MaterialModel paper = calibrate_with_constants(3.24e9, 500.0, 1200.0, J, 392.7, 1.3201e7);
  const double saturated = 392.7 * (1.0 - std::exp(-50.0));
  CHECK(gc_closed_form(paper) == test_support::approx(saturated / (3.0 * M_PI)).epsilon(1e-12));
  CHECK(gc_closed_form(paper) == test_support::approx(41.67).epsilon(1e-4));
  const MaterialModel doubled = calibrate_with_constants(3.24e9, 500.0, 1200.0, J, 2 * 392.7, 1.3201e7);
  CHECK(gc_closed_form(doubled) == test_support::approx(2.0 * gc_closed_form(paper)).epsilon(1e-14));
}

TEST_CASE("direct toughness quadrature is horizon independent") {
  const MaterialModel m = test_support::default_model();
  const double g25 = gc_direct_quadrature(m, 2.5e-3, 128);
  const double g0625 = gc_direct_quadrature(m, 0.625e-3, 128);
  CHECK(std::abs(g25 - g0625) / g25 <= 1e-6);
  CHECK(std::abs(g25 - gc_closed_form(m)) / gc_closed_form(m) <= 1e-5);

  MaterialModel zero = m;
  zero.potential.c = 0.0;
  CHECK(gc_direct_quadrature(zero, 2.5e-3, 64) == 0.0);
  CHECK_THROWS_AS(gc_direct_quadrature(m, 0.0, 64), DomainError);
}

TEST_CASE("rayleigh speed for nu = 1/4") {
  const MaterialModel m = test_support::default_model();
  const double cr = rayleigh_speed(m);
  CHECK(cr > 0.0);
  CHECK(cr < m.cs);
  CHECK(cr / m.cs == test_support::approx(0.919402).epsilon(1e-5));
}

TEST_CASE("freund energy rate") {
  const MaterialModel m = test_support::default_model();
  CHECK(freund_energy_rate(m, 0.0, 1e6) == 0.0);
  // J / V tends to the static release rate (1 - nu^2) K^2 / E
  const double v_small = 1e-6 * m.cs;
  const double small = freund_energy_rate(m, v_small, 1e6);
  CHECK(std::isfinite(small));
  CHECK(small / v_small == test_support::approx((1 - 0.0625) * 1e12 / m.E).epsilon(1e-6));
  const double V = 0.3 * m.cs;
  CHECK(freund_energy_rate(m, V, 2e6) > freund_energy_rate(m, V, 1e6));
  CHECK(freund_energy_rate(m, V, 2e6) == test_support::approx(4 * freund_energy_rate(m, V, 1e6)));
  CHECK_THROWS_AS(freund_energy_rate(m, -1.0, 1e6), DomainError);
  CHECK_THROWS_AS(freund_energy_rate(m, m.cs, 1e6), DomainError);
}

TEST_CASE("kinetic toughness") {
  CHECK(kinetic_toughness(1000.0, 2.0) == 500.0);
  CHECK_THROWS_AS(kinetic_toughness(1.0, 0.0), DomainError);
}

TEST_CASE("calibration mode names") {
  CHECK(to_string(CalibrationMode::Paper) == "paper");
  CHECK(calibration_mode_from_string("self_consistent") == CalibrationMode::SelfConsistent);
  CHECK_THROWS_AS(calibration_mode_from_string("bogus"), DomainError);
}
