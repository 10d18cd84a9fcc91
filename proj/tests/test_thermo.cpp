#include <doctest.h>

#include <cmath>
#include <random>

#include "nslab/thermo.hpp"

using namespace nslab;

TEST_CASE("power law closed forms at gamma=2") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  const ThermoSample s = thermo_eval(law, 2.0);
  CHECK(s.p == doctest::Approx(4.0));
  CHECK(s.H == doctest::Approx(2.0));   // rho^2 - rho
  CHECK(s.dH == doctest::Approx(3.0));  // 2 rho - 1
  CHECK(s.ddH == doctest::Approx(2.0));
}

TEST_CASE("H(1) = 0 for integral-form laws") {
  std::vector<PressureLaw> laws = {
      PressureLaw::power(1.0, 2.0), PressureLaw::power(2.5, 1.4),
      PressureLaw::nonmonotone(PressureLaw::power(1.0, 2.0),
                               PressurePerturbation{0.5, 1.0, 0.5})};
  for (const auto& law : laws) CHECK(law.helmholtz(1.0) == doctest::Approx(0.0));
  // The artificial part is rho^beta/(beta-1), which does not vanish at 1.
  const PressureLaw reg =
      PressureLaw::regularized(PressureLaw::power(1.0, 2.0), 0.1, 5.0);
  CHECK(reg.helmholtz(1.0) == doctest::Approx(0.1 / 4.0));
}

TEST_CASE("regularized law adds the artificial parts") {
  const PressureLaw law =
      PressureLaw::regularized(PressureLaw::power(1.0, 2.0), 0.1, 5.0);
  const ThermoSample s = thermo_eval(law, 2.0);
  CHECK(s.p == doctest::Approx(7.2));        // 4 + 0.1 * 32
  CHECK(s.H == doctest::Approx(2.8));        // 2 + 0.1 * 32 / 4
  CHECK(relative_energy(law, 2.0, 1.0) == doctest::Approx(1.65));
}

TEST_CASE("beta constraint enforced") {
  CHECK_THROWS_WITH_AS(
      PressureLaw::regularized(PressureLaw::power(1.0, 2.0), 0.1, 3.0),
      doctest::Contains("beta > max{gamma, 9/2}"), ConfigError);
  CHECK_THROWS_AS(
      PressureLaw::regularized(PressureLaw::power(1.0, 5.0), 0.1, 4.8),
      ConfigError);
}

TEST_CASE("quadrature oracle agrees with the closed forms") {
  std::mt19937 gen(11);
  std::uniform_real_distribution<double> dis(0.05, 6.0);
  std::vector<PressureLaw> laws = {
      PressureLaw::power(1.0, 2.0), PressureLaw::power(0.7, 1.7),
      PressureLaw::regularized(PressureLaw::power(1.3, 2.2), 0.05, 5.5)};
  for (const auto& law : laws) {
    for (int k = 0; k < 60; ++k) {
      const double rho = dis(gen);
      const double closed = law.helmholtz(rho);
      const double quad = helmholtz_by_quadrature(law, rho);
      // The artificial Helmholtz part drops the linear-in-rho term of the
      // defining integral; compare after removing it.
      double lin = 0.0;
      if (law.delta() > 0.0) lin = -law.delta() * rho / (law.beta() - 1.0);
      CHECK(quad + 0.0 == doctest::Approx(closed + lin).epsilon(1e-9));
    }
  }
}

TEST_CASE("thermo identities on a log grid") {
  std::vector<PressureLaw> laws = {
      PressureLaw::power(1.0, 2.0), PressureLaw::power(2.0, 1.4),
      PressureLaw::regularized(PressureLaw::power(1.0, 2.0), 1e-2, 6.0),
      PressureLaw::nonmonotone(PressureLaw::power(1.0, 2.0),
                               PressurePerturbation{0.4, 1.5, 0.8})};
  for (const auto& law : laws) {
    for (int k = 0; k <= 200; ++k) {
      const double rho = std::pow(10.0, -4.0 + 6.0 * k / 200.0);
      const ThermoSample s = thermo_eval(law, rho);
      // ddH = p'/rho with the Helmholtz-consistent pressure.
      CHECK(std::abs(s.ddH - law.dhelm_pressure(rho) / rho) <=
            1e-8 * std::abs(s.ddH));
      // rho H' - H = p (Helmholtz-consistent).
      const double p_h = law.helm_pressure(rho);
      CHECK(std::abs(rho * s.dH - s.H - p_h) <= 1e-10 * (1.0 + std::abs(p_h)));
    }
  }
}

TEST_CASE("relative energy basics") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  SUBCASE("E(rho|rho) = 0") {
    for (double rho : {0.3, 1.0, 2.5, 7.0})
      CHECK(relative_energy(law, rho, rho) == doctest::Approx(0.0));
  }
  SUBCASE("gamma=2 closed form (rho - r)^2") {
    CHECK(relative_energy(law, 2.0, 1.0) == doctest::Approx(1.0));
    CHECK(relative_energy(law, 0.0, 1.0) == doctest::Approx(1.0));
    std::mt19937 gen(3);
    std::uniform_real_distribution<double> dis(0.0, 10.0);
    for (int k = 0; k < 20000; ++k) {
      const double rho = dis(gen), r = 0.01 + dis(gen);
      CHECK(std::abs(relative_energy(law, rho, r) - (rho - r) * (rho - r)) <=
            1e-12);
    }
  }
  SUBCASE("E(0|r) equals p(r)") {
    for (double r : {0.5, 1.0, 2.0})
      CHECK(relative_energy(law, 0.0, r) == doctest::Approx(law.pressure(r)));
  }
  SUBCASE("domain errors") {
    CHECK_THROWS_AS(relative_energy(law, 1.0, 0.0), DomainError);
    CHECK_THROWS_AS(relative_energy(law, -0.5, 1.0), DomainError);
  }
}

TEST_CASE("relative energy nonnegative for monotone laws") {
  std::vector<PressureLaw> laws = {
      PressureLaw::power(1.0, 2.0), PressureLaw::power(0.8, 1.4),
      PressureLaw::regularized(PressureLaw::power(1.0, 1.6), 0.2, 5.0)};
  std::mt19937 gen(5);
  std::uniform_real_distribution<double> dis(0.0, 8.0);
  for (const auto& law : laws) {
    for (int k = 0; k < 5000; ++k) {
      const double rho = dis(gen);
      const double r = 1.0 + dis(gen) / 8.0;  // r in [1, 2]
      const double e = relative_energy(law, rho, r);
      CHECK(e >= -1e-14);
      if (std::abs(rho - r) > 1e-3) CHECK(e > 0.0);
    }
  }
}

TEST_CASE("nonmonotone law: helmholtz from the monotone part only") {
  const PressureLaw pi = PressureLaw::power(1.0, 2.0);
  const PressureLaw law =
      PressureLaw::nonmonotone(pi, PressurePerturbation{0.6, 1.2, 0.6});
  CHECK(law.pressure(1.2) < pi.pressure(1.2));  // perturbation is negative
  CHECK(law.pressure(5.0) == doctest::Approx(pi.pressure(5.0)));  // compact support
  for (double rho : {0.5, 1.0, 1.2, 2.0})
    CHECK(law.helmholtz(rho) == doctest::Approx(pi.helmholtz(rho)));
  CHECK(!law.is_monotone());
}

TEST_CASE("ess_res_split masks") {
  Field rho(5);
  rho << 0.2, 0.5, 1.0, 4.0, 4.1;
  const EssResSplit s = ess_res_split(rho, 1.0, 2.0);
  CHECK(!s.ess[0]);
  CHECK(s.ess[1]);  // 0.5 = a/2 inclusive
  CHECK(s.ess[2]);
  CHECK(s.ess[3]);  // 4.0 = 2b inclusive
  CHECK(!s.ess[4]);
  CHECK_THROWS_AS(ess_res_split(rho, -1.0, 2.0), DomainError);
  CHECK_THROWS_AS(ess_res_split(rho, 2.0, 1.0), DomainError);
}

TEST_CASE("ess_res_split per-cell membership for a ramp") {
  Field rho(60);
  for (int i = 0; i < 60; ++i) rho[i] = 6.0 * (i + 0.5) / 60.0;
  const EssResSplit s = ess_res_split(rho, 1.0, 2.0);
  for (int i = 0; i < 60; ++i)
    CHECK(s.ess[i] == (rho[i] >= 0.5 && rho[i] <= 4.0));
}

TEST_CASE("lower bound constant for gamma=2 on [1,2]") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  const LowerBoundConstant lb = lower_bound_constant(law, 1.0, 2.0);
  // Analytic edge value E(a/2|a)/(1 + a/2) = 0.25/1.5 = 1/6.
  CHECK(lb.c == doctest::Approx(1.0 / 6.0).epsilon(1e-2));
  CHECK(std::abs(lb.c - 1.0 / 6.0) <= 1e-3);
  CHECK(lb.arg_rho == doctest::Approx(0.5).epsilon(0.01));
  CHECK(lb.arg_r == doctest::Approx(1.0).epsilon(0.01));
  CHECK(lb.c > 0.0);
  CHECK_THROWS_AS(lower_bound_constant(
                      PressureLaw::nonmonotone(law, PressurePerturbation{0.1, 1, 1}),
                      1.0, 2.0),
                  HypothesisError);
}

TEST_CASE("essential-only ratio is exactly 1 for gamma=2") {
  // On the essential window E = (rho - r)^2 equals the denominator.
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  for (double rho : {0.5, 0.9, 1.7, 3.3, 4.0}) {
    for (double r : {1.0, 1.5, 2.0}) {
      if (rho == r) continue;
      const double e = relative_energy(law, rho, r);
      CHECK(e / ((rho - r) * (rho - r)) == doctest::Approx(1.0));
    }
  }
}

TEST_CASE("E1 inequality holds on a finer grid with c/2") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  const LowerBoundConstant lb = lower_bound_constant(law, 1.0, 2.0);
  ConstantGrid fine;
  fine.rho_step = 5e-4;
  fine.r_step = 5e-4;
  fine.rho_max = 12.0;
  const double c_half = 0.5 * lb.c;
  for (double rho = 0.0; rho <= fine.rho_max; rho += 23 * fine.rho_step) {
    for (double r = 1.0; r <= 2.0; r += 17 * fine.r_step) {
      const bool ess = EssResSplit::essential(rho, 1.0, 2.0);
      const double denom = ess ? (rho - r) * (rho - r) : 1.0 + rho;
      CHECK(relative_energy(law, rho, r) >= c_half * denom - 1e-12);
    }
  }
}

TEST_CASE("residual pressure constant for gamma=2 on [1,2]") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  const ResidualPressureConstant rp = residual_pressure_check(law, 1.0, 2.0);
  // p/E on the residual set peaks at rho -> 4+, r = 2: 16/4 = 4.
  CHECK(rp.c == doctest::Approx(4.0).epsilon(5e-3));
  CHECK(rp.arg_rho == doctest::Approx(4.0).epsilon(0.01));
  CHECK(rp.arg_r == doctest::Approx(2.0).epsilon(0.01));
  // rho = 0 contributes nothing: p(0) = 0.
  CHECK(law.pressure(0.0) == 0.0);
}

TEST_CASE("field-level rentropy constant bounds the combined integrand") {
  const PressureLaw law = PressureLaw::power(1.0, 2.0);
  const double a = 1.0, b = 2.0;
  const LowerBoundConstant lb = lower_bound_constant(law, a, b);
  const ResidualPressureConstant rp = residual_pressure_check(law, a, b);
  const double c = rentropy_constant(lb.c, rp.c);
  CHECK(c > 0.0);
  std::mt19937 gen(17);
  std::uniform_real_distribution<double> rho_d(0.0, 10.0), r_d(a, b);
  for (int k = 0; k < 20000; ++k) {
    const double rho = rho_d(gen), r = r_d(gen);
    const bool ess = EssResSplit::essential(rho, a, b);
    const double lhs =
        c * ((ess ? 0.0 : 1.0 + rho + law.pressure(rho)) +
             (ess ? (rho - r) * (rho - r) : 0.0));
    CHECK(lhs <= relative_energy(law, rho, r) + 1e-12);
  }
}

TEST_CASE("delta-consistency of the regularized relative energy") {
  const PressureLaw base = PressureLaw::power(1.0, 2.0);
  const double rho = 2.1, r = 1.3;
  const double e0 = relative_energy(base, rho, r);
  double prev_gap = -1.0;
  for (double delta : {1e-1, 1e-2, 1e-3, 1e-4}) {
    const PressureLaw law = PressureLaw::regularized(base, delta, 5.0);
    const double gap = relative_energy(law, rho, r) - e0;
    CHECK(gap > 0.0);
    if (prev_gap > 0.0) CHECK(gap == doctest::Approx(prev_gap / 10.0).epsilon(1e-6));
    prev_gap = gap;
  }
}
