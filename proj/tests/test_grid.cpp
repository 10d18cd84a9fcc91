#include <doctest.h>

#include <cmath>
#include <random>

#include "nslab/grid.hpp"
#include "nslab/samplers.hpp"

using namespace nslab;

namespace {

Domain unit_interval(int cells) {
  DomainConfig cfg;
  cfg.dim = 1;
  cfg.lower[0] = 0.0;
  cfg.upper[0] = 1.0;
  cfg.cells[0] = cells;
  return build_domain(cfg);
}

Domain rectangle(int nx, int ny, double lx = 1.0, double ly = 2.0) {
  DomainConfig cfg;
  cfg.dim = 2;
  cfg.upper[0] = lx;
  cfg.upper[1] = ly;
  cfg.cells[0] = nx;
  cfg.cells[1] = ny;
  return build_domain(cfg);
}

VelocitySampler constant_u(double ux, double uy = 0.0) {
  return [=](const Vec2&) { return Vec2(ux, uy); };
}

DensitySampler constant_rho(double r) {
  return [=](double, const Vec2&) { return r; };
}

}  // namespace

TEST_CASE("build_domain derives spacing") {
  const Domain d1 = unit_interval(100);
  CHECK(d1.spacing[0] == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(d1.cell_count() == 100);

  const Domain d2 = rectangle(50, 100);
  CHECK(d2.spacing[0] == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(d2.spacing[1] == doctest::Approx(0.02).epsilon(1e-14));
  CHECK(d2.cell_count() == 5000);
}

TEST_CASE("build_domain rejects bad extents and counts") {
  DomainConfig cfg;
  cfg.dim = 1;
  cfg.lower[0] = 0.0;
  cfg.upper[0] = 1.0;
  cfg.cells[0] = 3;
  CHECK_THROWS_WITH_AS(build_domain(cfg), doctest::Contains("below minimum"),
                       ConfigError);
  cfg.cells[0] = 10;
  cfg.upper[0] = -1.0;
  CHECK_THROWS_WITH_AS(build_domain(cfg), doctest::Contains("axis x"), ConfigError);
}

TEST_CASE("classify_boundary signs") {
  const Domain d = unit_interval(16);
  SUBCASE("uniform positive velocity: left in, right out") {
    const auto p = classify_boundary(d, constant_u(1.0), constant_rho(1.0));
    REQUIRE(p.face_count() == 2);
    for (int f = 0; f < 2; ++f) {
      if (p.faces[f].side < 0) {
        CHECK(p.cls[f] == FaceClass::In);
        CHECK(p.ub_dot_n[f] == doctest::Approx(-1.0));
        CHECK(p.rho_b[f] == doctest::Approx(1.0));
      } else {
        CHECK(p.cls[f] == FaceClass::Out);
        CHECK(std::isnan(p.rho_b[f]));
      }
    }
  }
  SUBCASE("zero velocity: both faces zero-class") {
    const auto p = classify_boundary(d, constant_u(0.0));
    CHECK(p.cls[0] == FaceClass::Zero);
    CHECK(p.cls[1] == FaceClass::Zero);
    CHECK(!p.has_class(FaceClass::In));
    CHECK(!p.has_class(FaceClass::Out));
  }
  SUBCASE("missing inflow density is a data error") {
    CHECK_THROWS_AS(classify_boundary(d, constant_u(1.0)), DataError);
  }
}

TEST_CASE("classify_boundary 2D rectangle with u=(1,0)") {
  const Domain d = rectangle(8, 6);
  const auto p = classify_boundary(d, constant_u(1.0, 0.0), constant_rho(1.0));
  int in = 0, out = 0, zero = 0;
  for (int f = 0; f < p.face_count(); ++f) {
    switch (p.cls[f]) {
      case FaceClass::In:
        ++in;
        CHECK(p.faces[f].axis == 0);
        CHECK(p.faces[f].side == -1);
        break;
      case FaceClass::Out:
        ++out;
        CHECK(p.faces[f].axis == 0);
        CHECK(p.faces[f].side == +1);
        break;
      case FaceClass::Zero:
        ++zero;
        CHECK(p.faces[f].axis == 1);
        break;
    }
  }
  CHECK(in == 6);
  CHECK(out == 6);
  CHECK(zero == 16);
}

TEST_CASE("classification invariant under positive scaling") {
  const Domain d = unit_interval(12);
  std::mt19937 gen(2024);
  std::uniform_real_distribution<double> dis(-2.0, 2.0);
  for (int trial = 0; trial < 50; ++trial) {
    const double ul = dis(gen), ur = dis(gen), scale = 0.1 + 3.0 * std::abs(dis(gen));
    auto u1 = [&](const Vec2& x) { return Vec2(x[0] < 0.5 ? ul : ur, 0.0); };
    auto u2 = [&](const Vec2& x) { return Vec2(scale * (x[0] < 0.5 ? ul : ur), 0.0); };
    const auto p1 = classify_boundary(d, u1, constant_rho(1.0));
    const auto p2 = classify_boundary(d, u2, constant_rho(1.0));
    for (int f = 0; f < p1.face_count(); ++f) CHECK(p1.cls[f] == p2.cls[f]);
  }
}

TEST_CASE("inner_collar counts") {
  const Domain d = unit_interval(100);
  SUBCASE("h = 0.05 gives 5 cells per side") {
    const CellMask m = inner_collar(d, 0.05);
    CHECK(m.count() == 10);
    CHECK(mask_measure(d, m) == doctest::Approx(0.10).epsilon(1e-14));
  }
  SUBCASE("tiny h gives an empty mask") {
    const CellMask m = inner_collar(d, 0.004);
    CHECK(m.count() == 0);
    CHECK(mask_measure(d, m) == 0.0);
  }
  SUBCASE("h near half width keeps measure below the domain") {
    const CellMask m = inner_collar(d, 0.5 - 0.01);
    CHECK(mask_measure(d, m) < d.volume());
    CHECK(m.count() == 98);
  }
  SUBCASE("measure equals 2h whenever h is a multiple of spacing") {
    for (int k = 1; k <= 40; ++k) {
      const double h = k * d.spacing[0];
      CHECK(mask_measure(d, inner_collar(d, h)) == doctest::Approx(2.0 * h));
    }
  }
  CHECK_THROWS_AS(inner_collar(d, 0.7), ConfigError);
  CHECK_THROWS_AS(inner_collar(d, 0.0), ConfigError);
}

TEST_CASE("integrate midpoint rule") {
  const Domain d = unit_interval(100);
  CHECK(integrate(d, Field::Ones(100)) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(integrate(d, Field::Zero(100)) == 0.0);
  Field x(100);
  for (int i = 0; i < 100; ++i) x[i] = d.center(i)[0];
  CHECK(integrate(d, x) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK_THROWS_AS(integrate(d, Field::Ones(7)), Error);
}

TEST_CASE("integrate is additive over disjoint masks") {
  const Domain d = unit_interval(64);
  std::mt19937 gen(7);
  std::uniform_real_distribution<double> dis(-1.0, 1.0);
  Field f(64);
  for (int i = 0; i < 64; ++i) f[i] = dis(gen);
  const CellMask collar = inner_collar(d, 0.2);
  CellMask inner;
  inner.member = !collar.member;
  CHECK(integrate(d, f, collar) + integrate(d, f, inner) ==
        doctest::Approx(integrate(d, f)).epsilon(1e-13));
}

TEST_CASE("quadrature order >= 2 on smooth integrands") {
  std::vector<double> errs;
  for (int n : {25, 50, 100, 200}) {
    const Domain d = unit_interval(n);
    Field f(n);
    for (int i = 0; i < n; ++i) f[i] = std::exp(d.center(i)[0]);
    errs.push_back(std::abs(integrate(d, f) - (std::exp(1.0) - 1.0)));
  }
  for (size_t i = 1; i < errs.size(); ++i) {
    const double order = std::log2(errs[i - 1] / errs[i]);
    CHECK(order > 1.9);
  }
}

TEST_CASE("1D extension: constant data is constant with zero divergence") {
  const Domain d = unit_interval(50);
  const auto p = classify_boundary(d, constant_u(1.0), constant_rho(1.0));
  const auto ext = build_extension(d, p, 0.1);
  CHECK((ext.u_inf.col(0) - 1.0).abs().maxCoeff() == 0.0);
  CHECK(ext.div_u_inf.abs().maxCoeff() == 0.0);
}

TEST_CASE("1D extension: opposing inflows blend with clean collars") {
  const Domain d = unit_interval(200);
  auto ub = [](const Vec2& x) { return Vec2(x[0] < 0.5 ? 1.0 : -1.0, 0.0); };
  const auto p = classify_boundary(d, ub, constant_rho(1.0));
  const auto ext = build_extension(d, p, 0.1);
  const CellMask collar = inner_collar(d, 0.1);
  for (int i = 0; i < d.cell_count(); ++i) {
    if (!collar.member[i]) continue;
    const double x = d.center(i)[0];
    CHECK(ext.u_inf(i, 0) == doctest::Approx(x < 0.5 ? 1.0 : -1.0));
    CHECK(std::abs(ext.div_u_inf[i]) <= 1e-10);
  }
  for (int i = 1; i < d.cell_count(); ++i)
    CHECK(ext.u_inf(i, 0) <= ext.u_inf(i - 1, 0) + 1e-14);
}

TEST_CASE("2D extension: uniform data is exact everywhere") {
  const Domain d = rectangle(20, 24);
  const auto p = classify_boundary(d, constant_u(1.0, 0.0), constant_rho(1.0));
  const auto ext = build_extension(d, p, 0.2);
  CHECK((ext.u_inf.col(0) - 1.0).abs().maxCoeff() <= 1e-14);
  CHECK(ext.u_inf.col(1).abs().maxCoeff() <= 1e-14);
  CHECK(ext.div_u_inf.abs().maxCoeff() <= 1e-12);
}

TEST_CASE("2D extension trace error shrinks under refinement") {
  auto ub = [](const Vec2& x) {
    return Vec2(1.0 + 0.25 * std::sin(3.14159265358979 * x[1] / 2.0), 0.0);
  };
  double prev = -1.0;
  for (int n : {16, 32, 64}) {
    const Domain d = rectangle(n, n, 1.0, 2.0);
    const auto p = classify_boundary(d, ub, constant_rho(1.0));
    const auto ext = build_extension(d, p, 0.25);
    double worst = 0.0;
    for (int f = 0; f < p.face_count(); ++f) {
      const int c = p.faces[f].cell;
      for (int k = 0; k < 2; ++k)
        worst = std::max(worst, std::abs(ext.u_inf(c, k) - p.u_b(f, k)));
    }
    if (prev >= 0.0) CHECK(worst < 0.75 * prev);
    prev = worst;
  }
}

TEST_CASE("collar width below twice the spacing is rejected") {
  const Domain d = unit_interval(10);
  const auto p = classify_boundary(d, constant_u(1.0), constant_rho(1.0));
  CHECK_THROWS_AS(build_extension(d, p, 0.15), ConfigError);
}

TEST_CASE("boundary quadrature by class") {
  const Domain d = rectangle(8, 6, 1.0, 2.0);
  const auto p = classify_boundary(d, constant_u(1.0, 0.0), constant_rho(1.0));
  Field ones = Field::Ones(p.face_count());
  CHECK(integrate_faces(p, ones, FaceClass::In) == doctest::Approx(2.0));
  CHECK(integrate_faces(p, ones, FaceClass::Out) == doctest::Approx(2.0));
  CHECK(integrate_faces(p, ones) == doctest::Approx(6.0));
}
