#include "kinetics_util.hpp"
#include "mpfe/errors.hpp"
#include "mpfe/phasefield.hpp"

#include "doctest.h"

#include <cmath>
#include <numbers>
#include <random>

using namespace mpfe;
using namespace mpfe::testing;

namespace {

KineticParams unit_kinetics(double dt) {
  KineticParams k;
  k.eta = 10.0;
  k.gamma = 1.0;
  k.mobility = 1.0;
  k.dt = dt;
  return k;
}

}  // namespace

TEST_CASE("interface profile") {
  CHECK(interface_profile(0.0, 4.0) == 0.5);
  CHECK(interface_profile(-2.0, 4.0) == 1.0);
  CHECK(interface_profile(2.5, 4.0) == 0.0);
  for (double d = -3.0; d <= 3.0; d += 0.25)
    CHECK(interface_profile(d, 5.0) + interface_profile(-d, 5.0) == doctest::Approx(1.0));
}

TEST_CASE("kinetic parameter validation") {
  auto k = unit_kinetics(0.1);
  CHECK_NOTHROW(k.validate(1.0));
  CHECK_THROWS_AS(k.validate(3.0), ValidationError);
  k.mobility = 0.0;
  CHECK_THROWS_AS(k.validate(1.0), ValidationError);
  CHECK(unit_kinetics(0.1).rate(2) == doctest::Approx(std::numbers::pi * std::numbers::pi / 80.0));
  CHECK(unit_kinetics(0.1).stability_number(1.0) == doctest::Approx(0.1));
}

TEST_CASE("pair field orientation") {
  const Grid g(2, {4, 4, 1}, 1.0);
  PairField f(g, 4);
  CHECK(f.pairs() == 6);
  f.set(3, 1, 5, 2.5);
  CHECK(f.get(1, 3, 5) == -2.5);
  CHECK(f.get(3, 1, 5) == 2.5);
  for (int p = 0; p < f.pairs(); ++p) {
    const auto [a, b] = f.pair_phases(p);
    CHECK(a < b);
    CHECK(f.pair_index(a, b) == p);
  }
}

TEST_CASE("interfacial force vanishes on the continuous equilibrium profile") {
  // at the profile center the bulk and gradient terms cancel exactly
  PhaseFieldSet set;
  const double eta = 7.0, k = std::numbers::pi / eta;
  for (double x : {-2.0, -0.7, 0.0, 1.3, 3.0}) {
    PhaseFieldSet s;
    const double p = interface_profile(x, eta);
    const double lap = 0.5 * k * k * std::sin(k * x);
    s.push({0, p, {}, lap});
    s.push({1, 1.0 - p, {}, -lap});
    KineticParams kp;
    kp.eta = eta;
    kp.gamma = 2.0;
    CHECK(std::abs(interfacial_driving_force(s, 0, 1, kp)) < 1e-12);
  }
}

TEST_CASE("update conserves the simplex under random forces") {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(0.0, 1.0), f(-1.0, 1.0);
  for (int trial = 0; trial < 10; ++trial) {
    const int np = 3 + trial % 3;
    const Grid g(2, {12, 12, 1}, 1.0);
    PhaseState s(g, np);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      double sum = 0.0;
      std::vector<double> w(np);
      for (auto& v : w) sum += v = u(rng) < 0.3 ? 0.0 : u(rng);
      if (sum == 0.0) w[0] = sum = 1.0;
      for (int p = 0; p < np; ++p) s.field(p)[i] = w[p] / sum;
    }
    s.rebuild_active();
    auto k = unit_kinetics(0.02);
    for (int step = 0; step < 20; ++step) {
      activate_neighbors(s);
      PairField dG(g, np);
      for (int p = 0; p < dG.pairs(); ++p)
        for (std::size_t i = 0; i < g.cells(); ++i) dG.field(p)[i] = 0.3 * f(rng);
      mpf_update(s, dG, k);
      CHECK(s.max_simplex_error() <= 1e-10);
      for (int p = 0; p < np; ++p)
        for (double v : s.field(p).values()) {
          CHECK(v >= 0.0);
          CHECK(v <= 1.0);
        }
    }
  }
}

TEST_CASE("zero forces leave the state unchanged") {
  auto s = flat_band(32, 8, 24, 10);
  const auto before = s.field(0).values();
  const Grid& g = s.grid();
  PairField zero(g, 2);
  mpf_update(s, zero, unit_kinetics(0.1));
  CHECK(s.field(0).values() == before);
}

TEST_CASE("too large a step is reported as an instability") {
  auto s = flat_band(32, 8, 24, 10);
  PairField big(s.grid(), 2);
  for (auto& v : big.field(0).values()) v = 1e3;
  CHECK_THROWS_AS(mpf_update(s, big, unit_kinetics(1.0)), InstabilityError);
}

TEST_CASE("activation adds phases next to strong neighbors only") {
  const Grid g(2, {8, 8, 1}, 1.0);
  PhaseState s(g, 3);
  for (auto& v : s.field(0).values()) v = 1.0;
  s.field(0).at(4, 4) = 0.5;
  s.field(2).at(4, 4) = 0.5;
  s.rebuild_active();
  const std::size_t added = activate_neighbors(s);
  CHECK(added == 4u);
  CHECK((s.active(g.index(5, 4)) & 4u) != 0u);
  CHECK((s.active(g.index(5, 5)) & 4u) == 0u);
  CHECK(s.phi(2, g.index(5, 4)) == 0.0);
  CHECK((s.active(g.index(4, 4)) & 2u) == 0u);
}

TEST_CASE("equilibrium profile is stationary") {
  auto s = flat_band(128, 32, 96, 10);
  CHECK(flat_step(s, unit_kinetics(0.25), 0.0) <= 1e-4);
}

TEST_CASE("flat interface travels at mobility times driving force") {
  const double dG0 = 0.02;
  const auto k = unit_kinetics(0.2);
  auto s = flat_band(256, 64, 192, 10);
  for (int i = 0; i < 500; ++i) flat_step(s, k, dG0);
  const double v0 = volume(s, 0);
  for (int i = 0; i < 2000; ++i) flat_step(s, k, dG0);
  // two interfaces on a strip 4 cells wide
  const double speed = (volume(s, 0) - v0) / 8.0 / (2000 * k.dt);
  CHECK(speed == doctest::Approx(k.mobility * dG0).epsilon(0.05));
}
