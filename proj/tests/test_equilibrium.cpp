#include "mpfe/equilibrium.hpp"
#include "mpfe/errors.hpp"

#include "doctest.h"

#include <vector>

using namespace mpfe;

namespace {

struct Layer {
  double lambda, mu;
  Vec<3> bain;
};

// cells with z < split are layer 0, others layer 1
struct LayeredMaterial {
  Grid g;
  int split;
  std::vector<PhaseSpec<3>> specs;

  void operator()(const TensorField<3>& eps, TensorField<3>& sig) const {
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const auto& sp = specs[g.coords(i)[2] < split ? 0 : 1];
      sig.set(i, phase_stress(eps.at(i), sp));
    }
  }
};

LayeredMaterial layered(const Grid& g, int split, const Layer& a, const Layer& b) {
  LayeredMaterial m{g, split, {}};
  for (const Layer* l : {&a, &b})
    m.specs.push_back(PhaseSpec<3>::make(static_cast<int>(m.specs.size()), "layer",
                                         Stiffness4<3>::isotropic(l->lambda, l->mu), SymTensor2<3>::diag(l->bain)));
  return m;
}

// sharp laminate with normal z: in-plane strains are uniform, sigma_zz is
// continuous and the layer strains average to the applied eps_zz
std::array<double, 3> laminate_oracle(const Layer& a, const Layer& b, double fa, const Vec<3>& e) {
  // eps_zz,i = (s + lambda_i (tr b_i - e_xx - e_yy) + 2 mu_i b_zz,i) / (lambda_i + 2 mu_i) = p_i s + q_i
  auto pq = [&](const Layer& l) {
    const double k = l.lambda + 2.0 * l.mu;
    return std::array<double, 2>{1.0 / k,
                                 (l.lambda * (l.bain.sum() - e[0] - e[1]) + 2.0 * l.mu * l.bain[2]) / k};
  };
  const auto [pa, qa] = pq(a);
  const auto [pb, qb] = pq(b);
  const double s = (e[2] - fa * qa - (1.0 - fa) * qb) / (fa * pa + (1.0 - fa) * pb);
  return {pa * s + qa, pb * s + qb, s};
}

}  // namespace

TEST_CASE("homogeneous medium: the applied strain is the solution") {
  const Grid g(3, {6, 5, 4}, 1e-6);
  const auto sp = PhaseSpec<3>::make(0, "m", Stiffness4<3>::isotropic(100e9, 60e9),
                                     SymTensor2<3>::diag(Vec<3>(0.01, 0.0, -0.01)));
  SpectralSolver<3> solver(g);
  SolverConfig<3> cfg;
  cfg.reference = sp.C;
  cfg.tolerance = 1e-10;
  cfg.applied_strain = SymTensor2<3>::diag(Vec<3>(0.002, 0.001, 0.0));
  cfg.applied_strain[5] = 0.0015;
  TensorField<3> eps(g), sig(g);
  eps.fill(cfg.applied_strain);
  const auto rep = solver.solve(
      [&](const TensorField<3>& e, TensorField<3>& s) {
        for (std::size_t i = 0; i < g.cells(); ++i) s.set(i, phase_stress(e.at(i), sp));
      },
      cfg, eps, sig);
  CHECK(rep.residual <= 1e-10);
  for (std::size_t i = 0; i < g.cells(); ++i) CHECK((eps.at(i) - cfg.applied_strain).norm() < 1e-15);
}

TEST_CASE("layered medium matches the sharp laminate solution") {
  const Layer a{120e9, 80e9, Vec<3>(0.0, 0.0, 0.0)};
  const Layer b{60e9, 30e9, Vec<3>(0.01, -0.005, 0.02)};
  const Vec<3> e(0.004, -0.002, 0.003);
  for (const auto& ext : {std::array<int, 3>{4, 4, 16}, std::array<int, 3>{5, 6, 12}}) {
    const Grid g(3, ext, 1e-6);
    const int split = ext[2] / 4;
    const auto mat = layered(g, split, a, b);
    SpectralSolver<3> solver(g);
    SolverConfig<3> cfg;
    cfg.reference = choose_reference<3>(mat.specs);
    cfg.tolerance = 1e-10;
    cfg.max_iterations = 2000;
    cfg.applied_strain = SymTensor2<3>::diag(e);
    TensorField<3> eps(g), sig(g);
    eps.fill(cfg.applied_strain);
    const auto rep = solver.solve(mat, cfg, eps, sig);
    CHECK(rep.iterations > 1);
    const auto [ea, eb, s] = laminate_oracle(a, b, static_cast<double>(split) / ext[2], e);
    for (std::size_t i = 0; i < g.cells(); ++i) {
      const bool in_a = g.coords(i)[2] < split;
      const auto t = eps.at(i);
      CHECK(t[2] == doctest::Approx(in_a ? ea : eb).epsilon(1e-7));
      CHECK(t[0] == doctest::Approx(e[0]).epsilon(1e-7));
      CHECK(sig.at(i)[2] == doctest::Approx(s).epsilon(1e-7));
    }
    const auto mean = eps.mean();
    CHECK((mean - cfg.applied_strain).norm() < 1e-14);
  }
}

TEST_CASE("stress control drives the mean stress to the target") {
  const Layer a{120e9, 80e9, Vec<3>(0.0, 0.0, 0.0)};
  const Layer b{80e9, 50e9, Vec<3>(0.02, -0.01, -0.01)};
  const Grid g(3, {4, 4, 12}, 1e-6);
  const auto mat = layered(g, 6, a, b);
  SpectralSolver<3> solver(g);
  SolverConfig<3> cfg;
  cfg.reference = choose_reference<3>(mat.specs);
  cfg.control = LoadControl::stress;
  cfg.tolerance = 1e-10;
  cfg.max_iterations = 2000;
  cfg.applied_stress = SymTensor2<3>::diag(Vec<3>(1e8, 0.0, 0.0));
  TensorField<3> eps(g), sig(g);
  solver.solve(mat, cfg, eps, sig);
  const auto ms = sig.mean();
  CHECK((ms - cfg.applied_stress).norm() <= 1e-6 * 1e8);
}

TEST_CASE("an unattainable tolerance raises a solver error with the history") {
  const Grid g(2, {16, 16, 1}, 1e-6);
  const auto host = PhaseSpec<2>::make(0, "host", Stiffness4<2>::isotropic(120e9, 80e9), SymTensor2<2>());
  const auto inc = PhaseSpec<2>::make(1, "inc", Stiffness4<2>::isotropic(20e9, 10e9),
                                      SymTensor2<2>::diag(Vec<2>(0.02, -0.01)));
  const std::vector<PhaseSpec<2>> specs{host, inc};
  SpectralSolver<2> solver(g);
  SolverConfig<2> cfg;
  cfg.reference = choose_reference<2>(specs);
  cfg.tolerance = 1e-14;
  cfg.max_iterations = 3;
  TensorField<2> eps(g), sig(g);
  try {
    solver.solve(
        [&](const TensorField<2>& e, TensorField<2>& s) {
          for (std::size_t i = 0; i < g.cells(); ++i) {
            const auto c = g.coords(i);
            s.set(i, phase_stress(e.at(i), c[0] < 6 && c[1] < 6 ? inc : host));
          }
        },
        cfg, eps, sig);
    FAIL("expected a solver error");
  } catch (const SolverError& e) {
    CHECK(e.residual_history.size() == 4u);
    CHECK(e.residual_history.back() > 1e-14);
  }
}

TEST_CASE("plane-strain 2D solve of a single inclusion") {
  const Grid g(2, {32, 32, 1}, 1e-6);
  const auto host = PhaseSpec<2>::make(0, "host", Stiffness4<2>::isotropic(100e9, 60e9), SymTensor2<2>());
  const auto inc = PhaseSpec<2>::make(1, "inc", Stiffness4<2>::isotropic(100e9, 60e9),
                                      SymTensor2<2>::diag(Vec<2>(0.01, 0.01)));
  auto in_inclusion = [&](std::size_t i) {
    const auto c = g.coords(i);
    return (c[0] - 16) * (c[0] - 16) + (c[1] - 16) * (c[1] - 16) <= 16;
  };
  SpectralSolver<2> solver(g);
  SolverConfig<2> cfg;
  cfg.reference = host.C;
  cfg.tolerance = 1e-10;
  TensorField<2> eps(g), sig(g);
  solver.solve(
      [&](const TensorField<2>& e, TensorField<2>& s) {
        for (std::size_t i = 0; i < g.cells(); ++i) s.set(i, phase_stress(e.at(i), in_inclusion(i) ? inc : host));
      },
      cfg, eps, sig);
  // mean stress balances: <sig> = C:(<eps> - f eb) with <eps> = 0
  std::size_t n_inc = 0;
  for (std::size_t i = 0; i < g.cells(); ++i) n_inc += in_inclusion(i);
  const double f = static_cast<double>(n_inc) / g.cells();
  const auto expect = contract(host.C, -f * inc.bain);
  CHECK((sig.mean() - expect).norm() <= 1e-8 * expect.norm());
  // compressed inclusion; in the host the radial stress is compressive and
  // the hoop stress tensile
  CHECK(sig.at(g.index(16, 16))[0] < 0.0);
  CHECK(sig.at(g.index(22, 16))[0] < 0.0);
  CHECK(sig.at(g.index(16, 22))[0] > 0.0);
}
