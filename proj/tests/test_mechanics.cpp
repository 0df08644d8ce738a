#include "mpfe/errors.hpp"
#include "mpfe/mechanics.hpp"
#include "mpfe/verify.hpp"

#include "doctest.h"

#include <vector>

using namespace mpfe;

namespace {

template <int Dim>
std::vector<CellPhase<Dim>> cell_of(const std::vector<PhaseSpec<Dim>>& specs, const std::vector<double>& phi,
                                    const std::vector<Vec<Dim>>& grads) {
  std::vector<CellPhase<Dim>> c;
  for (std::size_t k = 0; k < specs.size(); ++k) c.push_back({&specs[k], phi[k], grads[k]});
  return c;
}

void require_pass(const PropertyResult& r) {
  INFO(r.name << ": worst " << r.worst << " threshold " << r.threshold);
  CHECK(r.count > 0);
  CHECK(r.passed);
}

}  // namespace

TEST_CASE("model names") {
  for (Model m : all_models()) CHECK(parse_model(to_string(m)) == m);
  CHECK(parse_model("model_a") == Model::model_a);
  CHECK_THROWS_AS(parse_model("model_c"), ValidationError);
  CHECK(all_models().size() == 5u);
}

TEST_CASE("a single phase responds with its own law under every model") {
  Sampler<3> smp(2);
  const std::vector<PhaseSpec<3>> specs{smp.phase(0)};
  const auto cell = cell_of(specs, {1.0}, {Vec<3>::Zero()});
  const auto eps = smp.strain();
  KernelOptions opt;
  for (Model m : all_models()) {
    const auto r = evaluate_point<3>(m, eps, cell, opt);
    CHECK(r.psi == doctest::Approx(phase_energy(eps, specs[0])).epsilon(1e-13));
    CHECK((r.stress - phase_stress(eps, specs[0])).norm() <= 1e-12 * r.stress.norm());
  }
}

TEST_CASE("flat isotropic laminate: scalar jump across a z normal") {
  // equal isotropic stiffness and diagonal eigenstrains: only eps_zz jumps,
  // by (lambda dtr + 2 mu dzz) / (lambda + 2 mu) from sigma_zz continuity
  const double lambda = 120e9, mu = 80e9;
  const auto C = Stiffness4<3>::isotropic(lambda, mu);
  const auto A = PhaseSpec<3>::make(0, "a", C, SymTensor2<3>::diag(Vec<3>(0.0, 0.0, 0.0)));
  const auto B = PhaseSpec<3>::make(1, "b", C, SymTensor2<3>::diag(Vec<3>(0.0, 0.0, 0.0125)));
  const double dtr = 0.0125, dzz = 0.0125;
  const double d = (lambda * dtr + 2.0 * mu * dzz) / (lambda + 2.0 * mu);
  const auto eps = SymTensor2<3>::diag(Vec<3>(0.01, 0.0075, 0.005));
  const std::vector<PhaseSpec<3>> specs{A, B};
  for (double pa : {0.2, 0.5, 0.9}) {
    const Vec<3> ga(0.0, 0.0, -1.0), gb(0.0, 0.0, 1.0);
    const auto cell = cell_of(specs, {pa, 1.0 - pa}, {ga, gb});
    KernelOptions opt;
    opt.keep_jumps = true;
    const auto r = evaluate_point<3>(Model::model_a, eps, cell, opt);
    REQUIRE(r.jumps.size() == 1u);
    const auto S = r.jumps[0].jump();
    // eps_a = eps - phi_b S, eps_b = eps + phi_a S with S_zz = -(jump b - a)
    CHECK(std::abs(S[2]) == doctest::Approx(d).epsilon(1e-12));
    CHECK(std::abs(S[0]) + std::abs(S[1]) + std::abs(S[3]) + std::abs(S[4]) + std::abs(S[5]) < 1e-15);
    const auto ea = pairwise_strain<3>(eps, pa, 1.0 - pa, r.jumps[0].a, r.jumps[0].n);
    const auto eb = pairwise_strain<3>(eps, 1.0 - pa, pa, -r.jumps[0].a, r.jumps[0].n);
    CHECK(eb[2] - ea[2] == doctest::Approx(d).epsilon(1e-12));
    CHECK(pa * ea[2] + (1.0 - pa) * eb[2] == doctest::Approx(eps[2]).epsilon(1e-12));
    // Model B coincides in a dual-phase cell
    const auto rb = evaluate_point<3>(Model::model_b, eps, cell, opt);
    CHECK(rb.psi == doctest::Approx(r.psi).epsilon(1e-12));
    CHECK(rb.force(0, 1) == doctest::Approx(r.force(0, 1)).epsilon(1e-12));
  }
}

TEST_CASE("Voigt and Reuss closed forms") {
  Sampler<3> smp(17);
  for (int it = 0; it < 20; ++it) {
    const std::vector<PhaseSpec<3>> specs{smp.phase(0), smp.phase(1), smp.phase(2)};
    const auto phi = smp.fractions(3);
    const auto cell = cell_of(specs, phi, {smp.unit(), smp.unit(), smp.unit()});
    const auto eps = smp.strain();
    KernelOptions opt;

    double psi_v = 0.0;
    for (int k = 0; k < 3; ++k) psi_v += phi[k] * phase_energy(eps, specs[k]);
    CHECK(evaluate_point<3>(Model::voigt, eps, cell, opt).psi == doctest::Approx(psi_v).epsilon(1e-12));

    Stiffness4<3> Sbar;
    SymTensor2<3> bbar;
    for (int k = 0; k < 3; ++k) {
      Sbar += phi[k] * specs[k].S;
      bbar += phi[k] * specs[k].bain;
    }
    const auto sig = contract(Sbar.inverse(), eps - bbar);
    const auto r = evaluate_point<3>(Model::reuss, eps, cell, opt);
    CHECK((r.stress - sig).norm() <= 1e-10 * sig.norm());
    CHECK(r.psi == doctest::Approx(0.5 * ddot(sig, eps - bbar)).epsilon(1e-10));
    // equal-stress energy never exceeds equal-strain energy
    CHECK(r.psi <= psi_v * (1.0 + 1e-12));
  }
}

TEST_CASE("coincident gradients give no usable normal") {
  Vec<3> n;
  CHECK_FALSE(interface_normal<3>(Vec<3>(1.0, 2.0, 3.0), Vec<3>(1.0, 2.0, 3.0), 1e-9, n));
  REQUIRE(interface_normal<3>(Vec<3>(0.0, 0.0, 0.0), Vec<3>(0.0, 3.0, 4.0), 1e-9, n));
  CHECK(n.norm() == doctest::Approx(1.0));
  CHECK(std::abs(n[1]) == doctest::Approx(0.6));
}

TEST_CASE("kernel property suites, 3D and 2D") {
  for (const auto& r : verify_kernels(30, 99)) require_pass(r);
}
