// Independent oracles for the pointwise kernels and the seeded property
// suites run by the tests and by `mpfe verify`.
#pragma once

#include "mpfe/mechanics.hpp"

#include <cstdint>
#include <iosfwd>
#include <random>
#include <string>
#include <vector>

namespace mpfe {

struct PropertyResult {
  std::string name;
  bool passed = true;
  double worst = 0.0;      // worst measured residual
  double threshold = 0.0;
  int count = 0;           // instances checked
};

// random material instances
template <int Dim>
struct Sampler {
  std::mt19937_64 rng;
  explicit Sampler(std::uint64_t seed) : rng(seed) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  // symmetric positive definite, eigenvalues in [lo, hi] on the Mandel form
  Stiffness4<Dim> stiffness(double lo = 30e9, double hi = 250e9);
  SymTensor2<Dim> strain(double scale = 0.02);
  Vec<Dim> unit();
  // n fractions in (min, 1) summing to one
  std::vector<double> fractions(int n, double min = 0.05);
  PhaseSpec<Dim> phase(int id, double bain_scale = 0.02);
};

// minimizer of phi_a psi_a(eps_ab) + phi_b psi_b(eps_ba) over the jump
// amplitude by finite-difference Newton iterations on the energy alone
template <int Dim>
Vec<Dim> numerical_jump(const SymTensor2<Dim>& eps, double phi_a, double phi_b, const PhaseSpec<Dim>& sa,
                        const PhaseSpec<Dim>& sb, const Vec<Dim>& n);

// -1/2 sig:(S_b - S_a):sig - sig:(eb_b - eb_a)
template <int Dim>
double steinbach_force(const SymTensor2<Dim>& sig, const PhaseSpec<Dim>& a, const PhaseSpec<Dim>& b);

// Effective energies with the jump amplitudes and normals frozen; the
// fractions must sum to one.  jumps[s*n+t] = sym(a_st x n_st) = -jumps[t*n+s].
template <int Dim>
double frozen_energy_a(const SymTensor2<Dim>& eps, const std::vector<PhaseSpec<Dim>>& ph,
                       const std::vector<double>& phi, const std::vector<SymTensor2<Dim>>& jumps);
template <int Dim>
double frozen_energy_b(const SymTensor2<Dim>& eps, const std::vector<PhaseSpec<Dim>>& ph,
                       const std::vector<double>& phi, const std::vector<SymTensor2<Dim>>& jumps);

PropertyResult check_reuss_steinbach(int instances, std::uint64_t seed);
PropertyResult check_jump_oracle(int instances, std::uint64_t seed);
PropertyResult check_jump_residual(int instances, std::uint64_t seed);
PropertyResult check_frozen_fd(Model m, int phases, int instances, std::uint64_t seed);
PropertyResult check_dual_reduction(int instances, std::uint64_t seed);
PropertyResult check_dual_ordering(int instances, std::uint64_t seed);
PropertyResult check_permutation(int instances, std::uint64_t seed);

// every suite above, in 2D and 3D
std::vector<PropertyResult> verify_kernels(int instances = 50, std::uint64_t seed = 1);

void print_report(const std::vector<PropertyResult>& results, std::ostream& os);

}  // namespace mpfe
