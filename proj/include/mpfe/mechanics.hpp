// Pointwise homogenization of diffuse interfaces: interface normals,
// rank-one strain jumps, pairwise strains and the effective energy, stress
// and elastic driving forces of the supported interpolation models.
#pragma once

#include "mpfe/phasefield.hpp"
#include "mpfe/tensor.hpp"

#include <span>
#include <string>
#include <vector>

namespace mpfe {

enum class Model { voigt, reuss, model_a, model_b, model_a_dual_only };

std::string to_string(Model m);
// throws ValidationError on unknown names
Model parse_model(const std::string& name);
const std::vector<Model>& all_models();

template <int Dim>
struct PhaseSpec {
  int id = 0;
  std::string name;
  Stiffness4<Dim> C;       // rotated into the sample frame
  Stiffness4<Dim> S;       // compliance, C^-1
  SymTensor2<Dim> bain;    // rotated into the sample frame
  double chemical = 0.0;   // chemical energy density [J/m^3]

  // C and bain are given in the grain frame
  static PhaseSpec make(int id, std::string name, const Stiffness4<Dim>& C, const SymTensor2<Dim>& bain,
                        const Rotation<Dim>& R = Rotation<Dim>(), double chemical = 0.0);
};

// One active phase at a material point.
template <int Dim>
struct CellPhase {
  const PhaseSpec<Dim>* spec = nullptr;
  double phi = 0.0;
  Vec<Dim> grad = Vec<Dim>::Zero();  // [1/m]
};

template <int Dim>
struct JumpRecord {
  int alpha = 0, beta = 0;  // entry positions, alpha < beta
  Vec<Dim> n = Vec<Dim>::Zero();
  Vec<Dim> a = Vec<Dim>::Zero();
  bool degenerate = true;
  SymTensor2<Dim> jump() const { return sym_dyad<Dim>(a, n); }
};

struct KernelOptions {
  double g_tol = 0.0;        // gradient-difference threshold for a usable normal [1/m]
  bool forces = true;        // compute pairwise driving forces
  bool keep_jumps = false;   // export the jump records
};

template <int Dim>
struct PointResult {
  double psi = 0.0;
  SymTensor2<Dim> stress;
  int n = 0;                   // number of entries
  std::vector<double> dG;      // n*n, dG[s*n+t] = dG_st = -dG_ts
  std::vector<JumpRecord<Dim>> jumps;
  int degenerate = 0;          // degenerate pairs encountered

  double force(int s, int t) const { return dG[s * n + t]; }
};

// (grad_b - grad_a)/|grad_b - grad_a|; false when the norm is below g_tol
template <int Dim>
bool interface_normal(const Vec<Dim>& grad_a, const Vec<Dim>& grad_b, double g_tol, Vec<Dim>& n);

template <int Dim>
struct JumpResult {
  Vec<Dim> a = Vec<Dim>::Zero();
  bool degenerate = false;
};

// closed-form amplitude of the rank-one strain jump between alpha and beta
// with all other phases carrying the cell strain
template <int Dim>
JumpResult<Dim> jump_vector(const SymTensor2<Dim>& eps, double phi_a, double phi_b, const PhaseSpec<Dim>& sa,
                            const PhaseSpec<Dim>& sb, const Vec<Dim>& n);

// eps - phi_j/(phi_i+phi_j) sym(a x n)
template <int Dim>
SymTensor2<Dim> pairwise_strain(const SymTensor2<Dim>& eps, double phi_i, double phi_j, const Vec<Dim>& a,
                                const Vec<Dim>& n);

template <int Dim>
double phase_energy(const SymTensor2<Dim>& eps, const PhaseSpec<Dim>& s) {
  const SymTensor2<Dim> e = eps - s.bain;
  return 0.5 * ddot(e, contract(s.C, e));
}

template <int Dim>
SymTensor2<Dim> phase_stress(const SymTensor2<Dim>& eps, const PhaseSpec<Dim>& s) {
  return contract(s.C, eps - s.bain);
}

template <int Dim>
void model_a_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                   PointResult<Dim>& out);
template <int Dim>
void model_b_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                   PointResult<Dim>& out);
template <int Dim>
void voigt_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                 PointResult<Dim>& out);
// throws std::domain_error when the interpolated compliance is singular
template <int Dim>
void reuss_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                 PointResult<Dim>& out);
// Model A where at most two phases are present, Voigt elsewhere
template <int Dim>
void dual_only_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                     PointResult<Dim>& out);

template <int Dim>
void evaluate_point(Model m, const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell,
                    const KernelOptions& opt, PointResult<Dim>& out);

template <int Dim>
PointResult<Dim> evaluate_point(Model m, const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell,
                                const KernelOptions& opt = {}) {
  PointResult<Dim> r;
  evaluate_point(m, eps, cell, opt, r);
  return r;
}

// Total pairwise driving force dG_st = dG^int + dG^elas + (f_t - f_s) for
// every pair of entries with at least one nonzero fraction.  `elastic` is the
// n*n antisymmetric kernel output; `entries` supplies fractions and
// Laplacians in the same order as the kernel input.
template <int Dim>
void assemble_driving_forces(const PhaseFieldSet& entries, std::span<const CellPhase<Dim>> cell,
                             std::span<const double> elastic, const KineticParams& k, std::vector<double>& out);

}  // namespace mpfe
