// Multi-phase-field state, interfacial driving force and the constrained
// explicit update.
#pragma once

#include "mpfe/fields.hpp"

#include <array>
#include <cstdint>
#include <vector>

namespace mpfe {

// below this a fraction is pruned to exactly zero
constexpr double kPhiCut = 1e-6;
// default nucleus fraction
constexpr double kPhiSeed = 0.1;
constexpr int kMaxPhases = 32;
// pre-projection fractions outside [-kExcursion, 1 + kExcursion] mean the
// time step is too large
constexpr double kExcursion = 0.1;

struct KineticParams {
  double eta = 0.0;        // interface width [m]
  double gamma = 0.0;      // interfacial energy [J/m^2]
  double mobility = 0.0;   // interface mobility [m^4/(J s)]
  double dt = 0.0;         // time step [s]
  double activation_threshold = kPhiCut;

  // throws ValidationError
  void validate(double dx) const;
  // dt * mobility * gamma / dx^2; explicit stepping is advisory-flagged above 0.25
  double stability_number(double dx) const { return dt * mobility * gamma / (dx * dx); }
  // pi^2 mu / (4 eta n)
  double rate(int n_active) const;
};

struct PhaseEntry {
  int id = 0;
  double phi = 0.0;
  std::array<double, 3> grad{0.0, 0.0, 0.0};
  double lap = 0.0;
};

// Phases active at one cell (fraction > 0, or activated at exactly 0).
class PhaseFieldSet {
 public:
  int size() const { return n_; }
  PhaseEntry& operator[](int k) { return e_[k]; }
  const PhaseEntry& operator[](int k) const { return e_[k]; }
  void push(const PhaseEntry& e) { e_[n_++] = e; }
  const PhaseEntry* begin() const { return e_.data(); }
  const PhaseEntry* end() const { return e_.data() + n_; }
  // entry position of a phase id, -1 if absent
  int find(int id) const {
    for (int k = 0; k < n_; ++k)
      if (e_[k].id == id) return k;
    return -1;
  }
  double sum() const {
    double s = 0.0;
    for (int k = 0; k < n_; ++k) s += e_[k].phi;
    return s;
  }
  // entries with nonzero fraction
  int real_count() const {
    int c = 0;
    for (int k = 0; k < n_; ++k) c += e_[k].phi > 0.0;
    return c;
  }

 private:
  std::array<PhaseEntry, kMaxPhases> e_;
  int n_ = 0;
};

// Dense per-phase fraction arrays plus a per-cell active bitmask.
class PhaseState {
 public:
  PhaseState() = default;
  PhaseState(const Grid& g, int nphases);

  const Grid& grid() const { return grid_; }
  int phases() const { return static_cast<int>(phi_.size()); }

  double phi(int p, std::size_t cell) const { return phi_[p][cell]; }
  ScalarField& field(int p) { return phi_[p]; }
  const ScalarField& field(int p) const { return phi_[p]; }
  std::uint32_t active(std::size_t cell) const { return active_[cell]; }
  std::uint32_t& active(std::size_t cell) { return active_[cell]; }

  // active bits := (phi > 0)
  void rebuild_active();
  // recompute gradient and Laplacian caches for every phase present
  void refresh_derivatives();
  const VectorField& grad(int p) const { return grad_[p]; }
  const ScalarField& lap(int p) const { return lap_[p]; }
  bool present(int p) const { return present_[p] != 0; }

  PhaseFieldSet cell(std::size_t i) const;

  // sum over cells and phases
  double total() const;
  // max over cells of |sum phi - 1|
  double max_simplex_error() const;

 private:
  Grid grid_;
  std::vector<ScalarField> phi_;
  std::vector<std::uint32_t> active_;
  std::vector<VectorField> grad_;
  std::vector<ScalarField> lap_;
  std::vector<std::uint8_t> present_;
};

// Per-cell pairwise driving forces, one dense field per unordered pair.  The
// stored value belongs to the (low id, high id) orientation.
class PairField {
 public:
  PairField() = default;
  PairField(const Grid& g, int nphases);

  int phases() const { return nphases_; }
  int pairs() const { return static_cast<int>(f_.size()); }
  int pair_index(int a, int b) const;  // a < b
  std::array<int, 2> pair_phases(int p) const { return pairs_[p]; }

  double get(int a, int b, std::size_t cell) const {
    return a < b ? f_[pair_index(a, b)][cell] : -f_[pair_index(b, a)][cell];
  }
  void set(int a, int b, std::size_t cell, double v) {
    if (a < b)
      f_[pair_index(a, b)][cell] = v;
    else
      f_[pair_index(b, a)][cell] = -v;
  }
  ScalarField& field(int p) { return f_[p]; }
  const ScalarField& field(int p) const { return f_[p]; }
  void clear();

 private:
  int nphases_ = 0;
  std::vector<ScalarField> f_;
  std::vector<std::array<int, 2>> pairs_;
  std::vector<int> index_;
};

// (4 gamma / eta) [phi_a - phi_b + (eta^2/pi^2)(lap_a - lap_b)] for entry
// positions a, b of the set
double interfacial_driving_force(const PhaseFieldSet& p, int a, int b, const KineticParams& k);

struct UpdateStats {
  double min_phi = 1.0;  // extremes before projection
  double max_phi = 0.0;
  std::size_t updated_cells = 0;
};

// Explicit Euler step of phi_a += dt sum_b rate(n) dG_ab followed by clamp,
// prune and renormalization.  Throws InstabilityError on excursions.
UpdateStats mpf_update(PhaseState& state, const PairField& dG, const KineticParams& k);

// adds (at fraction 0) every phase whose fraction exceeds the activation
// threshold in a face neighbor; returns the number of activations
std::size_t activate_neighbors(PhaseState& state, double threshold = kPhiCut);

// 0.5 (1 - sin(pi d / eta)) clipped to [0,1]: fraction on the negative side
// of a flat interface at signed distance d (same units as eta)
double interface_profile(double d, double eta);

}  // namespace mpfe
