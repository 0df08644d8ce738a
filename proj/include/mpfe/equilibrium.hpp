// Periodic mechanical equilibrium by the fixed-point spectral scheme with a
// homogeneous reference medium.
#pragma once

#include "mpfe/fields.hpp"
#include "mpfe/mechanics.hpp"
#include "mpfe/tensor.hpp"

#include <functional>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

namespace mpfe {

// Symmetric tensor field, one contiguous block per component.
template <int Dim>
class TensorField {
 public:
  static constexpr int N = sym_size<Dim>();

  TensorField() = default;
  explicit TensorField(const Grid& g) : grid_(g), d_(N * g.cells(), 0.0) {}

  const Grid& grid() const { return grid_; }
  std::size_t cells() const { return grid_.cells(); }
  double* comp(int c) { return d_.data() + c * cells(); }
  const double* comp(int c) const { return d_.data() + c * cells(); }
  double* data() { return d_.data(); }

  SymTensor2<Dim> at(std::size_t i) const {
    SymTensor2<Dim> t;
    for (int c = 0; c < N; ++c) t[c] = d_[c * cells() + i];
    return t;
  }
  void set(std::size_t i, const SymTensor2<Dim>& t) {
    for (int c = 0; c < N; ++c) d_[c * cells() + i] = t[c];
  }
  void fill(const SymTensor2<Dim>& t) {
    for (std::size_t i = 0; i < cells(); ++i) set(i, t);
  }
  SymTensor2<Dim> mean() const;

 private:
  Grid grid_;
  std::vector<double> d_;
};

enum class LoadControl { strain, stress };

template <int Dim>
struct SolverConfig {
  Stiffness4<Dim> reference;
  int max_iterations = 500;
  double tolerance = 1e-6;
  LoadControl control = LoadControl::strain;
  SymTensor2<Dim> applied_strain;   // target mean strain (strain control)
  SymTensor2<Dim> applied_stress;   // target mean stress [Pa] (stress control)
  std::ostream* log = nullptr;      // one line per iteration when set
};

struct SolveReport {
  int iterations = 0;
  double residual = 0.0;
  std::vector<double> history;
};

// arithmetic mean of the phase stiffnesses, optionally projected onto the
// isotropic subspace
template <int Dim>
Stiffness4<Dim> choose_reference(std::span<const PhaseSpec<Dim>> specs, bool isotropic = false);

template <int Dim>
class SpectralSolver {
 public:
  // sig := sigma(eps) for every cell
  using Constitutive = std::function<void(const TensorField<Dim>& eps, TensorField<Dim>& sig)>;

  explicit SpectralSolver(const Grid& g);
  ~SpectralSolver();
  SpectralSolver(const SpectralSolver&) = delete;
  SpectralSolver& operator=(const SpectralSolver&) = delete;

  // eps is the warm start on entry and the equilibrium strain on return; sig
  // holds the matching stress.  Throws SolverError.
  SolveReport solve(const Constitutive& material, const SolverConfig<Dim>& cfg, TensorField<Dim>& eps,
                    TensorField<Dim>& sig);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace mpfe
