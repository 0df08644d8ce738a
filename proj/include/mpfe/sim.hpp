// Time loop: kinetics coupled to mechanics, driving-force averaging,
// nucleation and energy bookkeeping.
#pragma once

#include "mpfe/equilibrium.hpp"
#include "mpfe/mechanics.hpp"
#include "mpfe/phasefield.hpp"
#include "mpfe/scenario.hpp"
#include "mpfe/vtk.hpp"

#include <iosfwd>
#include <memory>
#include <string>
#include <vector>

namespace mpfe {

struct LedgerRow {
  int step = 0;
  double time = 0.0;             // [s]
  double psi_elastic = 0.0;      // cell mean [J/m^3]
  double psi_interfacial = 0.0;  // cell mean [J/m^3]
  std::vector<double> fractions;
  int iterations = 0;            // equilibrium iterations of this step
  double residual = 0.0;
  bool operator==(const LedgerRow&) const = default;
};

// phase fractions of the initial geometry, before nucleation
void initialize_phases(const Scenario& s, PhaseState& state);

// plants the listed and lattice nuclei; returns the number planted
std::size_t nucleate(const Scenario& s, PhaseState& state);

template <int Dim>
class Simulation {
 public:
  // validates; throws ValidationError
  explicit Simulation(const Scenario& s);
  ~Simulation();
  Simulation(const Simulation&) = delete;
  Simulation& operator=(const Simulation&) = delete;

  const Scenario& scenario() const;
  const KineticParams& kinetics() const;
  const std::vector<PhaseSpec<Dim>>& specs() const;
  PhaseState& state();
  const PhaseState& state() const;

  // derivatives, activation, mechanics and driving forces of the current
  // state; no update
  void evaluate();
  // one explicit phase-field step with the forces of the last evaluate()
  void advance();
  void step() {
    evaluate();
    advance();
  }

  int step_index() const;
  double time() const;

  const TensorField<Dim>& strain() const;
  const TensorField<Dim>& stress() const;
  const ScalarField& psi() const;
  // driving forces fed to the update (averaged, limited, with interfacial part)
  const PairField& forces() const;
  // raw elastic driving forces of the kernel
  const PairField& elastic_forces() const;
  const SolveReport& last_solve() const;

  LedgerRow ledger_row() const;
  FieldDump dump() const;

  // equilibrium iteration log; per-iteration lines only when verbose
  void set_log(std::ostream* log, bool verbose);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

struct RunOptions {
  std::string output_dir;    // empty: nothing written
  int threads = 0;           // 0: MPFE_THREADS or the OpenMP default
  std::ostream* log = nullptr;
  bool verbose = false;
};

struct RunResult {
  std::vector<LedgerRow> ledger;
  FieldDump final_dump;
  std::vector<std::string> advisories;
  int steps = 0;
};

// validates, runs every step and writes scenario.json, ledger.csv,
// summary.json, vtk/ and probes/ under output_dir
RunResult run(const Scenario& s, const RunOptions& opt = {});

void write_ledger_csv(const Scenario& s, const std::vector<LedgerRow>& rows, std::ostream& os);

}  // namespace mpfe
