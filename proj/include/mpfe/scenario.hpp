// Declarative simulation description and its JSON form.
#pragma once

#include "json.hpp"

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace mpfe {

struct GridDef {
  std::array<int, 3> extents{64, 64, 64};  // cells; third ignored in 2D
  double spacing = 1e-6;                    // [m]
  bool operator==(const GridDef&) const = default;
};

struct KineticsDef {
  double interface_width_cells = 5.0;
  double interfacial_energy = 0.5;          // [J/m^2]
  double mobility = 3e-7;                   // [m^4/(J s)]
  double time_step = 1e-6;                  // [s]
  double activation_threshold = 1e-6;
  std::vector<double> pair_interfacial_energies;  // accepted, rejected by validation
  bool averaging = true;
  double averaging_radius_cells = -1.0;     // < 0: (eta_cells + 1)/2 + 1
  double driving_force_limit = 0.0;         // 0: off, else fraction of pi*gamma/eta
  bool operator==(const KineticsDef&) const = default;
};

struct SolverDef {
  int max_iterations = 500;
  double tolerance = 1e-6;
  std::string reference = "mean";           // mean | mean_isotropic
  std::string control = "strain";           // strain | stress
  bool operator==(const SolverDef&) const = default;
};

struct PhaseDef {
  std::string name;
  double lambda = 0.0;                      // [Pa]
  double mu = 0.0;                          // [Pa]
  std::vector<std::vector<double>> stiffness;  // optional N x N tensor-component matrix [Pa]
  std::vector<double> bain;                 // N components, grain frame
  double chemical_energy = 0.0;             // [J/m^3]
  int grain = -1;                           // orientation index, -1 for none
  int parent = -1;                          // host phase for lattice nucleation
  bool operator==(const PhaseDef&) const = default;
};

struct GrainDef {
  double angle_deg = 0.0;                   // rotation about z
  bool operator==(const GrainDef&) const = default;
};

struct LayerDef {
  int phase = 0;
  int begin = 0;                            // cell edge, inclusive
  int end = 0;                              // cell edge, exclusive
  bool operator==(const LayerDef&) const = default;
};

struct GeometryDef {
  std::string kind = "uniform";             // uniform | layers | triple_junction
  int phase = 0;                            // uniform
  int axis = 0;                             // layers
  std::vector<LayerDef> layers;
  std::vector<int> junction_phases;         // triple_junction: lower-left, lower-right, upper
  bool operator==(const GeometryDef&) const = default;
};

struct NucleusDef {
  std::array<int, 3> cell{0, 0, 0};
  int phase = 0;
  double phi = 0.1;
  double radius_cells = 0.0;                // 0: single cell
  bool operator==(const NucleusDef&) const = default;
};

struct LatticeDef {
  int spacing = 0;                          // 0: no lattice
  int offset = 0;
  double phi = 0.1;
  double radius_cells = 0.0;
  bool operator==(const LatticeDef&) const = default;
};

struct NucleiDef {
  std::vector<NucleusDef> list;
  LatticeDef lattice;
  bool operator==(const NucleiDef&) const = default;
};

struct LoadsDef {
  std::vector<double> strain;               // mean strain, N components
  std::vector<double> stress;               // mean stress [Pa] under stress control
  bool operator==(const LoadsDef&) const = default;
};

struct ProbeDef {
  std::string name;
  std::vector<std::array<double, 3>> points;  // cell coordinates
  std::vector<std::string> fields;            // empty: all
  bool operator==(const ProbeDef&) const = default;
};

struct OutputsDef {
  int ledger_interval = 10;
  int vtk_interval = 0;                     // 0: final state only
  bool vtk = true;
  std::vector<ProbeDef> probes;
  bool operator==(const OutputsDef&) const = default;
};

struct Scenario {
  std::string name = "custom";
  int dimension = 3;
  GridDef grid;
  KineticsDef kinetics;
  SolverDef solver;
  std::vector<PhaseDef> phases;
  std::vector<GrainDef> grains;
  GeometryDef geometry;
  NucleiDef nuclei;
  LoadsDef loads;
  std::string model = "model_a";
  int steps = 0;
  OutputsDef outputs;
  std::uint64_t seed = 0;
  bool operator==(const Scenario&) const = default;
};

// strict parsing: unknown keys and malformed values raise ValidationError
Scenario scenario_from_json(const nlohmann::json& j);
nlohmann::json scenario_to_json(const Scenario& s);
Scenario load_scenario(const std::string& path);
void save_scenario(const Scenario& s, const std::string& path);

// throws ValidationError
void validate(const Scenario& s);

double averaging_radius(const Scenario& s);

std::vector<std::string> builtin_names();
// paper-scale builtins; throws ValidationError for unknown names
Scenario builtin_scenario(const std::string& name);
// same scenario on another grid; geometry, nuclei and probes follow the extents
Scenario builtin_scenario(const std::string& name, const std::array<int, 3>& extents);

}  // namespace mpfe
