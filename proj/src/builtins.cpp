#include "mpfe/errors.hpp"
#include "mpfe/scenario.hpp"

#include <cmath>

namespace mpfe {

namespace {

std::vector<double> diag3(double a, double b, double c) { return {a, b, c, 0.0, 0.0, 0.0}; }
std::vector<double> diag2(double a, double b) { return {a, b, 0.0}; }

PhaseDef phase(std::string name, double lambda, double mu, std::vector<double> bain, double chem = 0.0) {
  PhaseDef p;
  p.name = std::move(name);
  p.lambda = lambda;
  p.mu = mu;
  p.bain = std::move(bain);
  p.chemical_energy = chem;
  return p;
}

int scaled(int v, int from, int to) { return static_cast<int>(std::lround(static_cast<double>(v) * to / from)); }

Scenario laminate(const std::array<int, 3>& n) {
  Scenario s;
  s.name = "laminate_validation";
  s.dimension = 3;
  s.grid.extents = n;
  s.grid.spacing = 1e-4;
  auto& k = s.kinetics;
  k.interface_width_cells = 10.0;
  k.interfacial_energy = 1e5;
  k.mobility = 2e-14;
  k.time_step = 1.0;
  s.phases = {phase("alpha", 120e9, 80e9, diag3(0.02, -0.01, -0.01)),
              phase("beta", 120e9, 80e9, diag3(-0.01, -0.01, 0.02))};
  const int nz = n[2];
  s.geometry.kind = "layers";
  s.geometry.axis = 2;
  s.geometry.layers = {{0, 0, nz / 4}, {1, nz / 4, 3 * nz / 4}, {0, 3 * nz / 4, nz}};
  s.loads.strain = diag3(0.01, 0.0075, 0.005);
  s.solver.control = "strain";
  s.model = "model_a";
  s.steps = 0;
  s.outputs.vtk = false;
  const double cx = n[0] / 2, cy = n[1] / 2;
  s.outputs.probes = {{"center_line", {{cx, cy, 0.0}, {cx, cy, nz - 1.0}}, {}}};
  return s;
}

Scenario triple_junction(const std::array<int, 3>& e) {
  Scenario s;
  s.name = "triple_junction";
  s.dimension = 2;
  const int n = e[0];
  s.grid.extents = {n, e[1], 1};
  s.grid.spacing = 1e-4;
  auto& k = s.kinetics;
  k.interface_width_cells = 10.0;
  k.interfacial_energy = 1e5;
  k.mobility = 2e-14;
  k.time_step = 1.0;
  s.phases = {phase("alpha", 120e9, 80e9, diag2(0.01, -0.01)), phase("beta", 120e9, 80e9, diag2(-0.01, 0.01)),
              phase("gamma", 120e9, 80e9, diag2(0.0, 0.0))};
  s.geometry.kind = "triple_junction";
  s.geometry.junction_phases = {0, 1, 2};
  s.loads.strain = diag2(0.0, 0.0);
  s.solver.control = "strain";
  s.model = "model_a";
  s.steps = 0;
  const double m = e[1];
  const double q = n / 4.0, h = m / 2.0;
  s.outputs.probes = {{"line_I", {{0.0, m / 4.0, 0.0}, {n - 1.0, m / 4.0, 0.0}}, {}},
                      {"line_II", {{q, h, 0.0}, {3.0 * q, h, 0.0}}, {}},
                      {"line_III", {{q, m / 4.0, 0.0}, {3.0 * q, 3.0 * m / 4.0, 0.0}}, {}}};
  return s;
}

Scenario single_grain(const std::array<int, 3>& n) {
  Scenario s;
  s.name = "single_grain_3d";
  s.dimension = 3;
  s.grid.extents = n;
  s.grid.spacing = 1e-6;
  auto& k = s.kinetics;
  k.interface_width_cells = 5.0;
  k.interfacial_energy = 0.5;
  k.mobility = 3e-7;
  k.time_step = 1e-6;
  k.driving_force_limit = 0.95;
  const double chem = -7.76e7;
  s.phases = {phase("austenite", 120e9, 80e9, diag3(0.0, 0.0, 0.0)),
              phase("variant_1", 120e9, 80e9, diag3(0.02, -0.01, -0.01), chem),
              phase("variant_2", 120e9, 80e9, diag3(-0.01, -0.01, 0.02), chem),
              phase("variant_3", 120e9, 80e9, diag3(-0.01, 0.02, -0.01), chem)};
  for (int p = 1; p < 4; ++p) s.phases[p].parent = 0;
  s.geometry.kind = "uniform";
  s.geometry.phase = 0;
  const int cx = n[0] / 2, cy = n[1] / 2, cz = n[2] / 2;
  const int d = std::max(2, scaled(8, 64, n[0]));
  const double r = std::max(2.0, 4.0 * n[0] / 64.0);
  s.nuclei.list = {{{cx - d, cy, cz}, 1, 1.0, r}, {{cx + d, cy - d, cz}, 2, 1.0, r}, {{cx, cy + d, cz + d}, 3, 1.0, r}};
  s.loads.stress = diag3(0.0, 0.0, 0.0);
  s.solver.control = "stress";
  s.model = "model_a";
  s.steps = 1200;
  s.outputs.vtk_interval = 0;
  s.seed = 1;
  return s;
}

Scenario polycrystal(const std::array<int, 3>& e) {
  Scenario s;
  s.name = "polycrystal_2d";
  s.dimension = 2;
  s.grid.extents = {e[0], e[1], 1};
  s.grid.spacing = 1e-6;
  auto& k = s.kinetics;
  k.interface_width_cells = 5.0;
  k.interfacial_energy = 0.5;
  k.mobility = 3e-7;
  k.time_step = 1e-6;
  k.driving_force_limit = 0.95;
  const double chem = -7.76e7;
  s.grains = {{0.0}, {20.0}, {55.0}};
  for (int g = 0; g < 3; ++g) {
    const std::string tag = std::to_string(g);
    const int a = static_cast<int>(s.phases.size());
    s.phases.push_back(phase("austenite_" + tag, 107e9, 64e9, diag2(0.0, 0.0)));
    s.phases.push_back(phase("variant_1_" + tag, 109e9, 71e9, diag2(0.02, -0.01), chem));
    s.phases.push_back(phase("variant_2_" + tag, 109e9, 71e9, diag2(-0.01, 0.02), chem));
    for (int p = a; p < a + 3; ++p) s.phases[p].grain = g;
    s.phases[a + 1].parent = a;
    s.phases[a + 2].parent = a;
  }
  const int nx = e[0];
  s.geometry.kind = "layers";
  s.geometry.axis = 0;
  s.geometry.layers = {{0, 0, nx / 3}, {3, nx / 3, 2 * nx / 3}, {6, 2 * nx / 3, nx}};
  s.nuclei.lattice.spacing = std::max(8, nx / 16);
  s.nuclei.lattice.offset = s.nuclei.lattice.spacing / 2;
  s.nuclei.lattice.phi = 1.0;
  s.nuclei.lattice.radius_cells = 3.0;
  s.loads.stress = diag2(0.0, 0.0);
  s.solver.control = "stress";
  s.model = "model_a";
  s.steps = 2000;
  s.seed = 7;
  const double m = e[1];
  s.outputs.probes = {{"horizontal", {{0.0, m / 2.0, 0.0}, {nx - 1.0, m / 2.0, 0.0}}, {"psi"}}};
  return s;
}

}  // namespace

std::vector<std::string> builtin_names() {
  return {"laminate_validation", "triple_junction", "single_grain_3d", "polycrystal_2d"};
}

Scenario builtin_scenario(const std::string& name) {
  if (name == "laminate_validation") return laminate({100, 100, 100});
  if (name == "triple_junction") return triple_junction({400, 400, 1});
  if (name == "single_grain_3d") return single_grain({64, 64, 64});
  if (name == "polycrystal_2d") return polycrystal({500, 500, 1});
  throw ValidationError("unknown builtin scenario '" + name + "'");
}

Scenario builtin_scenario(const std::string& name, const std::array<int, 3>& extents) {
  if (name == "laminate_validation") return laminate(extents);
  if (name == "triple_junction") return triple_junction(extents);
  if (name == "single_grain_3d") return single_grain(extents);
  if (name == "polycrystal_2d") return polycrystal(extents);
  throw ValidationError("unknown builtin scenario '" + name + "'");
}

}  // namespace mpfe
