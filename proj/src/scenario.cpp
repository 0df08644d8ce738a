#include "mpfe/scenario.hpp"

#include "mpfe/errors.hpp"
#include "mpfe/mechanics.hpp"
#include "mpfe/phasefield.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace mpfe {

using nlohmann::json;

namespace {

// Reads keys of one JSON object and rejects the ones nobody asked for.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j.is_object()) throw ValidationError(path_ + ": expected an object");
  }

  template <typename T>
  void opt(const char* key, T& out) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ValidationError(path_ + "." + key + ": " + e.what());
    }
  }

  template <typename T>
  void req(const char* key, T& out) {
    if (!j_.contains(key)) throw ValidationError(path_ + ": missing key '" + key + "'");
    opt(key, out);
  }

  template <typename Fn>
  void object(const char* key, Fn&& fn) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it != j_.end()) fn(Section(*it, path_ + "." + key));
  }

  template <typename Fn>
  void array(const char* key, Fn&& fn) {
    seen_.insert(key);
    auto it = j_.find(key);
    if (it == j_.end()) return;
    if (!it->is_array()) throw ValidationError(path_ + "." + key + ": expected an array");
    for (std::size_t k = 0; k < it->size(); ++k)
      fn(Section((*it)[k], path_ + "." + key + "[" + std::to_string(k) + "]"));
  }

  void finish() const {
    for (auto it = j_.begin(); it != j_.end(); ++it)
      if (!seen_.count(it.key())) throw ValidationError(path_ + ": unknown key '" + it.key() + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

}  // namespace

Scenario scenario_from_json(const json& j) {
  Scenario s;
  Section root(j, "scenario");
  root.opt("name", s.name);
  root.req("dimension", s.dimension);
  root.object("grid", [&](Section g) {
    std::vector<int> ext;
    g.req("extents", ext);
    if (ext.size() < 2 || ext.size() > 3) throw ValidationError("scenario.grid.extents: expected 2 or 3 integers");
    s.grid.extents = {ext[0], ext[1], ext.size() == 3 ? ext[2] : 1};
    g.req("spacing", s.grid.spacing);
    g.finish();
  });
  root.object("kinetics", [&](Section k) {
    auto& d = s.kinetics;
    k.opt("interface_width_cells", d.interface_width_cells);
    k.opt("interfacial_energy", d.interfacial_energy);
    k.opt("mobility", d.mobility);
    k.opt("time_step", d.time_step);
    k.opt("activation_threshold", d.activation_threshold);
    k.opt("pair_interfacial_energies", d.pair_interfacial_energies);
    k.opt("averaging", d.averaging);
    k.opt("averaging_radius_cells", d.averaging_radius_cells);
    k.opt("driving_force_limit", d.driving_force_limit);
    k.finish();
  });
  root.object("solver", [&](Section v) {
    v.opt("max_iterations", s.solver.max_iterations);
    v.opt("tolerance", s.solver.tolerance);
    v.opt("reference", s.solver.reference);
    v.opt("control", s.solver.control);
    v.finish();
  });
  root.array("phases", [&](Section p) {
    PhaseDef d;
    p.req("name", d.name);
    p.opt("lambda", d.lambda);
    p.opt("mu", d.mu);
    p.opt("stiffness", d.stiffness);
    p.opt("bain", d.bain);
    p.opt("chemical_energy", d.chemical_energy);
    p.opt("grain", d.grain);
    p.opt("parent", d.parent);
    p.finish();
    s.phases.push_back(std::move(d));
  });
  root.array("grains", [&](Section g) {
    GrainDef d;
    g.opt("angle_deg", d.angle_deg);
    g.finish();
    s.grains.push_back(d);
  });
  root.object("geometry", [&](Section g) {
    auto& d = s.geometry;
    g.req("kind", d.kind);
    g.opt("phase", d.phase);
    g.opt("axis", d.axis);
    g.array("layers", [&](Section l) {
      LayerDef ld;
      l.req("phase", ld.phase);
      l.req("begin", ld.begin);
      l.req("end", ld.end);
      l.finish();
      d.layers.push_back(ld);
    });
    g.opt("junction_phases", d.junction_phases);
    g.finish();
  });
  root.object("nuclei", [&](Section n) {
    n.array("list", [&](Section e) {
      NucleusDef d;
      std::vector<int> cell;
      e.req("cell", cell);
      if (cell.size() < 2 || cell.size() > 3) throw ValidationError("nucleus cell: expected 2 or 3 integers");
      d.cell = {cell[0], cell[1], cell.size() == 3 ? cell[2] : 0};
      e.req("phase", d.phase);
      e.opt("phi", d.phi);
      e.opt("radius_cells", d.radius_cells);
      e.finish();
      s.nuclei.list.push_back(d);
    });
    n.object("lattice", [&](Section l) {
      l.opt("spacing", s.nuclei.lattice.spacing);
      l.opt("offset", s.nuclei.lattice.offset);
      l.opt("phi", s.nuclei.lattice.phi);
      l.opt("radius_cells", s.nuclei.lattice.radius_cells);
      l.finish();
    });
    n.finish();
  });
  root.object("loads", [&](Section l) {
    l.opt("strain", s.loads.strain);
    l.opt("stress", s.loads.stress);
    l.finish();
  });
  root.opt("model", s.model);
  root.opt("steps", s.steps);
  root.object("outputs", [&](Section o) {
    o.opt("ledger_interval", s.outputs.ledger_interval);
    o.opt("vtk_interval", s.outputs.vtk_interval);
    o.opt("vtk", s.outputs.vtk);
    o.array("probes", [&](Section p) {
      ProbeDef d;
      p.req("name", d.name);
      std::vector<std::vector<double>> pts;
      p.req("points", pts);
      for (const auto& q : pts) {
        if (q.size() < 2 || q.size() > 3) throw ValidationError("probe point: expected 2 or 3 coordinates");
        d.points.push_back({q[0], q[1], q.size() == 3 ? q[2] : 0.0});
      }
      p.opt("fields", d.fields);
      p.finish();
      s.outputs.probes.push_back(std::move(d));
    });
    o.finish();
  });
  root.opt("seed", s.seed);
  root.finish();
  return s;
}

json scenario_to_json(const Scenario& s) {
  json j;
  j["name"] = s.name;
  j["dimension"] = s.dimension;
  std::vector<int> ext{s.grid.extents[0], s.grid.extents[1]};
  if (s.dimension == 3) ext.push_back(s.grid.extents[2]);
  j["grid"] = {{"extents", ext}, {"spacing", s.grid.spacing}};
  const auto& k = s.kinetics;
  j["kinetics"] = {{"interface_width_cells", k.interface_width_cells},
                   {"interfacial_energy", k.interfacial_energy},
                   {"mobility", k.mobility},
                   {"time_step", k.time_step},
                   {"activation_threshold", k.activation_threshold},
                   {"pair_interfacial_energies", k.pair_interfacial_energies},
                   {"averaging", k.averaging},
                   {"averaging_radius_cells", k.averaging_radius_cells},
                   {"driving_force_limit", k.driving_force_limit}};
  j["solver"] = {{"max_iterations", s.solver.max_iterations},
                 {"tolerance", s.solver.tolerance},
                 {"reference", s.solver.reference},
                 {"control", s.solver.control}};
  j["phases"] = json::array();
  for (const auto& p : s.phases) {
    json e = {{"name", p.name},         {"lambda", p.lambda}, {"mu", p.mu},         {"bain", p.bain},
              {"chemical_energy", p.chemical_energy}, {"grain", p.grain}, {"parent", p.parent}};
    if (!p.stiffness.empty()) e["stiffness"] = p.stiffness;
    j["phases"].push_back(e);
  }
  j["grains"] = json::array();
  for (const auto& g : s.grains) j["grains"].push_back({{"angle_deg", g.angle_deg}});
  json layers = json::array();
  for (const auto& l : s.geometry.layers) layers.push_back({{"phase", l.phase}, {"begin", l.begin}, {"end", l.end}});
  j["geometry"] = {{"kind", s.geometry.kind},
                   {"phase", s.geometry.phase},
                   {"axis", s.geometry.axis},
                   {"layers", layers},
                   {"junction_phases", s.geometry.junction_phases}};
  json list = json::array();
  for (const auto& n : s.nuclei.list) {
    std::vector<int> cell{n.cell[0], n.cell[1]};
    if (s.dimension == 3) cell.push_back(n.cell[2]);
    list.push_back({{"cell", cell}, {"phase", n.phase}, {"phi", n.phi}, {"radius_cells", n.radius_cells}});
  }
  const auto& lat = s.nuclei.lattice;
  j["nuclei"] = {{"list", list},
                 {"lattice",
                  {{"spacing", lat.spacing}, {"offset", lat.offset}, {"phi", lat.phi}, {"radius_cells", lat.radius_cells}}}};
  j["loads"] = {{"strain", s.loads.strain}, {"stress", s.loads.stress}};
  j["model"] = s.model;
  j["steps"] = s.steps;
  json probes = json::array();
  for (const auto& p : s.outputs.probes) {
    std::vector<std::vector<double>> pts;
    for (const auto& q : p.points) {
      std::vector<double> v{q[0], q[1]};
      if (s.dimension == 3) v.push_back(q[2]);
      pts.push_back(v);
    }
    probes.push_back({{"name", p.name}, {"points", pts}, {"fields", p.fields}});
  }
  j["outputs"] = {{"ledger_interval", s.outputs.ledger_interval},
                  {"vtk_interval", s.outputs.vtk_interval},
                  {"vtk", s.outputs.vtk},
                  {"probes", probes}};
  j["seed"] = s.seed;
  return j;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ValidationError("cannot open scenario file " + path);
  json j;
  try {
    j = json::parse(is);
  } catch (const json::exception& e) {
    throw ValidationError(path + ": " + e.what());
  }
  return scenario_from_json(j);
}

void save_scenario(const Scenario& s, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot write " + path);
  os << scenario_to_json(s).dump(2) << '\n';
}

double averaging_radius(const Scenario& s) {
  const double r = s.kinetics.averaging_radius_cells;
  return r >= 0.0 ? r : (s.kinetics.interface_width_cells + 1.0) / 2.0 + 1.0;
}

void validate(const Scenario& s) {
  auto fail = [](const std::string& m) { throw ValidationError(m); };
  if (s.dimension != 2 && s.dimension != 3) fail("dimension must be 2 or 3");
  const int N = s.dimension == 3 ? 6 : 3;
  for (int a = 0; a < s.dimension; ++a)
    if (s.grid.extents[a] < 4) fail("grid extents must be >= 4");
  if (s.dimension == 2 && s.grid.extents[2] != 1) fail("2D grids must have a third extent of 1");
  if (!(s.grid.spacing > 0.0)) fail("grid spacing must be positive");
  const auto& k = s.kinetics;
  KineticParams kp{k.interface_width_cells * s.grid.spacing, k.interfacial_energy, k.mobility, k.time_step,
                   k.activation_threshold};
  kp.validate(s.grid.spacing);
  if (!k.pair_interfacial_energies.empty())
    fail("per-pair interfacial energies are not supported; use a uniform interfacial_energy");
  if (!(k.driving_force_limit >= 0.0)) fail("driving_force_limit must be >= 0");
  if (!(s.solver.tolerance > 0.0) || s.solver.max_iterations < 1) fail("solver tolerance and iterations must be positive");
  if (s.solver.reference != "mean" && s.solver.reference != "mean_isotropic")
    fail("solver.reference must be 'mean' or 'mean_isotropic'");
  if (s.solver.control != "strain" && s.solver.control != "stress") fail("solver.control must be 'strain' or 'stress'");
  const int np = static_cast<int>(s.phases.size());
  if (np < 1 || np > kMaxPhases) fail("between 1 and 32 phases are required");
  std::set<std::string> names;
  for (const auto& p : s.phases) {
    if (!names.insert(p.name).second) fail("duplicate phase name '" + p.name + "'");
    if (p.stiffness.empty()) {
      if (!(p.mu > 0.0) || !(p.lambda + 2.0 * p.mu / s.dimension > 0.0))
        fail("phase '" + p.name + "' needs positive definite Lame constants");
    } else {
      if (static_cast<int>(p.stiffness.size()) != N) fail("phase '" + p.name + "' stiffness must be N x N");
      for (const auto& r : p.stiffness)
        if (static_cast<int>(r.size()) != N) fail("phase '" + p.name + "' stiffness must be N x N");
    }
    if (!p.bain.empty() && static_cast<int>(p.bain.size()) != N)
      fail("phase '" + p.name + "' bain strain needs " + std::to_string(N) + " components");
    if (p.grain < -1 || p.grain >= static_cast<int>(s.grains.size())) fail("phase '" + p.name + "' has an invalid grain");
    if (p.parent < -1 || p.parent >= np) fail("phase '" + p.name + "' has an invalid parent");
  }
  const auto& g = s.geometry;
  auto check_phase = [&](int p) {
    if (p < 0 || p >= np) fail("geometry references phase " + std::to_string(p) + " which does not exist");
  };
  if (g.kind == "uniform") {
    check_phase(g.phase);
  } else if (g.kind == "layers") {
    if (g.axis < 0 || g.axis >= s.dimension) fail("geometry.axis out of range");
    if (g.layers.empty()) fail("layers geometry needs at least one layer");
    const int n = s.grid.extents[g.axis];
    int expect = g.layers.front().begin;
    for (const auto& l : g.layers) {
      check_phase(l.phase);
      if (l.begin != expect || l.end <= l.begin) fail("layers must be contiguous and non-empty");
      expect = l.end;
    }
    if (expect - g.layers.front().begin != n) fail("layers must cover the grid axis exactly once");
  } else if (g.kind == "triple_junction") {
    if (s.dimension != 2) fail("triple_junction geometry is two-dimensional");
    if (g.junction_phases.size() != 3) fail("triple_junction needs three phases");
    for (int p : g.junction_phases) check_phase(p);
  } else {
    fail("unknown geometry kind '" + g.kind + "'");
  }
  for (const auto& nu : s.nuclei.list) {
    check_phase(nu.phase);
    for (int a = 0; a < s.dimension; ++a)
      if (nu.cell[a] < 0 || nu.cell[a] >= s.grid.extents[a]) fail("nucleus outside the grid");
    if (!(nu.phi > 0.0 && nu.phi <= 1.0) || nu.radius_cells < 0.0) fail("nucleus phi must be in (0,1], radius >= 0");
  }
  const auto& lat = s.nuclei.lattice;
  if (lat.spacing < 0 || lat.offset < 0) fail("lattice spacing and offset must be >= 0");
  if (lat.spacing > 0 && (!(lat.phi > 0.0 && lat.phi <= 1.0) || lat.radius_cells < 0.0))
    fail("lattice phi must be in (0,1], radius >= 0");
  if (!s.loads.strain.empty() && static_cast<int>(s.loads.strain.size()) != N)
    fail("loads.strain needs " + std::to_string(N) + " components");
  if (!s.loads.stress.empty() && static_cast<int>(s.loads.stress.size()) != N)
    fail("loads.stress needs " + std::to_string(N) + " components");
  parse_model(s.model);
  if (s.steps < 0) fail("steps must be >= 0");
  if (s.outputs.ledger_interval < 1 || s.outputs.vtk_interval < 0) fail("output intervals must be positive");
  for (const auto& p : s.outputs.probes)
    if (p.points.empty()) fail("probe '" + p.name + "' has no points");
}

}  // namespace mpfe
