#include "mpfe/sim.hpp"

#include "mpfe/errors.hpp"

#include <omp.h>

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <random>

namespace mpfe {

namespace fs = std::filesystem;

namespace {

// fraction of a periodic layer [b, e) at coordinate u (cell units)
double layer_weight(double u, double b, double e, double n, double eta) {
  const double w = e - b;
  const double t = u - b - n * std::floor((u - b) / n);
  const double depth = t < w ? std::min(t, w - t) : -std::min(t - w, n - t);
  return interface_profile(-depth, eta);
}

// weights of a contiguous layer list along one axis, normalized
std::vector<double> layer_fractions(const std::vector<LayerDef>& layers, double u, double n, double eta) {
  std::vector<double> w(layers.size(), 1.0);
  if (layers.size() == 1) return w;
  double sum = 0.0;
  for (std::size_t l = 0; l < layers.size(); ++l) {
    w[l] = layer_weight(u, layers[l].begin, layers[l].end, n, eta);
    sum += w[l];
  }
  if (sum <= 0.0) {
    // no layer claims the cell: take the one whose center is closest
    std::size_t best = 0;
    double bd = INFINITY;
    for (std::size_t l = 0; l < layers.size(); ++l) {
      const double c = 0.5 * (layers[l].begin + layers[l].end);
      const double d = std::abs(u - c - n * std::floor((u - c) / n + 0.5));
      if (d < bd) bd = d, best = l;
    }
    std::fill(w.begin(), w.end(), 0.0);
    w[best] = 1.0;
    return w;
  }
  for (double& v : w) v /= sum;
  return w;
}

void normalize_cell(PhaseState& st, std::size_t i) {
  double sum = 0.0;
  for (int p = 0; p < st.phases(); ++p) {
    double& v = st.field(p)[i];
    if (v < kPhiCut) v = 0.0;
    sum += v;
  }
  for (int p = 0; p < st.phases(); ++p) st.field(p)[i] /= sum;
}

// sets phase p to at least `target` at cell i, scaling the others down
void raise_phase(PhaseState& st, std::size_t i, int p, double target) {
  const double old = st.phi(p, i);
  if (target <= old) return;
  const double rest = 1.0 - old;
  for (int q = 0; q < st.phases(); ++q) {
    if (q == p) continue;
    st.field(q)[i] = rest > 0.0 ? st.phi(q, i) * (1.0 - target) / rest : 0.0;
  }
  st.field(p)[i] = target;
}

void plant(PhaseState& st, const std::array<int, 3>& c, int phase, double phi, double radius, double eta) {
  const Grid& g = st.grid();
  if (radius <= 0.0) {
    raise_phase(st, g.index(c[0], c[1], c[2]), phase, phi);
    return;
  }
  const double reach = radius + 0.5 * eta;
  const int r = static_cast<int>(std::ceil(reach));
  const int rz = g.dim() == 3 ? r : 0;
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx) {
        const double d = std::sqrt(double(dx * dx + dy * dy + dz * dz));
        const double v = phi * interface_profile(d - radius, eta);
        if (v < kPhiCut) continue;
        raise_phase(st, g.index(c[0] + dx, c[1] + dy, c[2] + dz), phase, v);
      }
}

template <int Dim>
SymTensor2<Dim> tensor_from(const std::vector<double>& v) {
  SymTensor2<Dim> t;
  for (int c = 0; c < static_cast<int>(v.size()) && c < sym_size<Dim>(); ++c) t[c] = v[c];
  return t;
}

template <int Dim>
std::vector<PhaseSpec<Dim>> build_specs(const Scenario& s) {
  constexpr int N = sym_size<Dim>();
  std::vector<PhaseSpec<Dim>> out;
  for (int p = 0; p < static_cast<int>(s.phases.size()); ++p) {
    const PhaseDef& d = s.phases[p];
    Stiffness4<Dim> C;
    if (d.stiffness.empty()) {
      C = Stiffness4<Dim>::isotropic(d.lambda, d.mu);
    } else {
      typename Stiffness4<Dim>::Matrix m;
      for (int a = 0; a < N; ++a)
        for (int b = 0; b < N; ++b) m(a, b) = d.stiffness[a][b];
      try {
        C = Stiffness4<Dim>(m);
      } catch (const std::invalid_argument&) {
        throw ValidationError("stiffness of phase '" + d.name + "' lacks major symmetry");
      }
    }
    Rotation<Dim> R;
    if (d.grain >= 0) R = Rotation<Dim>::about_z(s.grains[d.grain].angle_deg * std::numbers::pi / 180.0);
    out.push_back(PhaseSpec<Dim>::make(p, d.name, C, tensor_from<Dim>(d.bain), R, d.chemical_energy));
  }
  return out;
}

template <int Dim>
void put_tensor(DumpArray& a, std::size_t i, const SymTensor2<Dim>& t) {
  for (int r = 0; r < 3; ++r)
    for (int c = 0; c < 3; ++c) a.values[9 * i + 3 * r + c] = (r < Dim && c < Dim) ? t(r, c) : 0.0;
}

}  // namespace

void initialize_phases(const Scenario& s, PhaseState& st) {
  const Grid& g = st.grid();
  const std::size_t nc = g.cells();
  const double eta = s.kinetics.interface_width_cells;
  const auto& geo = s.geometry;
  for (int p = 0; p < st.phases(); ++p) std::fill(st.field(p).values().begin(), st.field(p).values().end(), 0.0);
  for (std::size_t i = 0; i < nc; ++i) {
    const auto c = g.coords(i);
    if (geo.kind == "uniform") {
      st.field(geo.phase)[i] = 1.0;
    } else if (geo.kind == "layers") {
      const double n = g.extent(geo.axis);
      const auto w = layer_fractions(geo.layers, c[geo.axis] + 0.5, n, eta);
      for (std::size_t l = 0; l < w.size(); ++l) st.field(geo.layers[l].phase)[i] += w[l];
    } else {
      const int nx = g.extent(0), ny = g.extent(1);
      const double upper = layer_fractions({{0, 0, ny / 2}, {1, ny / 2, ny}}, c[1], ny, eta)[1];
      const double left = layer_fractions({{0, 0, nx / 2}, {1, nx / 2, nx}}, c[0], nx, eta)[0];
      const auto& jp = geo.junction_phases;
      st.field(jp[0])[i] += (1.0 - upper) * left;
      st.field(jp[1])[i] += (1.0 - upper) * (1.0 - left);
      st.field(jp[2])[i] += upper;
    }
    normalize_cell(st, i);
  }
  st.rebuild_active();
}

std::size_t nucleate(const Scenario& s, PhaseState& st) {
  const Grid& g = st.grid();
  const double eta = s.kinetics.interface_width_cells;
  std::size_t planted = 0;
  for (const auto& nu : s.nuclei.list) {
    plant(st, nu.cell, nu.phase, nu.phi, nu.radius_cells, eta);
    ++planted;
  }
  const auto& lat = s.nuclei.lattice;
  if (lat.spacing > 0) {
    std::mt19937_64 rng(s.seed);
    std::array<int, 3> count{1, 1, 1};
    for (int a = 0; a < g.dim(); ++a) count[a] = g.extent(a) / lat.spacing;
    for (int kz = 0; kz < count[2]; ++kz)
      for (int ky = 0; ky < count[1]; ++ky)
        for (int kx = 0; kx < count[0]; ++kx) {
          std::array<int, 3> c{lat.offset + kx * lat.spacing, lat.offset + ky * lat.spacing, 0};
          if (g.dim() == 3) c[2] = lat.offset + kz * lat.spacing;
          const std::size_t i = g.index(c[0], c[1], c[2]);
          int host = 0;
          for (int p = 1; p < st.phases(); ++p)
            if (st.phi(p, i) > st.phi(host, i)) host = p;
          std::vector<int> variants;
          for (int p = 0; p < st.phases(); ++p)
            if (s.phases[p].parent == host) variants.push_back(p);
          if (variants.empty()) continue;
          const int v = variants[rng() % variants.size()];
          plant(st, c, v, lat.phi, lat.radius_cells, eta);
          ++planted;
        }
  }
  st.rebuild_active();
  return planted;
}

template <int Dim>
struct Simulation<Dim>::Impl {
  static constexpr int N = sym_size<Dim>();
  Scenario sc;
  Grid grid;
  KineticParams kp;
  Model model;
  std::vector<PhaseSpec<Dim>> specs;
  PhaseState state;
  TensorField<Dim> eps, sig;
  ScalarField psi;
  PairField drive, elastic;
  SpectralSolver<Dim> solver;
  SolverConfig<Dim> cfg;
  SolveReport report;
  // per-cell active entries, sorted by phase id
  std::vector<std::size_t> offset;
  std::vector<CellPhase<Dim>> entries;
  std::vector<std::uint8_t> nreal;
  double g_tol = 0.0;
  int step = 0;
  bool evaluated = false;
  std::ostream* log = nullptr;

  explicit Impl(const Scenario& s)
      : sc(s),
        grid(s.dimension, s.grid.extents, s.grid.spacing),
        kp{s.kinetics.interface_width_cells * s.grid.spacing, s.kinetics.interfacial_energy, s.kinetics.mobility,
           s.kinetics.time_step, s.kinetics.activation_threshold},
        model(parse_model(s.model)),
        specs(build_specs<Dim>(s)),
        state(grid, static_cast<int>(s.phases.size())),
        eps(grid),
        sig(grid),
        psi(grid, 0.0),
        drive(grid, static_cast<int>(s.phases.size())),
        elastic(grid, static_cast<int>(s.phases.size())),
        solver(grid) {
    cfg.reference = choose_reference<Dim>(specs, s.solver.reference == "mean_isotropic");
    cfg.max_iterations = s.solver.max_iterations;
    cfg.tolerance = s.solver.tolerance;
    cfg.control = s.solver.control == "stress" ? LoadControl::stress : LoadControl::strain;
    cfg.applied_strain = tensor_from<Dim>(s.loads.strain);
    cfg.applied_stress = tensor_from<Dim>(s.loads.stress);
    g_tol = 1e-8 / s.grid.spacing;
    initialize_phases(sc, state);
    nucleate(sc, state);
    // uniform, hence compatible, warm start
    SymTensor2<Dim> start = cfg.applied_strain;
    if (cfg.control == LoadControl::stress) {
      start = SymTensor2<Dim>();
      const std::size_t nc = grid.cells();
      for (std::size_t i = 0; i < nc; ++i)
        for (int p = 0; p < state.phases(); ++p) start += (state.phi(p, i) / nc) * specs[p].bain;
    }
    eps.fill(start);
  }

  void build_entries() {
    const std::size_t nc = grid.cells();
    offset.assign(nc + 1, 0);
    for (std::size_t i = 0; i < nc; ++i) offset[i + 1] = offset[i] + std::popcount(state.active(i));
    entries.resize(offset[nc]);
    nreal.assign(nc, 0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nc; ++i) {
      std::size_t k = offset[i];
      int real = 0;
      for (std::uint32_t m = state.active(i); m; m &= m - 1) {
        const int p = std::countr_zero(m);
        CellPhase<Dim>& e = entries[k++];
        e.spec = &specs[p];
        e.phi = state.phi(p, i);
        for (int a = 0; a < Dim; ++a) e.grad[a] = state.grad(p).comp[a][i];
        real += e.phi > 0.0;
      }
      nreal[i] = static_cast<std::uint8_t>(real);
    }
  }

  std::span<const CellPhase<Dim>> cell(std::size_t i) const {
    return {entries.data() + offset[i], offset[i + 1] - offset[i]};
  }

  const CellPhase<Dim>* sole_real(std::size_t i) const {
    for (const auto& e : cell(i))
      if (e.phi > 0.0) return &e;
    return nullptr;
  }

  void constitutive(const TensorField<Dim>& e, TensorField<Dim>& s) const {
    const std::size_t nc = grid.cells();
    const KernelOptions opt{g_tol, false, false};
#pragma omp parallel
    {
      PointResult<Dim> r;
      std::array<CellPhase<Dim>, kMaxPhases> real;
#pragma omp for schedule(dynamic, 256)
      for (std::size_t i = 0; i < nc; ++i) {
        const SymTensor2<Dim> ei = e.at(i);
        if (nreal[i] == 1) {
          s.set(i, phase_stress(ei, *sole_real(i)->spec));
          continue;
        }
        int n = 0;
        for (const auto& c : cell(i))
          if (c.phi > 0.0) real[n++] = c;
        evaluate_point<Dim>(model, ei, std::span<const CellPhase<Dim>>(real.data(), n), opt, r);
        s.set(i, r.stress);
      }
    }
  }

  void forces_pass() {
    const std::size_t nc = grid.cells();
    drive.clear();
    elastic.clear();
    const KernelOptions opt{g_tol, true, false};
#pragma omp parallel
    {
      PointResult<Dim> r;
      std::array<int, kMaxPhases> ids;
#pragma omp for schedule(dynamic, 256)
      for (std::size_t i = 0; i < nc; ++i) {
        const auto c = cell(i);
        const SymTensor2<Dim> ei = eps.at(i);
        if (c.size() == 1) {
          psi[i] = phase_energy(ei, *c[0].spec);
          continue;
        }
        evaluate_point<Dim>(model, ei, c, opt, r);
        psi[i] = r.psi;
        const int n = static_cast<int>(c.size());
        for (int k = 0; k < n; ++k) ids[k] = c[k].spec->id;
        for (int a = 0; a < n; ++a)
          for (int b = a + 1; b < n; ++b) {
            if (c[a].phi + c[b].phi == 0.0) continue;
            const double el = r.force(a, b);
            elastic.set(ids[a], ids[b], i, el);
            drive.set(ids[a], ids[b], i, el + (c[b].spec->chemical - c[a].spec->chemical));
          }
      }
    }
  }

  // cells where both phases of the pair are active and not both zero
  void pair_mask(int a, int b, std::vector<std::uint8_t>& mask) const {
    const std::size_t nc = grid.cells();
    const std::uint32_t bits = (1u << a) | (1u << b);
    mask.assign(nc, 0);
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nc; ++i)
      mask[i] = (state.active(i) & bits) == bits && state.phi(a, i) + state.phi(b, i) > 0.0;
  }

  void condition_forces() {
    const std::size_t nc = grid.cells();
    const double radius = sc.kinetics.averaging ? averaging_radius(sc) : 0.0;
    const double limit = sc.kinetics.driving_force_limit * std::numbers::pi * kp.gamma / kp.eta;
    std::vector<std::uint8_t> mask;
    ScalarField tmp;
    for (int p = 0; p < drive.pairs(); ++p) {
      const auto [a, b] = drive.pair_phases(p);
      if (!state.present(a) && !state.present(b)) continue;
      pair_mask(a, b, mask);
      if (std::none_of(mask.begin(), mask.end(), [](std::uint8_t m) { return m != 0; })) continue;
      ScalarField& f = drive.field(p);
      if (radius > 0.0) {
        tmp = f;
        masked_sphere_average(f, mask, radius, tmp);
        f = tmp;
      }
#pragma omp parallel for schedule(static)
      for (std::size_t i = 0; i < nc; ++i) {
        if (!mask[i]) continue;
        double v = f[i];
        if (limit > 0.0) v = limit * std::tanh(v / limit);
        f[i] = v;
      }
    }
#pragma omp parallel for schedule(static)
    for (std::size_t i = 0; i < nc; ++i) {
      const std::uint32_t m = state.active(i);
      if (std::popcount(m) < 2) continue;
      const PhaseFieldSet set = state.cell(i);
      for (int s = 0; s < set.size(); ++s)
        for (int t = s + 1; t < set.size(); ++t) {
          if (set[s].phi + set[t].phi == 0.0) continue;
          const double v = drive.get(set[s].id, set[t].id, i) + interfacial_driving_force(set, s, t, kp);
          drive.set(set[s].id, set[t].id, i, v);
        }
    }
  }

  void evaluate() {
    state.refresh_derivatives();
    activate_neighbors(state, kp.activation_threshold);
    build_entries();
    report = solver.solve([this](const TensorField<Dim>& e, TensorField<Dim>& s) { constitutive(e, s); }, cfg,
                          eps, sig);
    if (log) *log << "step " << step << ": equilibrium in " << report.iterations << " iterations (residual "
                  << report.residual << ")\n";
    forces_pass();
    condition_forces();
    evaluated = true;
  }

  double interfacial_energy(std::size_t i) const {
    const double pre = 4.0 * kp.gamma / kp.eta;
    const double g2 = kp.eta * kp.eta / (std::numbers::pi * std::numbers::pi);
    double e = 0.0;
    for (int a = 0; a < state.phases(); ++a) {
      if (!state.present(a)) continue;
      for (int b = a + 1; b < state.phases(); ++b) {
        if (!state.present(b)) continue;
        double dot = 0.0;
        for (int d = 0; d < Dim; ++d) dot += state.grad(a).comp[d][i] * state.grad(b).comp[d][i];
        e += pre * (state.phi(a, i) * state.phi(b, i) - g2 * dot);
      }
    }
    return e;
  }
};

template <int Dim>
Simulation<Dim>::Simulation(const Scenario& s) {
  validate(s);
  if (s.dimension != Dim) throw ValidationError("scenario dimension does not match the simulation");
  impl_ = std::make_unique<Impl>(s);
}

template <int Dim>
Simulation<Dim>::~Simulation() = default;

template <int Dim>
const Scenario& Simulation<Dim>::scenario() const {
  return impl_->sc;
}
template <int Dim>
const KineticParams& Simulation<Dim>::kinetics() const {
  return impl_->kp;
}
template <int Dim>
const std::vector<PhaseSpec<Dim>>& Simulation<Dim>::specs() const {
  return impl_->specs;
}
template <int Dim>
PhaseState& Simulation<Dim>::state() {
  return impl_->state;
}
template <int Dim>
const PhaseState& Simulation<Dim>::state() const {
  return impl_->state;
}
template <int Dim>
void Simulation<Dim>::evaluate() {
  impl_->evaluate();
}

template <int Dim>
void Simulation<Dim>::advance() {
  Impl& m = *impl_;
  if (!m.evaluated) throw std::logic_error("advance() needs a preceding evaluate()");
  mpf_update(m.state, m.drive, m.kp);
  m.evaluated = false;
  ++m.step;
}

template <int Dim>
int Simulation<Dim>::step_index() const {
  return impl_->step;
}
template <int Dim>
double Simulation<Dim>::time() const {
  return impl_->step * impl_->kp.dt;
}
template <int Dim>
const TensorField<Dim>& Simulation<Dim>::strain() const {
  return impl_->eps;
}
template <int Dim>
const TensorField<Dim>& Simulation<Dim>::stress() const {
  return impl_->sig;
}
template <int Dim>
const ScalarField& Simulation<Dim>::psi() const {
  return impl_->psi;
}
template <int Dim>
const PairField& Simulation<Dim>::forces() const {
  return impl_->drive;
}
template <int Dim>
const PairField& Simulation<Dim>::elastic_forces() const {
  return impl_->elastic;
}
template <int Dim>
const SolveReport& Simulation<Dim>::last_solve() const {
  return impl_->report;
}
template <int Dim>
void Simulation<Dim>::set_log(std::ostream* log, bool verbose) {
  impl_->log = log;
  impl_->cfg.log = verbose ? log : nullptr;
}

template <int Dim>
LedgerRow Simulation<Dim>::ledger_row() const {
  const Impl& m = *impl_;
  const std::size_t nc = m.grid.cells();
  LedgerRow r;
  r.step = m.step;
  r.time = time();
  double pe = 0.0, pi = 0.0;
  for (std::size_t i = 0; i < nc; ++i) {
    pe += m.psi[i];
    pi += m.interfacial_energy(i);
  }
  r.psi_elastic = pe / static_cast<double>(nc);
  r.psi_interfacial = pi / static_cast<double>(nc);
  for (int p = 0; p < m.state.phases(); ++p) {
    double s = 0.0;
    for (std::size_t i = 0; i < nc; ++i) s += m.state.phi(p, i);
    r.fractions.push_back(s / static_cast<double>(nc));
  }
  r.iterations = m.report.iterations;
  r.residual = m.report.residual;
  return r;
}

template <int Dim>
FieldDump Simulation<Dim>::dump() const {
  const Impl& m = *impl_;
  const std::size_t nc = m.grid.cells();
  FieldDump d;
  d.grid = m.grid;
  for (int p = 0; p < m.state.phases(); ++p) d.arrays.push_back({"phi_" + m.sc.phases[p].name, 1, m.state.field(p).values()});
  d.arrays.push_back({"psi", 1, m.psi.values()});
  DumpArray st{"stress", 9, std::vector<double>(9 * nc)}, sn{"strain", 9, std::vector<double>(9 * nc)};
  for (std::size_t i = 0; i < nc; ++i) {
    put_tensor<Dim>(st, i, m.sig.at(i));
    put_tensor<Dim>(sn, i, m.eps.at(i));
  }
  d.arrays.push_back(std::move(st));
  d.arrays.push_back(std::move(sn));
  for (int p = 0; p < m.drive.pairs(); ++p) {
    const auto [a, b] = m.drive.pair_phases(p);
    const auto& tot = m.drive.field(p).values();
    const auto& el = m.elastic.field(p).values();
    const bool used = std::any_of(tot.begin(), tot.end(), [](double v) { return v != 0.0; }) ||
                      std::any_of(el.begin(), el.end(), [](double v) { return v != 0.0; });
    if (!used) continue;
    const std::string tag = m.sc.phases[a].name + "_" + m.sc.phases[b].name;
    d.arrays.push_back({"dG_" + tag, 1, tot});
    d.arrays.push_back({"dGel_" + tag, 1, el});
  }
  return d;
}

void write_ledger_csv(const Scenario& s, const std::vector<LedgerRow>& rows, std::ostream& os) {
  os << "step,time [s],psi_elastic [J/m^3],psi_interfacial [J/m^3]";
  for (const auto& p : s.phases) os << ",fraction_" << p.name;
  os << ",iterations,residual\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const auto& r : rows) {
    os << r.step << ',' << num(r.time) << ',' << num(r.psi_elastic) << ',' << num(r.psi_interfacial);
    for (double f : r.fractions) os << ',' << num(f);
    os << ',' << r.iterations << ',' << num(r.residual) << '\n';
  }
}

namespace {

void write_dump(const FieldDump& d, const fs::path& dir, int step) {
  fs::create_directories(dir);
  char name[32];
  std::snprintf(name, sizeof name, "step_%06d.vtk", step);
  write_vtk(d, (dir / name).string());
}

template <int Dim>
RunResult run_dim(const Scenario& s, const RunOptions& opt) {
  Simulation<Dim> sim(s);
  sim.set_log(opt.log, opt.verbose);
  RunResult res;
  const auto& k = sim.kinetics();
  const double stab = k.stability_number(s.grid.spacing);
  if (stab > 0.25) {
    res.advisories.push_back("dt * mobility * gamma / dx^2 = " + std::to_string(stab) +
                             " exceeds 0.25; the explicit update may be unstable");
    if (opt.log) *opt.log << "advisory: " << res.advisories.back() << '\n';
  }
  const bool files = !opt.output_dir.empty();
  const fs::path out(opt.output_dir);
  if (files) {
    fs::create_directories(out);
    save_scenario(s, (out / "scenario.json").string());
  }
  const auto start = std::chrono::steady_clock::now();
  for (int k = 0;; ++k) {
    sim.evaluate();
    if (k % s.outputs.ledger_interval == 0 || k == s.steps) {
      res.ledger.push_back(sim.ledger_row());
      if (opt.log) {
        const auto& r = res.ledger.back();
        *opt.log << "step " << r.step << " psi_elastic " << r.psi_elastic << " psi_interfacial "
                 << r.psi_interfacial << '\n';
      }
    }
    if (files && s.outputs.vtk && s.outputs.vtk_interval > 0 && k % s.outputs.vtk_interval == 0 && k < s.steps)
      write_dump(sim.dump(), out / "vtk", k);
    if (k == s.steps) break;
    sim.advance();
  }
  res.steps = s.steps;
  res.final_dump = sim.dump();
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (files) {
    if (s.outputs.vtk) write_dump(res.final_dump, out / "vtk", s.steps);
    {
      std::ofstream f(out / "ledger.csv");
      write_ledger_csv(s, res.ledger, f);
    }
    if (!s.outputs.probes.empty()) fs::create_directories(out / "probes");
    for (const auto& p : s.outputs.probes) {
      std::ofstream f(out / "probes" / (p.name + ".csv"));
      write_probe_csv(res.final_dump, p.points, p.fields, f);
    }
    double peak = 0.0;
    for (const auto& r : res.ledger) peak = std::max(peak, r.psi_elastic);
    const auto& last = res.ledger.back();
    nlohmann::json j{{"scenario", s.name},
                     {"model", s.model},
                     {"steps", s.steps},
                     {"final_time", last.time},
                     {"final_psi_elastic", last.psi_elastic},
                     {"peak_psi_elastic", peak},
                     {"final_psi_interfacial", last.psi_interfacial},
                     {"final_fractions", last.fractions},
                     {"advisories", res.advisories},
                     {"wall_seconds", wall}};
    std::ofstream f(out / "summary.json");
    f << j.dump(2) << '\n';
  }
  return res;
}

}  // namespace

RunResult run(const Scenario& s, const RunOptions& opt) {
  validate(s);
  int threads = opt.threads;
  if (threads <= 0)
    if (const char* env = std::getenv("MPFE_THREADS")) threads = std::atoi(env);
  if (threads > 0) omp_set_num_threads(threads);
  return s.dimension == 3 ? run_dim<3>(s, opt) : run_dim<2>(s, opt);
}

template class Simulation<2>;
template class Simulation<3>;

}  // namespace mpfe
