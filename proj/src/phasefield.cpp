#include "mpfe/phasefield.hpp"

#include "mpfe/errors.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace mpfe {

void KineticParams::validate(double dx) const {
  if (!(eta > 0.0 && gamma > 0.0 && mobility > 0.0 && dt > 0.0))
    throw ValidationError("kinetic parameters (eta, gamma, mobility, dt) must be strictly positive");
  if (eta < 4.0 * dx * (1.0 - 1e-12)) throw ValidationError("interface width must be at least 4 cells");
  if (!(activation_threshold >= 0.0 && activation_threshold < 1.0))
    throw ValidationError("activation threshold must lie in [0, 1)");
}

double KineticParams::rate(int n_active) const {
  return std::numbers::pi * std::numbers::pi * mobility / (4.0 * eta * n_active);
}

double interface_profile(double d, double eta) {
  if (d <= -0.5 * eta) return 1.0;
  if (d >= 0.5 * eta) return 0.0;
  return 0.5 * (1.0 - std::sin(std::numbers::pi * d / eta));
}

PhaseState::PhaseState(const Grid& g, int nphases)
    : grid_(g), active_(g.cells(), 0u), grad_(nphases), lap_(nphases), present_(nphases, 0) {
  if (nphases < 1 || nphases > kMaxPhases) throw ValidationError("number of phases must be in [1, 32]");
  phi_.reserve(nphases);
  for (int p = 0; p < nphases; ++p) phi_.emplace_back(g, 0.0);
  for (int p = 0; p < nphases; ++p) {
    grad_[p].comp.assign(g.dim(), ScalarField(g, 0.0));
    lap_[p] = ScalarField(g, 0.0);
  }
}

void PhaseState::rebuild_active() {
  const std::size_t nc = grid_.cells();
  const int np = phases();
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nc; ++i) {
    std::uint32_t m = 0;
    for (int p = 0; p < np; ++p)
      if (phi_[p][i] > 0.0) m |= 1u << p;
    active_[i] = m;
  }
}

void PhaseState::refresh_derivatives() {
  for (int p = 0; p < phases(); ++p) {
    const auto& v = phi_[p].values();
    const bool now = std::any_of(v.begin(), v.end(), [](double x) { return x != 0.0; });
    if (now) {
      gradient_into(phi_[p], grad_[p]);
      laplacian_into(phi_[p], lap_[p]);
    } else if (present_[p]) {
      for (auto& c : grad_[p].comp) std::fill(c.values().begin(), c.values().end(), 0.0);
      std::fill(lap_[p].values().begin(), lap_[p].values().end(), 0.0);
    }
    present_[p] = now;
  }
}

PhaseFieldSet PhaseState::cell(std::size_t i) const {
  PhaseFieldSet s;
  std::uint32_t m = active_[i];
  const int dim = grid_.dim();
  while (m) {
    const int p = std::countr_zero(m);
    m &= m - 1;
    PhaseEntry e;
    e.id = p;
    e.phi = phi_[p][i];
    for (int a = 0; a < dim; ++a) e.grad[a] = grad_[p].comp[a][i];
    e.lap = lap_[p][i];
    s.push(e);
  }
  return s;
}

double PhaseState::total() const {
  double s = 0.0;
  for (const auto& f : phi_)
    for (double v : f.values()) s += v;
  return s;
}

double PhaseState::max_simplex_error() const {
  double worst = 0.0;
  for (std::size_t i = 0; i < grid_.cells(); ++i) {
    double s = 0.0;
    for (const auto& f : phi_) s += f[i];
    worst = std::max(worst, std::abs(s - 1.0));
  }
  return worst;
}

PairField::PairField(const Grid& g, int nphases) : nphases_(nphases), index_(nphases * nphases, -1) {
  for (int a = 0; a < nphases; ++a)
    for (int b = a + 1; b < nphases; ++b) {
      index_[a * nphases + b] = static_cast<int>(pairs_.size());
      pairs_.push_back({a, b});
      f_.emplace_back(g, 0.0);
    }
}

int PairField::pair_index(int a, int b) const { return index_[a * nphases_ + b]; }

void PairField::clear() {
  for (auto& f : f_) std::fill(f.values().begin(), f.values().end(), 0.0);
}

double interfacial_driving_force(const PhaseFieldSet& p, int a, int b, const KineticParams& k) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  return 4.0 * k.gamma / k.eta * (p[a].phi - p[b].phi + k.eta * k.eta / pi2 * (p[a].lap - p[b].lap));
}

UpdateStats mpf_update(PhaseState& state, const PairField& dG, const KineticParams& k) {
  const std::size_t nc = state.grid().cells();
  double lo = 1.0, hi = 0.0;
  std::size_t updated = 0;
#pragma omp parallel for schedule(static) reduction(min : lo) reduction(max : hi) reduction(+ : updated)
  for (std::size_t i = 0; i < nc; ++i) {
    const std::uint32_t mask = state.active(i);
    const int n = std::popcount(mask);
    if (n < 2) continue;
    std::array<int, kMaxPhases> ids;
    std::array<double, kMaxPhases> next;
    int m = 0;
    for (std::uint32_t r = mask; r; r &= r - 1) ids[m++] = std::countr_zero(r);
    const double pref = k.dt * k.rate(n);
    double sum = 0.0;
    for (int s = 0; s < m; ++s) {
      double flux = 0.0;
      for (int t = 0; t < m; ++t)
        if (t != s) flux += dG.get(ids[s], ids[t], i);
      double v = state.phi(ids[s], i) + pref * flux;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
      v = std::clamp(v, 0.0, 1.0);
      if (v < kPhiCut) v = 0.0;
      next[s] = v;
      sum += v;
    }
    std::uint32_t bits = 0;
    for (int s = 0; s < m; ++s) {
      const double v = sum > 0.0 ? next[s] / sum : 1.0 / m;
      state.field(ids[s])[i] = v;
      if (v > 0.0) bits |= 1u << ids[s];
    }
    state.active(i) = bits;
    ++updated;
  }
  if (lo < -kExcursion || hi > 1.0 + kExcursion) {
    std::ostringstream os;
    os << "phase-field update left the admissible range (min " << lo << ", max " << hi
       << "); reduce the time step";
    throw InstabilityError(os.str());
  }
  return {lo, hi, updated};
}

std::size_t activate_neighbors(PhaseState& state, double threshold) {
  const Grid& g = state.grid();
  const std::size_t nc = g.cells();

  std::vector<std::uint32_t> strong(nc, 0u);
#pragma omp parallel for schedule(static)
  for (std::size_t i = 0; i < nc; ++i) {
    std::uint32_t m = 0;
    for (std::uint32_t r = state.active(i); r; r &= r - 1) {
      const int p = std::countr_zero(r);
      if (state.phi(p, i) > threshold) m |= 1u << p;
    }
    strong[i] = m;
  }
  std::size_t added = 0;
  const auto& n = g.extents();
#pragma omp parallel for schedule(static) reduction(+ : added)
  for (int z = 0; z < n[2]; ++z)
    for (int y = 0; y < n[1]; ++y)
      for (int x = 0; x < n[0]; ++x) {
        const std::size_t i = g.index(x, y, z);
        std::uint32_t m = strong[g.index(x + 1, y, z)] | strong[g.index(x - 1, y, z)] |
                          strong[g.index(x, y + 1, z)] | strong[g.index(x, y - 1, z)];
        if (g.dim() == 3) m |= strong[g.index(x, y, z + 1)] | strong[g.index(x, y, z - 1)];
        const std::uint32_t fresh = m & ~state.active(i);
        if (fresh) {
          state.active(i) |= fresh;
          added += std::popcount(fresh);
        }
      }
  return added;
}

}  // namespace mpfe
