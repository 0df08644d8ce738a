#include "mpfe/equilibrium.hpp"

#include "mpfe/errors.hpp"

#include <fftw3.h>

#include <cmath>
#include <complex>
#include <cstdint>
#include <mutex>
#include <numbers>
#include <ostream>
#include <sstream>

namespace mpfe {

template <int Dim>
SymTensor2<Dim> TensorField<Dim>::mean() const {
  SymTensor2<Dim> m;
  const std::size_t n = cells();
  for (int c = 0; c < N; ++c) {
    double s = 0.0;
    const double* p = comp(c);
    for (std::size_t i = 0; i < n; ++i) s += p[i];
    m[c] = s / static_cast<double>(n);
  }
  return m;
}

template <int Dim>
Stiffness4<Dim> choose_reference(std::span<const PhaseSpec<Dim>> specs, bool isotropic) {
  if (specs.empty()) throw ValidationError("reference medium needs at least one phase");
  Stiffness4<Dim> c;
  for (const auto& s : specs) c += s.C;
  c *= 1.0 / static_cast<double>(specs.size());
  return isotropic ? isotropic_projection(c) : c;
}

namespace {

// FFTW planning is not thread safe
std::mutex& plan_mutex() {
  static std::mutex m;
  return m;
}

}  // namespace

template <int Dim>
struct SpectralSolver<Dim>::Impl {
  static constexpr int N = sym_size<Dim>();
  Grid grid;
  std::size_t cells = 0, freqs = 0;
  int half = 0;  // extent of the halved axis (x)
  double* real = nullptr;
  fftw_complex* spec = nullptr;
  std::vector<std::complex<double>> eps_hat;
  fftw_plan forward = nullptr, backward = nullptr;

  // per frequency: unit wave vector, inverse acoustic tensor of the
  // reference medium, Parseval weight; weight 0 marks the zero frequency
  // and the aliased Nyquist frequencies, where the stress itself must vanish
  std::vector<double> unit, kinv, weight, parseval;
  std::vector<std::uint8_t> nyquist_plane;
  Stiffness4<Dim> green_for;
  bool green_ready = false;

  explicit Impl(const Grid& g) : grid(g) {
    cells = g.cells();
    const auto& n = g.extents();
    half = n[0] / 2 + 1;
    freqs = static_cast<std::size_t>(half) * n[1] * n[2];
    real = fftw_alloc_real(N * cells);
    spec = fftw_alloc_complex(N * freqs);
    eps_hat.resize(N * freqs);
    int dims[3], cdims[3];
    if (Dim == 3) {
      dims[0] = n[2], dims[1] = n[1], dims[2] = n[0];
    } else {
      dims[0] = n[1], dims[1] = n[0];
    }
    for (int a = 0; a < Dim; ++a) cdims[a] = dims[a];
    cdims[Dim - 1] = half;
    std::lock_guard<std::mutex> lock(plan_mutex());
    forward = fftw_plan_many_dft_r2c(Dim, dims, N, real, nullptr, 1, static_cast<int>(cells), spec, cdims, 1,
                                     static_cast<int>(freqs), FFTW_ESTIMATE);
    backward = fftw_plan_many_dft_c2r(Dim, dims, N, spec, cdims, 1, static_cast<int>(freqs), real, nullptr, 1,
                                      static_cast<int>(cells), FFTW_ESTIMATE);
    if (!forward || !backward) throw std::runtime_error("FFT planning failed");
  }

  ~Impl() {
    std::lock_guard<std::mutex> lock(plan_mutex());
    fftw_destroy_plan(forward);
    fftw_destroy_plan(backward);
    fftw_free(real);
    fftw_free(spec);
  }

  void build_green(const Stiffness4<Dim>& C0) {
    if (green_ready && C0 == green_for) return;
    const auto& n = grid.extents();
    unit.assign(Dim * freqs, 0.0);
    kinv.assign(Dim * Dim * freqs, 0.0);
    weight.assign(freqs, 0.0);
    parseval.assign(freqs, 0.0);
    nyquist_plane.assign(freqs, 0);
    for (int kz = 0; kz < n[2]; ++kz)
      for (int ky = 0; ky < n[1]; ++ky)
        for (int kx = 0; kx < half; ++kx) {
          const std::size_t f = kx + static_cast<std::size_t>(half) * (ky + static_cast<std::size_t>(n[1]) * kz);
          const int idx[3] = {kx, ky, kz};
          bool nyquist = false;
          int nonzero = 0;
          Vec<Dim> xi;
          for (int a = 0; a < Dim; ++a) {
            const int m = idx[a];
            nonzero += m != 0;
            if (n[a] % 2 == 0 && m == n[a] / 2) nyquist = true;
            const int signed_m = m <= n[a] / 2 ? m : m - n[a];
            xi[a] = static_cast<double>(signed_m) / n[a];
          }
          parseval[f] = (kx == 0 || (n[0] % 2 == 0 && kx == n[0] / 2)) ? 1.0 : 2.0;
          // a Nyquist index along a single axis still has an unambiguous
          // direction; mixed ones alias between directions
          if (nonzero == 1) nyquist = false;
          nyquist_plane[f] = nyquist;
          if (nyquist || xi.norm() == 0.0) continue;
          weight[f] = parseval[f];
          xi.normalize();
          const Mat<Dim> K = acoustic_tensor(C0, xi).inverse();
          for (int a = 0; a < Dim; ++a) unit[Dim * f + a] = xi[a];
          for (int a = 0; a < Dim; ++a)
            for (int b = 0; b < Dim; ++b) kinv[Dim * Dim * f + Dim * a + b] = K(a, b);
        }
    green_for = C0;
    green_ready = true;
  }

  std::complex<double>* cspec(int c) { return reinterpret_cast<std::complex<double>*>(spec) + c * freqs; }
};

template <int Dim>
SpectralSolver<Dim>::SpectralSolver(const Grid& g) : impl_(std::make_unique<Impl>(g)) {
  if (g.dim() != Dim) throw std::invalid_argument("solver dimension does not match grid");
}

template <int Dim>
SpectralSolver<Dim>::~SpectralSolver() = default;

template <int Dim>
SolveReport SpectralSolver<Dim>::solve(const Constitutive& material, const SolverConfig<Dim>& cfg,
                                       TensorField<Dim>& eps, TensorField<Dim>& sig) {
  constexpr int N = sym_size<Dim>();
  Impl& m = *impl_;
  m.build_green(cfg.reference);
  const std::size_t nc = m.cells, nf = m.freqs;
  const double inv_cells = 1.0 / static_cast<double>(nc);
  const auto& C0 = cfg.reference.matrix();
  const Stiffness4<Dim> S0 = cfg.reference.inverse();
  double cmax = C0.cwiseAbs().maxCoeff();
  // stresses below a 1e-6 strain response are treated as zero when
  // normalizing the residual
  const double floor = 1e-6 * cmax;

  SymTensor2<Dim> target = cfg.control == LoadControl::strain ? cfg.applied_strain : eps.mean();
  {
    const SymTensor2<Dim> shift = target - eps.mean();
    for (int c = 0; c < N; ++c) {
      double* p = eps.comp(c);
      for (std::size_t i = 0; i < nc; ++i) p[i] += shift[c];
    }
  }
  // spectrum of the warm start
  std::copy(eps.data(), eps.data() + N * nc, m.real);
  fftw_execute(m.forward);
  std::copy(m.cspec(0), m.cspec(0) + N * nf, m.eps_hat.begin());

  SolveReport rep;
  double best = INFINITY;
  for (int it = 0; it <= cfg.max_iterations; ++it) {
    material(eps, sig);
    std::copy(sig.data(), sig.data() + N * nc, m.real);
    fftw_execute(m.forward);

    double div2 = 0.0, all2 = 0.0;
    for (std::size_t f = 0; f < nf; ++f) {
      const double w = m.parseval[f];
      for (int c = 0; c < N; ++c) all2 += w * detail::sym_weight<Dim>(c) * std::norm(m.cspec(c)[f]);
      if (m.nyquist_plane[f]) {
        for (int c = 0; c < N; ++c) div2 += w * detail::sym_weight<Dim>(c) * std::norm(m.cspec(c)[f]);
        continue;
      }
      if (m.weight[f] == 0.0) continue;
      const double* xi = &m.unit[Dim * f];
      for (int i = 0; i < Dim; ++i) {
        std::complex<double> t = 0.0;
        for (int j = 0; j < Dim; ++j) t += m.cspec(detail::sym_index<Dim>(i, j))[f] * xi[j];
        div2 += m.weight[f] * std::norm(t);
      }
    }
    // Parseval: sum_x |s|^2 = sum_f |s_f|^2 / cells
    const double rms = std::sqrt(all2 * inv_cells * inv_cells);
    double residual = std::sqrt(div2 * inv_cells * inv_cells) / std::max(rms, floor);
    SymTensor2<Dim> mean_sig;
    for (int c = 0; c < N; ++c) mean_sig[c] = m.cspec(c)[0].real() * inv_cells;
    if (cfg.control == LoadControl::stress)
      residual = std::max(residual, (mean_sig - cfg.applied_stress).norm() / std::max(rms, floor));
    rep.history.push_back(residual);
    rep.iterations = it;
    rep.residual = residual;
    if (cfg.log) *cfg.log << "  equilibrium iteration " << it << " residual " << residual << '\n';
    if (residual <= cfg.tolerance) return rep;
    if (!std::isfinite(residual) || (it >= 3 && residual > 10.0 * best)) {
      std::ostringstream os;
      os << "equilibrium iteration diverged at iteration " << it << " (residual " << residual << ")";
      throw SolverError(os.str(), rep.history);
    }
    best = std::min(best, residual);
    if (it == cfg.max_iterations) break;

    if (cfg.control == LoadControl::stress) target += contract(S0, cfg.applied_stress - mean_sig);

    // eps_hat := -Gamma0 : (sig_hat - C0 : eps_hat), mean := target
    for (std::size_t f = 0; f < nf; ++f) {
      std::complex<double> tau[N];
      for (int c = 0; c < N; ++c) {
        std::complex<double> ce = 0.0;
        for (int d = 0; d < N; ++d) ce += C0(c, d) * detail::sym_weight<Dim>(d) * m.eps_hat[d * nf + f];
        tau[c] = m.cspec(c)[f] - ce;
      }
      if (m.nyquist_plane[f]) {
        for (int c = 0; c < N; ++c) {
          std::complex<double> v = 0.0;
          for (int d = 0; d < N; ++d) v -= S0.matrix()(c, d) * detail::sym_weight<Dim>(d) * tau[d];
          m.eps_hat[c * nf + f] = v;
        }
        continue;
      }
      if (m.weight[f] == 0.0) {
        for (int c = 0; c < N; ++c) m.eps_hat[c * nf + f] = std::complex<double>(target[c] * nc);
        continue;
      }
      const double* xi = &m.unit[Dim * f];
      const double* ki = &m.kinv[Dim * Dim * f];
      std::complex<double> tn[Dim], u[Dim];
      for (int i = 0; i < Dim; ++i) {
        tn[i] = 0.0;
        for (int j = 0; j < Dim; ++j) tn[i] += tau[detail::sym_index<Dim>(i, j)] * xi[j];
      }
      for (int i = 0; i < Dim; ++i) {
        u[i] = 0.0;
        for (int j = 0; j < Dim; ++j) u[i] += ki[Dim * i + j] * tn[j];
      }
      for (int c = 0; c < N; ++c) {
        const auto [i, j] = detail::sym_pair<Dim>(c);
        m.eps_hat[c * nf + f] = -0.5 * (xi[i] * u[j] + xi[j] * u[i]);
      }
    }
    std::copy(m.eps_hat.begin(), m.eps_hat.end(), m.cspec(0));
    fftw_execute(m.backward);
    for (std::size_t k = 0; k < N * nc; ++k) eps.data()[k] = m.real[k] * inv_cells;
  }
  std::ostringstream os;
  os << "equilibrium did not converge in " << cfg.max_iterations << " iterations (residual " << rep.residual
     << ")";
  throw SolverError(os.str(), rep.history);
}

template class TensorField<2>;
template class TensorField<3>;
template class SpectralSolver<2>;
template class SpectralSolver<3>;
template Stiffness4<2> choose_reference<2>(std::span<const PhaseSpec<2>>, bool);
template Stiffness4<3> choose_reference<3>(std::span<const PhaseSpec<3>>, bool);

}  // namespace mpfe
