#include "mpfe/mechanics.hpp"

#include "mpfe/errors.hpp"

#include <cmath>

namespace mpfe {

std::string to_string(Model m) {
  switch (m) {
    case Model::voigt: return "voigt";
    case Model::reuss: return "reuss";
    case Model::model_a: return "model_a";
    case Model::model_b: return "model_b";
    case Model::model_a_dual_only: return "model_a_dual_only";
  }
  return "?";
}

Model parse_model(const std::string& name) {
  for (Model m : all_models())
    if (to_string(m) == name) return m;
  throw ValidationError("unknown model '" + name + "' (expected voigt, reuss, model_a, model_b, model_a_dual_only)");
}

const std::vector<Model>& all_models() {
  static const std::vector<Model> v{Model::voigt, Model::reuss, Model::model_a, Model::model_b,
                                    Model::model_a_dual_only};
  return v;
}

template <int Dim>
PhaseSpec<Dim> PhaseSpec<Dim>::make(int id, std::string name, const Stiffness4<Dim>& C, const SymTensor2<Dim>& bain,
                                    const Rotation<Dim>& R, double chemical) {
  if (!C.positive_definite()) throw ValidationError("stiffness of phase '" + name + "' is not positive definite");
  PhaseSpec s;
  s.id = id;
  s.name = std::move(name);
  s.C = rotate(C, R);
  s.S = s.C.inverse();
  s.bain = rotate(bain, R);
  s.chemical = chemical;
  return s;
}

template <int Dim>
bool interface_normal(const Vec<Dim>& grad_a, const Vec<Dim>& grad_b, double g_tol, Vec<Dim>& n) {
  const Vec<Dim> d = grad_b - grad_a;
  const double len = d.norm();
  if (!(len >= g_tol) || len == 0.0) return false;
  n = d / len;
  return true;
}

template <int Dim>
JumpResult<Dim> jump_vector(const SymTensor2<Dim>& eps, double phi_a, double phi_b, const PhaseSpec<Dim>& sa,
                            const PhaseSpec<Dim>& sb, const Vec<Dim>& n) {
  JumpResult<Dim> r;
  const Mat<Dim> K = phi_b * acoustic_tensor(sa.C, n) + phi_a * acoustic_tensor(sb.C, n);
  const Mat<Dim> Ki = K.inverse();
  const double cond = K.norm() * Ki.norm();
  if (!std::isfinite(cond) || cond > 1e12) {
    r.degenerate = true;
    return r;
  }
  const SymTensor2<Dim> diff = phase_stress(eps, sb) - phase_stress(eps, sa);
  r.a = -(phi_a + phi_b) * (Ki * dot(diff, n));
  return r;
}

template <int Dim>
SymTensor2<Dim> pairwise_strain(const SymTensor2<Dim>& eps, double phi_i, double phi_j, const Vec<Dim>& a,
                                const Vec<Dim>& n) {
  return eps - (phi_j / (phi_i + phi_j)) * sym_dyad<Dim>(a, n);
}

namespace {

// pairwise scratch shared by Models A and B
template <int Dim>
struct Pairwise {
  int n = 0;
  std::vector<SymTensor2<Dim>> S, eps, sig;  // n*n, S[s*n+t] = -S[t*n+s]
  std::vector<double> psi;
  std::vector<double> oth;  // sum of the other fractions

  void reset(int m) {
    n = m;
    S.assign(m * m, SymTensor2<Dim>());
    eps.resize(m * m);
    sig.resize(m * m);
    psi.assign(m * m, 0.0);
    oth.assign(m, 0.0);
  }
  int at(int s, int t) const { return s * n + t; }
};

template <int Dim>
Pairwise<Dim>& scratch() {
  thread_local Pairwise<Dim> w;
  return w;
}

template <int Dim>
void prepare(PointResult<Dim>& out, int n, const KernelOptions& opt) {
  out.n = n;
  out.psi = 0.0;
  out.stress = SymTensor2<Dim>();
  out.degenerate = 0;
  out.jumps.clear();
  if (opt.forces) out.dG.assign(n * n, 0.0);
  else out.dG.clear();
}

template <int Dim>
void set_force(PointResult<Dim>& out, int s, int t, double v) {
  out.dG[s * out.n + t] = v;
  out.dG[t * out.n + s] = -v;
}

// normals, jumps, pairwise strains, stresses and energies for every pair of
// entries with a nonzero fraction sum
template <int Dim>
void build_pairs(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                 PointResult<Dim>& out, Pairwise<Dim>& w) {
  const int n = static_cast<int>(cell.size());
  w.reset(n);
  for (int s = 0; s < n; ++s) {
    double o = 0.0;
    for (int t = 0; t < n; ++t)
      if (t != s) o += cell[t].phi;
    w.oth[s] = o;
  }
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) {
      const double ps = cell[s].phi, pt = cell[t].phi;
      if (ps + pt == 0.0) continue;
      JumpRecord<Dim> rec;
      rec.alpha = s;
      rec.beta = t;
      if (interface_normal<Dim>(cell[s].grad, cell[t].grad, opt.g_tol, rec.n)) {
        const JumpResult<Dim> j = jump_vector(eps, ps, pt, *cell[s].spec, *cell[t].spec, rec.n);
        rec.a = j.a;
        rec.degenerate = j.degenerate;
      }
      if (rec.degenerate) ++out.degenerate;
      const SymTensor2<Dim> S = rec.degenerate ? SymTensor2<Dim>() : rec.jump();
      w.S[w.at(s, t)] = S;
      w.S[w.at(t, s)] = -S;
      const double sum = ps + pt;
      w.eps[w.at(s, t)] = eps - (pt / sum) * S;
      w.eps[w.at(t, s)] = eps + (ps / sum) * S;
      for (const auto& [i, j] : {std::pair{s, t}, std::pair{t, s}}) {
        const PhaseSpec<Dim>& sp = *cell[i].spec;
        const SymTensor2<Dim> el = w.eps[w.at(i, j)] - sp.bain;
        w.sig[w.at(i, j)] = contract(sp.C, el);
        w.psi[w.at(i, j)] = 0.5 * ddot(el, w.sig[w.at(i, j)]);
      }
      if (opt.keep_jumps) out.jumps.push_back(rec);
    }
}

// sole nonzero fraction: bulk response, forces toward activated phases from
// the sharp (dual) limit
template <int Dim>
void single_phase_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, int real,
                        const KernelOptions& opt, PointResult<Dim>& out) {
  const PhaseSpec<Dim>& sp = *cell[real].spec;
  out.stress = phase_stress(eps, sp);
  out.psi = 0.5 * ddot(eps - sp.bain, out.stress);
  const int n = static_cast<int>(cell.size());
  if (n == 1 || (!opt.forces && !opt.keep_jumps)) return;
  Pairwise<Dim>& w = scratch<Dim>();
  build_pairs(eps, cell, opt, out, w);
  if (!opt.forces) return;
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) {
      if (cell[s].phi + cell[t].phi == 0.0) continue;
      const SymTensor2<Dim> mean = cell[s].phi * w.sig[w.at(s, t)] + cell[t].phi * w.sig[w.at(t, s)];
      set_force(out, s, t, w.psi[w.at(t, s)] - w.psi[w.at(s, t)] - ddot(mean, w.S[w.at(s, t)]));
    }
}

template <int Dim>
int count_real(std::span<const CellPhase<Dim>> cell, int& last) {
  int c = 0;
  for (int s = 0; s < static_cast<int>(cell.size()); ++s)
    if (cell[s].phi > 0.0) {
      ++c;
      last = s;
    }
  return c;
}

}  // namespace

template <int Dim>
void model_a_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                   PointResult<Dim>& out) {
  const int n = static_cast<int>(cell.size());
  prepare(out, n, opt);
  int real = 0;
  if (count_real(cell, real) == 1) {
    single_phase_point(eps, cell, real, opt, out);
    return;
  }
  Pairwise<Dim>& w = scratch<Dim>();
  build_pairs(eps, cell, opt, out, w);
  const auto phi = [&](int s) { return cell[s].phi; };
  for (int s = 0; s < n; ++s) {
    if (phi(s) == 0.0) continue;
    const double cs = phi(s) / w.oth[s];
    for (int t = 0; t < n; ++t) {
      if (t == s || phi(t) == 0.0) continue;
      out.psi += cs * phi(t) * w.psi[w.at(s, t)];
      out.stress += (cs * phi(t)) * w.sig[w.at(s, t)];
    }
  }
  if (!opt.forces) return;
  for (int al = 0; al < n; ++al)
    for (int be = al + 1; be < n; ++be) {
      const double pa = phi(al), pb = phi(be);
      if (pa + pb == 0.0) continue;
      const double oa = w.oth[al], ob = w.oth[be];
      const double oa2 = oa * oa, ob2 = ob * ob;
      double g = (pa * oa - pb) / oa2 * w.psi[w.at(al, be)] + (pa - ob * pb) / ob2 * w.psi[w.at(be, al)];
      g -= pa * pb / (pa + pb) *
           ddot(w.sig[w.at(al, be)] / oa + w.sig[w.at(be, al)] / ob, w.S[w.at(al, be)]);
      for (int i = 0; i < n; ++i) {
        const double pi = phi(i);
        if (i == al || i == be || pi == 0.0) continue;
        const double oi = w.oth[i];
        g += pi * (w.psi[w.at(be, i)] / ob2 - w.psi[w.at(al, i)] / oa2);
        g += pi / oi * (w.psi[w.at(i, be)] - w.psi[w.at(i, al)]);
        const double sb = pi + pb, sa = pi + pa;
        g += pi * pi * pb / (sb * sb) * ddot(w.sig[w.at(be, i)] / ob + w.sig[w.at(i, be)] / oi, w.S[w.at(be, i)]);
        g -= pi * pi * pa / (sa * sa) * ddot(w.sig[w.at(al, i)] / oa + w.sig[w.at(i, al)] / oi, w.S[w.at(al, i)]);
      }
      set_force(out, al, be, g);
    }
}

template <int Dim>
void model_b_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                   PointResult<Dim>& out) {
  const int n = static_cast<int>(cell.size());
  prepare(out, n, opt);
  int real = 0;
  if (count_real(cell, real) == 1) {
    single_phase_point(eps, cell, real, opt, out);
    return;
  }
  Pairwise<Dim>& w = scratch<Dim>();
  build_pairs(eps, cell, opt, out, w);
  const auto phi = [&](int s) { return cell[s].phi; };
  thread_local std::vector<SymTensor2<Dim>> pe, ps;
  thread_local std::vector<double> pp;
  pe.assign(n, SymTensor2<Dim>());
  ps.resize(n);
  pp.resize(n);
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j)
      if (j != k && phi(j) > 0.0) pe[k] += phi(j) * w.eps[w.at(k, j)];
    pe[k] = pe[k] / w.oth[k];
    const SymTensor2<Dim> el = pe[k] - cell[k].spec->bain;
    ps[k] = contract(cell[k].spec->C, el);
    pp[k] = 0.5 * ddot(el, ps[k]);
    out.psi += phi(k) * pp[k];
    out.stress += phi(k) * ps[k];
  }
  if (!opt.forces) return;
  for (int al = 0; al < n; ++al)
    for (int be = al + 1; be < n; ++be) {
      const double pa = phi(al), pb = phi(be);
      if (pa + pb == 0.0) continue;
      const double oa = w.oth[al], ob = w.oth[be];
      const double oa2 = oa * oa, ob2 = ob * ob;
      double rest = 0.0;
      for (int i = 0; i < n; ++i)
        if (i != al && i != be) rest += phi(i);
      double g = pp[be] - pp[al];
      g -= pa * pb / (pa + pb) * ddot(ps[al] / oa + ps[be] / ob, w.S[w.at(al, be)]);
      g += rest * (pa / oa2 * ddot(ps[al], w.eps[w.at(al, be)]) - pb / ob2 * ddot(ps[be], w.eps[w.at(be, al)]));
      SymTensor2<Dim> xa, xb;
      for (int i = 0; i < n; ++i) {
        const double pi = phi(i);
        if (i == al || i == be || pi == 0.0) continue;
        const double oi = w.oth[i];
        const double sb = pb + pi, sa = pa + pi;
        xb += (pi / ob2) * w.eps[w.at(be, i)] + (pi * pi / (ob * sb * sb)) * w.S[w.at(be, i)];
        xa += (pi / oa2) * w.eps[w.at(al, i)] + (pi * pi / (oa * sa * sa)) * w.S[w.at(al, i)];
        const SymTensor2<Dim> d = (w.eps[w.at(i, be)] - w.eps[w.at(i, al)]) / oi +
                                  (pi / oi) * ((pb / (sb * sb)) * w.S[w.at(be, i)] - (pa / (sa * sa)) * w.S[w.at(al, i)]);
        g += pi * ddot(ps[i], d);
      }
      g += pb * ddot(ps[be], xb) - pa * ddot(ps[al], xa);
      set_force(out, al, be, g);
    }
}

template <int Dim>
void voigt_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                 PointResult<Dim>& out) {
  const int n = static_cast<int>(cell.size());
  prepare(out, n, opt);
  thread_local std::vector<double> pp;
  pp.resize(n);
  for (int s = 0; s < n; ++s) {
    const PhaseSpec<Dim>& sp = *cell[s].spec;
    const SymTensor2<Dim> el = eps - sp.bain;
    const SymTensor2<Dim> sig = contract(sp.C, el);
    pp[s] = 0.5 * ddot(el, sig);
    out.psi += cell[s].phi * pp[s];
    out.stress += cell[s].phi * sig;
  }
  if (!opt.forces) return;
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t)
      if (cell[s].phi + cell[t].phi > 0.0) set_force(out, s, t, pp[t] - pp[s]);
}

namespace {

template <int Dim>
using SymMatrix = Eigen::Matrix<double, sym_size<Dim>(), sym_size<Dim>()>;

// sqrt of the contraction weights, mapping tensor components to Mandel form
template <int Dim>
Eigen::Matrix<double, sym_size<Dim>(), 1> mandel_scale() {
  Eigen::Matrix<double, sym_size<Dim>(), 1> w;
  for (int c = 0; c < sym_size<Dim>(); ++c) w[c] = c < Dim ? 1.0 : std::sqrt(2.0);
  return w;
}

}  // namespace

template <int Dim>
void reuss_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                 PointResult<Dim>& out) {
  constexpr int N = sym_size<Dim>();
  const int n = static_cast<int>(cell.size());
  prepare(out, n, opt);
  SymMatrix<Dim> sbar = SymMatrix<Dim>::Zero();
  SymTensor2<Dim> ebar;
  for (const auto& c : cell) {
    if (c.phi == 0.0) continue;
    sbar += c.phi * c.spec->S.matrix();
    ebar += c.phi * c.spec->bain;
  }
  const auto w = mandel_scale<Dim>();
  const SymMatrix<Dim> m = w.asDiagonal() * sbar * w.asDiagonal();
  Eigen::Matrix<double, N, 1> rhs;
  const SymTensor2<Dim> el = eps - ebar;
  for (int c = 0; c < N; ++c) rhs[c] = w[c] * el[c];
  Eigen::LLT<SymMatrix<Dim>> llt(m);
  if (llt.info() != Eigen::Success) throw std::domain_error("interpolated compliance is singular");
  const Eigen::Matrix<double, N, 1> st = llt.solve(rhs);
  for (int c = 0; c < N; ++c) out.stress[c] = st[c] / w[c];
  thread_local std::vector<SymTensor2<Dim>> pe;
  thread_local std::vector<double> pp;
  pe.resize(n);
  pp.resize(n);
  for (int s = 0; s < n; ++s) {
    const SymTensor2<Dim> e = contract(cell[s].spec->S, out.stress);
    pe[s] = e + cell[s].spec->bain;
    pp[s] = 0.5 * ddot(e, out.stress);
    out.psi += cell[s].phi * pp[s];
  }
  if (!opt.forces) return;
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t)
      if (cell[s].phi + cell[t].phi > 0.0) set_force(out, s, t, pp[t] - pp[s] - ddot(out.stress, pe[t] - pe[s]));
}

template <int Dim>
void dual_only_point(const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell, const KernelOptions& opt,
                     PointResult<Dim>& out) {
  int last = 0;
  if (count_real(cell, last) <= 2)
    model_a_point(eps, cell, opt, out);
  else
    voigt_point(eps, cell, opt, out);
}

template <int Dim>
void evaluate_point(Model m, const SymTensor2<Dim>& eps, std::span<const CellPhase<Dim>> cell,
                    const KernelOptions& opt, PointResult<Dim>& out) {
  switch (m) {
    case Model::voigt: voigt_point(eps, cell, opt, out); return;
    case Model::reuss: reuss_point(eps, cell, opt, out); return;
    case Model::model_a: model_a_point(eps, cell, opt, out); return;
    case Model::model_b: model_b_point(eps, cell, opt, out); return;
    case Model::model_a_dual_only: dual_only_point(eps, cell, opt, out); return;
  }
}

template <int Dim>
void assemble_driving_forces(const PhaseFieldSet& entries, std::span<const CellPhase<Dim>> cell,
                             std::span<const double> elastic, const KineticParams& k, std::vector<double>& out) {
  const int n = entries.size();
  out.assign(n * n, 0.0);
  for (int s = 0; s < n; ++s)
    for (int t = s + 1; t < n; ++t) {
      if (entries[s].phi + entries[t].phi == 0.0) continue;
      const double v = interfacial_driving_force(entries, s, t, k) + elastic[s * n + t] +
                       (cell[t].spec->chemical - cell[s].spec->chemical);
      out[s * n + t] = v;
      out[t * n + s] = -v;
    }
}

#define MPFE_INSTANTIATE(D)                                                                                         \
  template struct PhaseSpec<D>;                                                                                     \
  template bool interface_normal<D>(const Vec<D>&, const Vec<D>&, double, Vec<D>&);                               \
  template JumpResult<D> jump_vector<D>(const SymTensor2<D>&, double, double, const PhaseSpec<D>&,                 \
                                        const PhaseSpec<D>&, const Vec<D>&);                                        \
  template SymTensor2<D> pairwise_strain<D>(const SymTensor2<D>&, double, double, const Vec<D>&, const Vec<D>&);   \
  template void model_a_point<D>(const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&,        \
                                 PointResult<D>&);                                                                  \
  template void model_b_point<D>(const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&,        \
                                 PointResult<D>&);                                                                  \
  template void voigt_point<D>(const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&,          \
                               PointResult<D>&);                                                                    \
  template void reuss_point<D>(const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&,          \
                               PointResult<D>&);                                                                    \
  template void dual_only_point<D>(const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&,      \
                                   PointResult<D>&);                                                                \
  template void evaluate_point<D>(Model, const SymTensor2<D>&, std::span<const CellPhase<D>>, const KernelOptions&, \
                                  PointResult<D>&);                                                                 \
  template void assemble_driving_forces<D>(const PhaseFieldSet&, std::span<const CellPhase<D>>,                    \
                                           std::span<const double>, const KineticParams&, std::vector<double>&);

MPFE_INSTANTIATE(2)
MPFE_INSTANTIATE(3)

}  // namespace mpfe
