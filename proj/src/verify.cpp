#include "mpfe/verify.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>

namespace mpfe {

template <int Dim>
Stiffness4<Dim> Sampler<Dim>::stiffness(double lo, double hi) {
  constexpr int N = sym_size<Dim>();
  using M = Eigen::Matrix<double, N, N>;
  std::normal_distribution<double> g;
  M a;
  for (int i = 0; i < N; ++i)
    for (int j = 0; j < N; ++j) a(i, j) = g(rng);
  const M q = Eigen::HouseholderQR<M>(a).householderQ();
  Eigen::Matrix<double, N, 1> ev;
  for (int i = 0; i < N; ++i) ev[i] = uniform(lo, hi);
  const M mandel = q * ev.asDiagonal() * q.transpose();
  M w = M::Identity();
  for (int c = Dim; c < N; ++c) w(c, c) = 1.0 / std::sqrt(2.0);
  M c = w * mandel * w;
  c = 0.5 * (c + c.transpose());
  return Stiffness4<Dim>(c);
}

template <int Dim>
SymTensor2<Dim> Sampler<Dim>::strain(double scale) {
  SymTensor2<Dim> t;
  for (int c = 0; c < sym_size<Dim>(); ++c) t[c] = uniform(-scale, scale);
  return t;
}

template <int Dim>
Vec<Dim> Sampler<Dim>::unit() {
  std::normal_distribution<double> g;
  Vec<Dim> v;
  do {
    for (int a = 0; a < Dim; ++a) v[a] = g(rng);
  } while (v.norm() < 1e-3);
  return v.normalized();
}

template <int Dim>
std::vector<double> Sampler<Dim>::fractions(int n, double min) {
  std::vector<double> w(n);
  for (auto& v : w) v = uniform(0.0, 1.0);
  const double s = std::accumulate(w.begin(), w.end(), 0.0);
  for (auto& v : w) v = min + (1.0 - n * min) * v / s;
  return w;
}

template <int Dim>
PhaseSpec<Dim> Sampler<Dim>::phase(int id, double bain_scale) {
  return PhaseSpec<Dim>::make(id, "p" + std::to_string(id), stiffness(), strain(bain_scale));
}

namespace {

template <int Dim>
double pair_energy(const Vec<Dim>& a, const SymTensor2<Dim>& eps, double pa, double pb, const PhaseSpec<Dim>& sa,
                   const PhaseSpec<Dim>& sb, const Vec<Dim>& n) {
  const SymTensor2<Dim> J = sym_dyad<Dim>(a, n);
  const double s = pa + pb;
  return pa * phase_energy<Dim>(eps - (pb / s) * J, sa) + pb * phase_energy<Dim>(eps + (pa / s) * J, sb);
}

double rel(double a, double b, double scale) { return std::abs(a - b) / std::max(scale, 1e-300); }

template <int Dim>
double tensor_rel(const SymTensor2<Dim>& a, const SymTensor2<Dim>& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

void track(PropertyResult& r, double v) {
  r.worst = std::max(r.worst, v);
  ++r.count;
  if (!(v <= r.threshold)) r.passed = false;
}

// random phases with gradients; fractions sum to one
template <int Dim>
struct RandomCell {
  std::vector<PhaseSpec<Dim>> ph;
  std::vector<CellPhase<Dim>> cell;
  std::vector<double> phi;
  SymTensor2<Dim> eps;
};

template <int Dim>
RandomCell<Dim> random_cell(Sampler<Dim>& smp, int n) {
  RandomCell<Dim> c;
  for (int k = 0; k < n; ++k) c.ph.push_back(smp.phase(k));
  c.phi = smp.fractions(n);
  for (int k = 0; k < n; ++k) c.cell.push_back({&c.ph[k], c.phi[k], smp.unit() * smp.uniform(0.5, 2.0) * 1e4});
  c.eps = smp.strain();
  return c;
}

template <int Dim>
void reuss_steinbach(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  for (int it = 0; it < instances; ++it) {
    const auto a = smp.phase(0), b = smp.phase(1);
    const double pa = smp.uniform(0.01, 0.99);
    SymTensor2<Dim> sig = smp.strain(1e9);
    const Stiffness4<Dim> sbar_a = a.S, sbar_b = b.S;
    const SymTensor2<Dim> eps =
        pa * (contract(sbar_a, sig) + a.bain) + (1.0 - pa) * (contract(sbar_b, sig) + b.bain);
    const std::vector<CellPhase<Dim>> cell{{&a, pa, Vec<Dim>::Zero()}, {&b, 1.0 - pa, Vec<Dim>::Zero()}};
    const auto res = evaluate_point<Dim>(Model::reuss, eps, cell);
    const double st = steinbach_force<Dim>(sig, a, b);
    const SymTensor2<Dim> dS = contract(b.S, sig) - contract(a.S, sig);
    const double scale = std::max(std::abs(st), 0.5 * std::abs(ddot(sig, dS)) + std::abs(ddot(sig, b.bain - a.bain)));
    track(r, rel(res.force(0, 1), st, scale));
  }
}

template <int Dim>
void jump_oracle(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  for (int it = 0; it < instances; ++it) {
    const auto a = smp.phase(0), b = smp.phase(1);
    const double pa = smp.uniform(0.02, 0.98);
    const double pb = 1.0 - pa;
    const Vec<Dim> n = smp.unit();
    const SymTensor2<Dim> eps = smp.strain();
    const auto closed = jump_vector<Dim>(eps, pa, pb, a, b, n);
    const Vec<Dim> num = numerical_jump<Dim>(eps, pa, pb, a, b, n);
    track(r, (closed.a - num).norm() / std::max(num.norm(), 1e-300));
  }
}

template <int Dim>
void jump_residual(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  for (int it = 0; it < instances; ++it) {
    const auto a = smp.phase(0), b = smp.phase(1);
    const double pa = smp.uniform(0.02, 0.98);
    const double pb = smp.uniform(0.0, 1.0 - pa) + 1e-3;
    const Vec<Dim> n = smp.unit();
    const SymTensor2<Dim> eps = smp.strain();
    const auto j = jump_vector<Dim>(eps, pa, pb, a, b, n);
    const SymTensor2<Dim> sab = phase_stress<Dim>(pairwise_strain<Dim>(eps, pa, pb, j.a, n), a);
    const SymTensor2<Dim> sba = phase_stress<Dim>(pairwise_strain<Dim>(eps, pb, pa, -j.a, n), b);
    const double scale = std::max(sab.norm(), sba.norm());
    track(r, dot(sab - sba, n).norm() / scale);
  }
}

template <int Dim>
void frozen_fd(PropertyResult& r, Model m, int nph, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  KernelOptions opt;
  opt.keep_jumps = true;
  for (int it = 0; it < instances; ++it) {
    auto c = random_cell<Dim>(smp, nph);
    const auto res = evaluate_point<Dim>(m, c.eps, c.cell, opt);
    std::vector<SymTensor2<Dim>> J(nph * nph);
    for (const auto& rec : res.jumps) {
      J[rec.alpha * nph + rec.beta] = rec.jump();
      J[rec.beta * nph + rec.alpha] = -rec.jump();
    }
    auto energy = [&](const std::vector<double>& phi) {
      return m == Model::model_a ? frozen_energy_a<Dim>(c.eps, c.ph, phi, J) : frozen_energy_b<Dim>(c.eps, c.ph, phi, J);
    };
    const double h = 1e-6;
    double scale = 0.0;
    for (int s = 0; s < nph; ++s)
      for (int t = 0; t < nph; ++t) scale = std::max(scale, std::abs(res.force(s, t)));
    for (int s = 0; s < nph; ++s)
      for (int t = s + 1; t < nph; ++t) {
        auto up = c.phi, dn = c.phi;
        up[t] += h, up[s] -= h;
        dn[t] -= h, dn[s] += h;
        const double fd = (energy(up) - energy(dn)) / (2.0 * h);
        track(r, rel(res.force(s, t), fd, scale));
      }
  }
}

template <int Dim>
void dual_reduction(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  KernelOptions opt;
  opt.keep_jumps = true;
  for (int it = 0; it < instances; ++it) {
    auto c = random_cell<Dim>(smp, 2);
    const auto ra = evaluate_point<Dim>(Model::model_a, c.eps, c.cell, opt);
    const auto rb = evaluate_point<Dim>(Model::model_b, c.eps, c.cell, opt);
    const auto& rec = ra.jumps.at(0);
    const double pa = c.phi[0], pb = c.phi[1];
    const SymTensor2<Dim> eab = pairwise_strain<Dim>(c.eps, pa, pb, rec.a, rec.n);
    const SymTensor2<Dim> eba = pairwise_strain<Dim>(c.eps, pb, pa, -rec.a, rec.n);
    const double jump_psi = phase_energy<Dim>(eba, c.ph[1]) - phase_energy<Dim>(eab, c.ph[0]);
    const SymTensor2<Dim> sig = pa * phase_stress<Dim>(eab, c.ph[0]) + pb * phase_stress<Dim>(eba, c.ph[1]);
    const double work = dot(sig, rec.n).dot(rec.a);
    const double closed = jump_psi - work;
    const double scale = std::max({std::abs(jump_psi), std::abs(work), std::abs(closed)});
    track(r, std::max(rel(ra.force(0, 1), closed, scale), rel(rb.force(0, 1), closed, scale)));
    track(r, rel(ra.psi, rb.psi, std::abs(ra.psi)));
  }
}

template <int Dim>
void dual_ordering(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  for (int it = 0; it < instances; ++it) {
    auto c = random_cell<Dim>(smp, 2);
    const double pr = evaluate_point<Dim>(Model::reuss, c.eps, c.cell).psi;
    const double pa = evaluate_point<Dim>(Model::model_a, c.eps, c.cell).psi;
    const double pv = evaluate_point<Dim>(Model::voigt, c.eps, c.cell).psi;
    // violation of psi_R <= psi_A <= psi_V relative to psi_V
    track(r, std::max({0.0, pr - pa, pa - pv}) / pv);
  }
}

template <int Dim>
void permutation(PropertyResult& r, int instances, std::uint64_t seed) {
  Sampler<Dim> smp(seed);
  for (int it = 0; it < instances; ++it) {
    const int nph = 3 + it % 2;
    auto c = random_cell<Dim>(smp, nph);
    std::vector<int> perm(nph);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), smp.rng);
    std::vector<CellPhase<Dim>> pc(nph);
    for (int k = 0; k < nph; ++k) pc[k] = c.cell[perm[k]];
    for (Model m : all_models()) {
      const auto x = evaluate_point<Dim>(m, c.eps, c.cell);
      const auto y = evaluate_point<Dim>(m, c.eps, pc);
      double worst = std::max(rel(x.psi, y.psi, std::abs(x.psi)), tensor_rel(x.stress, y.stress));
      double scale = 0.0;
      for (double v : x.dG) scale = std::max(scale, std::abs(v));
      for (int s = 0; s < nph; ++s)
        for (int t = 0; t < nph; ++t) worst = std::max(worst, rel(y.force(s, t), x.force(perm[s], perm[t]), scale));
      track(r, worst);
    }
  }
}

template <template <int> class F, typename... A>
void both_dims(A&&... args) {
  F<3>::run(args...);
  F<2>::run(args...);
}

}  // namespace

template <int Dim>
Vec<Dim> numerical_jump(const SymTensor2<Dim>& eps, double phi_a, double phi_b, const PhaseSpec<Dim>& sa,
                        const PhaseSpec<Dim>& sb, const Vec<Dim>& n) {
  auto E = [&](const Vec<Dim>& a) { return pair_energy<Dim>(a, eps, phi_a, phi_b, sa, sb, n); };
  Vec<Dim> a = Vec<Dim>::Zero();
  const double h = 1e-3;
  for (int iter = 0; iter < 4; ++iter) {
    Vec<Dim> g;
    Mat<Dim> H;
    for (int i = 0; i < Dim; ++i) {
      Vec<Dim> e = Vec<Dim>::Zero();
      e[i] = h;
      g[i] = (E(a + e) - E(a - e)) / (2.0 * h);
      for (int j = 0; j < Dim; ++j) {
        Vec<Dim> f = Vec<Dim>::Zero();
        f[j] = h;
        H(i, j) = (E(a + e + f) - E(a + e - f) - E(a - e + f) + E(a - e - f)) / (4.0 * h * h);
      }
    }
    a -= H.ldlt().solve(g);
  }
  return a;
}

template <int Dim>
double steinbach_force(const SymTensor2<Dim>& sig, const PhaseSpec<Dim>& a, const PhaseSpec<Dim>& b) {
  return -0.5 * ddot(sig, contract(b.S, sig) - contract(a.S, sig)) - ddot(sig, b.bain - a.bain);
}

template <int Dim>
double frozen_energy_a(const SymTensor2<Dim>& eps, const std::vector<PhaseSpec<Dim>>& ph,
                       const std::vector<double>& phi, const std::vector<SymTensor2<Dim>>& J) {
  const int n = static_cast<int>(ph.size());
  double psi = 0.0;
  for (int s = 0; s < n; ++s) {
    double inner = 0.0;
    for (int t = 0; t < n; ++t) {
      if (t == s) continue;
      const SymTensor2<Dim> e = eps - (phi[t] / (phi[s] + phi[t])) * J[s * n + t];
      inner += phi[t] * phase_energy<Dim>(e, ph[s]);
    }
    psi += phi[s] / (1.0 - phi[s]) * inner;
  }
  return psi;
}

template <int Dim>
double frozen_energy_b(const SymTensor2<Dim>& eps, const std::vector<PhaseSpec<Dim>>& ph,
                       const std::vector<double>& phi, const std::vector<SymTensor2<Dim>>& J) {
  const int n = static_cast<int>(ph.size());
  double psi = 0.0;
  for (int k = 0; k < n; ++k) {
    SymTensor2<Dim> e;
    for (int j = 0; j < n; ++j) {
      if (j == k) continue;
      e += phi[j] * (eps - (phi[j] / (phi[k] + phi[j])) * J[k * n + j]);
    }
    psi += phi[k] * phase_energy<Dim>((1.0 / (1.0 - phi[k])) * e, ph[k]);
  }
  return psi;
}

namespace {

template <int Dim>
struct RS {
  static void run(PropertyResult& r, int n, std::uint64_t s) { reuss_steinbach<Dim>(r, n, s); }
};
template <int Dim>
struct JO {
  static void run(PropertyResult& r, int n, std::uint64_t s) { jump_oracle<Dim>(r, n, s); }
};
template <int Dim>
struct JR {
  static void run(PropertyResult& r, int n, std::uint64_t s) { jump_residual<Dim>(r, n, s); }
};
template <int Dim>
struct FD {
  static void run(PropertyResult& r, Model m, int p, int n, std::uint64_t s) { frozen_fd<Dim>(r, m, p, n, s); }
};
template <int Dim>
struct DR {
  static void run(PropertyResult& r, int n, std::uint64_t s) { dual_reduction<Dim>(r, n, s); }
};
template <int Dim>
struct DO {
  static void run(PropertyResult& r, int n, std::uint64_t s) { dual_ordering<Dim>(r, n, s); }
};
template <int Dim>
struct PE {
  static void run(PropertyResult& r, int n, std::uint64_t s) { permutation<Dim>(r, n, s); }
};

PropertyResult make(std::string name, double threshold) {
  PropertyResult r;
  r.name = std::move(name);
  r.threshold = threshold;
  return r;
}

}  // namespace

PropertyResult check_reuss_steinbach(int instances, std::uint64_t seed) {
  auto r = make("equal-stress force equals the compliance-difference form", 1e-12);
  both_dims<RS>(r, instances, seed);
  return r;
}

PropertyResult check_jump_oracle(int instances, std::uint64_t seed) {
  auto r = make("closed-form jump equals numerical minimizer", 1e-8);
  both_dims<JO>(r, instances, seed);
  return r;
}

PropertyResult check_jump_residual(int instances, std::uint64_t seed) {
  auto r = make("pairwise traction continuity", 1e-9);
  both_dims<JR>(r, instances, seed);
  return r;
}

PropertyResult check_frozen_fd(Model m, int phases, int instances, std::uint64_t seed) {
  auto r = make(to_string(m) + " force equals finite difference of frozen-jump energy (" + std::to_string(phases) +
                    " phases)",
                1e-5);
  both_dims<FD>(r, m, phases, instances, seed);
  return r;
}

PropertyResult check_dual_reduction(int instances, std::uint64_t seed) {
  auto r = make("dual-phase Model A = Model B = sharp-interface form", 1e-12);
  both_dims<DR>(r, instances, seed);
  return r;
}

PropertyResult check_dual_ordering(int instances, std::uint64_t seed) {
  auto r = make("dual-phase energy ordering reuss <= model_a <= voigt", 1e-12);
  both_dims<DO>(r, instances, seed);
  return r;
}

PropertyResult check_permutation(int instances, std::uint64_t seed) {
  auto r = make("kernels are equivariant under phase permutation", 1e-12);
  both_dims<PE>(r, instances, seed);
  return r;
}

std::vector<PropertyResult> verify_kernels(int instances, std::uint64_t seed) {
  return {check_reuss_steinbach(instances, seed),
          check_jump_oracle(instances, seed + 1),
          check_jump_residual(instances, seed + 2),
          check_frozen_fd(Model::model_a, 3, instances, seed + 3),
          check_frozen_fd(Model::model_a, 4, instances, seed + 4),
          check_frozen_fd(Model::model_b, 3, instances, seed + 5),
          check_frozen_fd(Model::model_b, 4, instances, seed + 6),
          check_dual_reduction(instances, seed + 7),
          check_dual_ordering(instances, seed + 8),
          check_permutation(instances, seed + 9)};
}

void print_report(const std::vector<PropertyResult>& results, std::ostream& os) {
  for (const auto& r : results)
    os << (r.passed ? "PASS" : "FAIL") << "  " << r.name << ": worst " << std::scientific << std::setprecision(3)
       << r.worst << " (threshold " << r.threshold << ", " << r.count << " checks)\n"
       << std::defaultfloat;
}

template struct Sampler<2>;
template struct Sampler<3>;
template Vec<2> numerical_jump<2>(const SymTensor2<2>&, double, double, const PhaseSpec<2>&, const PhaseSpec<2>&,
                                  const Vec<2>&);
template Vec<3> numerical_jump<3>(const SymTensor2<3>&, double, double, const PhaseSpec<3>&, const PhaseSpec<3>&,
                                  const Vec<3>&);
template double steinbach_force<2>(const SymTensor2<2>&, const PhaseSpec<2>&, const PhaseSpec<2>&);
template double steinbach_force<3>(const SymTensor2<3>&, const PhaseSpec<3>&, const PhaseSpec<3>&);
template double frozen_energy_a<2>(const SymTensor2<2>&, const std::vector<PhaseSpec<2>>&, const std::vector<double>&,
                                   const std::vector<SymTensor2<2>>&);
template double frozen_energy_a<3>(const SymTensor2<3>&, const std::vector<PhaseSpec<3>>&, const std::vector<double>&,
                                   const std::vector<SymTensor2<3>>&);
template double frozen_energy_b<2>(const SymTensor2<2>&, const std::vector<PhaseSpec<2>>&, const std::vector<double>&,
                                   const std::vector<SymTensor2<2>>&);
template double frozen_energy_b<3>(const SymTensor2<3>&, const std::vector<PhaseSpec<3>>&, const std::vector<double>&,
                                   const std::vector<SymTensor2<3>>&);

}  // namespace mpfe
