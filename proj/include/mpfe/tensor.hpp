// Small-strain tensor algebra in two and three dimensions.
//
// Symmetric tensors are stored as tensor (not engineering) components in the
// order xx, yy, zz, yz, xz, xy (3D) or xx, yy, xy (2D).  Shear doubling only
// happens inside the contraction kernels.
#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <stdexcept>

namespace mpfe {

template <int Dim>
constexpr int sym_size() {
  static_assert(Dim == 2 || Dim == 3, "only 2D and 3D are supported");
  return Dim == 3 ? 6 : 3;
}

template <int Dim>
using Vec = Eigen::Matrix<double, Dim, 1>;
template <int Dim>
using Mat = Eigen::Matrix<double, Dim, Dim>;

namespace detail {

// component index of (i,j) in compressed storage
template <int Dim>
constexpr int sym_index(int i, int j) {
  if (i == j) return i;
  if constexpr (Dim == 3) {
    const int s = i + j;  // yz=3, xz=2, xy=1
    return s == 3 ? 3 : (s == 2 ? 4 : 5);
  } else {
    return 2;
  }
}

template <int Dim>
constexpr std::array<int, 2> sym_pair(int c) {
  if (c < Dim) return {c, c};
  if constexpr (Dim == 3) {
    constexpr std::array<std::array<int, 2>, 3> off{{{1, 2}, {0, 2}, {0, 1}}};
    return off[c - 3];
  } else {
    return {0, 1};
  }
}

// 1 for normal components, 2 for shear: weight of a component in a full
// double contraction
template <int Dim>
constexpr double sym_weight(int c) {
  return c < Dim ? 1.0 : 2.0;
}

}  // namespace detail

template <int Dim>
class SymTensor2 {
 public:
  static constexpr int N = sym_size<Dim>();
  using Array = std::array<double, N>;

  SymTensor2() { c_.fill(0.0); }
  explicit SymTensor2(const Array& c) : c_(c) {}

  static SymTensor2 identity() {
    SymTensor2 t;
    for (int i = 0; i < Dim; ++i) t.c_[i] = 1.0;
    return t;
  }
  static SymTensor2 diag(const Vec<Dim>& d) {
    SymTensor2 t;
    for (int i = 0; i < Dim; ++i) t.c_[i] = d[i];
    return t;
  }
  // symmetric part of an arbitrary matrix
  static SymTensor2 from_matrix(const Mat<Dim>& m) {
    SymTensor2 t;
    for (int c = 0; c < N; ++c) {
      const auto [i, j] = detail::sym_pair<Dim>(c);
      t.c_[c] = 0.5 * (m(i, j) + m(j, i));
    }
    return t;
  }

  Mat<Dim> to_matrix() const {
    Mat<Dim> m;
    for (int i = 0; i < Dim; ++i)
      for (int j = 0; j < Dim; ++j) m(i, j) = (*this)(i, j);
    return m;
  }

  double& operator[](int c) { return c_[c]; }
  double operator[](int c) const { return c_[c]; }
  double operator()(int i, int j) const { return c_[detail::sym_index<Dim>(i, j)]; }
  const Array& components() const { return c_; }

  double trace() const {
    double t = 0.0;
    for (int i = 0; i < Dim; ++i) t += c_[i];
    return t;
  }
  double norm() const;

  SymTensor2& operator+=(const SymTensor2& o) {
    for (int c = 0; c < N; ++c) c_[c] += o.c_[c];
    return *this;
  }
  SymTensor2& operator-=(const SymTensor2& o) {
    for (int c = 0; c < N; ++c) c_[c] -= o.c_[c];
    return *this;
  }
  SymTensor2& operator*=(double s) {
    for (auto& v : c_) v *= s;
    return *this;
  }
  friend SymTensor2 operator+(SymTensor2 a, const SymTensor2& b) { return a += b; }
  friend SymTensor2 operator-(SymTensor2 a, const SymTensor2& b) { return a -= b; }
  friend SymTensor2 operator-(SymTensor2 a) { return a *= -1.0; }
  friend SymTensor2 operator*(SymTensor2 a, double s) { return a *= s; }
  friend SymTensor2 operator*(double s, SymTensor2 a) { return a *= s; }
  friend SymTensor2 operator/(SymTensor2 a, double s) { return a *= 1.0 / s; }
  bool operator==(const SymTensor2&) const = default;

 private:
  Array c_;
};

// full double contraction a_ij b_ij
template <int Dim>
double ddot(const SymTensor2<Dim>& a, const SymTensor2<Dim>& b) {
  double s = 0.0;
  for (int c = 0; c < SymTensor2<Dim>::N; ++c) s += detail::sym_weight<Dim>(c) * a[c] * b[c];
  return s;
}

template <int Dim>
double SymTensor2<Dim>::norm() const {
  return std::sqrt(ddot(*this, *this));
}

// ½(a⊗n + n⊗a)
template <int Dim>
SymTensor2<Dim> sym_dyad(const Vec<Dim>& a, const Vec<Dim>& n) {
  SymTensor2<Dim> t;
  for (int c = 0; c < SymTensor2<Dim>::N; ++c) {
    const auto [i, j] = detail::sym_pair<Dim>(c);
    t[c] = 0.5 * (a[i] * n[j] + n[i] * a[j]);
  }
  return t;
}

// t·v
template <int Dim>
Vec<Dim> dot(const SymTensor2<Dim>& t, const Vec<Dim>& v) {
  Vec<Dim> r = Vec<Dim>::Zero();
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) r[i] += t(i, j) * v[j];
  return r;
}

template <int Dim>
class Stiffness4 {
 public:
  static constexpr int N = sym_size<Dim>();
  using Matrix = Eigen::Matrix<double, N, N>;

  Stiffness4() : m_(Matrix::Zero()) {}
  // m(I,J) = C_ijkl with I~(ij), J~(kl); must be symmetric
  explicit Stiffness4(const Matrix& m) : m_(m) {
    if (!m.isApprox(m.transpose(), 1e-12) && m.norm() > 0.0)
      throw std::invalid_argument("stiffness matrix lacks major symmetry");
    m_ = 0.5 * (m + m.transpose());
  }

  // plane strain in 2D
  static Stiffness4 isotropic(double lambda, double mu) {
    Matrix m = Matrix::Zero();
    for (int i = 0; i < Dim; ++i) {
      for (int j = 0; j < Dim; ++j) m(i, j) = lambda;
      m(i, i) += 2.0 * mu;
    }
    for (int c = Dim; c < N; ++c) m(c, c) = mu;
    return Stiffness4(m);
  }

  double operator()(int i, int j, int k, int l) const {
    return m_(detail::sym_index<Dim>(i, j), detail::sym_index<Dim>(k, l));
  }
  const Matrix& matrix() const { return m_; }

  // inverse on the space of symmetric tensors (compliance)
  Stiffness4 inverse() const {
    Matrix w = Matrix::Identity();
    for (int c = Dim; c < N; ++c) w(c, c) = std::sqrt(2.0);
    const Matrix mandel = w * m_ * w;
    Eigen::LLT<Matrix> llt(mandel);
    if (llt.info() != Eigen::Success) throw std::domain_error("stiffness is not positive definite");
    const Matrix inv = llt.solve(Matrix::Identity());
    const Matrix wi = w.inverse();
    Stiffness4 s;
    s.m_ = wi * inv * wi;
    s.m_ = 0.5 * (s.m_ + s.m_.transpose());
    return s;
  }

  bool positive_definite() const {
    Matrix w = Matrix::Identity();
    for (int c = Dim; c < N; ++c) w(c, c) = std::sqrt(2.0);
    Eigen::LLT<Matrix> llt(w * m_ * w);
    return llt.info() == Eigen::Success;
  }

  Stiffness4& operator+=(const Stiffness4& o) {
    m_ += o.m_;
    return *this;
  }
  Stiffness4& operator*=(double s) {
    m_ *= s;
    return *this;
  }
  friend Stiffness4 operator+(Stiffness4 a, const Stiffness4& b) { return a += b; }
  friend Stiffness4 operator*(Stiffness4 a, double s) { return a *= s; }
  friend Stiffness4 operator*(double s, Stiffness4 a) { return a *= s; }
  bool operator==(const Stiffness4& o) const { return m_ == o.m_; }

 private:
  Matrix m_;
};

// C:e
template <int Dim>
SymTensor2<Dim> contract(const Stiffness4<Dim>& C, const SymTensor2<Dim>& e) {
  constexpr int N = SymTensor2<Dim>::N;
  const auto& m = C.matrix();
  SymTensor2<Dim> s;
  for (int I = 0; I < N; ++I) {
    double v = 0.0;
    for (int J = 0; J < N; ++J) v += m(I, J) * detail::sym_weight<Dim>(J) * e[J];
    s[I] = v;
  }
  return s;
}

// A_ik = n_j C_ijkl n_l
template <int Dim>
Mat<Dim> acoustic_tensor(const Stiffness4<Dim>& C, const Vec<Dim>& n) {
  Mat<Dim> A = Mat<Dim>::Zero();
  for (int i = 0; i < Dim; ++i)
    for (int k = i; k < Dim; ++k) {
      double v = 0.0;
      for (int j = 0; j < Dim; ++j)
        for (int l = 0; l < Dim; ++l) v += n[j] * C(i, j, k, l) * n[l];
      A(i, k) = v;
      A(k, i) = v;
    }
  return A;
}

template <int Dim>
class Rotation {
 public:
  Rotation() : r_(Mat<Dim>::Identity()) {}
  explicit Rotation(const Mat<Dim>& r) : r_(r) {
    if (!(r * r.transpose()).isApprox(Mat<Dim>::Identity(), 1e-12) || r.determinant() < 0.0)
      throw std::invalid_argument("matrix is not a proper rotation");
  }
  // rotation about the z axis (the only parameter in 2D)
  static Rotation about_z(double angle) {
    Mat<Dim> r = Mat<Dim>::Identity();
    const double c = std::cos(angle), s = std::sin(angle);
    r(0, 0) = c;
    r(0, 1) = -s;
    r(1, 0) = s;
    r(1, 1) = c;
    Rotation out;
    out.r_ = r;
    return out;
  }
  const Mat<Dim>& matrix() const { return r_; }

 private:
  Mat<Dim> r_;
};

template <int Dim>
SymTensor2<Dim> rotate(const SymTensor2<Dim>& e, const Rotation<Dim>& R) {
  const Mat<Dim>& r = R.matrix();
  return SymTensor2<Dim>::from_matrix(r * e.to_matrix() * r.transpose());
}

template <int Dim>
Stiffness4<Dim> rotate(const Stiffness4<Dim>& C, const Rotation<Dim>& R) {
  constexpr int N = SymTensor2<Dim>::N;
  const Mat<Dim>& r = R.matrix();
  typename Stiffness4<Dim>::Matrix m;
  for (int I = 0; I < N; ++I)
    for (int J = I; J < N; ++J) {
      const auto [i, j] = detail::sym_pair<Dim>(I);
      const auto [k, l] = detail::sym_pair<Dim>(J);
      double v = 0.0;
      for (int p = 0; p < Dim; ++p)
        for (int q = 0; q < Dim; ++q) {
          const double rpq = r(i, p) * r(j, q);
          if (rpq == 0.0) continue;
          for (int s = 0; s < Dim; ++s)
            for (int t = 0; t < Dim; ++t) v += rpq * r(k, s) * r(l, t) * C(p, q, s, t);
        }
      m(I, J) = v;
      m(J, I) = v;
    }
  return Stiffness4<Dim>(m);
}

// isotropic part of C: C_iso = (J::C) J + (K::C / K::K) K
template <int Dim>
Stiffness4<Dim> isotropic_projection(const Stiffness4<Dim>& C) {
  double trace_all = 0.0, trace_pair = 0.0;
  for (int i = 0; i < Dim; ++i)
    for (int j = 0; j < Dim; ++j) {
      trace_all += C(i, i, j, j);
      trace_pair += C(i, j, i, j);
    }
  const double jc = trace_all / Dim;                    // J::C with J = I⊗I/d
  const double kk = Dim * (Dim + 1) / 2.0 - 1.0;        // K::K
  const double kc = (trace_pair - jc) / kk;             // = 2μ
  const double mu = 0.5 * kc;
  const double bulk = jc / Dim;                         // λ + 2μ/d
  return Stiffness4<Dim>::isotropic(bulk - 2.0 * mu / Dim, mu);
}

}  // namespace mpfe
