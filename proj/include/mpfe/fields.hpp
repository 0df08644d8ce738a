// Periodic Cartesian grids, field containers and finite-difference stencils.
#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <vector>

namespace mpfe {

class Grid {
 public:
  Grid() = default;
  // extents[2] is ignored (set to 1) for dim == 2
  Grid(int dim, std::array<int, 3> extents, double spacing);

  int dim() const { return dim_; }
  const std::array<int, 3>& extents() const { return n_; }
  int extent(int axis) const { return n_[axis]; }
  double spacing() const { return dx_; }
  std::size_t cells() const { return static_cast<std::size_t>(n_[0]) * n_[1] * n_[2]; }

  // periodic wrap on every axis
  std::size_t index(int x, int y, int z = 0) const {
    x = wrap(x, n_[0]);
    y = wrap(y, n_[1]);
    z = wrap(z, n_[2]);
    return static_cast<std::size_t>(x) + static_cast<std::size_t>(n_[0]) * (y + static_cast<std::size_t>(n_[1]) * z);
  }
  std::array<int, 3> coords(std::size_t i) const {
    const int x = static_cast<int>(i % n_[0]);
    const int y = static_cast<int>((i / n_[0]) % n_[1]);
    const int z = static_cast<int>(i / (static_cast<std::size_t>(n_[0]) * n_[1]));
    return {x, y, z};
  }
  // index of the neighbor shifted by delta along axis
  std::size_t shift(std::size_t i, int axis, int delta) const {
    auto c = coords(i);
    c[axis] += delta;
    return index(c[0], c[1], c[2]);
  }

  bool operator==(const Grid&) const = default;

  static int wrap(int v, int n) {
    v %= n;
    return v < 0 ? v + n : v;
  }

 private:
  int dim_ = 3;
  std::array<int, 3> n_{4, 4, 4};
  double dx_ = 1.0;
};

template <typename T>
class Field {
 public:
  Field() = default;
  explicit Field(const Grid& g, T init = T{}) : grid_(g), data_(g.cells(), init) {}

  const Grid& grid() const { return grid_; }
  std::size_t size() const { return data_.size(); }
  T& operator[](std::size_t i) { return data_[i]; }
  const T& operator[](std::size_t i) const { return data_[i]; }
  T& at(int x, int y, int z = 0) { return data_[grid_.index(x, y, z)]; }
  const T& at(int x, int y, int z = 0) const { return data_[grid_.index(x, y, z)]; }
  std::vector<T>& values() { return data_; }
  const std::vector<T>& values() const { return data_; }
  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

 private:
  Grid grid_;
  std::vector<T> data_;
};

using ScalarField = Field<double>;

// one scalar field per axis
struct VectorField {
  std::vector<ScalarField> comp;
};

// second-order central differences, periodic
VectorField gradient(const ScalarField& f);
void gradient_into(const ScalarField& f, VectorField& out);
ScalarField laplacian(const ScalarField& f);
void laplacian_into(const ScalarField& f, ScalarField& out);

// offsets (dx, dy, dz) of all cells whose centers lie within radius_cells of
// the origin; cached per (dim, radius)
const std::vector<std::array<int, 3>>& sphere_offsets(int dim, double radius_cells);

// unweighted ball mean, periodic; radius 0 is the identity
ScalarField sphere_average(const ScalarField& f, double radius_cells);

// ball mean restricted to cells where mask != 0; the result is only written at
// masked cells, other cells keep their input value
void masked_sphere_average(const ScalarField& f, const std::vector<std::uint8_t>& mask, double radius_cells,
                           ScalarField& out);

// cells visited by a polyline given in cell coordinates, sampled at unit
// steps and deduplicated (nearest cell)
std::vector<std::size_t> polyline_cells(const Grid& g, const std::vector<std::array<double, 3>>& points);

}  // namespace mpfe
