#include "mpfe/fields.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>

namespace mpfe {

Grid::Grid(int dim, std::array<int, 3> extents, double spacing) : dim_(dim), n_(extents), dx_(spacing) {
  if (dim != 2 && dim != 3) throw std::invalid_argument("grid dimension must be 2 or 3");
  if (dim == 2) n_[2] = 1;
  for (int a = 0; a < dim; ++a)
    if (n_[a] < 4) throw std::invalid_argument("grid extents must be >= 4, got " + std::to_string(n_[a]));
  if (!(spacing > 0.0)) throw std::invalid_argument("grid spacing must be positive");
}

namespace {

// neighbor index tables along one axis: for each coordinate, the coordinate
// of the +1 and -1 neighbor
struct AxisWrap {
  std::vector<int> plus, minus;
  explicit AxisWrap(int n) : plus(n), minus(n) {
    for (int i = 0; i < n; ++i) {
      plus[i] = (i + 1) % n;
      minus[i] = (i + n - 1) % n;
    }
  }
};

template <typename Fn>
void for_each_cell(const Grid& g, Fn&& fn) {
  const auto& n = g.extents();
#pragma omp parallel for schedule(static)
  for (int z = 0; z < n[2]; ++z)
    for (int y = 0; y < n[1]; ++y)
      for (int x = 0; x < n[0]; ++x) fn(x, y, z);
}

}  // namespace

void gradient_into(const ScalarField& f, VectorField& out) {
  const Grid& g = f.grid();
  const int dim = g.dim();
  out.comp.resize(dim);
  for (auto& c : out.comp)
    if (c.size() != g.cells()) c = ScalarField(g);
  const auto& n = g.extents();
  const AxisWrap wx(n[0]), wy(n[1]), wz(n[2]);
  const double h = 0.5 / g.spacing();
  const double* v = f.data();
  double* gx = out.comp[0].data();
  double* gy = out.comp[1].data();
  double* gz = dim == 3 ? out.comp[2].data() : nullptr;
  const std::size_t sx = 1, sy = n[0], sz = static_cast<std::size_t>(n[0]) * n[1];
  for_each_cell(g, [&](int x, int y, int z) {
    const std::size_t i = x * sx + y * sy + z * sz;
    const std::size_t row = y * sy + z * sz;
    gx[i] = (v[row + wx.plus[x]] - v[row + wx.minus[x]]) * h;
    const std::size_t col = x + z * sz;
    gy[i] = (v[col + wy.plus[y] * sy] - v[col + wy.minus[y] * sy]) * h;
    if (gz) {
      const std::size_t pil = x + y * sy;
      gz[i] = (v[pil + wz.plus[z] * sz] - v[pil + wz.minus[z] * sz]) * h;
    }
  });
}

VectorField gradient(const ScalarField& f) {
  VectorField out;
  gradient_into(f, out);
  return out;
}

void laplacian_into(const ScalarField& f, ScalarField& out) {
  const Grid& g = f.grid();
  if (out.size() != g.cells()) out = ScalarField(g);
  const auto& n = g.extents();
  const AxisWrap wx(n[0]), wy(n[1]), wz(n[2]);
  const double h2 = 1.0 / (g.spacing() * g.spacing());
  const bool three = g.dim() == 3;
  const double* v = f.data();
  double* o = out.data();
  const std::size_t sy = n[0], sz = static_cast<std::size_t>(n[0]) * n[1];
  for_each_cell(g, [&](int x, int y, int z) {
    const std::size_t i = x + y * sy + z * sz;
    const double c = v[i];
    double s = v[y * sy + z * sz + wx.plus[x]] + v[y * sy + z * sz + wx.minus[x]] - 2.0 * c;
    s += v[x + wy.plus[y] * sy + z * sz] + v[x + wy.minus[y] * sy + z * sz] - 2.0 * c;
    if (three) s += v[x + y * sy + wz.plus[z] * sz] + v[x + y * sy + wz.minus[z] * sz] - 2.0 * c;
    o[i] = s * h2;
  });
}

ScalarField laplacian(const ScalarField& f) {
  ScalarField out(f.grid());
  laplacian_into(f, out);
  return out;
}

const std::vector<std::array<int, 3>>& sphere_offsets(int dim, double radius_cells) {
  static std::mutex mtx;
  static std::map<std::pair<int, double>, std::vector<std::array<int, 3>>> cache;
  std::lock_guard<std::mutex> lock(mtx);
  auto key = std::make_pair(dim, radius_cells);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  if (radius_cells < 0.0) throw std::invalid_argument("sphere radius must be >= 0");
  std::vector<std::array<int, 3>> offs;
  const int r = static_cast<int>(std::floor(radius_cells));
  const int rz = dim == 3 ? r : 0;
  const double r2 = radius_cells * radius_cells;
  for (int dz = -rz; dz <= rz; ++dz)
    for (int dy = -r; dy <= r; ++dy)
      for (int dx = -r; dx <= r; ++dx)
        if (dx * dx + dy * dy + dz * dz <= r2 + 1e-12) offs.push_back({dx, dy, dz});
  return cache.emplace(key, std::move(offs)).first->second;
}

namespace {

// wrapped coordinate tables for offsets in [-r, r]
struct OffsetWrap {
  int r;
  std::array<std::vector<int>, 3> t;
  OffsetWrap(const Grid& g, int radius) : r(radius) {
    for (int a = 0; a < 3; ++a) {
      const int n = g.extent(a);
      t[a].resize(static_cast<std::size_t>(n) + 2 * r);
      for (int v = -r; v < n + r; ++v) t[a][v + r] = Grid::wrap(v, n);
    }
  }
  int operator()(int axis, int v) const { return t[axis][v + r]; }
};

}  // namespace

ScalarField sphere_average(const ScalarField& f, double radius_cells) {
  const Grid& g = f.grid();
  const auto& offs = sphere_offsets(g.dim(), radius_cells);
  if (offs.size() == 1) return f;
  const OffsetWrap w(g, static_cast<int>(std::floor(radius_cells)));
  ScalarField out(g);
  const double inv = 1.0 / static_cast<double>(offs.size());
  const auto& n = g.extents();
  for_each_cell(g, [&](int x, int y, int z) {
    double s = 0.0;
    for (const auto& o : offs) s += f[w(0, x + o[0]) + n[0] * (w(1, y + o[1]) + static_cast<std::size_t>(n[1]) * w(2, z + o[2]))];
    out.at(x, y, z) = s * inv;
  });
  return out;
}

void masked_sphere_average(const ScalarField& f, const std::vector<std::uint8_t>& mask, double radius_cells,
                           ScalarField& out) {
  const Grid& g = f.grid();
  if (out.size() != g.cells()) out = ScalarField(g);
  const auto& offs = sphere_offsets(g.dim(), radius_cells);
  const OffsetWrap w(g, static_cast<int>(std::floor(radius_cells)));
  const auto& n = g.extents();
  for_each_cell(g, [&](int x, int y, int z) {
    const std::size_t i = x + n[0] * (y + static_cast<std::size_t>(n[1]) * z);
    if (!mask[i]) {
      out[i] = f[i];
      return;
    }
    double s = 0.0;
    int count = 0;
    for (const auto& o : offs) {
      const std::size_t j = w(0, x + o[0]) + n[0] * (w(1, y + o[1]) + static_cast<std::size_t>(n[1]) * w(2, z + o[2]));
      if (mask[j]) {
        s += f[j];
        ++count;
      }
    }
    out[i] = s / count;
  });
}

std::vector<std::size_t> polyline_cells(const Grid& g, const std::vector<std::array<double, 3>>& points) {
  std::vector<std::size_t> cells;
  auto push = [&](const std::array<double, 3>& p) {
    const std::size_t i = g.index(static_cast<int>(std::lround(p[0])), static_cast<int>(std::lround(p[1])),
                                  g.dim() == 3 ? static_cast<int>(std::lround(p[2])) : 0);
    if (cells.empty() || cells.back() != i) cells.push_back(i);
  };
  if (points.empty()) return cells;
  push(points.front());
  for (std::size_t s = 1; s < points.size(); ++s) {
    const auto& a = points[s - 1];
    const auto& b = points[s];
    double len = 0.0;
    for (int k = 0; k < 3; ++k) len = std::max(len, std::abs(b[k] - a[k]));
    const int steps = static_cast<int>(std::ceil(len));
    for (int t = 1; t <= steps; ++t) {
      const double u = static_cast<double>(t) / steps;
      push({a[0] + u * (b[0] - a[0]), a[1] + u * (b[1] - a[1]), a[2] + u * (b[2] - a[2])});
    }
  }
  return cells;
}

}  // namespace mpfe
