#include "mpfe/vtk.hpp"

#include <fstream>
#include <iomanip>
#include <sstream>
#include <stdexcept>

namespace mpfe {

const DumpArray* FieldDump::find(const std::string& name) const {
  for (const auto& a : arrays)
    if (a.name == name) return &a;
  return nullptr;
}

void write_vtk(const FieldDump& dump, std::ostream& os) {
  const Grid& g = dump.grid;
  const double dx = g.spacing();
  os << "# vtk DataFile Version 3.0\n"
     << "mpfe field dump\n"
     << "ASCII\n"
     << "DATASET STRUCTURED_POINTS\n"
     << "DIMENSIONS " << g.extent(0) << ' ' << g.extent(1) << ' ' << g.extent(2) << '\n'
     << std::setprecision(17) << "ORIGIN " << 0.5 * dx << ' ' << 0.5 * dx << ' ' << (g.dim() == 3 ? 0.5 * dx : 0.0)
     << '\n'
     << "SPACING " << dx << ' ' << dx << ' ' << dx << '\n'
     << "POINT_DATA " << g.cells() << '\n';
  for (const auto& a : dump.arrays) {
    if (a.values.size() != g.cells() * a.components)
      throw std::invalid_argument("dump array '" + a.name + "' has wrong size");
    if (a.components == 1) {
      os << "SCALARS " << a.name << " double 1\nLOOKUP_TABLE default\n";
    } else if (a.components == 9) {
      os << "TENSORS " << a.name << " double\n";
    } else {
      throw std::invalid_argument("dump arrays must have 1 or 9 components");
    }
    for (std::size_t i = 0; i < g.cells(); ++i) {
      for (int c = 0; c < a.components; ++c) os << (c ? " " : "") << a.values[i * a.components + c];
      os << '\n';
    }
  }
}

void write_vtk(const FieldDump& dump, const std::string& path) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open " + path);
  write_vtk(dump, os);
}

FieldDump read_vtk(std::istream& is) {
  std::string line;
  for (int k = 0; k < 3; ++k) std::getline(is, line);
  if (line != "ASCII") throw std::runtime_error("only ASCII VTK files are supported");
  std::string key;
  std::array<int, 3> n{1, 1, 1};
  double dx = 0.0;
  std::size_t points = 0;
  FieldDump dump;
  bool have_grid = false;
  while (is >> key) {
    if (key == "DATASET") {
      is >> key;
      if (key != "STRUCTURED_POINTS") throw std::runtime_error("expected STRUCTURED_POINTS");
    } else if (key == "DIMENSIONS") {
      is >> n[0] >> n[1] >> n[2];
    } else if (key == "ORIGIN") {
      double o;
      is >> o >> o >> o;
    } else if (key == "SPACING") {
      double s;
      is >> dx >> s >> s;
    } else if (key == "POINT_DATA") {
      is >> points;
      dump.grid = Grid(n[2] == 1 ? 2 : 3, n, dx);
      have_grid = true;
      if (points != dump.grid.cells()) throw std::runtime_error("POINT_DATA count does not match DIMENSIONS");
    } else if (key == "SCALARS" || key == "TENSORS") {
      if (!have_grid) throw std::runtime_error("data before POINT_DATA");
      DumpArray a;
      std::string type;
      is >> a.name >> type;
      a.components = key == "SCALARS" ? 1 : 9;
      if (key == "SCALARS") {
        int ncomp;
        is >> ncomp >> key >> type;  // LOOKUP_TABLE default
        if (ncomp != 1) throw std::runtime_error("only single-component scalars are supported");
      }
      a.values.resize(points * a.components);
      for (auto& v : a.values)
        if (!(is >> v)) throw std::runtime_error("truncated array " + a.name);
      dump.arrays.push_back(std::move(a));
    } else {
      throw std::runtime_error("unexpected VTK keyword " + key);
    }
  }
  if (!have_grid) throw std::runtime_error("VTK file has no POINT_DATA");
  return dump;
}

FieldDump read_vtk(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw std::runtime_error("cannot open " + path);
  return read_vtk(is);
}

std::string unit_of(const std::string& name) {
  auto starts = [&](const char* p) { return name.rfind(p, 0) == 0; };
  if (starts("stress")) return "Pa";
  if (starts("psi") || starts("dG")) return "J/m^3";
  return "1";
}

void write_probe_csv(const FieldDump& dump, const std::vector<std::array<double, 3>>& points,
                     const std::vector<std::string>& names, std::ostream& os) {
  std::vector<const DumpArray*> cols;
  if (names.empty()) {
    for (const auto& a : dump.arrays) cols.push_back(&a);
  } else {
    for (const auto& nm : names) {
      const DumpArray* a = dump.find(nm);
      if (!a) throw std::invalid_argument("no array named '" + nm + "' in dump");
      cols.push_back(a);
    }
  }
  static const char* sym_names[] = {"xx", "yy", "zz", "yz", "xz", "xy"};
  static const int sym_flat[] = {0, 4, 8, 5, 2, 1};
  os << "i,j,k,x [m],y [m],z [m]";
  for (const auto* a : cols) {
    if (a->components == 1) {
      os << ',' << a->name << " [" << unit_of(a->name) << ']';
    } else {
      for (const char* s : sym_names) os << ',' << a->name << '_' << s << " [" << unit_of(a->name) << ']';
    }
  }
  os << '\n' << std::setprecision(12);
  const Grid& g = dump.grid;
  const double dx = g.spacing();
  for (std::size_t cell : polyline_cells(g, points)) {
    const auto c = g.coords(cell);
    os << c[0] << ',' << c[1] << ',' << c[2] << ',' << (c[0] + 0.5) * dx << ',' << (c[1] + 0.5) * dx << ','
       << (g.dim() == 3 ? (c[2] + 0.5) * dx : 0.0);
    for (const auto* a : cols) {
      if (a->components == 1) {
        os << ',' << a->values[cell];
      } else {
        for (int f : sym_flat) os << ',' << a->values[cell * 9 + f];
      }
    }
    os << '\n';
  }
}

}  // namespace mpfe
