// Legacy ASCII VTK (STRUCTURED_POINTS) dumps and line probes.
#pragma once

#include "mpfe/fields.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace mpfe {

// A named per-cell array with 1 (scalar) or 9 (full tensor, row-major)
// components.
struct DumpArray {
  std::string name;
  int components = 1;
  std::vector<double> values;  // cell-major: values[cell * components + c]
};

struct FieldDump {
  Grid grid;
  std::vector<DumpArray> arrays;

  const DumpArray* find(const std::string& name) const;
};

void write_vtk(const FieldDump& dump, const std::string& path);
void write_vtk(const FieldDump& dump, std::ostream& os);
FieldDump read_vtk(const std::string& path);
FieldDump read_vtk(std::istream& is);

// One row per cell along the polyline.  Columns: i, j, k, x [m], y [m],
// z [m], then every requested array component (tensors expand to the six
// symmetric components).  Empty `names` selects every array.
void write_probe_csv(const FieldDump& dump, const std::vector<std::array<double, 3>>& points,
                     const std::vector<std::string>& names, std::ostream& os);

// unit label for the CSV header, derived from the array name
std::string unit_of(const std::string& array_name);

}  // namespace mpfe
