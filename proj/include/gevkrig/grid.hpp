#ifndef GEVKRIG_GRID_HPP
#define GEVKRIG_GRID_HPP

#include <string>
#include <vector>

#include "gevkrig/columnar.hpp"
#include "gevkrig/common.hpp"
#include "gevkrig/geometry.hpp"

namespace gevkrig {

// Regular lon/lat lattice; values live at cell centers. The elevation file
// lists the active cells, so land masking falls out of which cells carry
// elevation.
struct GridSpec {
  double lon0 = 0, lat0 = 0;   // lower-left cell center
  double dlon = 0.25, dlat = 0.25;
  int nx = 0, ny = 0;

  LonLat center(int i, int j) const {
    return LonLat{lon0 + i * dlon, lat0 + j * dlat};
  }
  int size() const { return nx * ny; }

  bool operator==(const GridSpec&) const = default;

  std::string describe() const {
    return "lon0=" + format_double(lon0) + " lat0=" + format_double(lat0) +
           " dlon=" + format_double(dlon) + " dlat=" + format_double(dlat) +
           " nx=" + std::to_string(nx) + " ny=" + std::to_string(ny);
  }

  void to_meta(Table& t) const {
    t.meta["grid.lon0"] = format_double(lon0);
    t.meta["grid.lat0"] = format_double(lat0);
    t.meta["grid.dlon"] = format_double(dlon);
    t.meta["grid.dlat"] = format_double(dlat);
    t.meta["grid.nx"] = std::to_string(nx);
    t.meta["grid.ny"] = std::to_string(ny);
  }

  static GridSpec from_meta(const Table& t) {
    GridSpec g;
    g.lon0 = parse_double(t.meta_at("grid.lon0"));
    g.lat0 = parse_double(t.meta_at("grid.lat0"));
    g.dlon = parse_double(t.meta_at("grid.dlon"));
    g.dlat = parse_double(t.meta_at("grid.dlat"));
    g.nx = static_cast<int>(parse_long(t.meta_at("grid.nx")));
    g.ny = static_cast<int>(parse_long(t.meta_at("grid.ny")));
    return g;
  }
};

struct GridCell {
  int i = 0, j = 0;
  LonLat center;
  double elev_m = kMissing;
};

// A grid plus its active cells (those with elevation).
struct Lattice {
  GridSpec spec;
  std::vector<GridCell> cells;

  static Lattice read_elevation(const std::string& path) {
    Table t = Table::read(path);
    Lattice lat;
    lat.spec = GridSpec::from_meta(t);
    int c_i = t.col("i"), c_j = t.col("j"), c_el = t.col("elev_m");
    for (const auto& r : t.rows) {
      GridCell c;
      c.i = static_cast<int>(parse_long(r[c_i]));
      c.j = static_cast<int>(parse_long(r[c_j]));
      if (c.i < 0 || c.i >= lat.spec.nx || c.j < 0 || c.j >= lat.spec.ny)
        throw DataError(path + ": cell (" + r[c_i] + "," + r[c_j] + ") outside lattice");
      c.center = lat.spec.center(c.i, c.j);
      c.elev_m = parse_double(r[c_el]);
      lat.cells.push_back(c);
    }
    return lat;
  }

  void write_elevation(const std::string& path) const {
    Table t;
    t.meta["format"] = "gevkrig/elevation v1";
    spec.to_meta(t);
    t.columns = {"i", "j", "lon", "lat", "elev_m"};
    for (const auto& c : cells)
      t.add_row({std::to_string(c.i), std::to_string(c.j), format_double(c.center.lon),
                 format_double(c.center.lat), format_double(c.elev_m)});
    t.write(path);
  }
};

// One scalar field over the active cells of a lattice, in cell order.
inline Table grid_value_table(const Lattice& lattice, std::span<const double> values,
                              const std::string& value_name) {
  Table t;
  t.meta["format"] = "gevkrig/grid v1";
  lattice.spec.to_meta(t);
  t.columns = {"i", "j", "lon", "lat", value_name};
  for (size_t k = 0; k < lattice.cells.size(); ++k) {
    const auto& c = lattice.cells[k];
    t.add_row({std::to_string(c.i), std::to_string(c.j), format_double(c.center.lon),
               format_double(c.center.lat), format_double(values[k])});
  }
  return t;
}

inline std::vector<double> read_grid_values(const Table& t, const Lattice& lattice) {
  GridSpec gs = GridSpec::from_meta(t);
  if (!(gs == lattice.spec))
    throw DataError("grid spec mismatch: file has " + gs.describe() + ", expected " +
                    lattice.spec.describe());
  if (t.rows.size() != lattice.cells.size())
    throw DataError("grid file cell count " + std::to_string(t.rows.size()) + " != lattice " +
                    std::to_string(lattice.cells.size()));
  int c_val = static_cast<int>(t.columns.size()) - 1;
  std::vector<double> out;
  out.reserve(t.rows.size());
  for (const auto& r : t.rows) out.push_back(parse_double(r[c_val]));
  return out;
}

}  // namespace gevkrig

#endif
