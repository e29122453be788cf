#pragma once

// Legacy-ASCII unstructured-grid field dumps and a reader for the subset we
// write.

#include "wearsim/assembly.hpp"
#include "wearsim/mesh.hpp"

#include <istream>
#include <map>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

namespace wearsim {

struct VtkGrid {
  std::vector<Vec3> points;
  std::vector<std::vector<Index>> cells;
  std::vector<int> cell_types;
  std::map<std::string, std::vector<Vec3>> vectors;
  std::map<std::string, std::vector<double>> scalars;
};

/// Writes mesh points, cells and nodal displacement/velocity vectors (free
/// vectors are expanded with zeros on the Dirichlet boundary).
inline void write_vtk(std::ostream& out, const SimMesh& mesh, const DofMap& dofs, const Vector& u, const Vector& v,
                      double time) {
  const int nv = mesh.dim + 1;
  out << "# vtk DataFile Version 3.0\n";
  out << "wearsim fields t=" << format_real(time) << '\n';
  out << "ASCII\nDATASET UNSTRUCTURED_GRID\n";
  out << "POINTS " << mesh.num_nodes() << " double\n";
  for (const auto& p : mesh.nodes)
    out << format_real(p.x()) << ' ' << format_real(p.y()) << ' ' << format_real(p.z()) << '\n';
  out << "CELLS " << mesh.elements.size() << ' ' << mesh.elements.size() * (nv + 1) << '\n';
  for (const auto& e : mesh.elements) {
    out << nv;
    for (int i = 0; i < nv; ++i) out << ' ' << e[i];
    out << '\n';
  }
  out << "CELL_TYPES " << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) out << (mesh.dim == 2 ? 5 : 10) << '\n';
  out << "POINT_DATA " << mesh.num_nodes() << '\n';
  for (const auto& [name, field] : {std::pair{"displacement", &u}, std::pair{"velocity", &v}}) {
    out << "VECTORS " << name << " double\n";
    for (Index n = 0; n < mesh.num_nodes(); ++n) {
      const Vec3 val = dofs.node_value(*field, n);
      out << format_real(val.x()) << ' ' << format_real(val.y()) << ' ' << format_real(val.z()) << '\n';
    }
  }
}

inline VtkGrid read_vtk(std::istream& in) {
  VtkGrid g;
  std::string line;
  auto fail = [](const std::string& m) { throw std::runtime_error("vtk: " + m); };
  if (!std::getline(in, line) || line.rfind("# vtk DataFile", 0) != 0) fail("missing header");
  std::getline(in, line);  // title
  std::string tok;
  if (!(in >> tok) || tok != "ASCII") fail("only ASCII supported");
  if (!(in >> tok >> tok) || tok != "UNSTRUCTURED_GRID") fail("expected UNSTRUCTURED_GRID");
  Index npts = 0;
  while (in >> tok) {
    if (tok == "POINTS") {
      in >> npts >> tok;
      g.points.resize(npts);
      for (auto& p : g.points) in >> p.x() >> p.y() >> p.z();
    } else if (tok == "CELLS") {
      Index nc = 0, total = 0;
      in >> nc >> total;
      g.cells.resize(nc);
      for (auto& c : g.cells) {
        Index k = 0;
        in >> k;
        c.resize(k);
        for (auto& i : c) in >> i;
      }
    } else if (tok == "CELL_TYPES") {
      Index nc = 0;
      in >> nc;
      g.cell_types.resize(nc);
      for (auto& t : g.cell_types) in >> t;
    } else if (tok == "POINT_DATA") {
      in >> npts;
    } else if (tok == "VECTORS") {
      std::string name;
      in >> name >> tok;
      auto& f = g.vectors[name];
      f.resize(npts);
      for (auto& p : f) in >> p.x() >> p.y() >> p.z();
    } else if (tok == "SCALARS") {
      std::string name;
      in >> name >> tok;
      std::getline(in, line);
      in >> tok >> tok;  // LOOKUP_TABLE default
      auto& f = g.scalars[name];
      f.resize(npts);
      for (auto& s : f) in >> s;
    } else {
      fail("unexpected token '" + tok + "'");
    }
    if (in.fail()) fail("malformed section " + tok);
  }
  return g;
}

}  // namespace wearsim
