#pragma once

#include "wearsim/common.hpp"
#include "wearsim/quadrature.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace wearsim {

enum class Region : int { Dirichlet = 1, Neumann = 2, Contact = 3 };

inline const char* region_name(Region r) {
  switch (r) {
    case Region::Dirichlet: return "DIRICHLET";
    case Region::Neumann: return "NEUMANN";
    case Region::Contact: return "CONTACT";
  }
  return "?";
}

/// A simplex given by up to four node indices; only the first `dim + 1`
/// (elements) or `dim` (facets) entries are meaningful.
using Simplex = std::array<Index, 4>;

struct BoundaryFacet {
  Region marker = Region::Neumann;
  Simplex nodes{-1, -1, -1, -1};
};

/// Signed measure of the simplex spanned by `pts` in dimension `k`
/// (length, area, volume). For k equal to the ambient dimension the sign
/// encodes orientation; for lower-dimensional simplices it is unsigned.
inline double simplex_measure(std::span<const Vec3> pts, int ambient_dim) {
  const int k = static_cast<int>(pts.size()) - 1;
  if (k == ambient_dim) {
    if (k == 2) {
      const Vec3 a = pts[1] - pts[0], b = pts[2] - pts[0];
      return 0.5 * (a.x() * b.y() - a.y() * b.x());
    }
    const Vec3 a = pts[1] - pts[0], b = pts[2] - pts[0], c = pts[3] - pts[0];
    return a.dot(b.cross(c)) / 6.0;
  }
  if (k == 1) return (pts[1] - pts[0]).norm();
  return 0.5 * (pts[1] - pts[0]).cross(pts[2] - pts[0]).norm();
}

class SimMesh {
 public:
  int dim = 2;
  std::vector<Vec3> nodes;
  std::vector<Simplex> elements;
  std::vector<BoundaryFacet> boundary_facets;

  Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  int nodes_per_element() const { return dim + 1; }
  int nodes_per_facet() const { return dim; }

  std::vector<Vec3> element_points(Index e) const {
    std::vector<Vec3> p(dim + 1);
    for (int i = 0; i <= dim; ++i) p[i] = nodes[elements[e][i]];
    return p;
  }

  std::vector<Vec3> facet_points(const BoundaryFacet& f) const {
    std::vector<Vec3> p(dim);
    for (int i = 0; i < dim; ++i) p[i] = nodes[f.nodes[i]];
    return p;
  }

  double element_measure(Index e) const {
    const auto p = element_points(e);
    return std::abs(simplex_measure(p, dim));
  }

  double facet_measure(const BoundaryFacet& f) const {
    const auto p = facet_points(f);
    return simplex_measure(p, dim);
  }

  double volume() const {
    double v = 0.0;
    for (Index e = 0; e < static_cast<Index>(elements.size()); ++e) v += element_measure(e);
    return v;
  }

  double boundary_measure(Region r) const {
    double m = 0.0;
    for (const auto& f : boundary_facets)
      if (f.marker == r) m += facet_measure(f);
    return m;
  }

  /// Per-node flag: true for nodes lying on a DIRICHLET facet.
  std::vector<bool> dirichlet_mask() const {
    std::vector<bool> mask(nodes.size(), false);
    for (const auto& f : boundary_facets)
      if (f.marker == Region::Dirichlet)
        for (int i = 0; i < dim; ++i) mask[f.nodes[i]] = true;
    return mask;
  }

  bool operator==(const SimMesh& o) const {
    if (dim != o.dim || nodes.size() != o.nodes.size() || elements != o.elements ||
        boundary_facets.size() != o.boundary_facets.size())
      return false;
    for (std::size_t i = 0; i < nodes.size(); ++i)
      if (nodes[i] != o.nodes[i]) return false;
    for (std::size_t i = 0; i < boundary_facets.size(); ++i)
      if (boundary_facets[i].marker != o.boundary_facets[i].marker ||
          boundary_facets[i].nodes != o.boundary_facets[i].nodes)
        return false;
    return true;
  }
};

namespace detail {

inline Simplex sorted_face(const Simplex& s, int count) {
  Simplex key{-1, -1, -1, -1};
  std::copy_n(s.begin(), count, key.begin());
  std::sort(key.begin(), key.begin() + count);
  return key;
}

/// Map from sorted face key to the list of elements containing it.
inline std::map<Simplex, std::vector<Index>> face_to_elements(const SimMesh& mesh) {
  std::map<Simplex, std::vector<Index>> faces;
  const int nv = mesh.dim + 1;
  for (Index e = 0; e < static_cast<Index>(mesh.elements.size()); ++e) {
    for (int skip = 0; skip < nv; ++skip) {
      Simplex f{-1, -1, -1, -1};
      int c = 0;
      for (int i = 0; i < nv; ++i)
        if (i != skip) f[c++] = mesh.elements[e][i];
      faces[sorted_face(f, mesh.dim)].push_back(e);
    }
  }
  return faces;
}

inline std::string facet_label(const SimMesh& mesh, std::size_t k) {
  std::ostringstream os;
  os << "boundary facet " << (k + 1) << " (nodes";
  for (int i = 0; i < mesh.dim; ++i) os << ' ' << (mesh.boundary_facets[k].nodes[i] + 1);
  os << ')';
  return os.str();
}

}  // namespace detail

/// Checks every structural invariant of a SimMesh. Negatively oriented
/// elements are reoriented in place; degenerate ones are rejected.
inline void validate_mesh(SimMesh& mesh) {
  using K = MeshError::Kind;
  if (mesh.dim != 2 && mesh.dim != 3) throw MeshError(K::Parse, "dimension must be 2 or 3");
  const Index n = mesh.num_nodes();
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    auto& el = mesh.elements[e];
    for (int i = 0; i <= mesh.dim; ++i)
      if (el[i] < 0 || el[i] >= n)
        throw MeshError(K::Topology, "element " + std::to_string(e + 1) + " references unknown node");
    const auto pts = mesh.element_points(static_cast<Index>(e));
    const double vol = simplex_measure(pts, mesh.dim);
    double scale = 0.0;
    for (const auto& p : pts) scale = std::max(scale, (p - pts[0]).norm());
    if (!(std::abs(vol) > 1e-14 * std::pow(scale, mesh.dim)))
      throw MeshError(K::Degenerate, "element " + std::to_string(e + 1) + " has zero volume");
    if (vol < 0) std::swap(el[0], el[1]);
  }

  const auto faces = detail::face_to_elements(mesh);
  std::map<Simplex, std::size_t> seen;
  bool has_dirichlet = false;
  for (std::size_t k = 0; k < mesh.boundary_facets.size(); ++k) {
    const auto& f = mesh.boundary_facets[k];
    for (int i = 0; i < mesh.dim; ++i)
      if (f.nodes[i] < 0 || f.nodes[i] >= n)
        throw MeshError(K::Topology, detail::facet_label(mesh, k) + " references unknown node");
    const Simplex key = detail::sorted_face(f.nodes, mesh.dim);
    const auto it = faces.find(key);
    if (it == faces.end())
      throw MeshError(K::Topology, detail::facet_label(mesh, k) + " is not a face of any element");
    if (it->second.size() != 1)
      throw MeshError(K::Topology, detail::facet_label(mesh, k) + " is an interior face");
    if (auto [pos, inserted] = seen.emplace(key, k); !inserted)
      throw MeshError(K::Topology, detail::facet_label(mesh, k) + " duplicates boundary facet " +
                                       std::to_string(pos->second + 1));
    if (!(mesh.facet_measure(f) > 0.0))
      throw MeshError(K::Degenerate, detail::facet_label(mesh, k) + " has zero measure");
    has_dirichlet |= f.marker == Region::Dirichlet;
  }
  if (!has_dirichlet) throw MeshError(K::EmptyDirichlet, "mesh has no DIRICHLET boundary facet");
}

namespace detail {

class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  /// Next non-empty line split into tokens; throws at end of input.
  std::vector<std::string> next(const char* expecting) {
    std::string line;
    while (std::getline(in_, line)) {
      ++line_no_;
      std::istringstream ls(line);
      std::vector<std::string> tok;
      for (std::string t; ls >> t;) tok.push_back(t);
      if (!tok.empty()) return tok;
    }
    fail(std::string("unexpected end of file, expecting ") + expecting);
  }

  [[noreturn]] void fail(const std::string& msg) const {
    throw MeshError(MeshError::Kind::Parse, "line " + std::to_string(line_no_) + ": " + msg);
  }

  long long integer(const std::string& s) const {
    std::size_t pos = 0;
    long long v = 0;
    try {
      v = std::stoll(s, &pos);
    } catch (const std::exception&) {
      fail("expected integer, got '" + s + "'");
    }
    if (pos != s.size()) fail("expected integer, got '" + s + "'");
    return v;
  }

  double real(const std::string& s) const {
    std::size_t pos = 0;
    double v = 0;
    try {
      v = std::stod(s, &pos);
    } catch (const std::exception&) {
      fail("expected number, got '" + s + "'");
    }
    if (pos != s.size() || !std::isfinite(v)) fail("expected finite number, got '" + s + "'");
    return v;
  }

  void expect_keyword(const char* kw) {
    const auto tok = next(kw);
    if (tok.size() != 1 || tok[0] != kw) fail(std::string("expected ") + kw);
  }

  std::vector<std::string> expect_fields(std::size_t count, const char* what) {
    auto tok = next(what);
    if (tok.size() != count)
      fail(std::string("expected ") + std::to_string(count) + " fields for " + what + ", got " +
           std::to_string(tok.size()));
    return tok;
  }

 private:
  std::istream& in_;
  int line_no_ = 0;
};

}  // namespace detail

/// Parses the ASCII mesh format and validates the result.
inline SimMesh parse_mesh(std::istream& in) {
  detail::LineReader rd(in);
  SimMesh mesh;
  rd.expect_keyword("$Dim");
  mesh.dim = static_cast<int>(rd.integer(rd.expect_fields(1, "dimension")[0]));
  if (mesh.dim != 2 && mesh.dim != 3) rd.fail("dimension must be 2 or 3");
  const int d = mesh.dim;

  rd.expect_keyword("$Nodes");
  const long long nn = rd.integer(rd.expect_fields(1, "node count")[0]);
  if (nn <= 0) rd.fail("node count must be positive");
  mesh.nodes.resize(nn, Vec3::Zero());
  for (long long i = 0; i < nn; ++i) {
    const auto tok = rd.expect_fields(1 + d, "node");
    if (rd.integer(tok[0]) != i + 1) rd.fail("node ids must run 1..N in order");
    for (int c = 0; c < d; ++c) mesh.nodes[i][c] = rd.real(tok[1 + c]);
  }

  auto node_ref = [&](const std::string& s) {
    const long long id = rd.integer(s);
    if (id < 1 || id > nn) rd.fail("node id " + s + " out of range");
    return static_cast<Index>(id - 1);
  };

  rd.expect_keyword("$Elements");
  const long long ne = rd.integer(rd.expect_fields(1, "element count")[0]);
  if (ne <= 0) rd.fail("element count must be positive");
  mesh.elements.resize(ne, Simplex{-1, -1, -1, -1});
  for (long long e = 0; e < ne; ++e) {
    const auto tok = rd.expect_fields(2 + d, "element");
    rd.integer(tok[0]);
    for (int i = 0; i <= d; ++i) mesh.elements[e][i] = node_ref(tok[1 + i]);
  }

  rd.expect_keyword("$BoundaryFacets");
  const long long nf = rd.integer(rd.expect_fields(1, "facet count")[0]);
  if (nf < 0) rd.fail("facet count must be non-negative");
  mesh.boundary_facets.resize(nf);
  for (long long k = 0; k < nf; ++k) {
    const auto tok = rd.expect_fields(2 + d, "boundary facet");
    rd.integer(tok[0]);
    const long long marker = rd.integer(tok[1]);
    if (marker < 1 || marker > 3) rd.fail("marker must be 1, 2 or 3");
    mesh.boundary_facets[k].marker = static_cast<Region>(marker);
    for (int i = 0; i < d; ++i) mesh.boundary_facets[k].nodes[i] = node_ref(tok[2 + i]);
  }
  rd.expect_keyword("$End");

  validate_mesh(mesh);
  return mesh;
}

inline SimMesh load_mesh(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw MeshError(MeshError::Kind::Io, "cannot open mesh file '" + path + "'");
  return parse_mesh(in);
}

inline std::string format_real(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

inline void write_mesh(std::ostream& out, const SimMesh& mesh) {
  const int d = mesh.dim;
  out << "$Dim\n" << d << "\n$Nodes\n" << mesh.nodes.size() << '\n';
  for (std::size_t i = 0; i < mesh.nodes.size(); ++i) {
    out << (i + 1);
    for (int c = 0; c < d; ++c) out << ' ' << format_real(mesh.nodes[i][c]);
    out << '\n';
  }
  out << "$Elements\n" << mesh.elements.size() << '\n';
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    out << (e + 1);
    for (int i = 0; i <= d; ++i) out << ' ' << (mesh.elements[e][i] + 1);
    out << '\n';
  }
  out << "$BoundaryFacets\n" << mesh.boundary_facets.size() << '\n';
  for (std::size_t k = 0; k < mesh.boundary_facets.size(); ++k) {
    const auto& f = mesh.boundary_facets[k];
    out << (k + 1) << ' ' << static_cast<int>(f.marker);
    for (int i = 0; i < d; ++i) out << ' ' << (f.nodes[i] + 1);
    out << '\n';
  }
  out << "$End\n";
}

inline void save_mesh(const std::string& path, const SimMesh& mesh) {
  std::ofstream out(path);
  if (!out) throw MeshError(MeshError::Kind::Io, "cannot write mesh file '" + path + "'");
  write_mesh(out, mesh);
}

// ---------------------------------------------------------------------------
// Contact surface
// ---------------------------------------------------------------------------

/// Outward unit normal and orthonormal tangent basis of a surface facet. In
/// 2D only tangents[0] is used; tangents[1] is zero.
struct FacetFrame {
  Vec3 normal = Vec3::Zero();
  std::array<Vec3, 2> tangents{Vec3::Zero(), Vec3::Zero()};
};

struct QuadPoint {
  Vec3 point = Vec3::Zero();
  double weight = 0.0;
  std::array<double, 4> bary{};
};

class SurfaceMesh {
 public:
  int dim = 2;  ///< ambient dimension; facets have `dim` nodes
  std::vector<Index> parent_node_ids;
  std::vector<Vec3> nodes;
  std::vector<Simplex> facets;  ///< local surface node indices
  std::vector<FacetFrame> facet_frames;
  std::vector<double> facet_measures;
  std::vector<Index> parent_facets;  ///< index into SimMesh::boundary_facets, or -1

  Index num_nodes() const { return static_cast<Index>(nodes.size()); }
  Index num_facets() const { return static_cast<Index>(facets.size()); }
  bool empty() const { return facets.empty(); }

  std::vector<Vec3> facet_points(Index f) const {
    std::vector<Vec3> p(dim);
    for (int i = 0; i < dim; ++i) p[i] = nodes[facets[f][i]];
    return p;
  }

  double total_measure() const {
    double m = 0.0;
    for (double a : facet_measures) m += a;
    return m;
  }
};

namespace detail {

/// Frame from facet geometry with the normal oriented along `outward`.
inline FacetFrame facet_frame(std::span<const Vec3> pts, int dim, const Vec3& outward) {
  FacetFrame fr;
  if (dim == 2) {
    const Vec3 t = (pts[1] - pts[0]).normalized();
    fr.normal = Vec3(t.y(), -t.x(), 0.0);
    if (fr.normal.dot(outward) < 0) fr.normal = -fr.normal;
    fr.tangents[0] = Vec3(-fr.normal.y(), fr.normal.x(), 0.0);
  } else {
    const Vec3 e1 = pts[1] - pts[0];
    fr.normal = e1.cross(pts[2] - pts[0]).normalized();
    if (fr.normal.dot(outward) < 0) fr.normal = -fr.normal;
    fr.tangents[0] = e1.normalized();
    fr.tangents[1] = fr.normal.cross(fr.tangents[0]);
  }
  return fr;
}

}  // namespace detail

/// Builds the contact surface: one facet per CONTACT-marked boundary facet,
/// with frames oriented away from the adjacent element's centroid.
inline SurfaceMesh extract_contact_surface(const SimMesh& mesh) {
  SurfaceMesh surf;
  surf.dim = mesh.dim;
  const auto faces = detail::face_to_elements(mesh);
  std::map<Index, Index> local;
  for (std::size_t k = 0; k < mesh.boundary_facets.size(); ++k) {
    const auto& bf = mesh.boundary_facets[k];
    if (bf.marker != Region::Contact) continue;
    const auto pts = mesh.facet_points(bf);
    const double meas = simplex_measure(pts, mesh.dim);
    if (!(meas > 0.0))
      throw MeshError(MeshError::Kind::Degenerate, detail::facet_label(mesh, k) + " is degenerate");

    const Index elem = faces.at(detail::sorted_face(bf.nodes, mesh.dim)).front();
    Vec3 centroid = Vec3::Zero();
    for (const auto& p : mesh.element_points(elem)) centroid += p;
    centroid /= mesh.dim + 1;
    Vec3 mid = Vec3::Zero();
    for (const auto& p : pts) mid += p;
    mid /= mesh.dim;

    Simplex sf{-1, -1, -1, -1};
    for (int i = 0; i < mesh.dim; ++i) {
      const Index g = bf.nodes[i];
      auto [it, inserted] = local.emplace(g, surf.num_nodes());
      if (inserted) {
        surf.parent_node_ids.push_back(g);
        surf.nodes.push_back(mesh.nodes[g]);
      }
      sf[i] = it->second;
    }
    surf.facets.push_back(sf);
    surf.facet_frames.push_back(detail::facet_frame(pts, mesh.dim, mid - centroid));
    surf.facet_measures.push_back(meas);
    surf.parent_facets.push_back(static_cast<Index>(k));
  }
  return surf;
}

/// Standalone surface mesh (no parent volume mesh). Normals follow the facet
/// node ordering: (t_y, -t_x) for segments, e1 x e2 for triangles.
inline SurfaceMesh make_surface_mesh(int dim, std::vector<Vec3> points, std::vector<Simplex> facets) {
  SurfaceMesh surf;
  surf.dim = dim;
  surf.nodes = std::move(points);
  surf.facets = std::move(facets);
  for (Index i = 0; i < surf.num_nodes(); ++i) surf.parent_node_ids.push_back(i);
  for (Index f = 0; f < surf.num_facets(); ++f) {
    const auto pts = surf.facet_points(f);
    const double meas = simplex_measure(pts, dim);
    if (!(meas > 0.0))
      throw MeshError(MeshError::Kind::Degenerate, "surface facet " + std::to_string(f + 1) + " is degenerate");
    Vec3 hint;
    if (dim == 2) {
      const Vec3 t = pts[1] - pts[0];
      hint = Vec3(t.y(), -t.x(), 0.0);
    } else {
      hint = (pts[1] - pts[0]).cross(pts[2] - pts[0]);
    }
    surf.facet_frames.push_back(detail::facet_frame(pts, dim, hint));
    surf.facet_measures.push_back(meas);
    surf.parent_facets.push_back(-1);
  }
  return surf;
}

/// Quadrature on a facet with `pts.size()` vertices; weights sum to the
/// facet measure.
inline std::vector<QuadPoint> facet_quadrature(std::span<const Vec3> pts, int order) {
  const int k = static_cast<int>(pts.size()) - 1;
  const double measure = simplex_measure(pts, k + 1);
  std::vector<QuadPoint> out;
  for (const auto& sp : simplex_rule(k, order)) {
    QuadPoint q;
    q.bary = sp.bary;
    q.weight = sp.weight * measure;
    for (int i = 0; i <= k; ++i) q.point += sp.bary[i] * pts[i];
    out.push_back(q);
  }
  return out;
}

}  // namespace wearsim
