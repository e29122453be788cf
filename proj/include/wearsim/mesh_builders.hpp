#pragma once

// Structured meshes used by the verification suites and tests.

#include "wearsim/mesh.hpp"

#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

namespace wearsim {

/// Marks every exterior face of `mesh` using `classify(facet midpoint)`.
/// Faces for which the classifier returns nullopt are left unmarked.
inline void mark_boundary(SimMesh& mesh,
                          const std::function<std::optional<Region>(const Vec3&)>& classify) {
  mesh.boundary_facets.clear();
  const auto faces = detail::face_to_elements(mesh);
  for (const auto& [key, elems] : faces) {
    if (elems.size() != 1) continue;
    Vec3 mid = Vec3::Zero();
    for (int i = 0; i < mesh.dim; ++i) mid += mesh.nodes[key[i]];
    mid /= mesh.dim;
    if (auto r = classify(mid)) mesh.boundary_facets.push_back({*r, key});
  }
}

/// Sides of an axis-aligned rectangle or box.
enum class Side { Bottom, Right, Top, Left, Front, Back };

/// Rectangle [0,lx]x[0,ly] split into nx*ny cells, two triangles each.
/// `side_region(side)` assigns a marker to every boundary edge of that side;
/// corner-free classification uses the edge midpoint.
inline SimMesh make_rectangle(double lx, double ly, int nx, int ny,
                              const std::function<std::optional<Region>(Side)>& side_region) {
  SimMesh mesh;
  mesh.dim = 2;
  for (int j = 0; j <= ny; ++j)
    for (int i = 0; i <= nx; ++i) mesh.nodes.emplace_back(lx * i / nx, ly * j / ny, 0.0);
  auto id = [&](int i, int j) { return static_cast<Index>(j * (nx + 1) + i); };
  for (int j = 0; j < ny; ++j)
    for (int i = 0; i < nx; ++i) {
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  const double tol = 1e-9 * std::max(lx, ly);
  mark_boundary(mesh, [&](const Vec3& m) -> std::optional<Region> {
    if (std::abs(m.y()) < tol) return side_region(Side::Bottom);
    if (std::abs(m.x() - lx) < tol) return side_region(Side::Right);
    if (std::abs(m.y() - ly) < tol) return side_region(Side::Top);
    return side_region(Side::Left);
  });
  validate_mesh(mesh);
  return mesh;
}

/// Annulus r_in <= r <= r_out with n_theta segments around and n_radial
/// layers. The inner circle gets `inner`, the outer circle `outer`.
inline SimMesh make_annulus(double r_in, double r_out, int n_theta, int n_radial, Region inner,
                            Region outer) {
  SimMesh mesh;
  mesh.dim = 2;
  for (int j = 0; j <= n_radial; ++j) {
    const double r = r_in + (r_out - r_in) * j / n_radial;
    for (int i = 0; i < n_theta; ++i) {
      const double phi = 2.0 * std::numbers::pi * i / n_theta;
      mesh.nodes.emplace_back(r * std::cos(phi), r * std::sin(phi), 0.0);
    }
  }
  auto id = [&](int i, int j) { return static_cast<Index>(j * n_theta + (i % n_theta)); };
  for (int j = 0; j < n_radial; ++j)
    for (int i = 0; i < n_theta; ++i) {
      mesh.elements.push_back({id(i, j), id(i + 1, j), id(i + 1, j + 1), -1});
      mesh.elements.push_back({id(i, j), id(i + 1, j + 1), id(i, j + 1), -1});
    }
  const double r_mid = 0.5 * (r_in + r_out);
  mark_boundary(mesh, [&](const Vec3& m) -> std::optional<Region> {
    return m.norm() < r_mid ? inner : outer;
  });
  validate_mesh(mesh);
  return mesh;
}

/// Box [0,lx]x[0,ly]x[0,lz] with nx*ny*nz cells, six tetrahedra per cell
/// (Kuhn subdivision, conforming across cells). Sides: Bottom z=0, Top z=lz,
/// Left x=0, Right x=lx, Front y=0, Back y=ly.
inline SimMesh make_box(double lx, double ly, double lz, int nx, int ny, int nz,
                        const std::function<std::optional<Region>(Side)>& side_region) {
  SimMesh mesh;
  mesh.dim = 3;
  for (int k = 0; k <= nz; ++k)
    for (int j = 0; j <= ny; ++j)
      for (int i = 0; i <= nx; ++i)
        mesh.nodes.emplace_back(lx * i / nx, ly * j / ny, lz * k / nz);
  auto id = [&](int i, int j, int k) {
    return static_cast<Index>((k * (ny + 1) + j) * (nx + 1) + i);
  };
  static constexpr int perms[6][3] = {{0, 1, 2}, {0, 2, 1}, {1, 0, 2},
                                      {1, 2, 0}, {2, 0, 1}, {2, 1, 0}};
  for (int k = 0; k < nz; ++k)
    for (int j = 0; j < ny; ++j)
      for (int i = 0; i < nx; ++i)
        for (const auto& p : perms) {
          int c[3] = {i, j, k};
          Simplex tet{id(c[0], c[1], c[2]), -1, -1, -1};
          for (int s = 0; s < 3; ++s) {
            ++c[p[s]];
            tet[s + 1] = id(c[0], c[1], c[2]);
          }
          mesh.elements.push_back(tet);
        }
  const double tol = 1e-9 * std::max({lx, ly, lz});
  mark_boundary(mesh, [&](const Vec3& m) -> std::optional<Region> {
    if (std::abs(m.z()) < tol) return side_region(Side::Bottom);
    if (std::abs(m.z() - lz) < tol) return side_region(Side::Top);
    if (std::abs(m.x()) < tol) return side_region(Side::Left);
    if (std::abs(m.x() - lx) < tol) return side_region(Side::Right);
    if (std::abs(m.y()) < tol) return side_region(Side::Front);
    return side_region(Side::Back);
  });
  validate_mesh(mesh);
  return mesh;
}

/// Closed polygon with n segments approximating the circle of radius r,
/// counterclockwise, so that normals point outward.
inline SurfaceMesh make_circle_surface(int n, double r = 1.0) {
  std::vector<Vec3> pts;
  std::vector<Simplex> segs;
  for (int i = 0; i < n; ++i) {
    const double phi = 2.0 * std::numbers::pi * i / n;
    pts.emplace_back(r * std::cos(phi), r * std::sin(phi), 0.0);
    segs.push_back({i, (i + 1) % n, -1, -1});
  }
  return make_surface_mesh(2, std::move(pts), std::move(segs));
}

}  // namespace wearsim
