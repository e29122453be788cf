#pragma once

// Wear diffusion on the contact surface: tangential gradients of P1
// functions, Laplace-Beltrami stiffness, surface mass and the
// backward-Euler wear update. The zero-flux condition on the boundary of the
// contact surface is natural, so nothing is assembled there.

#include "wearsim/assembly.hpp"
#include "wearsim/linear_solve.hpp"
#include "wearsim/mesh.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <istream>
#include <ostream>
#include <span>
#include <sstream>
#include <string>
#include <vector>

namespace wearsim {

/// Tangential gradient of the linear interpolant of `values` on the facet
/// with vertices `pts` (2 in 2D, 3 in 3D).
inline Vec3 surface_gradient(std::span<const Vec3> pts, std::span<const double> values) {
  const int k = static_cast<int>(pts.size()) - 1;
  Eigen::Matrix<double, 3, 2> jac = Eigen::Matrix<double, 3, 2>::Zero();
  Eigen::Vector2d dv = Eigen::Vector2d::Zero();
  for (int i = 0; i < k; ++i) {
    jac.col(i) = pts[i + 1] - pts[0];
    dv[i] = values[i + 1] - values[0];
  }
  if (k == 1) {
    const double len2 = jac.col(0).squaredNorm();
    if (!(len2 > 0.0)) throw MeshError(MeshError::Kind::Degenerate, "surface_gradient: degenerate facet");
    return jac.col(0) * (dv[0] / len2);
  }
  const Eigen::Matrix2d metric = jac.transpose() * jac;
  const double det = metric.determinant();
  if (!(det > 1e-300)) throw MeshError(MeshError::Kind::Degenerate, "surface_gradient: degenerate facet");
  return jac * metric.inverse() * dv;
}

struct SurfaceOperator {
  SparseMatrix stiffness;     ///< (grad_G phi_a, grad_G phi_b), without kappa
  SparseMatrix mass;          ///< consistent
  SparseMatrix mass_lumped;   ///< row-sum lumped
  double kappa = 1.0;

  const SparseMatrix& mass_matrix(bool lumped) const { return lumped ? mass_lumped : mass; }
};

inline SurfaceOperator assemble_laplace_beltrami(const SurfaceMesh& surf, double kappa) {
  if (surf.empty()) throw MeshError(MeshError::Kind::Topology, "assemble_laplace_beltrami: empty surface mesh");
  if (!(kappa > 0.0)) throw HypothesisError("kappa", "wear diffusivity kappa must be positive");
  const int nv = surf.dim;  // facet vertex count
  std::vector<detail::LocalMatrix> stiff(surf.num_facets()), mass(surf.num_facets());
  parallel_for(surf.num_facets(), [&](Index f) {
    const auto pts = surf.facet_points(f);
    const double meas = surf.facet_measures[f];
    std::array<Vec3, 3> grads;
    for (int a = 0; a < nv; ++a) {
      std::array<double, 3> unit{0.0, 0.0, 0.0};
      unit[a] = 1.0;
      grads[a] = surface_gradient(pts, std::span<const double>(unit.data(), nv));
    }
    auto& ks = stiff[f];
    auto& ms = mass[f];
    ks.n = ms.n = nv;
    ks.values.setZero();
    ms.values.setZero();
    const double off = meas / (nv * (nv + 1.0));
    for (int a = 0; a < nv; ++a) {
      ks.dofs[a] = ms.dofs[a] = surf.facets[f][a];
      for (int b = 0; b < nv; ++b) {
        ks.values(a, b) = meas * grads[a].dot(grads[b]);
        ms.values(a, b) = a == b ? 2.0 * off : off;
      }
    }
  });
  SurfaceOperator op;
  op.stiffness = detail::gather(stiff, surf.num_nodes());
  op.mass = detail::gather(mass, surf.num_nodes());
  op.mass_lumped = lump(op.mass);
  op.kappa = kappa;
  return op;
}

/// Nodal source vector int_G s(x) phi_a for a density evaluated per facet
/// quadrature point: density(facet, quadrature point).
inline Vector assemble_surface_source(const SurfaceMesh& surf,
                                      const std::function<double(Index, const QuadPoint&)>& density,
                                      int order = 2) {
  Vector s = Vector::Zero(surf.num_nodes());
  for (Index f = 0; f < surf.num_facets(); ++f) {
    const auto pts = surf.facet_points(f);
    for (const auto& q : facet_quadrature(pts, order)) {
      const double val = density(f, q);
      for (int a = 0; a < surf.dim; ++a) s[surf.facets[f][a]] += q.weight * q.bary[a] * val;
    }
  }
  return s;
}

/// One backward-Euler step of theta' - kappa Lap_G theta = h_w:
/// (M + dt kappa K) theta_next = M theta_n + dt source.
inline Vector wear_step(const SurfaceOperator& op, const Vector& theta_n, const Vector& source, double dt,
                        bool lumped = false, double tol = 1e-14) {
  if (!(dt > 0.0)) throw SolverError("wear_step: dt must be positive");
  const SparseMatrix& m = op.mass_matrix(lumped);
  const SparseMatrix system = m + (dt * op.kappa) * op.stiffness;
  const Vector rhs = m * theta_n + dt * source;
  return solve_spd(system, rhs, tol, &theta_n);
}

/// True when every off-diagonal entry of the stiffness is non-positive, so
/// that lumped-mass backward Euler preserves nonnegativity.
inline bool passes_m_matrix_check(const SurfaceOperator& op, double tol = 1e-12) {
  double scale = 0.0;
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.stiffness, k); it; ++it) scale = std::max(scale, std::abs(it.value()));
  for (int k = 0; k < op.stiffness.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(op.stiffness, k); it; ++it)
      if (it.row() != it.col() && it.value() > tol * scale) return false;
  return true;
}

// ---------------------------------------------------------------------------
// Wear CSV: node_id,x,y[,z],theta with 1-based parent volume node ids.
// ---------------------------------------------------------------------------

struct WearRow {
  Index node_id = 0;
  Vec3 x = Vec3::Zero();
  double theta = 0.0;
};

inline void write_wear_csv(std::ostream& out, const SurfaceMesh& surf, const Vector& theta) {
  out << (surf.dim == 3 ? "node_id,x,y,z,theta\n" : "node_id,x,y,theta\n");
  for (Index i = 0; i < surf.num_nodes(); ++i) {
    out << (surf.parent_node_ids[i] + 1);
    for (int c = 0; c < surf.dim; ++c) out << ',' << format_real(surf.nodes[i][c]);
    out << ',' << format_real(theta[i]) << '\n';
  }
}

inline std::vector<WearRow> read_wear_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw std::runtime_error("wear csv: missing header");
  int dim = 0;
  if (line == "node_id,x,y,theta") dim = 2;
  else if (line == "node_id,x,y,z,theta") dim = 3;
  else throw std::runtime_error("wear csv: unexpected header '" + line + "'");
  std::vector<WearRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string c; std::getline(ls, c, ',');) cells.push_back(c);
    if (static_cast<int>(cells.size()) != dim + 2) throw std::runtime_error("wear csv: bad row '" + line + "'");
    WearRow r;
    r.node_id = std::stoll(cells[0]);
    for (int c = 0; c < dim; ++c) r.x[c] = std::stod(cells[1 + c]);
    r.theta = std::stod(cells[dim + 1]);
    rows.push_back(r);
  }
  return rows;
}

}  // namespace wearsim
