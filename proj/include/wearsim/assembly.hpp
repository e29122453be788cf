#pragma once

#include "wearsim/material.hpp"
#include "wearsim/mesh.hpp"
#include "wearsim/parallel.hpp"

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <cmath>
#include <functional>
#include <ostream>
#include <stdexcept>
#include <vector>

namespace wearsim {

using SparseMatrix = Eigen::SparseMatrix<double>;
using Triplet = Eigen::Triplet<double>;

/// Numbering of vector degrees of freedom. Full numbering is node * dim +
/// component; the free numbering skips nodes on the Dirichlet boundary.
class DofMap {
 public:
  DofMap() = default;

  explicit DofMap(const SimMesh& mesh) : dim_(mesh.dim), num_nodes_(mesh.num_nodes()) {
    const auto clamped = mesh.dirichlet_mask();
    free_.assign(num_nodes_ * dim_, -1);
    for (Index n = 0; n < num_nodes_; ++n) {
      if (clamped[n]) continue;
      for (int c = 0; c < dim_; ++c) {
        free_[n * dim_ + c] = num_free_;
        full_of_free_.push_back(n * dim_ + c);
        ++num_free_;
      }
    }
  }

  int dim() const { return dim_; }
  Index num_nodes() const { return num_nodes_; }
  Index num_full() const { return num_nodes_ * dim_; }
  Index num_free() const { return num_free_; }

  /// Free index of (node, component) or -1 when constrained.
  Index free_index(Index node, int comp) const { return free_[node * dim_ + comp]; }
  Index full_index_of_free(Index f) const { return full_of_free_[f]; }

  Vector restrict_vector(const Vector& full) const {
    Vector r(num_free_);
    for (Index f = 0; f < num_free_; ++f) r[f] = full[full_of_free_[f]];
    return r;
  }

  /// Expands a free vector, inserting zeros at constrained DOFs.
  Vector expand(const Vector& free) const {
    Vector full = Vector::Zero(num_full());
    for (Index f = 0; f < num_free_; ++f) full[full_of_free_[f]] = free[f];
    return full;
  }

  Vec3 node_value(const Vector& free, Index node) const {
    Vec3 v = Vec3::Zero();
    for (int c = 0; c < dim_; ++c) {
      const Index f = free_index(node, c);
      if (f >= 0) v[c] = free[f];
    }
    return v;
  }

 private:
  int dim_ = 2;
  Index num_nodes_ = 0;
  Index num_free_ = 0;
  std::vector<Index> free_;
  std::vector<Index> full_of_free_;
};

/// Compressed sparse matrix over the free degrees of freedom.
struct SparseOperator {
  SparseMatrix matrix;

  Index size() const { return matrix.rows(); }
  Eigen::MatrixXd dense() const { return Eigen::MatrixXd(matrix); }

  /// max |A - A^T| / max |A| (zero for the zero matrix).
  double relative_asymmetry() const {
    const SparseMatrix diff = matrix - SparseMatrix(matrix.transpose());
    double num = 0.0, den = 0.0;
    for (int k = 0; k < diff.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(diff, k); it; ++it) num = std::max(num, std::abs(it.value()));
    for (int k = 0; k < matrix.outerSize(); ++k)
      for (SparseMatrix::InnerIterator it(matrix, k); it; ++it) den = std::max(den, std::abs(it.value()));
    return den > 0 ? num / den : 0.0;
  }
};

/// Gradients of the P1 basis functions of a simplex (rows of the inverse
/// Jacobian; the gradient of vertex 0 is minus their sum).
inline std::array<Vec3, 4> p1_gradients(std::span<const Vec3> pts, int dim) {
  Eigen::Matrix3d jac = Eigen::Matrix3d::Identity();
  for (int i = 0; i < dim; ++i)
    for (int c = 0; c < dim; ++c) jac(c, i) = pts[i + 1][c] - pts[0][c];
  const Eigen::Matrix3d inv = jac.inverse();
  std::array<Vec3, 4> g{Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero()};
  for (int i = 0; i < dim; ++i) {
    for (int c = 0; c < dim; ++c) g[i + 1][c] = inv(i, c);
    g[0] -= g[i + 1];
  }
  return g;
}

namespace detail {

struct LocalMatrix {
  std::array<Index, 12> dofs{};
  Eigen::Matrix<double, 12, 12> values;
  int n = 0;
};

/// Sums element contributions in element order so that the result does
/// not depend on how local matrices were computed in parallel.
inline SparseMatrix gather(const std::vector<LocalMatrix>& locals, Index size) {
  std::vector<Triplet> trip;
  for (const auto& lm : locals)
    for (int a = 0; a < lm.n; ++a) {
      if (lm.dofs[a] < 0) continue;
      for (int b = 0; b < lm.n; ++b)
        if (lm.dofs[b] >= 0 && lm.values(a, b) != 0.0) trip.emplace_back(lm.dofs[a], lm.dofs[b], lm.values(a, b));
    }
  SparseMatrix m(size, size);
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return m;
}

inline Eigen::Matrix3d strain_of_basis(const Vec3& grad, int comp) {
  Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
  e.row(comp) += 0.5 * grad.transpose();
  e.col(comp) += 0.5 * grad;
  return e;
}

}  // namespace detail

/// <C eps(u), eps(w)> over the mesh for P1 vector fields. With `free_only`
/// the rows/columns of constrained DOFs are eliminated; otherwise the full
/// node*dim numbering is used.
inline SparseMatrix assemble_tensor_operator(const SimMesh& mesh, const Tensor4& tensor, const DofMap& dofs,
                                             bool free_only) {
  const int d = mesh.dim;
  const int nv = d + 1;
  std::vector<detail::LocalMatrix> locals(mesh.elements.size());
  parallel_for(static_cast<Index>(mesh.elements.size()), [&](Index e) {
    const auto pts = mesh.element_points(e);
    const double vol = std::abs(simplex_measure(pts, d));
    const auto grads = p1_gradients(pts, d);
    auto& lm = locals[e];
    lm.n = nv * d;
    lm.values.setZero();
    std::array<Eigen::Matrix3d, 12> strains;
    for (int a = 0; a < nv; ++a)
      for (int i = 0; i < d; ++i) {
        const Index node = mesh.elements[e][a];
        lm.dofs[a * d + i] = free_only ? dofs.free_index(node, i) : node * d + i;
        strains[a * d + i] = detail::strain_of_basis(grads[a], i);
      }
    for (int r = 0; r < lm.n; ++r)
      for (int c = r; c < lm.n; ++c) {
        const double v = vol * tensor.contract(strains[r], strains[c], d);
        lm.values(r, c) = v;
        lm.values(c, r) = v;
      }
  });
  return detail::gather(locals, free_only ? dofs.num_free() : dofs.num_full());
}

/// Viscosity operator A on the free DOFs.
inline SparseOperator assemble_viscosity(const SimMesh& mesh, const MaterialModel& mat) {
  return {assemble_tensor_operator(mesh, mat.viscosity, DofMap(mesh), true)};
}

/// Elasticity operator G on the free DOFs.
inline SparseOperator assemble_elasticity(const SimMesh& mesh, const MaterialModel& mat) {
  return {assemble_tensor_operator(mesh, mat.elasticity, DofMap(mesh), true)};
}

/// Consistent P1 scalar mass matrix over all nodes.
inline SparseMatrix assemble_scalar_mass(const SimMesh& mesh) {
  const int d = mesh.dim;
  const int nv = d + 1;
  std::vector<detail::LocalMatrix> locals(mesh.elements.size());
  parallel_for(static_cast<Index>(mesh.elements.size()), [&](Index e) {
    const double vol = mesh.element_measure(e);
    auto& lm = locals[e];
    lm.n = nv;
    lm.values.setZero();
    // int phi_a phi_b = vol * (1 + delta_ab) / ((d+1)(d+2))
    const double off = vol / ((d + 1.0) * (d + 2.0));
    for (int a = 0; a < nv; ++a) {
      lm.dofs[a] = mesh.elements[e][a];
      for (int b = 0; b < nv; ++b) lm.values(a, b) = a == b ? 2.0 * off : off;
    }
  });
  return detail::gather(locals, mesh.num_nodes());
}

/// Diagonal matrix of row sums.
inline SparseMatrix lump(const SparseMatrix& m) {
  const Vector rows = m * Vector::Ones(m.cols());
  SparseMatrix l(m.rows(), m.cols());
  l.reserve(Eigen::VectorXi::Constant(m.cols(), 1));
  for (Index i = 0; i < m.rows(); ++i) l.insert(i, i) = rows[i];
  l.makeCompressed();
  return l;
}

/// Vector mass operator (scalar mass times identity per component) on the
/// free DOFs; unit density.
inline SparseOperator assemble_mass(const SimMesh& mesh) {
  const DofMap dofs(mesh);
  const SparseMatrix scalar = assemble_scalar_mass(mesh);
  std::vector<Triplet> trip;
  for (int k = 0; k < scalar.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(scalar, k); it; ++it)
      for (int c = 0; c < mesh.dim; ++c) {
        const Index r = dofs.free_index(it.row(), c), s = dofs.free_index(it.col(), c);
        if (r >= 0 && s >= 0) trip.emplace_back(r, s, it.value());
      }
  SparseMatrix m(dofs.num_free(), dofs.num_free());
  m.setFromTriplets(trip.begin(), trip.end());
  m.makeCompressed();
  return {m};
}

/// Body force f0(x, t) per unit volume and surface traction f2(x, t) per
/// unit area on the Neumann boundary.
struct LoadSpec {
  std::function<Vec3(const Vec3&, double)> body_force;
  std::function<Vec3(const Vec3&, double)> surface_traction;

  static LoadSpec zero() {
    auto z = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    return {z, z};
  }
};

/// Load vector <f(t), w> in the full node*dim numbering (before constraint
/// elimination). Order-2 quadrature on elements and Neumann facets.
inline Vector assemble_load_full(const SimMesh& mesh, const LoadSpec& load, double t) {
  const int d = mesh.dim;
  Vector f = Vector::Zero(mesh.num_nodes() * d);
  auto check = [](const Vec3& v) {
    if (!v.allFinite()) throw std::domain_error("load function returned a non-finite value");
  };
  if (load.body_force) {
    const auto rule = simplex_rule(d, 2);
    for (Index e = 0; e < static_cast<Index>(mesh.elements.size()); ++e) {
      const auto pts = mesh.element_points(e);
      const double vol = std::abs(simplex_measure(pts, d));
      for (const auto& q : rule) {
        Vec3 x = Vec3::Zero();
        for (int a = 0; a <= d; ++a) x += q.bary[a] * pts[a];
        const Vec3 val = load.body_force(x, t);
        check(val);
        for (int a = 0; a <= d; ++a)
          for (int c = 0; c < d; ++c) f[mesh.elements[e][a] * d + c] += q.weight * vol * q.bary[a] * val[c];
      }
    }
  }
  if (load.surface_traction) {
    for (const auto& bf : mesh.boundary_facets) {
      if (bf.marker != Region::Neumann) continue;
      const auto pts = mesh.facet_points(bf);
      for (const auto& q : facet_quadrature(pts, 2)) {
        const Vec3 val = load.surface_traction(q.point, t);
        check(val);
        for (int a = 0; a < d; ++a)
          for (int c = 0; c < d; ++c) f[bf.nodes[a] * d + c] += q.weight * q.bary[a] * val[c];
      }
    }
  }
  return f;
}

/// Free-DOF load vector.
inline Vector assemble_load(const SimMesh& mesh, const LoadSpec& load, double t) {
  return DofMap(mesh).restrict_vector(assemble_load_full(mesh, load, t));
}

/// Coordinate text export: `row col value`, 0-based.
inline void write_coo(std::ostream& out, const SparseMatrix& m) {
  for (int k = 0; k < m.outerSize(); ++k)
    for (SparseMatrix::InnerIterator it(m, k); it; ++it)
      out << it.row() << ' ' << it.col() << ' ' << format_real(it.value()) << '\n';
}

}  // namespace wearsim
