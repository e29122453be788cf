#include "test_util.hpp"
#include "wearsim/assembly.hpp"
#include "wearsim/material.hpp"
#include "wearsim/mesh_builders.hpp"

#include <Eigen/Eigenvalues>
#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <sstream>

using namespace wearsim;

namespace {

SimMesh unit_square() {
  std::istringstream in(fixtures::kUnitSquareMesh);
  return parse_mesh(in);
}

std::optional<Region> left_clamped(Side s) {
  if (s == Side::Left) return Region::Dirichlet;
  if (s == Side::Bottom) return Region::Contact;
  return Region::Neumann;
}

/// Reference assembly written out from the definition: per element,
///   K[(a,i),(b,k)] = |T| sum_{j,l} C_ijkl d_j phi_a d_l phi_b,
/// with gradients from the explicit inverse of the affine map. Dirichlet
/// nodes are dropped afterwards by index selection.
Eigen::MatrixXd reference_operator(const SimMesh& mesh, const Tensor4& c) {
  const int d = mesh.dim;
  const Index n = mesh.num_nodes() * d;
  Eigen::MatrixXd k = Eigen::MatrixXd::Zero(n, n);
  for (std::size_t e = 0; e < mesh.elements.size(); ++e) {
    Eigen::MatrixXd jac(d, d);
    for (int r = 0; r < d; ++r)
      for (int s = 0; s < d; ++s) jac(s, r) = mesh.nodes[mesh.elements[e][r + 1]][s] - mesh.nodes[mesh.elements[e][0]][s];
    const Eigen::MatrixXd inv = jac.inverse();
    const double vol = std::abs(jac.determinant()) / (d == 2 ? 2.0 : 6.0);
    // grad phi_{a} for a >= 1 is row (a-1) of inv; phi_0 is minus their sum.
    std::vector<Eigen::VectorXd> grad(d + 1, Eigen::VectorXd::Zero(d));
    for (int a = 1; a <= d; ++a) {
      grad[a] = inv.row(a - 1).transpose();
      grad[0] -= grad[a];
    }
    for (int a = 0; a <= d; ++a)
      for (int b = 0; b <= d; ++b)
        for (int i = 0; i < d; ++i)
          for (int kk = 0; kk < d; ++kk) {
            double s = 0;
            for (int j = 0; j < d; ++j)
              for (int l = 0; l < d; ++l) s += c(i, j, kk, l) * grad[a][j] * grad[b][l];
            k(mesh.elements[e][a] * d + i, mesh.elements[e][b] * d + kk) += vol * s;
          }
  }
  const auto clamped = mesh.dirichlet_mask();
  std::vector<Index> keep;
  for (Index i = 0; i < n; ++i)
    if (!clamped[i / d]) keep.push_back(i);
  Eigen::MatrixXd out(keep.size(), keep.size());
  for (std::size_t r = 0; r < keep.size(); ++r)
    for (std::size_t s = 0; s < keep.size(); ++s) out(r, s) = k(keep[r], keep[s]);
  return out;
}

double min_eig(const Eigen::MatrixXd& m) {
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m, Eigen::EigenvaluesOnly).eigenvalues().minCoeff();
}

}  // namespace

TEST(Assembly, ZeroTensorGivesZeroMatrix) {
  const SimMesh m = unit_square();
  const auto mat = MaterialModel::isotropic(2, 0.0, 1.0, 0.0, 0.0);
  EXPECT_EQ(assemble_elasticity(m, mat).matrix.norm(), 0.0);
  const DofMap dofs(m);
  EXPECT_EQ(assemble_tensor_operator(m, Tensor4{}, dofs, true).norm(), 0.0);
}

TEST(Assembly, TwoElementSquareMatchesReference) {
  const SimMesh m = unit_square();
  const auto mat = MaterialModel::isotropic(2, 0.7, 0.4, 2.0, 1.5);
  const Eigen::MatrixXd a = assemble_viscosity(m, mat).dense();
  const Eigen::MatrixXd g = assemble_elasticity(m, mat).dense();
  const Eigen::MatrixXd a_ref = reference_operator(m, mat.viscosity);
  const Eigen::MatrixXd g_ref = reference_operator(m, mat.elasticity);
  ASSERT_EQ(a.rows(), 4);
  EXPECT_LE((a - a_ref).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LE((g - g_ref).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Assembly, UnstructuredMeshesMatchReference) {
  const SimMesh annulus = make_annulus(0.4, 1.0, 10, 2, Region::Dirichlet, Region::Contact);
  const auto mat2 = MaterialModel::isotropic(2, 1.0, 0.3, 0.5, 0.25);
  EXPECT_LE((assemble_viscosity(annulus, mat2).dense() - reference_operator(annulus, mat2.viscosity))
                .cwiseAbs()
                .maxCoeff(),
            1e-13);
  const SimMesh box = make_box(1.0, 0.5, 0.8, 2, 1, 2, left_clamped);
  const auto mat3 = MaterialModel::isotropic(3, 0.2, 0.6, 1.0, 0.4);
  EXPECT_LE(
      (assemble_elasticity(box, mat3).dense() - reference_operator(box, mat3.elasticity)).cwiseAbs().maxCoeff(),
      1e-13);
}

TEST(Assembly, OperatorsSpdAndSymmetric) {
  for (const SimMesh& m : {make_rectangle(1.0, 1.0, 5, 5, left_clamped),
                           make_annulus(0.5, 1.0, 12, 2, Region::Dirichlet, Region::Contact),
                           make_box(1, 1, 1, 2, 2, 2, left_clamped)}) {
    const auto mat = MaterialModel::isotropic(m.dim, 0.5, 0.5, 1.0, 1.0);
    const auto a = assemble_viscosity(m, mat), g = assemble_elasticity(m, mat), ms = assemble_mass(m);
    ASSERT_LE(a.size(), 200);
    EXPECT_GT(min_eig(a.dense()), 0.0);
    EXPECT_GT(min_eig(ms.dense()), 0.0);
    EXPECT_GT(min_eig(g.dense()), -1e-10);
    EXPECT_LE(a.relative_asymmetry(), 1e-12);
    EXPECT_LE(g.relative_asymmetry(), 1e-12);
    EXPECT_LE(ms.relative_asymmetry(), 1e-12);
  }
}

TEST(Assembly, DiscreteCoercivityAgainstIdentityTensor) {
  // x^T A x >= alpha x^T K1 x with K1 assembled from the identity on
  // symmetric matrices.
  const SimMesh m = make_rectangle(1.0, 1.0, 4, 4, left_clamped);
  const auto mat = MaterialModel::isotropic(2, -0.2, 0.5, 1.0, 1.0);
  ASSERT_GT(mat.coercivity_alpha, 0.0);
  const DofMap dofs(m);
  const Eigen::MatrixXd a = assemble_viscosity(m, mat).dense();
  const Eigen::MatrixXd k1 = Eigen::MatrixXd(assemble_tensor_operator(m, Tensor4::symmetric_identity(2), dofs, true));
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(a, k1, Eigen::EigenvaluesOnly);
  EXPECT_GE(es.eigenvalues().minCoeff(), mat.coercivity_alpha * (1 - 1e-10));
}

TEST(Mass, UnitSquareTotalIsArea) {
  const SimMesh m = make_rectangle(1.0, 1.0, 6, 5, left_clamped);
  EXPECT_NEAR(assemble_scalar_mass(m).sum(), 1.0, 1e-12);
  EXPECT_NEAR(assemble_scalar_mass(unit_square()).sum(), 1.0, 1e-12);
}

TEST(Mass, ReferenceTriangleClosedForm) {
  SimMesh m;
  m.dim = 2;
  m.nodes = {Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)};
  m.elements = {{0, 1, 2, -1}};
  m.boundary_facets = {{Region::Dirichlet, {0, 1, -1, -1}}};
  validate_mesh(m);
  const Eigen::MatrixXd got(assemble_scalar_mass(m));
  Eigen::Matrix3d expect;
  expect << 2, 1, 1, 1, 2, 1, 1, 1, 2;
  expect *= 0.5 / 12.0;
  EXPECT_LE((got - expect).cwiseAbs().maxCoeff(), 1e-16);
}

TEST(Mass, LumpedDiagonalIsRowSum) {
  const SparseMatrix m = assemble_scalar_mass(make_annulus(0.5, 1.0, 16, 2, Region::Dirichlet, Region::Contact));
  const SparseMatrix l = lump(m);
  const Vector rows = m * Vector::Ones(m.cols());
  const Eigen::MatrixXd ld(l);
  for (Index i = 0; i < m.rows(); ++i) {
    EXPECT_DOUBLE_EQ(ld(i, i), rows[i]);
    EXPECT_EQ(ld.row(i).cwiseAbs().sum(), std::abs(ld(i, i)));
  }
}

TEST(Load, ZeroLoadsGiveZeroVector) {
  EXPECT_EQ(assemble_load(unit_square(), LoadSpec::zero(), 0.3).norm(), 0.0);
}

TEST(Load, GravityTotalOnUnitSquare) {
  const SimMesh m = make_rectangle(1.0, 1.0, 3, 4, left_clamped);
  LoadSpec load = LoadSpec::zero();
  load.body_force = [](const Vec3&, double) { return Vec3(0, -1, 0); };
  const Vector f = assemble_load_full(m, load, 0.0);
  double fx = 0, fy = 0;
  for (Index n = 0; n < m.num_nodes(); ++n) {
    fx += f[2 * n];
    fy += f[2 * n + 1];
  }
  EXPECT_NEAR(fy, -1.0, 1e-14);
  EXPECT_NEAR(fx, 0.0, 1e-14);
}

TEST(Load, TractionTotalOnHalfEdge) {
  const SimMesh m = make_rectangle(1.0, 0.5, 4, 2, [](Side s) -> std::optional<Region> {
    if (s == Side::Right) return Region::Neumann;
    return s == Side::Left ? Region::Dirichlet : Region::Contact;
  });
  LoadSpec load = LoadSpec::zero();
  load.surface_traction = [](const Vec3&, double) { return Vec3(1, 0, 0); };
  const Vector f = assemble_load_full(m, load, 0.0);
  double fx = 0;
  for (Index n = 0; n < m.num_nodes(); ++n) fx += f[2 * n];
  EXPECT_NEAR(fx, 0.5, 1e-14);
}

TEST(Load, LinearBodyForceIntegratedExactly) {
  // int_T x phi_a is reproduced exactly by the order-2 rule: total x-moment
  // of f0 = (x, 0) over the unit square is 1/2.
  const SimMesh m = make_rectangle(1.0, 1.0, 3, 3, left_clamped);
  LoadSpec load = LoadSpec::zero();
  load.body_force = [](const Vec3& x, double t) { return Vec3(x.x() * (1 + t), 0, 0); };
  const Vector f = assemble_load_full(m, load, 1.0);
  double fx = 0;
  for (Index n = 0; n < m.num_nodes(); ++n) fx += f[2 * n];
  EXPECT_NEAR(fx, 1.0, 1e-14);
}

TEST(Load, NonFiniteLoadRejected) {
  LoadSpec load = LoadSpec::zero();
  load.body_force = [](const Vec3&, double) { return Vec3(std::nan(""), 0, 0); };
  EXPECT_THROW(assemble_load(unit_square(), load, 0.0), std::domain_error);
}

TEST(Assembly, DeterministicAcrossThreadCounts) {
  const SimMesh m = make_box(1, 1, 1, 4, 4, 4, left_clamped);
  const auto mat = MaterialModel::isotropic(3, 0.5, 0.5, 1.0, 1.0);
  ::setenv("WEARSIM_THREADS", "1", 1);
  const SparseMatrix a1 = assemble_viscosity(m, mat).matrix;
  const SparseMatrix s1 = assemble_scalar_mass(m);
  ::setenv("WEARSIM_THREADS", "4", 1);
  const SparseMatrix a4 = assemble_viscosity(m, mat).matrix;
  const SparseMatrix s4 = assemble_scalar_mass(m);
  ::setenv("WEARSIM_THREADS", "1", 1);
  ASSERT_EQ(a1.nonZeros(), a4.nonZeros());
  EXPECT_EQ(std::memcmp(a1.valuePtr(), a4.valuePtr(), sizeof(double) * a1.nonZeros()), 0);
  EXPECT_EQ(std::memcmp(s1.valuePtr(), s4.valuePtr(), sizeof(double) * s1.nonZeros()), 0);
  EXPECT_EQ(std::memcmp(a1.innerIndexPtr(), a4.innerIndexPtr(), sizeof(int) * a1.nonZeros()), 0);
}

TEST(Assembly, CooExportRoundTrip) {
  const SparseMatrix m = assemble_mass(unit_square()).matrix;
  std::ostringstream os;
  write_coo(os, m);
  std::istringstream in(os.str());
  Eigen::MatrixXd back = Eigen::MatrixXd::Zero(m.rows(), m.cols());
  Index r, c;
  double v;
  int lines = 0;
  while (in >> r >> c >> v) {
    back(r, c) = v;
    ++lines;
  }
  EXPECT_EQ(lines, m.nonZeros());
  EXPECT_EQ((back - Eigen::MatrixXd(m)).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Material, HypothesisViolationsRejected) {
  EXPECT_THROW(MaterialModel::isotropic(2, 0.0, 0.0, 1.0, 1.0), HypothesisError);   // alpha = 0
  EXPECT_THROW(MaterialModel::isotropic(2, 1.0, 1.0, 1.0, -1.0), HypothesisError);  // B indefinite
  MaterialModel m = MaterialModel::isotropic(2, 1.0, 1.0, 1.0, 1.0);
  m.viscosity(0, 1, 0, 0) += 0.1;  // breaks a_ijkl = a_jikl
  EXPECT_THROW(validate_material(m), HypothesisError);
  m = MaterialModel::isotropic(2, 1.0, 1.0, 1.0, 1.0);
  m.elasticity(0, 0, 0, 0) = std::numeric_limits<double>::infinity();
  EXPECT_THROW(validate_material(m), HypothesisError);
  m = MaterialModel::isotropic(2, 1.0, 1.0, 1.0, 1.0);
  m.coercivity_alpha = 10.0;  // declared bound larger than the true one
  EXPECT_THROW(validate_material(m), HypothesisError);
}

TEST(Material, IsotropicAlphaIsMinimumEigenvalue) {
  // On symmetric 2x2 matrices the isotropic tensor has eigenvalues 2 mu
  // (deviatoric) and 2 mu + d lambda (spherical).
  EXPECT_NEAR(MaterialModel::isotropic(2, 0.5, 0.25, 0, 0).coercivity_alpha, 0.5, 1e-14);
  EXPECT_NEAR(MaterialModel::isotropic(3, -0.1, 0.5, 0, 0).coercivity_alpha, 0.7, 1e-14);
}
