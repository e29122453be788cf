#include "wearsim/mesh_builders.hpp"
#include "wearsim/surface.hpp"
#include "wearsim/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace wearsim;

namespace {

std::optional<Region> bottom_contact(Side s) {
  if (s == Side::Bottom) return Region::Contact;
  if (s == Side::Top) return Region::Dirichlet;
  return Region::Neumann;
}

SurfaceMesh flat_patch(int n) {
  return extract_contact_surface(make_box(1.0, 1.0, 1.0 / n, n, n, 1, bottom_contact));
}

}  // namespace

TEST(SurfaceGradient, Examples) {
  const Vec3 seg[2] = {Vec3(0, 0, 0), Vec3(1, 0, 0)};
  const double c2[2] = {3.0, 3.0};
  EXPECT_EQ(surface_gradient(seg, c2).norm(), 0.0);
  const double lin[2] = {0.0, 1.0};
  EXPECT_NEAR((surface_gradient(seg, lin) - Vec3(1, 0, 0)).norm(), 0.0, 1e-15);

  const Vec3 tri[3] = {Vec3(0.2, 0.1, 0), Vec3(1.3, 0.4, 0), Vec3(0.5, 0.9, 0)};
  const double gx[3] = {0.2, 1.3, 0.5};
  EXPECT_NEAR((surface_gradient(tri, gx) - Vec3(1, 0, 0)).norm(), 0.0, 1e-14);
  const double c3[3] = {-2.0, -2.0, -2.0};
  EXPECT_EQ(surface_gradient(tri, c3).norm(), 0.0);
}

TEST(SurfaceGradient, IsTangentialOnTiltedTriangle) {
  const Vec3 tri[3] = {Vec3(0, 0, 0), Vec3(1, 0, 1), Vec3(0, 1, 0.5)};
  const double vals[3] = {0.3, -1.0, 2.0};
  const Vec3 g = surface_gradient(tri, vals);
  const Vec3 n = (tri[1] - tri[0]).cross(tri[2] - tri[0]);
  EXPECT_NEAR(g.dot(n), 0.0, 1e-14);
  // Reproduces the nodal differences along both edges.
  EXPECT_NEAR(g.dot(tri[1] - tri[0]), vals[1] - vals[0], 1e-14);
  EXPECT_NEAR(g.dot(tri[2] - tri[0]), vals[2] - vals[0], 1e-14);
}

TEST(SurfaceGradient, DegenerateFacetRejected) {
  const Vec3 seg[2] = {Vec3(1, 1, 0), Vec3(1, 1, 0)};
  const double v[2] = {0, 1};
  EXPECT_THROW(surface_gradient(seg, v), MeshError);
}

TEST(LaplaceBeltrami, StructuralInvariants) {
  for (const SurfaceMesh& s : {make_circle_surface(40), flat_patch(6),
                               extract_contact_surface(make_annulus(0.5, 1.0, 30, 2, Region::Dirichlet,
                                                                    Region::Contact))}) {
    const auto op = assemble_laplace_beltrami(s, 0.3);
    EXPECT_LE((op.stiffness * Vector::Ones(s.num_nodes())).norm(), 1e-12);
    EXPECT_NEAR(op.mass.sum(), s.total_measure(), 1e-12 * s.total_measure());
    const Eigen::MatrixXd k(op.stiffness), m(op.mass);
    EXPECT_LE((k - k.transpose()).cwiseAbs().maxCoeff(), 1e-14);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(m).eigenvalues().minCoeff(), 0.0);
    EXPECT_GT(Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(k).eigenvalues().minCoeff(), -1e-12);
    EXPECT_TRUE(passes_m_matrix_check(op));
  }
}

TEST(LaplaceBeltrami, CircleEigenvalueWithinOnePercent) {
  EXPECT_NEAR(verify::circle_first_eigenvalue(256), 1.0, 1e-2);
  // The discrete spectrum of the regular polygon is known in closed form:
  // lambda_1 = (6/h^2) (1 - cos(2 pi/N)) / (2 + cos(2 pi/N)), h = chord.
  const int n = 64;
  const double h = 2 * std::sin(std::numbers::pi / n), c = std::cos(2 * std::numbers::pi / n);
  EXPECT_NEAR(verify::circle_first_eigenvalue(n), 6.0 / (h * h) * (1 - c) / (2 + c), 1e-10);
}

TEST(LaplaceBeltrami, FlatPatchNeumannEigenvalue) {
  const double pi2 = std::numbers::pi * std::numbers::pi;
  EXPECT_NEAR(verify::flat_patch_first_eigenvalue(32), pi2, 0.02 * pi2);
}

TEST(LaplaceBeltrami, InvalidInputs) {
  EXPECT_THROW(assemble_laplace_beltrami(SurfaceMesh{}, 1.0), MeshError);
  try {
    assemble_laplace_beltrami(make_circle_surface(8), 0.0);
    FAIL();
  } catch (const HypothesisError& e) {
    EXPECT_EQ(e.hypothesis(), "kappa");
  }
}

TEST(WearStep, ConstantIsSteadyState) {
  const auto op = assemble_laplace_beltrami(flat_patch(5), 2.0);
  const Vector c = Vector::Constant(op.mass.rows(), 0.37);
  const Vector next = wear_step(op, c, Vector::Zero(c.size()), 0.1);
  EXPECT_LE((next - c).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LE((wear_step(op, c, Vector::Zero(c.size()), 0.1, true) - c).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(WearStep, CosineDecaysAtBackwardEulerRate) {
  const double dt = 0.1, kappa = 0.5;
  double prev = 0.0;
  for (int n : {64, 128, 256}) {
    const SurfaceMesh s = make_circle_surface(n);
    const auto op = assemble_laplace_beltrami(s, kappa);
    Vector th(n);
    for (int i = 0; i < n; ++i) th[i] = std::cos(2 * std::numbers::pi * i / n);
    const Vector next = wear_step(op, th, Vector::Zero(n), dt);
    const double err = (next - th / (1 + dt * kappa)).cwiseAbs().maxCoeff();
    EXPECT_LT(err, 1e-3);
    if (prev > 0) EXPECT_NEAR(prev / err, 4.0, 0.1);  // O(h^2)
    prev = err;
  }
}

TEST(WearStep, UnitSourceMassOnCircleOfLengthTwoPi) {
  const int n = 128;
  // Radius chosen so the polygon has perimeter exactly 2 pi.
  const SurfaceMesh s = make_circle_surface(n, std::numbers::pi / (n * std::sin(std::numbers::pi / n)));
  ASSERT_NEAR(s.total_measure(), 2 * std::numbers::pi, 1e-12);
  const auto op = assemble_laplace_beltrami(s, 1.0);
  const Vector src = assemble_surface_source(s, [](Index, const QuadPoint&) { return 1.0; });
  const Vector th = wear_step(op, Vector::Zero(n), src, 0.1);
  EXPECT_NEAR((op.mass * th).sum(), 0.1 * 2 * std::numbers::pi, 1e-10);
}

TEST(WearStep, ZeroSourceConservesMass) {
  const SurfaceMesh s = flat_patch(8);
  const auto op = assemble_laplace_beltrami(s, 0.2);
  Vector th(s.num_nodes());
  for (Index i = 0; i < th.size(); ++i) th[i] = std::exp(-10 * (s.nodes[i] - Vec3(0.3, 0.6, 0)).squaredNorm());
  const double m0 = (op.mass * th).sum();
  for (int k = 0; k < 200; ++k) th = wear_step(op, th, Vector::Zero(th.size()), 0.05);
  EXPECT_NEAR((op.mass * th).sum(), m0, 1e-12 * m0);
  // Diffusion flattens the profile towards its mean.
  EXPECT_LT(th.maxCoeff() - th.minCoeff(), 0.2);
}

TEST(WearStep, LumpedSchemePreservesNonnegativity) {
  const SurfaceMesh s = make_circle_surface(50);
  const auto op = assemble_laplace_beltrami(s, 1.0);
  ASSERT_TRUE(passes_m_matrix_check(op));
  Vector th = Vector::Zero(50);
  th[7] = 1.0;  // spike
  for (int k = 0; k < 20; ++k) {
    th = wear_step(op, th, Vector::Zero(50), 0.01, true);
    EXPECT_GE(th.minCoeff(), 0.0);
  }
}

TEST(WearCsv, RoundTrip) {
  const SimMesh box = make_box(1, 1, 1, 2, 2, 2, bottom_contact);
  const SurfaceMesh s = extract_contact_surface(box);
  Vector th(s.num_nodes());
  for (Index i = 0; i < th.size(); ++i) th[i] = std::sin(1.0 + i) / 3.0;
  std::stringstream io;
  write_wear_csv(io, s, th);
  const auto rows = read_wear_csv(io);
  ASSERT_EQ(static_cast<Index>(rows.size()), s.num_nodes());
  for (Index i = 0; i < s.num_nodes(); ++i) {
    EXPECT_EQ(rows[i].node_id, s.parent_node_ids[i] + 1);
    EXPECT_EQ(rows[i].theta, th[i]);
    EXPECT_EQ(rows[i].x, s.nodes[i]);
    EXPECT_EQ(box.nodes[rows[i].node_id - 1], rows[i].x);
  }
}
