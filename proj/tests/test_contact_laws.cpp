#include "wearsim/contact_laws.hpp"
#include "wearsim/verify.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace wearsim;

namespace {

ContactModel model(double lam, double m, double g) {
  ContactModel cm;
  cm.normal.stiffness = lam;
  cm.normal.exponent = m;
  cm.normal.gap = [g](const Vec3&) { return g; };
  return cm;
}

// Bottom-edge contact point: outward normal -y.
const ContactPoint kBottom{Vec3(0.5, 0, 0), Vec3(0, -1, 0)};

}  // namespace

TEST(NormalCompliance, Examples) {
  EXPECT_EQ(normal_compliance(-0.3, Vec3::Zero(), model(1, 1, 0)), 0.0);
  EXPECT_EQ(normal_compliance(0.5, Vec3::Zero(), model(1, 1, 0)), 0.5);
  EXPECT_NEAR(normal_compliance(0.6, Vec3::Zero(), model(10, 2, 0.1)), 2.5, 1e-14);
}

TEST(NormalCompliance, UsesOutwardNormalComponent) {
  // Moving down (along the outward normal) penetrates the foundation.
  EXPECT_NEAR(normal_compliance(Vec3(0.7, -0.2, 0), kBottom, model(3, 1, 0)), 0.6, 1e-15);
  EXPECT_EQ(normal_compliance(Vec3(0.7, 0.2, 0), kBottom, model(3, 1, 0)), 0.0);
}

TEST(NormalCompliance, MonotoneAndNonnegative) {
  const ContactModel cm = model(5, 1.5, 0.05);
  double prev = 0.0;
  for (double u = -1; u <= 1; u += 0.01) {
    const double p = normal_compliance(u, Vec3::Zero(), cm);
    EXPECT_GE(p, 0.0);
    EXPECT_GE(p, prev);
    prev = p;
  }
}

TEST(FrictionSelection, Examples) {
  EXPECT_EQ(friction_selection(Vec3::Zero(), 1e-4), Vec3::Zero());
  const Vec3 lim = friction_selection(Vec3(3, 4, 0), 1e-12);
  EXPECT_NEAR((lim - Vec3(0.6, 0.8, 0)).norm(), 0.0, 1e-15);
  const Vec3 reg = friction_selection(Vec3(3, 4, 0), 5.0);
  EXPECT_NEAR(reg.x(), 3 / std::sqrt(50.0), 1e-15);
  EXPECT_NEAR(reg.y(), 4 / std::sqrt(50.0), 1e-15);
  EXPECT_NEAR(reg.x(), 0.4243, 5e-5);
  EXPECT_NEAR(reg.y(), 0.5657, 5e-5);
}

TEST(FrictionSelection, BoundSignAndConsistency) {
  std::mt19937_64 rng(7);
  std::normal_distribution<double> nd(0, 1);
  for (int s = 0; s < 10000; ++s) {
    const Vec3 v(nd(rng) * std::pow(10, s % 9 - 4), nd(rng), s % 2 ? nd(rng) : 0.0);
    const double eps = std::pow(10.0, -(s % 6));
    const Vec3 xi = friction_selection(v, eps);
    EXPECT_LE(xi.norm(), 1.0 + 1e-15);
    EXPECT_GE(xi.dot(v), 0.0);
    // |xi - v/|v|| = 1 - |v|/sqrt(|v|^2+eps^2) <= eps^2 / (2 |v|^2)
    const double n = v.norm();
    EXPECT_LE((xi - v / n).norm(), eps * eps / (2 * n * n) * (1 + 1e-9) + 1e-15);
  }
}

TEST(FrictionModulus, Examples) {
  ContactModel cm = model(1, 1, 0);
  cm.friction.mu = 0.0;
  EXPECT_EQ(friction_modulus(Vec3(0, -2, 0), Vec3(1, 0, 0), 0.0, kBottom, cm), 0.0);
  cm.friction.mu = 0.3;
  EXPECT_NEAR(friction_modulus(Vec3(0, -2.5, 0), Vec3(1, 0, 0), 0.0, kBottom, cm), 0.75, 1e-15);
  for (double theta : {-5.0, 0.0, 3.0})
    EXPECT_EQ(friction_modulus(Vec3(0, 0.4, 0), Vec3(9, 0, 0), theta, kBottom, cm), 0.0);
  cm.friction.mode = FrictionMode::ConstantBound;
  cm.friction.tau_constant = 0.4;
  EXPECT_EQ(friction_modulus(Vec3(0, 0.4, 0), Vec3::Zero(), 0.0, kBottom, cm), 0.4);
}

TEST(FrictionModulus, WearFactor) {
  ContactModel cm = model(1, 1, 0);
  cm.friction.mu = 0.5;
  cm.friction.c_theta = 0.2;
  EXPECT_NEAR(friction_modulus(Vec3(0, -2, 0), Vec3::Zero(), 1.5, kBottom, cm), 0.5 * 2 * 1.3, 1e-15);
  EXPECT_EQ(friction_modulus(Vec3(0, -2, 0), Vec3::Zero(), -10.0, kBottom, cm), 0.0);
}

TEST(WearSource, Examples) {
  ContactModel cm = model(1, 1, 0);
  cm.friction.mu = 0.3;
  cm.wear.rate = 0.01;
  EXPECT_NEAR(wear_source(Vec3(0, -2.5, 0), Vec3(2, 0, 0), kBottom, cm), 0.015, 1e-15);
  // Normal velocity does not count as sliding.
  EXPECT_NEAR(wear_source(Vec3(0, -2.5, 0), Vec3(2, -7, 0), kBottom, cm), 0.015, 1e-15);
  EXPECT_EQ(wear_source(Vec3(0, 0.1, 0), Vec3(2, 0, 0), kBottom, cm), 0.0);
  EXPECT_EQ(wear_source(Vec3(0, -2.5, 0), Vec3(0, -1, 0), kBottom, cm), 0.0);
}

TEST(Truncation, Examples) {
  const Eigen::Vector2d x(3, 4);
  EXPECT_EQ(truncate_vector(x, 5.0), x);
  const Eigen::Vector2d y = truncate_vector(x, 2.0);
  EXPECT_NEAR(y.x(), 1.2, 1e-15);
  EXPECT_NEAR(y.y(), 1.6, 1e-15);
  EXPECT_EQ(truncate_scalar(-7.0, 2.0), -2.0);
  EXPECT_EQ(truncate_scalar(1.5, 2.0), 1.5);
}

TEST(Truncation, LipschitzOneMonteCarlo) {
  EXPECT_LE(verify::truncation_lipschitz_ratio(100000, 42), 1.0 + 1e-12);
  EXPECT_LE(verify::truncation_lipschitz_ratio(20000, 1234), 1.0 + 1e-12);
}

TEST(Truncation, IdempotentAndBounded) {
  std::mt19937_64 rng(3);
  for (int s = 0; s < 2000; ++s) {
    const Vec3 x = detail::random_ball_vector(rng, 50.0, 3);
    const Vec3 t = truncate_vector(x, 4.0);
    EXPECT_LE(t.norm(), 4.0 * (1 + 1e-15));
    EXPECT_LE((truncate_vector(t, 4.0) - t).norm(), 1e-14);
  }
}

TEST(ContactValidation, DerivesGrowthConstantsAndAcceptsDefaults) {
  ContactModel cm = model(10, 1, 0.1);
  cm.friction.mu = 0.3;
  cm.wear.rate = 0.01;
  const ContactModel v = validate_contact_model(cm, 2, {Vec3(0, 0, 0), Vec3(1, 0, 0)});
  EXPECT_NEAR(v.c_nu, 11.0, 1e-12);
  EXPECT_NEAR(v.c_tau, 3.3, 1e-12);
  EXPECT_NEAR(v.c_w, 0.033, 1e-12);
}

TEST(ContactValidation, SuperlinearExponentWithTruncation) {
  ContactModel cm = model(2, 2, 0);
  cm.truncation_l = 10.0;
  cm.friction.mu = 0.2;
  EXPECT_NO_THROW(validate_contact_model(cm, 3));
}

TEST(ContactValidation, RejectsViolations) {
  auto hypothesis_of = [](ContactModel cm, unsigned seed = 42) -> std::string {
    try {
      validate_contact_model(std::move(cm), 2, {}, seed);
    } catch (const HypothesisError& e) {
      return e.hypothesis();
    }
    return "";
  };
  ContactModel cm = model(1, 1, 0);
  cm.wear.kappa = 0.0;
  EXPECT_EQ(hypothesis_of(cm), "kappa");
  cm = model(0, 1, 0);
  EXPECT_EQ(hypothesis_of(cm), "H5");
  cm = model(1, 0.5, 0);
  EXPECT_EQ(hypothesis_of(cm), "H5");
  cm = model(1, 1, 0);
  cm.friction.mu = -0.1;
  EXPECT_EQ(hypothesis_of(cm), "H6");
  cm = model(1, 1, 0);
  cm.friction.eps_reg = 0.0;
  EXPECT_EQ(hypothesis_of(cm), "H8");
  cm = model(1, 1, 0);
  cm.wear.rate = -1;
  EXPECT_EQ(hypothesis_of(cm), "H4");
  // A declared growth constant that is too small is caught by sampling.
  cm = model(1, 1, 0);
  cm.c_nu = 1e-3;
  EXPECT_EQ(hypothesis_of(cm), "H5");
  cm = model(1, 1, 0);
  cm.friction.mu = 1.0;
  cm.wear.rate = 1.0;
  cm.c_w = 1e-6;
  EXPECT_EQ(hypothesis_of(cm), "H4");
}
