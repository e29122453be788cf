#pragma once

// Boundary laws on the contact surface: normal compliance, the friction
// modulus and regularized friction selection, the Archard-type wear source
// and the radial truncations used inside the coupling loop.

#include "wearsim/common.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace wearsim {

enum class FrictionMode { CoulombCompliance, ConstantBound };

struct NormalLaw {
  double stiffness = 1.0;  ///< lambda_nu_c
  double exponent = 1.0;   ///< m >= 1
  std::function<double(const Vec3&)> gap;  ///< g(x); empty means zero
};

struct FrictionLaw {
  double mu = 0.0;
  FrictionMode mode = FrictionMode::CoulombCompliance;
  double c1tau = 1.0;         ///< bound on |xi|
  double eps_reg = 1e-4;      ///< regularization of the subdifferential of |.|
  double tau_constant = 0.0;  ///< modulus in ConstantBound mode
  double c_theta = 0.0;       ///< optional wear factor (1 + c_theta M_l(theta))
};

struct WearLaw {
  double rate = 0.0;   ///< eta
  double kappa = 1.0;  ///< diffusivity
  std::vector<bool> facet_mask;  ///< per surface facet; empty means all facets generate wear
};

struct ContactModel {
  NormalLaw normal;
  FrictionLaw friction;
  WearLaw wear;
  double truncation_l = 1e6;
  // Declared growth constants; non-positive values are derived from the
  // law parameters during validation.
  double c_nu = 0.0;
  double c_tau = 0.0;
  double c_w = 0.0;

  double gap(const Vec3& x) const { return normal.gap ? normal.gap(x) : 0.0; }
};

/// Position and outward normal at a contact quadrature point.
struct ContactPoint {
  Vec3 x = Vec3::Zero();
  Vec3 normal = Vec3::UnitX();
};

inline Vec3 tangential_part(const Vec3& w, const Vec3& normal) { return w - w.dot(normal) * normal; }

/// p_nu(u_nu - g) = lambda (u_nu - g)_+^m
inline double normal_compliance(double u_nu, const Vec3& x, const ContactModel& cm) {
  const double pen = u_nu - cm.gap(x);
  if (!(pen > 0.0)) return 0.0;
  return cm.normal.stiffness * (cm.normal.exponent == 1.0 ? pen : std::pow(pen, cm.normal.exponent));
}

/// h_nu(u) for a displacement vector at a contact point.
inline double normal_compliance(const Vec3& u, const ContactPoint& p, const ContactModel& cm) {
  return normal_compliance(u.dot(p.normal), p.x, cm);
}

/// Regularized selection from the subdifferential of |.| at v_tau:
/// v_tau / sqrt(|v_tau|^2 + eps^2). Returns zero at v_tau = 0.
inline Vec3 friction_selection(const Vec3& v_tau, double eps_reg) {
  const double n2 = v_tau.squaredNorm();
  if (n2 == 0.0) return Vec3::Zero();
  return v_tau / std::sqrt(n2 + eps_reg * eps_reg);
}

inline Vec3 friction_selection(const Vec3& v_tau, const ContactModel& cm) {
  return friction_selection(v_tau, cm.friction.eps_reg);
}

/// h_tau(u, v, theta) >= 0. Inputs are the (already truncated) traces.
inline double friction_modulus(const Vec3& u, const Vec3& /*v*/, double theta, const ContactPoint& p,
                               const ContactModel& cm) {
  const auto& fr = cm.friction;
  if (fr.mode == FrictionMode::ConstantBound) return std::max(0.0, fr.tau_constant);
  if (fr.mu == 0.0) return 0.0;
  const double factor = fr.c_theta == 0.0 ? 1.0 : std::max(0.0, 1.0 + fr.c_theta * theta);
  return fr.mu * normal_compliance(u, p, cm) * factor;
}

/// Archard rate h_w = eta mu p_nu(u_nu - g) |v_tau|.
inline double wear_source(const Vec3& u, const Vec3& v, const ContactPoint& p, const ContactModel& cm) {
  if (cm.wear.rate == 0.0 || cm.friction.mu == 0.0) return 0.0;
  const double pn = normal_compliance(u, p, cm);
  if (pn == 0.0) return 0.0;
  return cm.wear.rate * cm.friction.mu * pn * tangential_part(v, p.normal).norm();
}

/// N_l: identity on the ball of radius l, radial projection outside.
template <class V>
V truncate_vector(const V& x, double l) {
  const double n = x.norm();
  if (n <= l) return x;
  return (x / n) * l;
}

/// M_l: clamp to [-l, l].
inline double truncate_scalar(double x, double l) {
  if (std::abs(x) <= l) return x;
  return x > 0 ? l : -l;
}

namespace detail {

inline Vec3 random_ball_vector(std::mt19937_64& rng, double radius, int dim) {
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Vec3 v = Vec3::Zero();
  for (int c = 0; c < dim; ++c) v[c] = normal(rng);
  const double n = v.norm();
  if (n == 0.0) return v;
  return v / n * radius * std::pow(unit(rng), 1.0 / dim);
}

}  // namespace detail

/// Positivity of the model constants and sampled growth checks (H4)-(H8)
/// over truncated arguments |u|, |v|, |theta| <= l at the given surface
/// positions. Growth constants left non-positive are replaced by values
/// derived from the law parameters.
inline ContactModel validate_contact_model(ContactModel cm, int dim, const std::vector<Vec3>& positions = {},
                                           unsigned seed = 42, int samples = 2000) {
  auto require = [](bool ok, const char* hyp, const std::string& msg) {
    if (!ok) throw HypothesisError(hyp, msg);
  };
  require(cm.wear.kappa > 0.0, "kappa", "wear diffusivity kappa must be positive (required for existence)");
  require(cm.normal.stiffness > 0.0, "H5", "normal compliance stiffness must be positive");
  require(cm.normal.exponent >= 1.0, "H5", "normal compliance exponent must be >= 1");
  require(cm.truncation_l > 0.0, "truncation", "truncation level l must be positive");
  require(cm.friction.c1tau >= 1.0, "H8", "selection bound c1tau must be >= 1 for j = |.|");
  require(cm.friction.eps_reg > 0.0, "H8", "friction regularization eps_reg must be positive");
  require(cm.friction.mu >= 0.0, "H6", "friction coefficient must be non-negative");
  require(cm.friction.tau_constant >= 0.0, "H6", "constant friction bound must be non-negative");
  require(cm.wear.rate >= 0.0, "H4", "wear rate must be non-negative");

  std::vector<Vec3> xs = positions.empty() ? std::vector<Vec3>{Vec3::Zero()} : positions;
  double gmax = 0.0;
  for (const auto& x : xs) {
    const double g = cm.gap(x);
    require(std::isfinite(g), "H5", "gap function is not finite");
    gmax = std::max(gmax, std::abs(g));
  }
  const double l = cm.truncation_l;
  // (|u| + g)^m <= (l + g)^(m-1) (|u| + g) on the truncated range |u| <= l.
  const double lam = cm.normal.stiffness * std::pow(std::max(1.0, l + gmax), cm.normal.exponent - 1.0);
  if (!(cm.c_nu > 0)) cm.c_nu = lam * (1.0 + gmax);
  if (!(cm.c_tau > 0)) {
    cm.c_tau = cm.friction.mode == FrictionMode::ConstantBound
                   ? std::max(cm.friction.tau_constant, 1e-300)
                   : std::max(cm.friction.mu * lam * (1.0 + gmax) * (1.0 + std::abs(cm.friction.c_theta) * l), 1e-300);
  }
  if (!(cm.c_w > 0)) cm.c_w = std::max(cm.wear.rate * cm.friction.mu * lam * (1.0 + gmax), 1e-300);

  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<std::size_t> pick(0, xs.size() - 1);
  for (int s = 0; s < samples; ++s) {
    ContactPoint p;
    p.x = xs[pick(rng)];
    p.normal = detail::random_ball_vector(rng, 1.0, dim);
    if (p.normal.norm() == 0.0) continue;
    p.normal.normalize();
    // Mix sample radii so both small and large arguments are probed.
    const double scale = 10.0 * l * std::pow(10.0, -6.0 * (s % 7) / 6.0);
    // The laws are only ever evaluated at truncated arguments.
    const Vec3 u = truncate_vector(detail::random_ball_vector(rng, scale, dim), l);
    const Vec3 v = truncate_vector(detail::random_ball_vector(rng, scale, dim), l);
    const double theta = truncate_scalar(std::uniform_real_distribution<double>(-scale, scale)(rng), l);
    const double slack = 1.0 + 1e-12;
    const double hn = normal_compliance(u, p, cm);
    require(std::isfinite(hn) && hn <= slack * cm.c_nu * (1.0 + u.norm()), "H5",
            "normal compliance violates |h_nu(u)| <= C_nu (1 + |u|)");
    const double ht = friction_modulus(u, v, theta, p, cm);
    require(std::isfinite(ht) && ht >= 0.0 && ht <= slack * cm.c_tau * (1.0 + u.norm() + v.norm() + std::abs(theta)),
            "H6", "friction modulus violates 0 <= h_tau <= C_tau (1 + |u| + |v| + |theta|)");
    const double hw = wear_source(u, v, p, cm);
    require(std::isfinite(hw) && hw <= slack * cm.c_w * (1.0 + u.squaredNorm() + v.squaredNorm()), "H4",
            "wear source violates |h_w| <= C_w (1 + |u|^2 + |v|^2)");
    const Vec3 vt = tangential_part(v, p.normal);
    const Vec3 xi = friction_selection(vt, cm);
    require(xi.norm() <= cm.friction.c1tau * slack, "H8", "friction selection exceeds c1tau");
    require(xi.dot(vt) >= 0.0, "H7", "friction selection violates xi . v_tau >= 0");
  }
  return cm;
}

}  // namespace wearsim
