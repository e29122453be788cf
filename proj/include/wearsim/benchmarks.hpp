#pragma once

// Built-in problem setups shared by `wearsim verify`, the test suites and
// the acceptance run.

#include "wearsim/mesh_builders.hpp"
#include "wearsim/solver.hpp"

#include <cmath>
#include <numbers>

namespace wearsim::bench {

struct Case {
  CoupledProblem problem;
  SystemState initial;
};

/// Unit square clamped on top, traction-free sides, compliant contact on the
/// bottom edge. A downward body force presses the block onto the foundation
/// while a travelling tangential body force drags it back and forth.
struct CoulombBenchmark {
  int cells = 8;
  double dt = 0.01;
  double t_end = 1.0;
  double mu = 0.3;
  double stiffness = 10.0;
  double eps_reg = 1e-2;
  double wear_rate = 0.01;
  double kappa = 0.1;
  double truncation_l = 1e6;
  double picard_tol = 1e-8;
  int picard_max = 50;
  // The frozen-selection iteration oscillates in stick zones; halving the
  // update damps the oscillating mode.
  double relaxation = 0.5;

  Case build() const {
    auto mesh = make_rectangle(1.0, 1.0, cells, cells, [](Side s) -> std::optional<Region> {
      if (s == Side::Top) return Region::Dirichlet;
      if (s == Side::Bottom) return Region::Contact;
      return Region::Neumann;
    });
    auto mat = MaterialModel::isotropic(2, 0.5, 0.5, 1.0, 1.0);
    ContactModel cm;
    cm.normal.stiffness = stiffness;
    cm.friction.mu = mu;
    cm.friction.eps_reg = eps_reg;
    cm.wear.rate = wear_rate;
    cm.wear.kappa = kappa;
    cm.truncation_l = truncation_l;
    LoadSpec load;
    load.body_force = [](const Vec3& x, double t) {
      return Vec3(0.5 * std::sin(2.0 * std::numbers::pi * (x.x() - 0.5 * t)), -1.0, 0.0);
    };
    load.surface_traction = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    cfg.picard_tol = picard_tol;
    cfg.picard_max = picard_max;
    cfg.relaxation = relaxation;
    CoupledProblem p(std::move(mesh), mat, cm, load, cfg);
    SystemState init = p.zero_state();
    return {std::move(p), std::move(init)};
  }
};

/// Purely viscous block (zero elasticity) clamped on top, pre-compressed on
/// the bottom contact edge and sheared by a constant body force. The
/// initial velocity is the steady shear profile, so the contact points keep
/// sliding at |v_tau| near 0.7.
struct SlidingBlock {
  int cells = 8;
  double dt = 0.01;
  int steps = 10;
  double eps_reg = 1e-2;

  Case build() const {
    auto mesh = make_rectangle(1.0, 1.0, cells, cells, [](Side s) -> std::optional<Region> {
      if (s == Side::Top) return Region::Dirichlet;
      if (s == Side::Bottom) return Region::Contact;
      return Region::Neumann;
    });
    auto mat = MaterialModel::isotropic(2, 0.0, 1.0, 0.0, 0.0);
    ContactModel cm;
    cm.normal.stiffness = 100.0;
    cm.normal.gap = [](const Vec3&) { return -0.01; };
    cm.friction.mu = 0.3;
    cm.friction.eps_reg = eps_reg;
    cm.wear.rate = 0.01;
    cm.wear.kappa = 0.1;
    LoadSpec load;
    load.body_force = [](const Vec3&, double) { return Vec3(2.0, -1.0, 0.0); };
    load.surface_traction = [](const Vec3&, double) { return Vec3::Zero().eval(); };
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = dt * steps;
    CoupledProblem p(std::move(mesh), mat, cm, load, cfg);
    SystemState init = p.initial_state(
        {}, [](const Vec3& x) { return Vec3(0.7 + 0.3 * x.y() - x.y() * x.y(), 0.0, 0.0); }, {});
    return {std::move(p), std::move(init)};
  }
};

/// Manufactured solution u*(x, t) = x (a sin(w t), b (1 - cos(w t))) on the
/// unit square clamped at x = 0. It lies in the P1 space, so the only
/// discretization error is temporal; body force and Neumann tractions are
/// computed from the isotropic constitutive law.
struct ManufacturedSolution {
  int cells = 8;
  double t_end = 1.0;
  double a = 0.1, b = 0.05, omega = 2.0 * std::numbers::pi;
  double a_lambda = 0.5, a_mu = 0.5, b_lambda = 1.0, b_mu = 1.0;

  double p(double t) const { return a * std::sin(omega * t); }
  double q(double t) const { return b * (1.0 - std::cos(omega * t)); }
  double dp(double t) const { return a * omega * std::cos(omega * t); }
  double dq(double t) const { return b * omega * std::sin(omega * t); }
  double ddp(double t) const { return -a * omega * omega * std::sin(omega * t); }
  double ddq(double t) const { return b * omega * omega * std::cos(omega * t); }

  Vec3 displacement(const Vec3& x, double t) const { return {x.x() * p(t), x.x() * q(t), 0.0}; }
  Vec3 velocity(const Vec3& x, double t) const { return {x.x() * dp(t), x.x() * dq(t), 0.0}; }

  /// Cauchy stress of the manufactured fields (constant in space).
  Eigen::Matrix2d stress(double t) const {
    Eigen::Matrix2d s;
    s(0, 0) = (a_lambda + 2 * a_mu) * dp(t) + (b_lambda + 2 * b_mu) * p(t);
    s(1, 1) = a_lambda * dp(t) + b_lambda * p(t);
    s(0, 1) = s(1, 0) = a_mu * dq(t) + b_mu * q(t);
    return s;
  }

  Case build(double dt) const {
    auto mesh = make_rectangle(1.0, 1.0, cells, cells, [](Side side) -> std::optional<Region> {
      return side == Side::Left ? Region::Dirichlet : Region::Neumann;
    });
    auto mat = MaterialModel::isotropic(2, a_lambda, a_mu, b_lambda, b_mu);
    LoadSpec load;
    load.body_force = [s = *this](const Vec3& x, double t) { return Vec3(x.x() * s.ddp(t), x.x() * s.ddq(t), 0.0); };
    load.surface_traction = [s = *this](const Vec3& x, double t) {
      Eigen::Vector2d n(0.0, 0.0);
      if (std::abs(x.x() - 1.0) < 1e-12) n = {1.0, 0.0};
      else if (std::abs(x.y() - 1.0) < 1e-12) n = {0.0, 1.0};
      else if (std::abs(x.y()) < 1e-12) n = {0.0, -1.0};
      const Eigen::Vector2d tr = s.stress(t) * n;
      return Vec3(tr.x(), tr.y(), 0.0);
    };
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = t_end;
    CoupledProblem pb(std::move(mesh), mat, ContactModel{}, load, cfg);
    SystemState init = pb.initial_state([s = *this](const Vec3& x) { return s.displacement(x, 0.0); },
                                        [s = *this](const Vec3& x) { return s.velocity(x, 0.0); }, {});
    return {std::move(pb), std::move(init)};
  }

  /// Nodal l2 error of the final velocity against v*(T).
  double velocity_error(const Case& c, const SystemState& final_state) const {
    const auto& pb = c.problem;
    Vector exact_full = Vector::Zero(pb.dofs().num_full());
    for (Index n = 0; n < pb.mesh().num_nodes(); ++n) {
      const Vec3 v = velocity(pb.mesh().nodes[n], final_state.t);
      exact_full[2 * n] = v.x();
      exact_full[2 * n + 1] = v.y();
    }
    const Vector e = final_state.v - pb.dofs().restrict_vector(exact_full);
    return e.norm();
  }
};

/// Load-free block clamped on the left with a non-zero initial velocity and
/// no contact boundary.
struct FreeVibration {
  int cells = 8;
  double dt = 1e-2;
  int steps = 200;

  Case build() const {
    auto mesh = make_rectangle(1.0, 1.0, cells, cells, [](Side side) -> std::optional<Region> {
      return side == Side::Left ? Region::Dirichlet : Region::Neumann;
    });
    auto mat = MaterialModel::isotropic(2, 0.05, 0.05, 1.0, 1.0);
    SolverConfig cfg;
    cfg.dt = dt;
    cfg.t_end = dt * steps;
    CoupledProblem p(std::move(mesh), mat, ContactModel{}, LoadSpec::zero(), cfg);
    SystemState init = p.initial_state(
        {}, [](const Vec3& x) { return Vec3(0.5 * x.x() * x.y(), std::sin(std::numbers::pi * x.x() / 2), 0.0); },
        {});
    return {std::move(p), std::move(init)};
  }
};

}  // namespace wearsim::bench
