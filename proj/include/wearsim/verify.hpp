#pragma once

// Self-contained verification suites behind `wearsim verify <suite>`.

#include "wearsim/benchmarks.hpp"
#include "wearsim/contact_laws.hpp"
#include "wearsim/mesh_builders.hpp"
#include "wearsim/surface.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <ostream>
#include <random>
#include <string>
#include <vector>

namespace wearsim::verify {

struct Check {
  std::string name;
  double measured = 0.0;
  std::string target;
  bool pass = false;
};

inline bool print(std::ostream& out, const std::vector<Check>& checks) {
  bool all = true;
  for (const auto& c : checks) {
    out << (c.pass ? "PASS " : "FAIL ") << c.name << ": measured " << format_real(c.measured) << ", target "
        << c.target << '\n';
    all &= c.pass;
  }
  return all;
}

/// Max of |N_l(x) - N_l(y)| / |x - y| over `samples` seeded pairs, for
/// dimensions 1..3 and l in {0.5, 1, 10}; M_l is covered by dimension 1.
inline double truncation_lipschitz_ratio(int samples = 100000, unsigned seed = 42) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> dim_pick(1, 3);
  std::uniform_int_distribution<int> l_pick(0, 2);
  std::uniform_real_distribution<double> coord(-20.0, 20.0);
  const double levels[3] = {0.5, 1.0, 10.0};
  double worst = 0.0;
  for (int s = 0; s < samples; ++s) {
    const int d = dim_pick(rng);
    const double l = levels[l_pick(rng)];
    // Half the pairs are drawn near the sphere |x| = l where clipping switches.
    const double scale = s % 2 == 0 ? 20.0 : 1.5 * l;
    Eigen::VectorXd x(d), y(d);
    for (int c = 0; c < d; ++c) {
      x[c] = coord(rng) * scale / 20.0;
      y[c] = coord(rng) * scale / 20.0;
    }
    const double dist = (x - y).norm();
    if (dist == 0.0) continue;
    double num;
    if (d == 1) num = std::abs(truncate_scalar(x[0], l) - truncate_scalar(y[0], l));
    else num = (truncate_vector(x, l) - truncate_vector(y, l)).norm();
    worst = std::max(worst, num / dist);
  }
  return worst;
}

inline std::vector<Check> truncation_suite() {
  const double ratio = truncation_lipschitz_ratio();
  return {{"truncation Lipschitz ratio (1e5 samples, d=1..3, l in {0.5,1,10})", ratio, "<= 1 + 1e-12",
           ratio <= 1.0 + 1e-12}};
}

/// Sorted generalized eigenvalues of K x = lambda M x (dense).
inline Eigen::VectorXd surface_eigenvalues(const SurfaceOperator& op) {
  const Eigen::MatrixXd k(op.stiffness), m(op.mass);
  Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> es(k, m, Eigen::EigenvaluesOnly);
  return es.eigenvalues();
}

/// Smallest non-zero Laplace-Beltrami eigenvalue on the N-gon inscribed in
/// the unit circle.
inline double circle_first_eigenvalue(int n) {
  const auto op = assemble_laplace_beltrami(make_circle_surface(n), 1.0);
  return surface_eigenvalues(op)[1];
}

/// Smallest non-zero Neumann eigenvalue on the flat unit square face z = 0
/// of a box mesh with n x n cells.
inline double flat_patch_first_eigenvalue(int n) {
  const auto mesh = make_box(1.0, 1.0, 1.0 / n, n, n, 1, [](Side s) -> std::optional<Region> {
    if (s == Side::Bottom) return Region::Contact;
    if (s == Side::Top) return Region::Dirichlet;
    return Region::Neumann;
  });
  const auto op = assemble_laplace_beltrami(extract_contact_surface(mesh), 1.0);
  return surface_eigenvalues(op)[1];
}

inline std::vector<Check> eigen_suite() {
  std::vector<Check> out;
  const int ns[4] = {32, 64, 128, 256};
  double err[4];
  for (int i = 0; i < 4; ++i) err[i] = std::abs(circle_first_eigenvalue(ns[i]) - 1.0);
  out.push_back({"unit circle N=256 relative eigenvalue error", err[3], "<= 1e-2", err[3] <= 1e-2});
  double order = 1e300;
  for (int i = 0; i < 3; ++i) order = std::min(order, std::log2(err[i] / err[i + 1]));
  out.push_back({"unit circle eigenvalue convergence order (N=32..256)", order, ">= 1.8", order >= 1.8});
  const double pi2 = std::numbers::pi * std::numbers::pi;
  const double flat = std::abs(flat_patch_first_eigenvalue(32) - pi2) / pi2;
  out.push_back({"flat patch h=1/32 relative error vs pi^2", flat, "<= 2e-2", flat <= 2e-2});
  return out;
}

/// Final-time velocity errors of the manufactured problem for each dt.
inline std::vector<double> mms_errors(const std::vector<double>& dts) {
  bench::ManufacturedSolution mms;
  std::vector<double> errs;
  for (double dt : dts) {
    const auto c = mms.build(dt);
    const auto res = c.problem.simulate(c.initial);
    errs.push_back(mms.velocity_error(c, res.states.back()));
  }
  return errs;
}

inline std::vector<Check> mms_suite() {
  const std::vector<double> dts = {1.0 / 10, 1.0 / 20, 1.0 / 40, 1.0 / 80, 1.0 / 160};
  const auto errs = mms_errors(dts);
  double order = 1e300;
  for (std::size_t i = 0; i + 1 < errs.size(); ++i) order = std::min(order, std::log2(errs[i] / errs[i + 1]));
  return {{"manufactured solution velocity error at dt=1/160", errs.back(), "finite", std::isfinite(errs.back())},
          {"manufactured solution temporal order (min over refinements)", order, ">= 0.9", order >= 0.9}};
}

/// Largest step-to-step increase of kinetic + elastic energy, relative to the
/// initial energy (non-positive when the energy never increases).
inline double max_energy_increase(double dt, int steps) {
  bench::FreeVibration fv;
  fv.dt = dt;
  fv.steps = steps;
  const auto c = fv.build();
  const auto res = c.problem.simulate(c.initial);
  StepReport r0;
  c.problem.fill_diagnostics(c.initial, r0);
  double prev = r0.kinetic + r0.elastic;
  const double e0 = prev;
  double worst = -1e300;
  for (const auto& r : res.reports) {
    const double e = r.kinetic + r.elastic;
    worst = std::max(worst, (e - prev) / e0);
    prev = e;
  }
  return worst;
}

inline std::vector<Check> energy_suite() {
  std::vector<Check> out;
  for (double dt : {1e-2, 1e-3}) {
    const double inc = max_energy_increase(dt, 200);
    out.push_back({"max relative energy increase over 200 load-free steps, dt=" + format_real(dt), inc, "<= 0",
                   inc <= 0.0});
  }
  return out;
}

}  // namespace wearsim::verify
