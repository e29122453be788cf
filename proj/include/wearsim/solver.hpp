#pragma once

// Time stepping of the coupled viscoelastic contact / wear system. Each step
// runs a fixed-point loop over (velocity, wear, friction selection): the
// mechanical problem is solved with the boundary laws frozen at the current
// iterate, then the wear equation with the frozen source, then the friction
// selection is refreshed from the new velocity.

#include "wearsim/assembly.hpp"
#include "wearsim/contact_laws.hpp"
#include "wearsim/linear_solve.hpp"
#include "wearsim/material.hpp"
#include "wearsim/mesh.hpp"
#include "wearsim/surface.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace wearsim {

struct SolverConfig {
  double dt = 1e-2;
  double t_end = 1.0;
  double picard_tol = 1e-8;
  int picard_max = 50;
  double linear_tol = 1e-12;
  bool lumped_wear_mass = false;
  double relaxation = 1.0;   ///< initial omega in (0, 1]
  bool auto_damping = true;  ///< halve omega after 3 consecutive residual increases
};

inline void validate_config(const SolverConfig& cfg) {
  auto require = [](bool ok, const std::string& msg) {
    if (!ok) throw ConfigError(msg);
  };
  require(cfg.dt > 0.0 && std::isfinite(cfg.dt), "solver.dt must be positive");
  require(cfg.t_end >= 0.0 && std::isfinite(cfg.t_end), "solver.t_end must be non-negative");
  require(cfg.picard_tol > 0.0 && cfg.picard_tol < 1.0, "solver.picard_tol must lie in (0,1)");
  require(cfg.linear_tol > 0.0 && cfg.linear_tol < 1.0, "solver.linear_tol must lie in (0,1)");
  require(cfg.picard_max >= 1, "solver.picard_max must be >= 1");
  require(cfg.relaxation > 0.0 && cfg.relaxation <= 1.0, "solver.relaxation must lie in (0,1]");
}

/// Displacement and velocity on the free DOFs, nodal wear on the contact
/// surface, friction selection per contact quadrature point.
struct SystemState {
  double t = 0.0;
  Vector u;
  Vector v;
  Vector theta;
  std::vector<Vec3> xi;
};

struct StepReport {
  int step = 0;
  double time = 0.0;
  int picard_iters = 0;
  double residual = 0.0;
  double kinetic = 0.0;
  double elastic = 0.0;
  double wear_mass = 0.0;
  double wear_energy = 0.0;
  double friction_dissipation = 0.0;
  bool truncation_active = false;
  double relaxation = 1.0;
  std::vector<double> residual_history;
};

/// Iterate values the boundary laws are frozen at.
struct FrozenFields {
  Vector u;
  Vector v;
  Vector theta;
  std::vector<Vec3> xi;
};

struct MechanicalResult {
  Vector v;
  Vector u;
};

struct SimulationResult {
  std::vector<SystemState> states;
  std::vector<StepReport> reports;
  double max_mechanical_energy = 0.0;  ///< max over steps of kinetic + elastic
  double max_wear_l2 = 0.0;            ///< max over steps of ||theta||_{L2}
  double max_wear_mass = 0.0;
};

class CoupledProblem {
 public:
  /// Contact quadrature point with its facet frame and surface node ids.
  struct ContactQuad {
    ContactPoint point;
    double weight = 0.0;
    std::array<double, 3> bary{};
    Index facet = 0;
  };

  CoupledProblem(SimMesh mesh, MaterialModel material, ContactModel contact, LoadSpec load, SolverConfig cfg,
                 unsigned seed = 42)
      : mesh_(std::move(mesh)), material_(std::move(material)), load_(std::move(load)), cfg_(cfg) {
    validate_config(cfg_);
    if (material_.dim != mesh_.dim) throw ConfigError("material dimension does not match mesh dimension");
    validate_material(material_, seed);
    surface_ = extract_contact_surface(mesh_);
    contact_ = validate_contact_model(std::move(contact), mesh_.dim, surface_.nodes, seed);
    if (!contact_.wear.facet_mask.empty() &&
        static_cast<Index>(contact_.wear.facet_mask.size()) != surface_.num_facets())
      throw ConfigError("wear facet mask length does not match the number of contact facets");
    dofs_ = DofMap(mesh_);
    mass_ = assemble_mass(mesh_);
    viscosity_ = assemble_viscosity(mesh_, material_);
    elasticity_ = assemble_elasticity(mesh_, material_);
    if (!surface_.empty()) surface_op_ = assemble_laplace_beltrami(surface_, contact_.wear.kappa);
    for (Index f = 0; f < surface_.num_facets(); ++f) {
      const auto pts = surface_.facet_points(f);
      for (const auto& q : facet_quadrature(pts, 2)) {
        ContactQuad cq;
        cq.point = {q.point, surface_.facet_frames[f].normal};
        cq.weight = q.weight;
        for (int a = 0; a < surface_.dim; ++a) cq.bary[a] = q.bary[a];
        cq.facet = f;
        quads_.push_back(cq);
      }
    }
  }

  const SimMesh& mesh() const { return mesh_; }
  const SurfaceMesh& surface() const { return surface_; }
  const DofMap& dofs() const { return dofs_; }
  const MaterialModel& material() const { return material_; }
  const ContactModel& contact() const { return contact_; }
  const SolverConfig& config() const { return cfg_; }
  const SparseOperator& mass() const { return mass_; }
  const SparseOperator& viscosity() const { return viscosity_; }
  const SparseOperator& elasticity() const { return elasticity_; }
  const SurfaceOperator& surface_operator() const { return surface_op_; }
  const std::vector<ContactQuad>& contact_quadrature() const { return quads_; }

  /// Initial state from nodal functions. u0 must vanish on the Dirichlet
  /// boundary; v0 is restricted to the free DOFs.
  SystemState initial_state(const std::function<Vec3(const Vec3&)>& u0, const std::function<Vec3(const Vec3&)>& v0,
                            const std::function<double(const Vec3&)>& theta0) const {
    SystemState s;
    const auto clamped = mesh_.dirichlet_mask();
    Vector u_full = Vector::Zero(dofs_.num_full()), v_full = Vector::Zero(dofs_.num_full());
    for (Index n = 0; n < mesh_.num_nodes(); ++n) {
      const Vec3 un = u0 ? u0(mesh_.nodes[n]) : Vec3::Zero();
      const Vec3 vn = v0 ? v0(mesh_.nodes[n]) : Vec3::Zero();
      if (!un.allFinite() || !vn.allFinite()) throw ConfigError("initial data is not finite");
      if (clamped[n] && un.head(mesh_.dim).norm() > 0.0)
        throw ConfigError("initial displacement does not vanish on the Dirichlet boundary (node " +
                          std::to_string(n + 1) + ")");
      for (int c = 0; c < mesh_.dim; ++c) {
        u_full[n * mesh_.dim + c] = un[c];
        v_full[n * mesh_.dim + c] = vn[c];
      }
    }
    s.u = dofs_.restrict_vector(u_full);
    s.v = dofs_.restrict_vector(v_full);
    s.theta = Vector::Zero(surface_.num_nodes());
    for (Index i = 0; i < surface_.num_nodes(); ++i) {
      s.theta[i] = theta0 ? theta0(surface_.nodes[i]) : 0.0;
      if (!std::isfinite(s.theta[i])) throw ConfigError("initial wear is not finite");
    }
    s.xi.assign(quads_.size(), Vec3::Zero());
    return s;
  }

  SystemState zero_state() const { return initial_state({}, {}, {}); }

  /// Backward-Euler matrix M + dt A + dt^2 G (cached for the last dt).
  const SparseMatrix& system_matrix(double dt) const {
    if (dt != cached_dt_) {
      cached_system_ = mass_.matrix + dt * viscosity_.matrix + (dt * dt) * elasticity_.matrix;
      cached_dt_ = dt;
    }
    return cached_system_;
  }

  /// Nodal traces of the free vector `x` at the contact-surface nodes,
  /// truncated by N_l. Sets `clipped` when the truncation was active.
  std::vector<Vec3> truncated_traces(const Vector& x, bool& clipped) const {
    std::vector<Vec3> out(surface_.num_nodes());
    const double l = contact_.truncation_l;
    for (Index i = 0; i < surface_.num_nodes(); ++i) {
      const Vec3 raw = dofs_.node_value(x, surface_.parent_node_ids[i]);
      out[i] = truncate_vector(raw, l);
      if (raw.norm() > l) clipped = true;
    }
    return out;
  }

  std::vector<Vec3> traces(const Vector& x) const {
    std::vector<Vec3> out(surface_.num_nodes());
    for (Index i = 0; i < surface_.num_nodes(); ++i) out[i] = dofs_.node_value(x, surface_.parent_node_ids[i]);
    return out;
  }

  Vector truncated_wear(const Vector& theta, bool& clipped) const {
    Vector out(theta.size());
    for (Index i = 0; i < theta.size(); ++i) {
      out[i] = truncate_scalar(theta[i], contact_.truncation_l);
      if (std::abs(theta[i]) > contact_.truncation_l) clipped = true;
    }
    return out;
  }

  template <class T>
  T interpolate(const ContactQuad& q, const std::vector<T>& nodal) const {
    T val = nodal[surface_.facets[q.facet][0]] * q.bary[0];
    for (int a = 1; a < surface_.dim; ++a) val += nodal[surface_.facets[q.facet][a]] * q.bary[a];
    return val;
  }

  double interpolate(const ContactQuad& q, const Vector& nodal) const {
    double val = 0.0;
    for (int a = 0; a < surface_.dim; ++a) val += nodal[surface_.facets[q.facet][a]] * q.bary[a];
    return val;
  }

  /// Friction selection at every contact quadrature point for velocity v.
  std::vector<Vec3> selection(const Vector& v) const {
    const auto vt = traces(v);
    std::vector<Vec3> xi(quads_.size());
    for (std::size_t k = 0; k < quads_.size(); ++k)
      xi[k] = friction_selection(tangential_part(interpolate(quads_[k], vt), quads_[k].point.normal), contact_);
    return xi;
  }

  /// Contact force functional b_nu + b_tau on the free DOFs for frozen
  /// fields (truncated inside).
  Vector contact_forces(const FrozenFields& frozen, bool& clipped) const {
    Vector b = Vector::Zero(dofs_.num_free());
    if (quads_.empty()) return b;
    const auto ut = truncated_traces(frozen.u, clipped);
    const auto vt = truncated_traces(frozen.v, clipped);
    const Vector th = truncated_wear(frozen.theta, clipped);
    const int d = mesh_.dim;
    for (std::size_t k = 0; k < quads_.size(); ++k) {
      const auto& q = quads_[k];
      const Vec3 uq = interpolate(q, ut);
      const Vec3 vq = interpolate(q, vt);
      const double thq = interpolate(q, th);
      const double pn = normal_compliance(uq, q.point, contact_);
      const double ht = friction_modulus(uq, vq, thq, q.point, contact_);
      const Vec3 traction = pn * q.point.normal + ht * frozen.xi[k];
      if (traction.isZero(0.0)) continue;
      for (int a = 0; a < surface_.dim; ++a) {
        const Index node = surface_.parent_node_ids[surface_.facets[q.facet][a]];
        for (int c = 0; c < d; ++c) {
          const Index f = dofs_.free_index(node, c);
          if (f >= 0) b[f] += q.weight * q.bary[a] * traction[c];
        }
      }
    }
    return b;
  }

  /// Nodal wear source from h_w(N_l u, N_l v).
  Vector wear_source_vector(const Vector& u, const Vector& v, bool& clipped) const {
    if (surface_.empty()) return Vector();
    const auto ut = truncated_traces(u, clipped);
    const auto vt = truncated_traces(v, clipped);
    Vector s = Vector::Zero(surface_.num_nodes());
    const auto& mask = contact_.wear.facet_mask;
    for (const auto& q : quads_) {
      if (!mask.empty() && !mask[q.facet]) continue;
      const double hw = wear_source(interpolate(q, ut), interpolate(q, vt), q.point, contact_);
      if (hw == 0.0) continue;
      for (int a = 0; a < surface_.dim; ++a) s[surface_.facets[q.facet][a]] += q.weight * q.bary[a] * hw;
    }
    return s;
  }

  /// Right-hand side M v^n - dt G u^n + dt f(t) - dt b(frozen).
  Vector mechanical_rhs(const SystemState& prev, const FrozenFields& frozen, double t_next, double dt,
                        bool& clipped) const {
    Vector rhs = mass_.matrix * prev.v - dt * (elasticity_.matrix * prev.u);
    rhs += dt * assemble_load(mesh_, load_, t_next);
    rhs -= dt * contact_forces(frozen, clipped);
    return rhs;
  }

  /// Solves the linear velocity problem with frozen boundary-law data and
  /// updates u by the discrete history relation u^{n+1} = u^n + dt v^{n+1}.
  MechanicalResult mechanical_step(const SystemState& prev, const FrozenFields& frozen, double dt,
                                   bool* clipped = nullptr) const {
    for (const auto* x : {&frozen.u, &frozen.v, &frozen.theta})
      if (!x->allFinite()) throw SolverError("mechanical_step: non-finite frozen input");
    bool clip = false;
    const Vector rhs = mechanical_rhs(prev, frozen, prev.t + dt, dt, clip);
    if (clipped) *clipped |= clip;
    MechanicalResult r;
    r.v = solve_spd(system_matrix(dt), rhs, cfg_.linear_tol, &frozen.v);
    r.u = prev.u + dt * r.v;
    return r;
  }

  /// One time step: fixed-point loop over (v, theta, xi).
  std::pair<SystemState, StepReport> picard_coupled_step(const SystemState& prev, double dt, int step_index) const {
    StepReport rep;
    rep.step = step_index;
    rep.time = prev.t + dt;
    double omega = cfg_.relaxation;
    int increases = 0;
    double last_res = std::numeric_limits<double>::infinity();

    FrozenFields fz{prev.u + dt * prev.v, prev.v, prev.theta, prev.xi};
    if (fz.xi.size() != quads_.size()) fz.xi.assign(quads_.size(), Vec3::Zero());
    SystemState next;
    next.t = prev.t + dt;

    for (int k = 1; k <= cfg_.picard_max; ++k) {
      if (k > 1) fz.xi = selection(fz.v);
      bool clip = false;
      const MechanicalResult mech = mechanical_step(prev, fz, dt, &clip);
      Vector theta_new = prev.theta;
      if (!surface_.empty()) {
        const Vector src = wear_source_vector(fz.u, fz.v, clip);
        theta_new = wear_step(surface_op_, prev.theta, src, dt, cfg_.lumped_wear_mass);
      }
      rep.truncation_active |= clip;
      const auto xi_new = selection(mech.v);
      const double res = std::max({relative_change(mech.v, fz.v), relative_change(theta_new, fz.theta),
                                   relative_change(xi_new, fz.xi)});
      rep.residual_history.push_back(res);
      if (!std::isfinite(res)) throw SolverError("fixed-point iteration produced non-finite values");
      if (res <= cfg_.picard_tol) {
        next.v = mech.v;
        next.u = mech.u;
        next.theta = theta_new;
        next.xi = fz.xi;
        rep.picard_iters = k;
        rep.residual = res;
        rep.relaxation = omega;
        fill_diagnostics(next, rep);
        return {std::move(next), std::move(rep)};
      }
      if (cfg_.auto_damping) {
        increases = res > last_res ? increases + 1 : 0;
        if (increases >= 3) {
          omega *= 0.5;
          increases = 0;
        }
      }
      last_res = res;
      fz.v += omega * (mech.v - fz.v);
      fz.theta += omega * (theta_new - fz.theta);
      fz.u = prev.u + dt * fz.v;
    }
    std::ostringstream os;
    os << "fixed-point iteration did not converge in " << cfg_.picard_max << " iterations at step " << step_index
       << " (last residual " << last_res << ")";
    throw SolverError(os.str());
  }

  /// Relative residual of the discrete truncated coupled equations at
  /// `state`, with the selection recomputed from state.v. Returns the max of
  /// the mechanical and wear residuals.
  double fixed_point_residual(const SystemState& prev, const SystemState& state) const {
    const double dt = state.t - prev.t;
    FrozenFields fz{state.u, state.v, state.theta, selection(state.v)};
    bool clip = false;
    const Vector rhs = mechanical_rhs(prev, fz, state.t, dt, clip);
    const Vector r_mech = system_matrix(dt) * state.v - rhs;
    double res = rhs.norm() > 0 ? r_mech.norm() / rhs.norm() : r_mech.norm();
    if (!surface_.empty()) {
      const SparseMatrix& m = surface_op_.mass_matrix(cfg_.lumped_wear_mass);
      const Vector wrhs = m * prev.theta + dt * wear_source_vector(state.u, state.v, clip);
      const Vector r_wear = (m + (dt * surface_op_.kappa) * surface_op_.stiffness) * state.theta - wrhs;
      res = std::max(res, wrhs.norm() > 0 ? r_wear.norm() / wrhs.norm() : r_wear.norm());
    }
    return res;
  }

  /// Integral of h_tau xi . v_tau over the contact surface.
  double friction_dissipation(const SystemState& s) const {
    if (quads_.empty()) return 0.0;
    bool clip = false;
    const auto ut = truncated_traces(s.u, clip);
    const auto vt = truncated_traces(s.v, clip);
    const auto vraw = traces(s.v);
    const Vector th = truncated_wear(s.theta, clip);
    double diss = 0.0;
    for (std::size_t k = 0; k < quads_.size(); ++k) {
      const auto& q = quads_[k];
      const double ht = friction_modulus(interpolate(q, ut), interpolate(q, vt), interpolate(q, th), q.point, contact_);
      const Vec3 v_tau = tangential_part(interpolate(q, vraw), q.point.normal);
      diss += q.weight * ht * s.xi[k].dot(v_tau);
    }
    return diss;
  }

  void fill_diagnostics(const SystemState& s, StepReport& rep) const {
    rep.kinetic = 0.5 * s.v.dot(mass_.matrix * s.v);
    rep.elastic = 0.5 * s.u.dot(elasticity_.matrix * s.u);
    if (!surface_.empty()) {
      const Vector mt = surface_op_.mass * s.theta;
      rep.wear_mass = mt.sum();
      rep.wear_energy = 0.5 * s.theta.dot(mt);
    }
    rep.friction_dissipation = friction_dissipation(s);
  }

  /// Runs ceil(T/dt) steps (the last one shortened to land on T).
  SimulationResult simulate(const SystemState& initial,
                            const std::function<void(const SystemState&, const StepReport&)>& on_step = {}) const {
    SimulationResult out;
    out.states.push_back(initial);
    auto track = [&](const SystemState& s, const StepReport* rep) {
      StepReport tmp;
      const StepReport* r = rep;
      if (!r) {
        fill_diagnostics(s, tmp);
        r = &tmp;
      }
      out.max_mechanical_energy = std::max(out.max_mechanical_energy, r->kinetic + r->elastic);
      out.max_wear_l2 = std::max(out.max_wear_l2, std::sqrt(2.0 * r->wear_energy));
      out.max_wear_mass = std::max(out.max_wear_mass, r->wear_mass);
    };
    track(initial, nullptr);
    const double t_end = cfg_.t_end;
    const auto steps = static_cast<int>(std::ceil(t_end / cfg_.dt - 1e-9));
    SystemState cur = initial;
    for (int n = 1; n <= steps; ++n) {
      const double t_next = n == steps ? t_end : initial.t + n * cfg_.dt;
      const double dt = t_next - cur.t;
      auto [next, rep] = picard_coupled_step(cur, dt, n);
      next.t = t_next;
      rep.time = t_next;
      track(next, &rep);
      if (on_step) on_step(next, rep);
      out.reports.push_back(rep);
      out.states.push_back(next);
      cur = std::move(next);
    }
    return out;
  }

  static double relative_change(const Vector& next, const Vector& prev) {
    const double den = std::max(next.norm(), prev.norm());
    if (den == 0.0) return 0.0;
    return (next - prev).norm() / den;
  }

  static double relative_change(const std::vector<Vec3>& next, const std::vector<Vec3>& prev) {
    double num = 0.0, a = 0.0, b = 0.0;
    for (std::size_t k = 0; k < next.size(); ++k) {
      num += (next[k] - prev[k]).squaredNorm();
      a += next[k].squaredNorm();
      b += prev[k].squaredNorm();
    }
    const double den = std::sqrt(std::max(a, b));
    return den == 0.0 ? 0.0 : std::sqrt(num) / den;
  }

 private:
  SimMesh mesh_;
  MaterialModel material_;
  ContactModel contact_;
  LoadSpec load_;
  SolverConfig cfg_;
  SurfaceMesh surface_;
  DofMap dofs_;
  SparseOperator mass_, viscosity_, elasticity_;
  SurfaceOperator surface_op_;
  std::vector<ContactQuad> quads_;
  mutable double cached_dt_ = -1.0;
  mutable SparseMatrix cached_system_;
};

// ---------------------------------------------------------------------------
// Diagnostics CSV
// ---------------------------------------------------------------------------

inline constexpr const char* kDiagnosticsHeader =
    "step,time,picard_iters,residual,kinetic,elastic,wear_mass,wear_energy,friction_dissipation,truncation_active";

inline void write_diagnostics_row(std::ostream& out, const StepReport& r) {
  out << r.step << ',' << format_real(r.time) << ',' << r.picard_iters << ',' << format_real(r.residual) << ','
      << format_real(r.kinetic) << ',' << format_real(r.elastic) << ',' << format_real(r.wear_mass) << ','
      << format_real(r.wear_energy) << ',' << format_real(r.friction_dissipation) << ','
      << (r.truncation_active ? 1 : 0) << '\n';
}

inline void write_diagnostics_csv(std::ostream& out, const std::vector<StepReport>& reports) {
  out << kDiagnosticsHeader << '\n';
  for (const auto& r : reports) write_diagnostics_row(out, r);
}

inline std::vector<StepReport> read_diagnostics_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kDiagnosticsHeader)
    throw std::runtime_error("diagnostics csv: unexpected header");
  std::vector<StepReport> out;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> c;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) c.push_back(cell);
    if (c.size() != 10) throw std::runtime_error("diagnostics csv: bad row '" + line + "'");
    StepReport r;
    r.step = std::stoi(c[0]);
    r.time = std::stod(c[1]);
    r.picard_iters = std::stoi(c[2]);
    r.residual = std::stod(c[3]);
    r.kinetic = std::stod(c[4]);
    r.elastic = std::stod(c[5]);
    r.wear_mass = std::stod(c[6]);
    r.wear_energy = std::stod(c[7]);
    r.friction_dissipation = std::stod(c[8]);
    r.truncation_active = c[9] == "1";
    out.push_back(r);
  }
  return out;
}

}  // namespace wearsim
