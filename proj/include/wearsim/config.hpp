#pragma once

// Run configuration: line-oriented `section.key = value` text with `#`
// comments. Spatial and temporal data are expressions (see expression.hpp).

#include "wearsim/assembly.hpp"
#include "wearsim/contact_laws.hpp"
#include "wearsim/expression.hpp"
#include "wearsim/material.hpp"
#include "wearsim/solver.hpp"

#include <filesystem>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>

namespace wearsim {

struct VectorExpression {
  Expression x, y, z;
  Vec3 operator()(const Vec3& p, double t) const { return {x(p, t), y(p, t), z(p, t)}; }
};

struct RunConfig {
  std::string mesh_path;

  // material
  std::string material_mode = "isotropic";
  double a_lambda = 0.0, a_mu = 0.0, b_lambda = 0.0, b_mu = 0.0;
  std::vector<double> a_table, b_table;
  std::optional<double> alpha;

  // contact
  double stiffness = 1.0;
  double exponent = 1.0;
  Expression gap = Expression::constant(0.0);
  double mu = 0.0;
  FrictionMode friction_mode = FrictionMode::CoulombCompliance;
  double c1tau = 1.0;
  double eps_reg = 1e-4;
  double tau_constant = 0.0;
  double c_theta = 0.0;
  double wear_rate = 0.0;
  double kappa = 1.0;
  double truncation_l = 1e6;
  double c_nu = 0.0, c_tau = 0.0, c_w = 0.0;
  std::optional<Expression> wear_region;

  VectorExpression f0, f2;
  VectorExpression u0, v0;
  Expression theta0 = Expression::constant(0.0);

  SolverConfig solver;
  unsigned seed = 42;

  std::string output_dir = "out";
  int output_cadence = 0;

  /// Builds the material; runs the H1-H3 checks.
  MaterialModel material(int dim) const {
    if (material_mode == "isotropic") return MaterialModel::isotropic(dim, a_lambda, a_mu, b_lambda, b_mu, seed);
    MaterialModel m;
    m.dim = dim;
    const std::size_t n = static_cast<std::size_t>(dim * dim * dim * dim);
    if (a_table.size() != n || b_table.size() != n)
      throw ConfigError("material tables must have d^4 = " + std::to_string(n) + " entries");
    std::size_t k = 0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int p = 0; p < dim; ++p)
          for (int q = 0; q < dim; ++q, ++k) {
            m.viscosity(i, j, p, q) = a_table[k];
            m.elasticity(i, j, p, q) = b_table[k];
          }
    m.coercivity_alpha = alpha ? *alpha : symmetric_min_eigenvalue(m.viscosity, dim);
    validate_material(m, seed);
    return m;
  }

  /// Contact model before validation (the solver validates it against the
  /// contact surface).
  ContactModel contact_model(const SurfaceMesh& surf) const {
    ContactModel cm;
    cm.normal.stiffness = stiffness;
    cm.normal.exponent = exponent;
    const Expression g = gap;
    cm.normal.gap = [g](const Vec3& x) { return g(x); };
    cm.friction.mu = mu;
    cm.friction.mode = friction_mode;
    cm.friction.c1tau = c1tau;
    cm.friction.eps_reg = eps_reg;
    cm.friction.tau_constant = tau_constant;
    cm.friction.c_theta = c_theta;
    cm.wear.rate = wear_rate;
    cm.wear.kappa = kappa;
    cm.truncation_l = truncation_l;
    cm.c_nu = c_nu;
    cm.c_tau = c_tau;
    cm.c_w = c_w;
    if (wear_region) {
      for (Index f = 0; f < surf.num_facets(); ++f) {
        Vec3 mid = Vec3::Zero();
        for (const auto& p : surf.facet_points(f)) mid += p;
        mid /= surf.dim;
        cm.wear.facet_mask.push_back((*wear_region)(mid) > 0.0);
      }
    }
    return cm;
  }

  LoadSpec load() const {
    const VectorExpression body = f0, trac = f2;
    return {[body](const Vec3& x, double t) { return body(x, t); },
            [trac](const Vec3& x, double t) { return trac(x, t); }};
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace detail

/// Parses configuration text. Relative mesh paths are resolved against
/// `base_dir`.
inline RunConfig parse_config(std::istream& in, const std::filesystem::path& base_dir = {}) {
  RunConfig cfg;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  auto fail = [&](const std::string& msg) -> void {
    throw ConfigError("config line " + std::to_string(line_no) + ": " + msg);
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) fail("expected 'section.key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string value = detail::trim(line.substr(eq + 1));
    if (key.find('.') == std::string::npos) fail("key '" + key + "' has no section");
    if (value.empty()) fail("empty value for '" + key + "'");
    if (!seen.insert(key).second) fail("duplicate key '" + key + "'");

    auto number = [&]() {
      std::size_t pos = 0;
      double v = 0.0;
      try {
        v = std::stod(value, &pos);
      } catch (const std::exception&) {
        fail("'" + key + "' expects a number, got '" + value + "'");
      }
      if (pos != value.size() || !std::isfinite(v)) fail("'" + key + "' expects a finite number");
      return v;
    };
    auto integer = [&]() {
      const double v = number();
      if (v != std::floor(v)) fail("'" + key + "' expects an integer");
      return static_cast<long long>(v);
    };
    auto boolean = [&]() {
      if (value == "true" || value == "1") return true;
      if (value == "false" || value == "0") return false;
      fail("'" + key + "' expects true or false");
      return false;
    };
    auto expr = [&]() {
      try {
        return Expression::parse(value);
      } catch (const ExpressionError& e) {
        fail(e.what());
      }
      return Expression();
    };
    auto table = [&]() {
      std::vector<double> out;
      std::string v = value;
      std::replace(v.begin(), v.end(), ',', ' ');
      std::istringstream is(v);
      for (std::string tok; is >> tok;) {
        try {
          out.push_back(std::stod(tok));
        } catch (const std::exception&) {
          fail("bad table entry '" + tok + "'");
        }
      }
      return out;
    };

    if (key == "mesh.path") {
      std::filesystem::path p(value);
      cfg.mesh_path = (p.is_relative() && !base_dir.empty() ? base_dir / p : p).string();
    } else if (key == "material.mode") {
      if (value != "isotropic" && value != "full") fail("material.mode must be isotropic or full");
      cfg.material_mode = value;
    } else if (key == "material.a_lambda") cfg.a_lambda = number();
    else if (key == "material.a_mu") cfg.a_mu = number();
    else if (key == "material.b_lambda") cfg.b_lambda = number();
    else if (key == "material.b_mu") cfg.b_mu = number();
    else if (key == "material.a_table") cfg.a_table = table();
    else if (key == "material.b_table") cfg.b_table = table();
    else if (key == "material.alpha") cfg.alpha = number();
    else if (key == "contact.stiffness") cfg.stiffness = number();
    else if (key == "contact.exponent") cfg.exponent = number();
    else if (key == "contact.gap") cfg.gap = expr();
    else if (key == "contact.mu") cfg.mu = number();
    else if (key == "contact.friction_mode") {
      if (value == "coulomb_compliance") cfg.friction_mode = FrictionMode::CoulombCompliance;
      else if (value == "constant_bound") cfg.friction_mode = FrictionMode::ConstantBound;
      else fail("contact.friction_mode must be coulomb_compliance or constant_bound");
    } else if (key == "contact.c1tau") cfg.c1tau = number();
    else if (key == "contact.eps_reg") cfg.eps_reg = number();
    else if (key == "contact.tau_constant") cfg.tau_constant = number();
    else if (key == "contact.c_theta") cfg.c_theta = number();
    else if (key == "contact.wear_rate") cfg.wear_rate = number();
    else if (key == "contact.kappa") cfg.kappa = number();
    else if (key == "contact.truncation_l") cfg.truncation_l = number();
    else if (key == "contact.C_nu") cfg.c_nu = number();
    else if (key == "contact.C_tau") cfg.c_tau = number();
    else if (key == "contact.C_w") cfg.c_w = number();
    else if (key == "contact.wear_region") cfg.wear_region = expr();
    else if (key == "load.f0_x") cfg.f0.x = expr();
    else if (key == "load.f0_y") cfg.f0.y = expr();
    else if (key == "load.f0_z") cfg.f0.z = expr();
    else if (key == "load.f2_x") cfg.f2.x = expr();
    else if (key == "load.f2_y") cfg.f2.y = expr();
    else if (key == "load.f2_z") cfg.f2.z = expr();
    else if (key == "initial.u0_x") cfg.u0.x = expr();
    else if (key == "initial.u0_y") cfg.u0.y = expr();
    else if (key == "initial.u0_z") cfg.u0.z = expr();
    else if (key == "initial.v0_x") cfg.v0.x = expr();
    else if (key == "initial.v0_y") cfg.v0.y = expr();
    else if (key == "initial.v0_z") cfg.v0.z = expr();
    else if (key == "initial.theta0") cfg.theta0 = expr();
    else if (key == "solver.dt") cfg.solver.dt = number();
    else if (key == "solver.t_end") cfg.solver.t_end = number();
    else if (key == "solver.picard_tol") cfg.solver.picard_tol = number();
    else if (key == "solver.picard_max") cfg.solver.picard_max = static_cast<int>(integer());
    else if (key == "solver.linear_tol") cfg.solver.linear_tol = number();
    else if (key == "solver.lumped_wear_mass") cfg.solver.lumped_wear_mass = boolean();
    else if (key == "solver.relaxation") cfg.solver.relaxation = number();
    else if (key == "solver.auto_damping") cfg.solver.auto_damping = boolean();
    else if (key == "solver.seed") cfg.seed = static_cast<unsigned>(integer());
    else if (key == "output.dir") cfg.output_dir = value;
    else if (key == "output.cadence") cfg.output_cadence = static_cast<int>(integer());
    else fail("unknown key '" + key + "'");
  }
  if (cfg.mesh_path.empty()) throw ConfigError("config: mesh.path is required");
  if (cfg.output_cadence < 0) throw ConfigError("config: output.cadence must be non-negative");
  validate_config(cfg.solver);
  return cfg;
}

inline RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  return parse_config(in, std::filesystem::path(path).parent_path());
}

}  // namespace wearsim
