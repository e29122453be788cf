#include "wearsim/wearsim.hpp"

#include <CLI11.hpp>

#include <charconv>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

namespace {

using namespace wearsim;

std::string shortest(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string join(const Eigen::VectorXd& v) {
  std::string s;
  for (Index i = 0; i < v.size(); ++i) s += (i ? "," : "") + shortest(v[i]);
  return s;
}

Eigen::VectorXd parse_list(const std::string& text) {
  std::vector<double> vals;
  std::stringstream ss(text);
  for (std::string tok; std::getline(ss, tok, ',');) vals.push_back(std::stod(tok));
  if (vals.empty() || vals.size() > 3) throw CLI::ValidationError("vector", "expected 1 to 3 comma-separated values");
  return Eigen::Map<Eigen::VectorXd>(vals.data(), static_cast<Index>(vals.size()));
}

Vec3 to_vec3(const Eigen::VectorXd& v) {
  Vec3 out = Vec3::Zero();
  for (Index i = 0; i < v.size(); ++i) out[i] = v[i];
  return out;
}

struct LawArgs {
  double lam = 1.0, m = 1.0, g = 0.0, u_nu = 0.0;
  double mu = 0.0, eta = 0.0, eps = 1e-4, l = 1.0, theta = 0.0, c_theta = 0.0, tau = 0.0;
  std::string p, vt, x, mode = "coulomb_compliance";
};

int laws_eval(const std::string& law, const LawArgs& a) {
  ContactModel cm;
  cm.normal.stiffness = a.lam;
  cm.normal.exponent = a.m;
  const double gap = a.g;
  cm.normal.gap = [gap](const Vec3&) { return gap; };
  cm.friction.mu = a.mu;
  cm.friction.eps_reg = a.eps;
  cm.friction.c_theta = a.c_theta;
  cm.friction.tau_constant = a.tau;
  cm.friction.mode = a.mode == "constant_bound" ? FrictionMode::ConstantBound : FrictionMode::CoulombCompliance;
  cm.wear.rate = a.eta;

  // Pressure either given directly or from the compliance law.
  const bool direct_p = !a.p.empty();
  const double pressure = direct_p ? std::stod(a.p) : normal_compliance(a.u_nu, Vec3::Zero(), cm);
  const std::string p_desc = direct_p ? "p=" + a.p
                                      : "lam=" + shortest(a.lam) + ", m=" + shortest(a.m) + ", g=" + shortest(a.g) +
                                            ", u_nu=" + shortest(a.u_nu);

  if (law == "p_nu") {
    std::cout << "p_nu(lam=" << shortest(a.lam) << ", m=" << shortest(a.m) << ", g=" << shortest(a.g)
              << ", u_nu=" << shortest(a.u_nu) << ") = " << shortest(normal_compliance(a.u_nu, Vec3::Zero(), cm))
              << '\n';
  } else if (law == "h_tau") {
    double value;
    if (cm.friction.mode == FrictionMode::ConstantBound) {
      value = std::max(0.0, a.tau);
      std::cout << "h_tau(mode=constant_bound, tau=" << shortest(a.tau) << ") = " << shortest(value) << '\n';
    } else {
      const double factor = a.c_theta == 0.0 ? 1.0 : std::max(0.0, 1.0 + a.c_theta * a.theta);
      value = a.mu * pressure * factor;
      std::cout << "h_tau(mode=coulomb_compliance, mu=" << shortest(a.mu) << ", " << p_desc
                << ", c_theta=" << shortest(a.c_theta) << ", theta=" << shortest(a.theta) << ") = " << shortest(value)
                << '\n';
    }
  } else if (law == "h_w") {
    const Eigen::VectorXd vt = a.vt.empty() ? Eigen::VectorXd::Zero(1) : parse_list(a.vt);
    const double value = a.eta * a.mu * pressure * vt.norm();
    std::cout << "h_w(eta=" << shortest(a.eta) << ", mu=" << shortest(a.mu) << ", " << p_desc << ", vt=" << join(vt)
              << ") = " << shortest(value) << '\n';
  } else if (law == "N_l" || law == "M_l") {
    if (a.x.empty()) throw CLI::ValidationError("--x", "required for " + law);
    const Eigen::VectorXd x = parse_list(a.x);
    if (law == "M_l" && x.size() != 1) throw CLI::ValidationError("--x", "M_l takes a scalar");
    const Eigen::VectorXd r = law == "M_l" ? Eigen::VectorXd::Constant(1, truncate_scalar(x[0], a.l))
                                           : truncate_vector(x, a.l);
    std::cout << law << "(l=" << shortest(a.l) << ", x=" << join(x) << ") = " << join(r) << '\n';
  } else if (law == "xi_eps") {
    if (a.vt.empty()) throw CLI::ValidationError("--vt", "required for xi_eps");
    const Eigen::VectorXd vt = parse_list(a.vt);
    const Vec3 xi = friction_selection(to_vec3(vt), a.eps);
    std::cout << "xi_eps(eps=" << shortest(a.eps) << ", vt=" << join(vt) << ") = " << join(xi.head(vt.size()))
              << '\n';
  } else {
    std::cerr << "error: kind=usage message=\"unknown law '" << law
              << "' (expected p_nu, h_tau, h_w, N_l, M_l, xi_eps)\"\n";
    return kExitConfig;
  }
  return kExitOk;
}

int mesh_check(const std::string& path) {
  try {
    const SimMesh mesh = load_mesh(path);
    const SurfaceMesh surf = extract_contact_surface(mesh);
    std::map<Region, int> counts;
    for (const auto& f : mesh.boundary_facets) ++counts[f.marker];
    std::cout << "dim " << mesh.dim << ", nodes " << mesh.num_nodes() << ", elements " << mesh.elements.size()
              << ", volume " << shortest(mesh.volume()) << '\n';
    for (Region r : {Region::Dirichlet, Region::Neumann, Region::Contact})
      std::cout << region_name(r) << ": " << counts[r] << " facets, measure " << shortest(mesh.boundary_measure(r))
                << '\n';
    std::cout << "contact surface: " << surf.num_nodes() << " nodes, " << surf.num_facets() << " facets\n";
    std::cout << "ok\n";
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e);
  }
}

int run_verify(const std::string& suite) {
  std::vector<verify::Check> checks;
  auto add = [&](std::vector<verify::Check> c) { checks.insert(checks.end(), c.begin(), c.end()); };
  if (suite == "truncation" || suite == "all") add(verify::truncation_suite());
  if (suite == "eigen" || suite == "all") add(verify::eigen_suite());
  if (suite == "mms" || suite == "all") add(verify::mms_suite());
  if (suite == "energy" || suite == "all") add(verify::energy_suite());
  return verify::print(std::cout, checks) ? kExitOk : kExitFailure;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dynamic frictional contact with wear diffusion on the contact surface"};
  app.require_subcommand(1);

  std::string config_path;
  auto* run_cmd = app.add_subcommand("run", "Run a simulation from a configuration file");
  run_cmd->add_option("config", config_path, "configuration file")->required();

  std::string suite;
  auto* verify_cmd = app.add_subcommand("verify", "Run a built-in verification suite");
  verify_cmd->add_option("suite", suite, "truncation | eigen | mms | energy | all")
      ->required()
      ->check(CLI::IsMember({"truncation", "eigen", "mms", "energy", "all"}));

  auto* laws_cmd = app.add_subcommand("laws", "Evaluate a boundary law");
  laws_cmd->require_subcommand(1);
  auto* eval_cmd = laws_cmd->add_subcommand("eval", "Evaluate one law with explicit parameters");
  std::string law;
  LawArgs la;
  eval_cmd->add_option("law", law, "p_nu | h_tau | h_w | N_l | M_l | xi_eps")->required();
  eval_cmd->add_option("--lam", la.lam, "normal compliance stiffness");
  eval_cmd->add_option("--m", la.m, "normal compliance exponent");
  eval_cmd->add_option("--g", la.g, "gap");
  eval_cmd->add_option("--u_nu", la.u_nu, "normal displacement");
  eval_cmd->add_option("--p", la.p, "contact pressure (overrides the compliance law)");
  eval_cmd->add_option("--mu", la.mu, "friction coefficient");
  eval_cmd->add_option("--mode", la.mode, "coulomb_compliance | constant_bound");
  eval_cmd->add_option("--tau", la.tau, "constant friction bound");
  eval_cmd->add_option("--theta", la.theta, "wear value");
  eval_cmd->add_option("--c_theta", la.c_theta, "wear factor of the friction modulus");
  eval_cmd->add_option("--eta", la.eta, "wear rate");
  eval_cmd->add_option("--vt", la.vt, "tangential velocity (magnitude or comma-separated vector)");
  eval_cmd->add_option("--eps", la.eps, "friction regularization");
  eval_cmd->add_option("--l", la.l, "truncation level");
  eval_cmd->add_option("--x", la.x, "argument of N_l / M_l (comma-separated)");

  auto* mesh_cmd = app.add_subcommand("mesh", "Mesh utilities");
  mesh_cmd->require_subcommand(1);
  auto* check_cmd = mesh_cmd->add_subcommand("check", "Load and validate a mesh file");
  std::string mesh_path;
  check_cmd->add_option("path", mesh_path, "mesh file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*run_cmd) return run(config_path);
    if (*verify_cmd) return run_verify(suite);
    if (*eval_cmd) return laws_eval(law, la);
    if (*check_cmd) return mesh_check(mesh_path);
  } catch (const CLI::Error& e) {
    std::cerr << "error: kind=usage message=\"" << e.what() << "\"\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    return report_error(e);
  }
  return kExitFailure;
}
