#pragma once

// `wearsim run`: configuration -> simulation -> output files.

#include "wearsim/config.hpp"
#include "wearsim/solver.hpp"
#include "wearsim/surface.hpp"
#include "wearsim/vtk.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

namespace wearsim {

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitHypothesis = 3, kExitSolver = 4 };

struct RunSummary {
  int steps = 0;
  std::filesystem::path diagnostics_path;
  SimulationResult result;
};

inline std::string numbered(const std::string& stem, int step, const char* ext) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s_%06d.%s", stem.c_str(), step, ext);
  return buf;
}

/// Runs a parsed configuration. Throws ConfigError, HypothesisError,
/// MeshError or SolverError.
inline RunSummary run_config(const RunConfig& rc) {
  SimMesh mesh;
  try {
    mesh = load_mesh(rc.mesh_path);
  } catch (const MeshError& e) {
    throw ConfigError(std::string("mesh: ") + e.what());
  }
  const MaterialModel mat = rc.material(mesh.dim);
  const SurfaceMesh surf = extract_contact_surface(mesh);
  const CoupledProblem problem(mesh, mat, rc.contact_model(surf), rc.load(), rc.solver, rc.seed);

  const VectorExpression u0 = rc.u0, v0 = rc.v0;
  const Expression th0 = rc.theta0;
  const SystemState init = problem.initial_state([&](const Vec3& x) { return u0(x, 0.0); },
                                                 [&](const Vec3& x) { return v0(x, 0.0); },
                                                 [&](const Vec3& x) { return th0(x, 0.0); });

  const std::filesystem::path dir(rc.output_dir);
  std::filesystem::create_directories(dir);
  RunSummary summary;
  summary.diagnostics_path = dir / "diagnostics.csv";
  std::ofstream diag(summary.diagnostics_path);
  if (!diag) throw ConfigError("cannot write " + summary.diagnostics_path.string());
  diag << kDiagnosticsHeader << '\n';

  auto dump = [&](const SystemState& s, int step) {
    if (rc.output_cadence <= 0 || step % rc.output_cadence != 0) return;
    if (!problem.surface().empty()) {
      std::ofstream w(dir / numbered("wear", step, "csv"));
      write_wear_csv(w, problem.surface(), s.theta);
    }
    std::ofstream f(dir / numbered("fields", step, "vtk"));
    write_vtk(f, problem.mesh(), problem.dofs(), s.u, s.v, s.t);
  };
  dump(init, 0);
  summary.result = problem.simulate(init, [&](const SystemState& s, const StepReport& r) {
    write_diagnostics_row(diag, r);
    diag.flush();
    dump(s, r.step);
  });
  summary.steps = static_cast<int>(summary.result.reports.size());
  return summary;
}

/// Prints a machine-readable error line and maps the exception to an exit
/// code.
inline int report_error(const std::exception& e, std::ostream& err = std::cerr) {
  auto line = [&](const char* kind, const std::string& extra) {
    err << "error: kind=" << kind << extra << " message=\"" << e.what() << "\"\n";
  };
  if (const auto* h = dynamic_cast<const HypothesisError*>(&e)) {
    line("hypothesis", " hypothesis=" + h->hypothesis());
    return kExitHypothesis;
  }
  if (dynamic_cast<const ConfigError*>(&e) || dynamic_cast<const MeshError*>(&e)) {
    line("config", "");
    return kExitConfig;
  }
  if (dynamic_cast<const SolverError*>(&e)) {
    line("solver", "");
    return kExitSolver;
  }
  line("internal", "");
  return kExitFailure;
}

inline int run(const std::string& config_path, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
  try {
    const RunConfig rc = load_config(config_path);
    const RunSummary s = run_config(rc);
    out << "completed " << s.steps << " steps; diagnostics: " << s.diagnostics_path.string() << '\n';
    out << "max kinetic+elastic energy: " << format_real(s.result.max_mechanical_energy)
        << "  max wear L2: " << format_real(s.result.max_wear_l2) << '\n';
    return kExitOk;
  } catch (const std::exception& e) {
    return report_error(e, err);
  }
}

}  // namespace wearsim
