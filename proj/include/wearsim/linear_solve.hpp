#pragma once

#include "wearsim/common.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/Sparse>

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

namespace wearsim {

struct SolveStats {
  Index iterations = 0;
  double relative_residual = 0.0;
};

/// Jacobi-preconditioned conjugate gradients for a symmetric positive
/// definite system; stops at ||Ax - b|| <= tol ||b|| and fails after
/// 10 x size iterations. A residual already at the roundoff floor
/// 16 eps (||A|| ||x|| + ||b||) also counts as converged, since tighter
/// tolerances cannot be met in double precision.
/// `guess`, when given, seeds the iteration.
inline Vector solve_spd(const Eigen::SparseMatrix<double>& a, const Vector& b, double tol,
                        const Vector* guess = nullptr, SolveStats* stats = nullptr) {
  if (a.rows() != a.cols() || a.rows() != b.size())
    throw SolverError("solve_spd: dimension mismatch");
  if (!(tol > 0.0 && tol < 1.0)) throw SolverError("solve_spd: tolerance must lie in (0,1)");
  if (!b.allFinite()) throw SolverError("solve_spd: non-finite right-hand side");
  const double bnorm = b.norm();
  if (bnorm == 0.0) {
    if (stats) *stats = {};
    return Vector::Zero(b.size());
  }
  Eigen::ConjugateGradient<Eigen::SparseMatrix<double>, Eigen::Lower | Eigen::Upper> cg;
  cg.setMaxIterations(10 * a.rows());
  cg.setTolerance(tol);
  cg.compute(a);
  Vector x = guess && guess->size() == b.size() ? Vector(cg.solveWithGuess(b, *guess)) : Vector(cg.solve(b));
  Index iterations = cg.iterations();
  double anorm = 0.0;  // Frobenius norm bounds the spectral norm
  for (int k = 0; k < a.outerSize(); ++k)
    for (Eigen::SparseMatrix<double>::InnerIterator it(a, k); it; ++it) anorm += it.value() * it.value();
  anorm = std::sqrt(anorm);
  auto converged = [&](double res) {
    return res <= tol * bnorm ||
           res <= 16.0 * std::numeric_limits<double>::epsilon() * (anorm * x.norm() + bnorm);
  };
  double res = (a * x - b).norm();
  // The recursive CG residual can drift from the true one; restart from the
  // current iterate until the true residual meets the tolerance.
  for (int restart = 0; restart < 3 && !converged(res) && iterations < 10 * a.rows(); ++restart) {
    cg.setMaxIterations(10 * a.rows() - iterations);
    x = cg.solveWithGuess(b, x).eval();
    iterations += cg.iterations();
    res = (a * x - b).norm();
  }
  const double rel = res / bnorm;
  if (stats) *stats = {iterations, rel};
  if (!converged(res)) {
    std::ostringstream msg;
    msg << "solve_spd: no convergence after " << iterations << " iterations (relative residual " << rel << ")";
    throw SolverError(msg.str());
  }
  return x;
}

}  // namespace wearsim
