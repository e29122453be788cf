#pragma once

#include "wearsim/common.hpp"

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <random>
#include <string>

namespace wearsim {

/// Fourth-order tensor c_ijkl with indices in [0, 3).
class Tensor4 {
 public:
  double& operator()(int i, int j, int k, int l) { return c_[((i * 3 + j) * 3 + k) * 3 + l]; }
  double operator()(int i, int j, int k, int l) const { return c_[((i * 3 + j) * 3 + k) * 3 + l]; }

  /// c_ijkl = lambda d_ij d_kl + mu (d_ik d_jl + d_il d_jk)
  static Tensor4 isotropic(int dim, double lambda, double mu) {
    Tensor4 t;
    auto delta = [](int a, int b) { return a == b ? 1.0 : 0.0; };
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j)
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l)
            t(i, j, k, l) = lambda * delta(i, j) * delta(k, l) +
                            mu * (delta(i, k) * delta(j, l) + delta(i, l) * delta(j, k));
    return t;
  }

  /// Tensor acting as the identity on symmetric matrices.
  static Tensor4 symmetric_identity(int dim) { return isotropic(dim, 0.0, 0.5); }

  /// xi : C : zeta for d x d matrices (upper-left block of 3x3).
  double contract(const Eigen::Matrix3d& xi, const Eigen::Matrix3d& zeta, int dim) const {
    double s = 0.0;
    for (int i = 0; i < dim; ++i)
      for (int j = 0; j < dim; ++j) {
        if (xi(i, j) == 0.0) continue;
        for (int k = 0; k < dim; ++k)
          for (int l = 0; l < dim; ++l) s += xi(i, j) * (*this)(i, j, k, l) * zeta(k, l);
      }
    return s;
  }

  const std::array<double, 81>& data() const { return c_; }
  std::array<double, 81>& data() { return c_; }

 private:
  std::array<double, 81> c_{};
};

/// Viscosity tensor (a_ijkl), elasticity tensor (b_ijkl) and the declared
/// coercivity bound alpha of the viscosity tensor.
struct MaterialModel {
  int dim = 2;
  Tensor4 viscosity;
  Tensor4 elasticity;
  double coercivity_alpha = 0.0;

  /// Isotropic tensors from Lame-type pairs; alpha is set to the exact
  /// coercivity constant and H1-H3 are validated.
  static MaterialModel isotropic(int dim, double a_lambda, double a_mu, double b_lambda, double b_mu,
                                 unsigned seed = 42);
};

/// Smallest eigenvalue of the quadratic form xi -> xi : C : xi restricted to
/// symmetric d x d matrices (computed in an orthonormal basis).
inline double symmetric_min_eigenvalue(const Tensor4& c, int dim) {
  std::vector<Eigen::Matrix3d> basis;
  for (int i = 0; i < dim; ++i)
    for (int j = i; j < dim; ++j) {
      Eigen::Matrix3d e = Eigen::Matrix3d::Zero();
      if (i == j) {
        e(i, i) = 1.0;
      } else {
        e(i, j) = e(j, i) = std::sqrt(0.5);
      }
      basis.push_back(e);
    }
  const int n = static_cast<int>(basis.size());
  Eigen::MatrixXd q(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) q(a, b) = c.contract(basis[a], basis[b], dim);
  q = 0.5 * (q + q.transpose()).eval();
  return Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(q, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

/// Sampled validation of (H1) finiteness, (H2) symmetries and (H3)
/// coercivity of the viscosity tensor / semidefiniteness of the elasticity
/// tensor over `samples` random symmetric matrices.
inline void validate_material(const MaterialModel& mat, unsigned seed = 42, int samples = 1000) {
  const int d = mat.dim;
  if (d != 2 && d != 3) throw HypothesisError("H1", "material dimension must be 2 or 3");
  for (const auto* t : {&mat.viscosity, &mat.elasticity}) {
    const char* name = t == &mat.viscosity ? "viscosity" : "elasticity";
    for (int i = 0; i < d; ++i)
      for (int j = 0; j < d; ++j)
        for (int k = 0; k < d; ++k)
          for (int l = 0; l < d; ++l) {
            const double v = (*t)(i, j, k, l);
            if (!std::isfinite(v))
              throw HypothesisError("H1", std::string(name) + " tensor has a non-finite coefficient");
            if (v != (*t)(j, i, k, l) || v != (*t)(k, l, i, j))
              throw HypothesisError("H2", std::string(name) + " tensor violates c_ijkl = c_jikl = c_klij");
          }
  }
  if (!(mat.coercivity_alpha > 0.0))
    throw HypothesisError("H3", "coercivity constant alpha must be positive (viscosity is required)");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  for (int s = 0; s < samples; ++s) {
    Eigen::Matrix3d xi = Eigen::Matrix3d::Zero();
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) xi(i, j) = xi(j, i) = normal(rng);
    const double norm2 = xi.squaredNorm();
    const double qa = mat.viscosity.contract(xi, xi, d);
    const double qb = mat.elasticity.contract(xi, xi, d);
    const double scale = 1e-12 * norm2 * (1.0 + std::abs(mat.coercivity_alpha));
    if (qa < mat.coercivity_alpha * norm2 - scale)
      throw HypothesisError("H3", "viscosity tensor is not coercive with the declared alpha = " +
                                      std::to_string(mat.coercivity_alpha));
    if (qb < -1e-12 * norm2 * (1.0 + qb))
      throw HypothesisError("H3", "elasticity tensor is not positive semidefinite");
  }
}

inline MaterialModel MaterialModel::isotropic(int dim, double a_lambda, double a_mu, double b_lambda,
                                              double b_mu, unsigned seed) {
  MaterialModel m;
  m.dim = dim;
  m.viscosity = Tensor4::isotropic(dim, a_lambda, a_mu);
  m.elasticity = Tensor4::isotropic(dim, b_lambda, b_mu);
  m.coercivity_alpha = symmetric_min_eigenvalue(m.viscosity, dim);
  validate_material(m, seed);
  return m;
}

}  // namespace wearsim
