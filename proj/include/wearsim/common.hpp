#pragma once

#include <Eigen/Core>

#include <cstddef>
#include <stdexcept>
#include <string>

namespace wearsim {

/// Spatial points and d-vectors are stored with three components; in 2D the
/// z component is identically zero.
using Vec3 = Eigen::Vector3d;
using Vector = Eigen::VectorXd;
using Index = std::ptrdiff_t;

class MeshError : public std::runtime_error {
 public:
  enum class Kind { Parse, Topology, EmptyDirichlet, Degenerate, Io };

  MeshError(Kind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  Kind kind() const noexcept { return kind_; }

 private:
  Kind kind_;
};

/// Raised when input data violates one of the model hypotheses (coercivity,
/// growth bounds, positivity of constants).
class HypothesisError : public std::runtime_error {
 public:
  HypothesisError(std::string hypothesis, const std::string& what)
      : std::runtime_error(what), hypothesis_(std::move(hypothesis)) {}

  const std::string& hypothesis() const noexcept { return hypothesis_; }

 private:
  std::string hypothesis_;
};

class SolverError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wearsim
