#pragma once

#include <Eigen/Dense>

#include <stdexcept>
#include <string>

namespace gnep {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;
using Index = Eigen::Index;

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller broke a documented precondition (dimensions, parameter ranges).
class ContractViolation : public Error {
 public:
  using Error::Error;
};

/// An oracle produced a non-finite value.
class EvaluationError : public Error {
 public:
  EvaluationError(int player, Vec x, const std::string& what)
      : Error(what), player_(player), x_(std::move(x)) {}
  int player() const { return player_; }
  const Vec& x() const { return x_; }

 private:
  int player_;
  Vec x_;
};

/// The point lies outside the domain on which a problem's oracles are defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

class SingularJxF : public Error {
 public:
  explicit SingularJxF(double condition_estimate)
      : Error("Lagrangian Jacobian is singular or ill-conditioned (cond ~ " +
              std::to_string(condition_estimate) + ")"),
        condition_estimate_(condition_estimate) {}
  double condition_estimate() const { return condition_estimate_; }

 private:
  double condition_estimate_;
};

class DimensionTooLarge : public Error {
 public:
  using Error::Error;
};

class StructureMismatch : public Error {
 public:
  using Error::Error;
};

/// The linearized subproblem could not be solved by any available method.
class SubproblemInfeasible : public Error {
 public:
  using Error::Error;
};

/// A parameter set does not satisfy the hypotheses of a closed-form result.
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Input document does not conform to its schema. `pointer()` is a JSON pointer.
class SchemaError : public Error {
 public:
  SchemaError(std::string pointer, const std::string& what)
      : Error(pointer + ": " + what), pointer_(std::move(pointer)) {}
  const std::string& pointer() const { return pointer_; }

 private:
  std::string pointer_;
};

}  // namespace gnep
