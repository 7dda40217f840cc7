#pragma once

#include <functional>
#include <map>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

namespace lyapsip {

using Vector = Eigen::VectorXd;

/// Equilibrium tolerance (Euclidean norm of f at the equilibrium).
inline constexpr double kEquilibriumTolerance = 1e-9;

/// A continuous vector field y -> f(y) on R^n, held as an opaque evaluator.
///
/// The evaluator must be pure: deterministic, free of shared mutable state and
/// safe to call concurrently. Nothing about its internals (formula, Lipschitz
/// constant) is inspected.
class VectorField {
 public:
  using Evaluator = std::function<Vector(const Vector&)>;

  VectorField(int dim, Evaluator eval, std::string label);

  int dim() const { return dim_; }
  const std::string& label() const { return label_; }

  /// Returns f(y). Throws std::invalid_argument if y.size() != dim(), and
  /// std::runtime_error if the evaluator returns a vector of the wrong size.
  Vector Eval(const Vector& y) const;
  Vector operator()(const Vector& y) const { return Eval(y); }

 private:
  int dim_;
  Evaluator eval_;
  std::string label_;
};

/// Thrown by ShiftToEquilibrium when f(eq) is not (numerically) zero.
class NotAnEquilibrium : public std::invalid_argument {
 public:
  NotAnEquilibrium(const std::string& what, double residual)
      : std::invalid_argument(what), residual_(residual) {}
  double residual() const { return residual_; }

 private:
  double residual_;
};

/// The field in coordinates z = y - eq, so the equilibrium sits at z = 0.
class ShiftedField {
 public:
  ShiftedField(VectorField base, Vector equilibrium);

  const VectorField& base() const { return base_; }
  const Vector& equilibrium() const { return equilibrium_; }
  /// The shifted evaluator z -> base(z + eq).
  const VectorField& field() const { return shifted_; }
  int dim() const { return shifted_.dim(); }
  Vector Eval(const Vector& z) const { return shifted_.Eval(z); }

 private:
  VectorField base_;
  Vector equilibrium_;
  VectorField shifted_;
};

ShiftedField ShiftToEquilibrium(const VectorField& field, const Vector& eq,
                                double tolerance = kEquilibriumTolerance);

using ParamMap = std::map<std::string, double>;

/// Benchmark systems: planar2d, vanderpol, whirling, hyper5d, power4d,
/// bhatia, chetaev. Parameters not given take their documented defaults;
/// unknown or non-finite parameters throw std::invalid_argument.
VectorField MakeBuiltin(std::string_view name, const ParamMap& params = {});

std::vector<std::string> BuiltinNames();

/// Default parameter values for a builtin (empty map for parameter-free ones).
ParamMap BuiltinDefaults(std::string_view name);

/// A field evaluated by a child process speaking a line protocol: for each
/// evaluation one line of n whitespace-separated numbers is written to the
/// child's stdin and one line of n numbers is read back from its stdout. The
/// child is started lazily by /bin/sh -c `command` and reused; calls are
/// serialized. Meant for oracle-defined closed loops (e.g. MPC feedback).
VectorField MakeExternalProcessField(const std::string& command, int dim,
                                     std::string label = "external");

}  // namespace lyapsip
