#pragma once

#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "lyapsip/dictionary.h"
#include "lyapsip/field.h"
#include "lyapsip/qp_solver.h"

namespace lyapsip {

enum class RowKind { kLower, kUpper, kMarginLower, kDerivative };

std::string RowKindName(RowKind kind);

/// Stacked affine rows a . z <= b in the decision vector z = (lambda, mu).
struct ConstraintBlock {
  RowMatrix a;
  Vector b;
  std::vector<RowKind> kinds;
  std::vector<int> sample_index;  // row -> position in `samples`
  std::vector<Vector> samples;

  int rows() const { return static_cast<int>(b.size()); }
  /// a z - b.
  Vector Evaluate(const Vector& z) const;
};

/// z -> ||z - anchor||^2.
struct Objective {
  Vector anchor;

  static Objective AllOnes(int dim) { return {Vector::Ones(dim)}; }
  double Value(const Vector& z) const { return (z - anchor).squaredNorm(); }
};

struct QpSettings {
  double feasibility_tol = 1e-9;
  double kkt_tol = 1e-8;
  int max_iterations = 10000;
};

/// Rows contributed by one sample: stability 2, asymptotic 3, chetaev 2,
/// plus one when an upper bound omega is configured (not in chetaev mode).
int RowsPerSample(const LyapunovTriplet& triplet);

/// Sample count used by the theorems: q (stability, chetaev) or q + m.
int PrescribedSampleCount(const LyapunovTriplet& triplet);

/// Per-sample rows, in the order lower, [margin], derivative, [upper]:
///   lower       -sum phi_i(y) lambda_i                <= -alpha(|y|)
///   margin      -sum psi_j(y) mu_j                    <= -beta(|y|)
///   derivative   sum <grad phi_i(y), f(y)> lambda_i
///                + sum psi_j(y) mu_j                  <= 0
///   upper        sum phi_i(y) lambda_i                <= omega(|y|)
/// In chetaev mode the derivative row is negated (V must increase).
ConstraintBlock AssembleRows(const LyapunovTriplet& triplet,
                             const VectorField& field, const Vector& y);
ConstraintBlock AssembleRows(const LyapunovTriplet& triplet,
                             const VectorField& field,
                             const std::vector<Vector>& samples);

/// Writes the RowsPerSample rows for y into `a` (row-major, rows x (q+m)),
/// `b` and `kinds`. The building block of both AssembleRows overloads.
void AssembleSampleRows(const LyapunovTriplet& triplet, const VectorField& field,
                        const Vector& y, double* a, double* b, RowKind* kinds);

struct RelaxedValue {
  double value = 0.0;  // +inf when infeasible
  Vector z;
  bool feasible = true;
  QpSolution qp;
};

QpProblem MakeQp(const Objective& objective, const ConstraintBlock& block,
                 const QpSettings& settings);

/// R(y_1..y_K): the optimal value of the projection QP over the stacked rows.
RelaxedValue ComputeRelaxedValue(const LyapunovTriplet& triplet,
                                 const VectorField& field,
                                 const Objective& objective,
                                 const std::vector<Vector>& samples,
                                 const QpSettings& settings = {});

struct RowViolation {
  double max = -std::numeric_limits<double>::infinity();
  Vector argmax;
  int count = 0;  // rows of this kind inspected
};

struct FeasibilityReport {
  RowViolation lower, upper, margin_lower, derivative;
  /// Largest violation over all kinds (-inf for an empty grid).
  double worst() const;
};

/// Max over the grid of a . z - b, separately per row kind.
FeasibilityReport CheckSipFeasibility(const LyapunovTriplet& triplet,
                                      const VectorField& field, const Vector& z,
                                      const std::vector<Vector>& grid);

/// Raised when a sampled relaxation has no feasible point: the chosen triplet
/// cannot be certified for this field.
class InfeasibleRelaxation : public std::runtime_error {
 public:
  InfeasibleRelaxation(const std::string& what, std::vector<Vector> samples)
      : std::runtime_error(what), samples_(std::move(samples)) {}
  const std::vector<Vector>& samples() const { return samples_; }

 private:
  std::vector<Vector> samples_;
};

/// Scores unit-cube points u in [0,1]^(K n) by R(sample_in(u_1), ...,
/// sample_in(u_K)). Rows of each sample slot are cached against the exact
/// bits of its coordinates, so proposals that move a single sample only
/// re-evaluate that sample. Not thread-safe; use one scorer per worker.
class RelaxationScorer {
 public:
  RelaxationScorer(const LyapunovTriplet& triplet, const VectorField& field,
                   Objective objective, int sample_count, QpSettings settings);

  int sample_count() const { return k_; }
  int dimension() const { return k_ * n_; }

  std::vector<Vector> Samples(std::span<const double> u) const;

  /// Throws InfeasibleRelaxation when the sampled QP is infeasible.
  double Score(std::span<const double> u);

  /// Full solve, always from a cold start.
  RelaxedValue Solve(std::span<const double> u);

 private:
  void Refresh(std::span<const double> u);

  const LyapunovTriplet& triplet_;
  const VectorField& field_;
  Objective objective_;
  QpSettings settings_;
  int k_, n_, d_, rps_;
  std::vector<std::vector<double>> slot_u_;
  std::vector<bool> slot_valid_;
  QpProblem qp_;
  std::vector<RowKind> kinds_;
};

}  // namespace lyapsip
