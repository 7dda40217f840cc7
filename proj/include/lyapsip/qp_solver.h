#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "lyapsip/field.h"

namespace lyapsip {

using RowMatrix =
    Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// minimize ||z - anchor||^2 subject to a z <= b (row-wise).
struct QpProblem {
  Vector anchor;
  RowMatrix a;  // rows x dim; may have zero rows
  Vector b;
  double feasibility_tol = 1e-9;
  double kkt_tol = 1e-8;
  int max_iterations = 10000;

  int dim() const { return static_cast<int>(anchor.size()); }
  int rows() const { return static_cast<int>(a.rows()); }

  /// Throws std::invalid_argument on inconsistent sizes or non-finite data.
  void Validate() const;
};

enum class QpStatus { kOptimal, kInfeasible };

struct QpSolution {
  QpStatus status = QpStatus::kOptimal;
  Vector z;
  double value = 0.0;
  /// Active rows at the optimum, in the order they entered the working set.
  std::vector<int> active_set;
  /// One multiplier per active row, for the original (unscaled) rows and the
  /// objective ||z - p||^2.
  std::vector<double> multipliers;
  /// Infeasible only: y >= 0 with sum y_i a_i = 0 and sum y_i b_i < 0.
  Vector farkas;
  int iterations = 0;
  /// True when the dual active-set answer failed its KKT or Farkas check and
  /// the least-distance fallback produced this solution.
  bool fallback = false;
};

struct KktResiduals {
  double primal = 0.0;          // max_i (a_i z - b_i), clipped at 0
  double stationarity = 0.0;    // ||2(z - p) + sum_i u_i a_i||
  double complementarity = 0.0; // max_i |u_i (a_i z - b_i)|
  double min_multiplier = 0.0;
  /// max(1, |2(z - p)|, sum_i |u_i| |a_i|): the size of the terms whose sum
  /// is the stationarity residual.
  double stationarity_scale = 1.0;
  /// max over rows with u_i > 0 of |a_i z - b_i| / |a_i|.
  double complementarity_scaled = 0.0;

  /// Scale-aware KKT test: stationarity relative to its scale, scaled
  /// complementarity, primal feasibility and dual sign.
  bool Pass(double feasibility_tol, double kkt_tol) const {
    return primal <= feasibility_tol && stationarity <= kkt_tol * stationarity_scale &&
           complementarity_scaled <= kkt_tol && min_multiplier >= 0.0;
  }
};

KktResiduals ComputeKkt(const QpProblem& problem, const QpSolution& solution);

/// For an infeasible status: ||sum y a|| and sum y b of the certificate.
std::pair<double, double> FarkasResiduals(const QpProblem& problem,
                                          const Vector& y);

/// Thrown when the iteration limit is reached.
class QpNonconvergence : public std::runtime_error {
 public:
  QpNonconvergence(const std::string& what, Vector last_iterate,
                   double max_violation, std::vector<int> active_set)
      : std::runtime_error(what),
        last_iterate_(std::move(last_iterate)),
        max_violation_(max_violation),
        active_set_(std::move(active_set)) {}

  const Vector& last_iterate() const { return last_iterate_; }
  double max_violation() const { return max_violation_; }
  const std::vector<int>& active_set() const { return active_set_; }

 private:
  Vector last_iterate_;
  double max_violation_;
  std::vector<int> active_set_;
};

/// Dual active-set (Goldfarb-Idnani) projection solver.
///
/// Starts from the unconstrained minimiser and repeatedly adds the most
/// violated row (normalised violation, lowest index on ties), dropping rows
/// whose multipliers would turn negative. A violated row lying in the span of
/// the working set with no droppable row proves infeasibility and yields the
/// Farkas certificate. The working set is kept as an orthogonal factorisation
/// updated by Givens rotations. Deterministic given the row order.
///
/// The answer is checked before it is returned: an optimum must pass the KKT
/// tolerances and an infeasibility claim must carry a valid certificate.
/// Otherwise (badly conditioned working sets) the problem is re-solved as a
/// least-distance program through Lawson-Hanson NNLS and the better checked
/// answer is kept.
QpSolution SolveQp(const QpProblem& problem);

/// The least-distance route on its own: minimise ||x|| subject to G x >= h
/// (x = z - p on normalised rows) via NNLS on [G h]^T.
QpSolution SolveQpLeastDistance(const QpProblem& problem);

/// Exhaustive reference solver for tiny problems (dim <= 8, rows <= 14):
/// tries every active subset of size <= dim, projects onto its affine hull in
/// closed form and keeps the best primal- and dual-feasible candidate. Test
/// oracle only.
QpSolution BruteForceQp(const QpProblem& problem);

}  // namespace lyapsip
