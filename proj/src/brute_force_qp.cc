#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "lyapsip/qp_solver.h"

namespace lyapsip {

namespace {

struct Candidate {
  bool ok = false;
  Vector z;
  std::vector<int> active;
  std::vector<double> multipliers;
  double value = std::numeric_limits<double>::infinity();
};

// Projection of p onto {z : a_S z = b_S}:
//   z = p - 1/2 A_S^T lambda,  (A_S A_S^T) lambda = 2 (A_S p - b_S).
Candidate TrySubset(const QpProblem& problem, const std::vector<int>& subset) {
  Candidate c;
  const int k = static_cast<int>(subset.size());
  const Vector& p = problem.anchor;
  if (k == 0) {
    c.z = p;
  } else {
    Eigen::MatrixXd as(k, problem.dim());
    Vector bs(k);
    for (int i = 0; i < k; ++i) {
      as.row(i) = problem.a.row(subset[i]);
      bs[i] = problem.b[subset[i]];
    }
    const Eigen::MatrixXd gram = as * as.transpose();
    Eigen::FullPivLU<Eigen::MatrixXd> lu(gram);
    lu.setThreshold(1e-12);
    if (lu.rank() < k) return c;  // dependent rows: covered by a smaller subset
    const Vector lambda = lu.solve(2.0 * (as * p - bs));
    for (int i = 0; i < k; ++i) {
      if (lambda[i] < -1e-10) return c;
    }
    c.z = p - 0.5 * as.transpose() * lambda;
    c.multipliers.assign(lambda.data(), lambda.data() + k);
  }
  for (int i = 0; i < problem.rows(); ++i) {
    if (problem.a.row(i).dot(c.z) - problem.b[i] > problem.feasibility_tol) {
      return c;
    }
  }
  c.ok = true;
  c.active = subset;
  c.value = (c.z - p).squaredNorm();
  return c;
}

}  // namespace

QpSolution BruteForceQp(const QpProblem& problem) {
  problem.Validate();
  if (problem.dim() > 8 || problem.rows() > 14) {
    throw std::invalid_argument("BruteForceQp: limited to dim <= 8, rows <= 14");
  }
  const int rows = problem.rows();
  Candidate best;
  for (unsigned mask = 0; mask < (1u << rows); ++mask) {
    if (__builtin_popcount(mask) > problem.dim()) continue;
    std::vector<int> subset;
    for (int i = 0; i < rows; ++i) {
      if (mask & (1u << i)) subset.push_back(i);
    }
    Candidate c = TrySubset(problem, subset);
    if (c.ok && c.value < best.value) best = std::move(c);
  }
  QpSolution out;
  if (!best.ok) {
    out.status = QpStatus::kInfeasible;
    out.z = problem.anchor;
    out.value = std::numeric_limits<double>::infinity();
    return out;
  }
  out.status = QpStatus::kOptimal;
  out.z = best.z;
  out.value = best.value;
  out.active_set = best.active;
  out.multipliers = best.multipliers;
  return out;
}

}  // namespace lyapsip
