#pragma once

// Random projection QPs with a known feasibility status.

#include <algorithm>
#include <random>

#include "lyapsip/qp_solver.h"

namespace lyapsip::testing {

/// Feasible by construction: rows are slack-perturbed around a random point.
inline QpProblem RandomFeasibleQp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 5), rows(0, 10);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> slack(0.0, 1.0);
  std::bernoulli_distribution tight(0.4);
  QpProblem qp;
  const int d = dim(rng), m = rows(rng);
  qp.anchor = Vector(d);
  Vector z0(d);
  for (int i = 0; i < d; ++i) {
    qp.anchor[i] = 2.0 * g(rng);
    z0[i] = g(rng);
  }
  qp.a = RowMatrix(m, d);
  qp.b = Vector(m);
  for (int r = 0; r < m; ++r) {
    for (int i = 0; i < d; ++i) qp.a(r, i) = g(rng);
    qp.b[r] = qp.a.row(r).dot(z0) + (tight(rng) ? 0.0 : slack(rng));
  }
  return qp;
}

/// Infeasible by construction: rows admit y >= 0 with sum y a = 0 and
/// sum y b = -1.
inline QpProblem RandomInfeasibleQp(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> dim(1, 5), extra(0, 6);
  std::normal_distribution<double> g(0.0, 1.0);
  std::uniform_real_distribution<double> weight(0.2, 2.0);
  QpProblem qp;
  const int d = dim(rng);
  const int k = 2 + std::uniform_int_distribution<int>(0, 2)(rng);  // rows in the certificate
  const int m = k + extra(rng);
  qp.anchor = Vector(d);
  for (int i = 0; i < d; ++i) qp.anchor[i] = g(rng);
  qp.a = RowMatrix(m, d);
  qp.b = Vector(m);
  Vector y(k);
  for (int i = 0; i < k; ++i) y[i] = weight(rng);
  Eigen::RowVectorXd sum = Eigen::RowVectorXd::Zero(d);
  double bsum = 0.0;
  for (int r = 0; r < k - 1; ++r) {
    for (int i = 0; i < d; ++i) qp.a(r, i) = g(rng);
    qp.b[r] = g(rng);
    sum += y[r] * qp.a.row(r);
    bsum += y[r] * qp.b[r];
  }
  qp.a.row(k - 1) = -sum / y[k - 1];
  qp.b[k - 1] = (-1.0 - bsum) / y[k - 1];
  for (int r = k; r < m; ++r) {
    for (int i = 0; i < d; ++i) qp.a(r, i) = g(rng);
    qp.b[r] = g(rng) + 1.0;
  }
  // Shuffle so the certificate rows are not always first.
  std::vector<int> perm(m);
  for (int i = 0; i < m; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  RowMatrix a = qp.a;
  Vector b = qp.b;
  for (int i = 0; i < m; ++i) {
    qp.a.row(i) = a.row(perm[i]);
    qp.b[i] = b[perm[i]];
  }
  return qp;
}

}  // namespace lyapsip::testing
