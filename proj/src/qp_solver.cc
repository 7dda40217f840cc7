#include "lyapsip/qp_solver.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <type_traits>

#include <Eigen/Dense>

#include "lyapsip/kernels.h"

namespace lyapsip {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

using LongVec = Eigen::Matrix<long double, Eigen::Dynamic, 1>;

// Below this, a normalised row's component orthogonal to the working set is
// treated as zero (the row is linearly dependent on the working set).
constexpr double kDependenceTol = 1e-12;

template <typename T>
struct Givens {
  T c, s;
};

// Rotation mapping (x, y) to (hypot(x, y), 0).
template <typename T>
inline Givens<T> MakeGivens(T x, T y) {
  using std::hypot;
  const T h = hypot(x, y);
  if (h == T(0)) return {T(1), T(0)};
  return {x / h, y / h};
}

template <typename M, typename T>
inline void RotateColumns(M& m, int i, int j, Givens<T> g) {
  for (int r = 0; r < m.rows(); ++r) {
    const T a = m(r, i), b = m(r, j);
    m(r, i) = g.c * a + g.s * b;
    m(r, j) = -g.s * a + g.c * b;
  }
}

std::span<double> Span(Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}

// Working state of the dual method for the scaled problem
//   minimize 1/2 ||z - p||^2  s.t.  n_i . z >= c_i,  n_i = -a_i/|a_i|,
//   c_i = -b_i/|a_i|,
// carried out in arithmetic T (double, or long double for the retry).
template <typename T>
class DualActiveSet {
 public:
  using Vec = Eigen::Matrix<T, Eigen::Dynamic, 1>;
  using Mat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
  using RowMat = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

  explicit DualActiveSet(const QpProblem& problem)
      : problem_(problem), dim_(problem.dim()), rows_(problem.rows()) {
    norms_.resize(rows_);
    unit_a_.resize(rows_, dim_);
    unit_b_.resize(rows_);
    const RowMat a = problem.a.template cast<T>();
    for (int i = 0; i < rows_; ++i) {
      norms_[i] = a.row(i).norm();
      if (norms_[i] > T(0)) {
        unit_a_.row(i) = a.row(i) / norms_[i];
        unit_b_[i] = T(problem.b[i]) / norms_[i];
      } else {
        unit_a_.row(i).setZero();
        unit_b_[i] = T(0);
      }
    }
    anchor_ = problem.anchor.template cast<T>();
    z_ = anchor_;
    j_ = Mat::Identity(dim_, dim_);
    r_ = Mat::Zero(dim_, dim_);
    in_active_.assign(rows_, false);
    residual_.resize(rows_);
  }

  QpSolution Run() {
    QpSolution out;
    // A zero row 0 <= b with b < 0 is infeasible on its own.
    for (int i = 0; i < rows_; ++i) {
      if (norms_[i] == T(0) && problem_.b[i] < -problem_.feasibility_tol) {
        out.status = QpStatus::kInfeasible;
        out.farkas = Vector::Zero(rows_);
        out.farkas[i] = 1.0;
        out.z = problem_.anchor;
        out.value = 0.0;
        return out;
      }
    }

    while (true) {
      const int p = MostViolated();
      if (p < 0) break;
      if (!AddConstraint(p, out)) return out;
    }
    Finish(out);
    return out;
  }

 private:
  void ComputeResiduals() {
    if constexpr (std::is_same_v<T, double>) {
      kernels::Residuals({unit_a_.data(), static_cast<std::size_t>(unit_a_.size())},
                         Span(z_), Span(unit_b_), Span(residual_));
    } else {
      residual_.noalias() = unit_a_ * z_ - unit_b_;
    }
  }

  // Index of the row with the largest normalised violation among rows whose
  // unnormalised violation exceeds the tolerance; -1 if none.
  int MostViolated() {
    if (rows_ == 0) return -1;
    ComputeResiduals();
    int best = -1;
    T best_value = T(0);
    for (int i = 0; i < rows_; ++i) {
      if (in_active_[i] || norms_[i] == T(0)) continue;
      if (residual_[i] * norms_[i] <= T(problem_.feasibility_tol)) continue;
      if (best < 0 || residual_[i] > best_value) {
        best = i;
        best_value = residual_[i];
      }
    }
    return best;
  }

  void CountIteration() {
    if (++iterations_ > problem_.max_iterations) {
      const Vector z = z_.template cast<double>();
      double worst = 0.0;
      for (int i = 0; i < rows_; ++i) {
        worst = std::max(worst, problem_.a.row(i).dot(z) - problem_.b[i]);
      }
      std::ostringstream msg;
      msg << "QP solver did not converge within " << problem_.max_iterations
          << " iterations (max violation " << worst << ", " << active_.size()
          << " active rows)";
      throw QpNonconvergence(msg.str(), z, worst, active_);
    }
  }

  // Brings row p into the working set, dropping rows as needed. Returns false
  // (with `out` filled as infeasible) if the rows are inconsistent.
  bool AddConstraint(int p, QpSolution& out) {
    // n_p = -unit_a_p.
    Vec np = -unit_a_.row(p).transpose();
    T u_plus = T(0);
    while (true) {
      CountIteration();
      const int q = static_cast<int>(active_.size());
      Vec d = j_.transpose() * np;
      Vec step = Vec::Zero(dim_);
      T step_sq = T(0);
      if (q < dim_) {
        step = j_.rightCols(dim_ - q) * d.tail(dim_ - q);
        step_sq = d.tail(dim_ - q).squaredNorm();
      }
      Vec r(q);
      if (q > 0) {
        r = r_.topLeftCorner(q, q).template triangularView<Eigen::Upper>().solve(d.head(q));
      }
      // Largest dual step keeping the working-set multipliers nonnegative.
      T t1 = std::numeric_limits<T>::infinity();
      int drop = -1;
      for (int k = 0; k < q; ++k) {
        if (r[k] > T(0)) {
          const T ratio = u_[k] / r[k];
          if (ratio < t1) {
            t1 = ratio;
            drop = k;
          }
        }
      }
      const T slack = np.dot(z_) + unit_b_[p];  // < 0 while violated
      using std::sqrt;
      if (sqrt(step_sq) <= T(kDependenceTol)) {
        if (drop < 0) {
          // n_p = sum_k r_k n_k with r <= 0: the row contradicts the
          // working set.
          out.status = QpStatus::kInfeasible;
          out.farkas = Vector::Zero(rows_);
          out.farkas[p] = static_cast<double>(T(1) / norms_[p]);
          for (int k = 0; k < q; ++k) {
            out.farkas[active_[k]] =
                static_cast<double>(std::max(T(0), -r[k]) / norms_[active_[k]]);
          }
          out.z = z_.template cast<double>();
          out.value = (out.z - problem_.anchor).squaredNorm();
          out.iterations = iterations_;
          out.active_set = active_;
          return false;
        }
        for (int k = 0; k < q; ++k) u_[k] -= t1 * r[k];
        u_plus += t1;
        Drop(drop);
        continue;
      }
      const T t2 = -slack / step_sq;
      if (t2 <= t1) {
        z_ += t2 * step;
        for (int k = 0; k < q; ++k) u_[k] -= t2 * r[k];
        u_plus += t2;
        Append(p, d, u_plus);
        return true;
      }
      z_ += t1 * step;
      for (int k = 0; k < q; ++k) u_[k] -= t1 * r[k];
      u_plus += t1;
      Drop(drop);
    }
  }

  // d = J^T n_p for the entering row; rotates d[q+1:] to zero.
  void Append(int p, Vec& d, T u) {
    const int q = static_cast<int>(active_.size());
    for (int j = dim_ - 1; j > q; --j) {
      const Givens<T> g = MakeGivens(d[j - 1], d[j]);
      if (g.s == T(0) && g.c == T(1)) continue;
      d[j - 1] = g.c * d[j - 1] + g.s * d[j];
      d[j] = T(0);
      RotateColumns(j_, j - 1, j, g);
    }
    r_.col(q).head(q + 1) = d.head(q + 1);
    active_.push_back(p);
    u_.push_back(std::max(T(0), u));
    in_active_[p] = true;
  }

  // Removes working-set position k and restores the triangular factor.
  void Drop(int k) {
    const int q = static_cast<int>(active_.size());
    in_active_[active_[k]] = false;
    active_.erase(active_.begin() + k);
    u_.erase(u_.begin() + k);
    for (int c = k; c < q - 1; ++c) r_.col(c) = r_.col(c + 1);
    r_.col(q - 1).setZero();
    for (int j = k; j < q - 1; ++j) {
      const Givens<T> g = MakeGivens(r_(j, j), r_(j + 1, j));
      for (int c = j; c < q - 1; ++c) {
        const T a = r_(j, c), b = r_(j + 1, c);
        r_(j, c) = g.c * a + g.s * b;
        r_(j + 1, c) = -g.s * a + g.c * b;
      }
      r_(j + 1, j) = T(0);
      RotateColumns(j_, j, j + 1, g);
    }
  }

  void Finish(QpSolution& out) {
    // Rebuild z from the multipliers so stationarity holds to rounding.
    Vec rebuilt = anchor_;
    for (std::size_t k = 0; k < active_.size(); ++k) {
      rebuilt -= u_[k] * unit_a_.row(active_[k]).transpose();
    }
    const Vector rebuilt_d = rebuilt.template cast<double>();
    double worst = -kInf;
    for (int i = 0; i < rows_; ++i) {
      worst = std::max(worst, problem_.a.row(i).dot(rebuilt_d) - problem_.b[i]);
    }
    out.z = (rows_ == 0 || worst <= problem_.feasibility_tol)
                ? rebuilt_d
                : Vector(z_.template cast<double>());

    out.status = QpStatus::kOptimal;
    out.value = (out.z - problem_.anchor).squaredNorm();
    out.active_set = active_;
    out.multipliers.resize(active_.size());
    for (std::size_t k = 0; k < active_.size(); ++k) {
      out.multipliers[k] = static_cast<double>(T(2) * u_[k] / norms_[active_[k]]);
    }
    out.iterations = iterations_;
  }

  const QpProblem& problem_;
  const int dim_;
  const int rows_;
  std::vector<T> norms_;
  RowMat unit_a_;
  Vec unit_b_;
  Vec anchor_;
  Vec z_;
  Mat j_;
  Mat r_;
  std::vector<int> active_;
  std::vector<T> u_;
  std::vector<bool> in_active_;
  Vec residual_;
  int iterations_ = 0;
};

}  // namespace

void QpProblem::Validate() const {
  if (anchor.size() < 1) throw std::invalid_argument("QP: dimension must be >= 1");
  if (a.rows() != b.size()) {
    throw std::invalid_argument("QP: row count of a and b differ");
  }
  if (a.rows() > 0 && a.cols() != anchor.size()) {
    throw std::invalid_argument("QP: row length differs from anchor dimension");
  }
  if (!anchor.allFinite() || !b.allFinite() || (a.size() > 0 && !a.allFinite())) {
    throw std::invalid_argument("QP: non-finite data");
  }
  if (max_iterations < 1) throw std::invalid_argument("QP: max_iterations < 1");
}

KktResiduals ComputeKkt(const QpProblem& problem, const QpSolution& solution) {
  KktResiduals k;
  // Accumulated in long double: multipliers of nearly dependent rows can be
  // large enough to swamp a double sum.
  LongVec grad = 2.0L * (solution.z - problem.anchor).cast<long double>();
  std::vector<double> mult(problem.rows(), 0.0);
  for (std::size_t i = 0; i < solution.active_set.size(); ++i) {
    mult[solution.active_set[i]] = solution.multipliers[i];
  }
  k.min_multiplier = 0.0;
  double scale = static_cast<double>(grad.norm());
  double weighted = 0.0;
  for (int i = 0; i < problem.rows(); ++i) {
    const double norm = problem.a.row(i).norm();
    const double slack = problem.a.row(i).dot(solution.z) - problem.b[i];
    k.primal = std::max(k.primal, slack);
    k.complementarity = std::max(k.complementarity, std::abs(mult[i] * slack));
    if (mult[i] > 0.0 && norm > 0.0) {
      k.complementarity_scaled = std::max(k.complementarity_scaled, std::abs(slack) / norm);
    }
    weighted += std::abs(mult[i]) * norm;
    k.min_multiplier = std::min(k.min_multiplier, mult[i]);
    grad += static_cast<long double>(mult[i]) *
            problem.a.row(i).transpose().cast<long double>();
  }
  k.stationarity = static_cast<double>(grad.norm());
  k.stationarity_scale = std::max({1.0, scale, weighted});
  return k;
}

std::pair<double, double> FarkasResiduals(const QpProblem& problem,
                                          const Vector& y) {
  Vector combo = Vector::Zero(problem.dim());
  double rhs = 0.0;
  for (int i = 0; i < problem.rows(); ++i) {
    combo += y[i] * problem.a.row(i).transpose();
    rhs += y[i] * problem.b[i];
  }
  return {combo.norm(), rhs};
}

namespace {

// Lawson-Hanson NNLS: minimise ||e u - f|| over u >= 0.
Vector Nnls(const Eigen::MatrixXd& e, const Vector& f, int max_iterations,
            int& iterations) {
  const int m = static_cast<int>(e.cols());
  Vector u = Vector::Zero(m);
  std::vector<bool> passive(m, false);
  const double tol = 10.0 * std::numeric_limits<double>::epsilon() *
                     std::max<double>(1.0, m > 0 ? e.cwiseAbs().maxCoeff() : 0.0) *
                     std::max<int>(m, static_cast<int>(e.rows()));
  auto solve_passive = [&](Vector& s) {
    std::vector<int> idx;
    for (int j = 0; j < m; ++j) {
      if (passive[j]) idx.push_back(j);
    }
    Eigen::MatrixXd sub(e.rows(), idx.size());
    for (std::size_t k = 0; k < idx.size(); ++k) sub.col(k) = e.col(idx[k]);
    const Vector sol = sub.colPivHouseholderQr().solve(f);
    s = Vector::Zero(m);
    for (std::size_t k = 0; k < idx.size(); ++k) s[idx[k]] = sol[k];
  };
  Vector s(m);
  while (true) {
    const Vector w = e.transpose() * (f - e * u);
    int t = -1;
    for (int j = 0; j < m; ++j) {
      if (!passive[j] && w[j] > tol && (t < 0 || w[j] > w[t])) t = j;
    }
    if (t < 0) break;
    passive[t] = true;
    while (true) {
      if (++iterations > max_iterations) return u;
      solve_passive(s);
      double alpha = kInf;
      for (int j = 0; j < m; ++j) {
        if (passive[j] && s[j] <= 0.0) alpha = std::min(alpha, u[j] / (u[j] - s[j]));
      }
      if (alpha == kInf) {
        u = s;
        break;
      }
      u += alpha * (s - u);
      for (int j = 0; j < m; ++j) {
        if (passive[j] && u[j] <= tol) {
          passive[j] = false;
          u[j] = 0.0;
        }
      }
    }
  }
  return u;
}

// An optimum is trusted when z is feasible and the duality gap of its
// multipliers is small: then its value is within the gap of the true one.
// Evaluated in long double so large multipliers do not swamp the sums.
bool Trusted(const QpProblem& problem, const QpSolution& s) {
  const int n = problem.dim(), m = problem.rows();
  if (s.status == QpStatus::kInfeasible) {
    if (s.farkas.size() != m) return false;
    long double scale = 0.0L, rhs = 0.0L;
    LongVec combo = LongVec::Zero(n);
    for (int i = 0; i < m; ++i) {
      if (!(s.farkas[i] >= 0.0)) return false;
      const long double y = s.farkas[i];
      scale += y * static_cast<long double>(problem.a.row(i).norm());
      combo += y * problem.a.row(i).transpose().cast<long double>();
      rhs += y * static_cast<long double>(problem.b[i]);
    }
    const long double c = combo.norm();
    return scale > 0.0L && c <= 1e-9L * scale &&
           rhs < -static_cast<long double>(problem.feasibility_tol) * scale -
                     c * (scale + 1.0L);
  }
  if (s.z.size() != n || !s.z.allFinite()) return false;
  for (int i = 0; i < m; ++i) {
    if (problem.a.row(i).dot(s.z) - problem.b[i] > problem.feasibility_tol) return false;
  }
  const LongVec p = problem.anchor.cast<long double>();
  const LongVec z = s.z.cast<long double>();
  LongVec zu = p;
  for (std::size_t k = 0; k < s.active_set.size(); ++k) {
    if (!(s.multipliers[k] >= 0.0) || !std::isfinite(s.multipliers[k])) return false;
    zu -= 0.5L * s.multipliers[k] *
          problem.a.row(s.active_set[k]).transpose().cast<long double>();
  }
  long double dual = (zu - p).squaredNorm();
  for (std::size_t k = 0; k < s.active_set.size(); ++k) {
    const int i = s.active_set[k];
    dual += s.multipliers[k] *
            (problem.a.row(i).cast<long double>().dot(zu) - problem.b[i]);
  }
  const long double primal = (z - p).squaredNorm();
  return primal - dual <= 1e-8L * std::max(1.0L, primal);
}

}  // namespace

QpSolution SolveQpLeastDistance(const QpProblem& problem) {
  problem.Validate();
  const int n = problem.dim(), m = problem.rows();
  QpSolution out;
  out.fallback = true;
  std::vector<double> norms(m);
  Eigen::MatrixXd e(n + 1, m);
  const Vector ap = problem.a * problem.anchor;
  for (int i = 0; i < m; ++i) {
    norms[i] = problem.a.row(i).norm();
    const double scale = norms[i] > 0.0 ? norms[i] : 1.0;
    // G = -A/|a|, h = (A p - b)/|a|.
    e.col(i).head(n) = -problem.a.row(i).transpose() / scale;
    e(n, i) = (ap[i] - problem.b[i]) / scale;
  }
  Vector f = Vector::Zero(n + 1);
  f[n] = 1.0;
  const Vector u = Nnls(e, f, problem.max_iterations, out.iterations);
  const Vector r = e * u - f;
  const double denom = -r[n];  // 1 - h.u
  if (!(denom > 1e-12)) {
    out.status = QpStatus::kInfeasible;
    out.farkas = Vector::Zero(m);
    for (int i = 0; i < m; ++i) {
      out.farkas[i] = u[i] / (norms[i] > 0.0 ? norms[i] : 1.0);
    }
    out.z = problem.anchor;
    out.value = 0.0;
    return out;
  }
  out.z = problem.anchor - r.head(n) / r[n];
  out.value = (out.z - problem.anchor).squaredNorm();
  for (int i = 0; i < m; ++i) {
    if (u[i] > 0.0) {
      out.active_set.push_back(i);
      // z - p = G^T mu with mu = u / (1 - h.u); for the objective
      // ||z - p||^2 the multiplier of the unscaled row is 2 mu / |a|.
      const double scale = norms[i] > 0.0 ? norms[i] : 1.0;
      out.multipliers.push_back(2.0 * u[i] / denom / scale);
    }
  }
  return out;
}

QpSolution SolveQp(const QpProblem& problem) {
  problem.Validate();
  QpSolution primary = DualActiveSet<double>(problem).Run();
  if (Trusted(problem, primary)) return primary;
  std::vector<QpSolution> tried;
  tried.push_back(std::move(primary));
  QpSolution extended = DualActiveSet<long double>(problem).Run();
  extended.fallback = true;
  extended.iterations += tried[0].iterations;
  if (Trusted(problem, extended)) return extended;
  tried.push_back(std::move(extended));
  QpSolution distance = SolveQpLeastDistance(problem);
  distance.iterations += tried[1].iterations;
  if (Trusted(problem, distance)) return distance;
  tried.push_back(std::move(distance));
  // Nothing checks out: prefer the feasible answer of least value.
  int pick = -1;
  for (int c = 0; c < static_cast<int>(tried.size()); ++c) {
    const QpSolution& t = tried[c];
    if (t.status != QpStatus::kOptimal || !t.z.allFinite()) continue;
    if (ComputeKkt(problem, t).primal > problem.feasibility_tol) continue;
    if (pick < 0 || t.value < tried[pick].value) pick = c;
  }
  return std::move(tried[pick < 0 ? 0 : pick]);
}

}  // namespace lyapsip
