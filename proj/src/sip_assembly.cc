#include "lyapsip/sip_assembly.h"

#include <algorithm>
#include <cstring>
#include <sstream>

namespace lyapsip {

std::string RowKindName(RowKind kind) {
  switch (kind) {
    case RowKind::kLower:
      return "lower";
    case RowKind::kUpper:
      return "upper";
    case RowKind::kMarginLower:
      return "margin_lower";
    case RowKind::kDerivative:
      return "derivative";
  }
  return "unknown";
}

Vector ConstraintBlock::Evaluate(const Vector& z) const { return a * z - b; }

int RowsPerSample(const LyapunovTriplet& triplet) {
  switch (triplet.mode) {
    case Mode::kStability:
      return 2 + (triplet.omega ? 1 : 0);
    case Mode::kAsymptotic:
      return 3 + (triplet.omega ? 1 : 0);
    case Mode::kChetaev:
      return 2;
  }
  return 0;
}

int PrescribedSampleCount(const LyapunovTriplet& triplet) {
  return triplet.mode == Mode::kAsymptotic ? triplet.q() + triplet.m()
                                           : triplet.q();
}

void AssembleSampleRows(const LyapunovTriplet& triplet, const VectorField& field,
                        const Vector& y, double* a, double* b, RowKind* kinds) {
  const int q = triplet.q();
  const int m = triplet.m();
  const int d = q + m;
  const int rps = RowsPerSample(triplet);
  std::fill(a, a + static_cast<std::ptrdiff_t>(rps) * d, 0.0);

  const double r = y.norm();
  const Vector f = field.Eval(y);
  int row = 0;
  auto put = [&](RowKind kind, double rhs) {
    kinds[row] = kind;
    b[row] = rhs;
    return a + static_cast<std::ptrdiff_t>(row++) * d;
  };

  double* lower = put(RowKind::kLower, -triplet.alpha.Value(r));
  std::vector<double> phi(q);
  for (int i = 0; i < q; ++i) {
    phi[i] = triplet.v_dict[i].Value(y);
    lower[i] = -phi[i];
  }

  if (triplet.mode == Mode::kAsymptotic) {
    double* margin = put(RowKind::kMarginLower, -triplet.beta.Value(r));
    for (int j = 0; j < m; ++j) margin[q + j] = -triplet.w_dict[j].Value(y);
  }

  double* deriv = put(RowKind::kDerivative, 0.0);
  const double sign = triplet.mode == Mode::kChetaev ? -1.0 : 1.0;
  for (int i = 0; i < q; ++i) {
    deriv[i] = sign * triplet.v_dict[i].DirectionalDerivative(y, f);
  }
  if (triplet.mode == Mode::kAsymptotic) {
    for (int j = 0; j < m; ++j) {
      deriv[q + j] = -a[static_cast<std::ptrdiff_t>(1) * d + q + j];
    }
  }

  if (triplet.omega && triplet.mode != Mode::kChetaev) {
    double* upper = put(RowKind::kUpper, triplet.omega->Value(r));
    for (int i = 0; i < q; ++i) upper[i] = phi[i];
  }
}

ConstraintBlock AssembleRows(const LyapunovTriplet& triplet,
                             const VectorField& field,
                             const std::vector<Vector>& samples) {
  if (field.dim() != triplet.dim()) {
    throw std::invalid_argument("field dimension " + std::to_string(field.dim()) +
                                " differs from triplet dimension " +
                                std::to_string(triplet.dim()));
  }
  const int rps = RowsPerSample(triplet);
  const int d = triplet.decision_dim();
  const int rows = rps * static_cast<int>(samples.size());
  ConstraintBlock block;
  block.a.resize(rows, d);
  block.b.resize(rows);
  block.kinds.resize(rows);
  block.sample_index.resize(rows);
  block.samples = samples;
  for (std::size_t s = 0; s < samples.size(); ++s) {
    const int first = rps * static_cast<int>(s);
    AssembleSampleRows(triplet, field, samples[s], block.a.row(first).data(),
                       block.b.data() + first, block.kinds.data() + first);
    for (int k = 0; k < rps; ++k) block.sample_index[first + k] = static_cast<int>(s);
  }
  return block;
}

ConstraintBlock AssembleRows(const LyapunovTriplet& triplet,
                             const VectorField& field, const Vector& y) {
  return AssembleRows(triplet, field, std::vector<Vector>{y});
}

QpProblem MakeQp(const Objective& objective, const ConstraintBlock& block,
                 const QpSettings& settings) {
  QpProblem qp;
  qp.anchor = objective.anchor;
  qp.a = block.a;
  qp.b = block.b;
  qp.feasibility_tol = settings.feasibility_tol;
  qp.kkt_tol = settings.kkt_tol;
  qp.max_iterations = settings.max_iterations;
  return qp;
}

RelaxedValue ComputeRelaxedValue(const LyapunovTriplet& triplet,
                                 const VectorField& field,
                                 const Objective& objective,
                                 const std::vector<Vector>& samples,
                                 const QpSettings& settings) {
  if (samples.empty()) throw std::invalid_argument("relaxed value: no samples");
  if (objective.anchor.size() != triplet.decision_dim()) {
    throw std::invalid_argument("objective anchor has wrong dimension");
  }
  const ConstraintBlock block = AssembleRows(triplet, field, samples);
  RelaxedValue out;
  out.qp = SolveQp(MakeQp(objective, block, settings));
  out.z = out.qp.z;
  out.feasible = out.qp.status == QpStatus::kOptimal;
  out.value = out.feasible ? out.qp.value
                           : std::numeric_limits<double>::infinity();
  return out;
}

double FeasibilityReport::worst() const {
  return std::max({lower.max, upper.max, margin_lower.max, derivative.max});
}

FeasibilityReport CheckSipFeasibility(const LyapunovTriplet& triplet,
                                      const VectorField& field, const Vector& z,
                                      const std::vector<Vector>& grid) {
  if (z.size() != triplet.decision_dim()) {
    throw std::invalid_argument("feasibility check: z has wrong dimension");
  }
  FeasibilityReport report;
  const int rps = RowsPerSample(triplet);
  const int d = triplet.decision_dim();
  RowMatrix a(rps, d);
  Vector b(rps);
  std::vector<RowKind> kinds(rps);
  for (const Vector& y : grid) {
    AssembleSampleRows(triplet, field, y, a.data(), b.data(), kinds.data());
    const Vector v = a * z - b;
    for (int k = 0; k < rps; ++k) {
      RowViolation* slot = nullptr;
      switch (kinds[k]) {
        case RowKind::kLower:
          slot = &report.lower;
          break;
        case RowKind::kUpper:
          slot = &report.upper;
          break;
        case RowKind::kMarginLower:
          slot = &report.margin_lower;
          break;
        case RowKind::kDerivative:
          slot = &report.derivative;
          break;
      }
      ++slot->count;
      if (v[k] > slot->max) {
        slot->max = v[k];
        slot->argmax = y;
      }
    }
  }
  return report;
}

RelaxationScorer::RelaxationScorer(const LyapunovTriplet& triplet,
                                   const VectorField& field, Objective objective,
                                   int sample_count, QpSettings settings)
    : triplet_(triplet),
      field_(field),
      objective_(std::move(objective)),
      settings_(settings),
      k_(sample_count),
      n_(triplet.dim()),
      d_(triplet.decision_dim()),
      rps_(RowsPerSample(triplet)) {
  if (k_ < 1) throw std::invalid_argument("scorer: sample count must be >= 1");
  if (objective_.anchor.size() != d_) {
    throw std::invalid_argument("objective anchor has wrong dimension");
  }
  slot_u_.assign(k_, std::vector<double>(n_, 0.0));
  slot_valid_.assign(k_, false);
  qp_.anchor = objective_.anchor;
  qp_.a.resize(static_cast<Eigen::Index>(k_) * rps_, d_);
  qp_.b.resize(static_cast<Eigen::Index>(k_) * rps_);
  qp_.feasibility_tol = settings_.feasibility_tol;
  qp_.kkt_tol = settings_.kkt_tol;
  qp_.max_iterations = settings_.max_iterations;
  kinds_.resize(static_cast<std::size_t>(k_) * rps_);
}

std::vector<Vector> RelaxationScorer::Samples(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dimension()) {
    throw std::invalid_argument("scorer: point has wrong dimension");
  }
  std::vector<Vector> samples;
  samples.reserve(k_);
  for (int s = 0; s < k_; ++s) {
    samples.push_back(triplet_.nbhd.SampleIn(u.subspan(s * n_, n_)));
  }
  return samples;
}

void RelaxationScorer::Refresh(std::span<const double> u) {
  if (static_cast<int>(u.size()) != dimension()) {
    throw std::invalid_argument("scorer: point has wrong dimension");
  }
  for (int s = 0; s < k_; ++s) {
    const double* seg = u.data() + s * n_;
    if (slot_valid_[s] &&
        std::memcmp(seg, slot_u_[s].data(), sizeof(double) * n_) == 0) {
      continue;
    }
    const Vector y = triplet_.nbhd.SampleIn({seg, static_cast<std::size_t>(n_)});
    const int first = s * rps_;
    AssembleSampleRows(triplet_, field_, y, qp_.a.row(first).data(),
                       qp_.b.data() + first, kinds_.data() + first);
    std::memcpy(slot_u_[s].data(), seg, sizeof(double) * n_);
    slot_valid_[s] = true;
  }
}

RelaxedValue RelaxationScorer::Solve(std::span<const double> u) {
  Refresh(u);
  RelaxedValue out;
  out.qp = SolveQp(qp_);
  out.z = out.qp.z;
  out.feasible = out.qp.status == QpStatus::kOptimal;
  out.value = out.feasible ? out.qp.value
                           : std::numeric_limits<double>::infinity();
  return out;
}

double RelaxationScorer::Score(std::span<const double> u) {
  RelaxedValue r = Solve(u);
  if (!r.feasible) {
    throw InfeasibleRelaxation(
        "the sampled relaxation is infeasible: no coefficient vector satisfies "
        "the constraints at these samples, so the SIP is infeasible for this "
        "triplet",
        Samples(u));
  }
  return r.value;
}

}  // namespace lyapsip
