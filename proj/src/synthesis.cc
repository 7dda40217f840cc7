#include "lyapsip/synthesis.h"

#include "lyapsip/kernels.h"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numeric>
#include <random>
#include <sstream>

namespace lyapsip {

const char* const kTripletGuidance =
    "pick a different candidate triplet: a neighborhood that excludes other "
    "equilibria and unstable regions, weaker bounds alpha/beta, or richer "
    "dictionaries";

std::string OutcomeName(Outcome o) {
  return o == Outcome::kCertified ? "certified" : "not-found";
}

namespace {

// Seed stream of the exchange candidates, apart from the restart seeds.
constexpr std::uint64_t kPoolStream = 0x45584348414e4745ULL;

Objective MakeObjective(const LyapunovTriplet& triplet, const SynthesisConfig& cfg) {
  if (cfg.anchor.empty()) return Objective::AllOnes(triplet.decision_dim());
  if (static_cast<int>(cfg.anchor.size()) != triplet.decision_dim()) {
    throw std::invalid_argument("anchor has " + std::to_string(cfg.anchor.size()) +
                                " entries, expected " +
                                std::to_string(triplet.decision_dim()));
  }
  Objective o;
  o.anchor = Eigen::Map<const Vector>(cfg.anchor.data(), cfg.anchor.size());
  return o;
}

// Random unit-cube points with their constraint rows, shared read-only by
// all workers. Rows that do not evaluate to finite numbers never register
// as violated.
struct CandidatePool {
  int count = 0, n = 0, rps = 0, d = 0;
  std::vector<double> u, a, b;

  CandidatePool(const LyapunovTriplet& triplet, const VectorField& field,
                const ExchangeConfig& ec, std::uint64_t seed)
      : n(triplet.dim()), rps(RowsPerSample(triplet)), d(triplet.decision_dim()) {
    count = ec.candidates > 0 ? ec.candidates : 20000 * n;
    const std::size_t limit = ec.memory_limit_mb * (std::size_t{1} << 20) / sizeof(double);
    count = static_cast<int>(std::min<std::size_t>(count, limit / (rps * (d + 1))));
    count = std::max(count, 1);
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    u.resize(static_cast<std::size_t>(count) * n);
    for (double& v : u) v = unit(rng);
    a.resize(static_cast<std::size_t>(count) * rps * d);
    b.resize(static_cast<std::size_t>(count) * rps);
    std::vector<RowKind> kinds(rps);
    for (int c = 0; c < count; ++c) {
      const Vector y = triplet.nbhd.SampleIn(Point(c));
      double* ac = a.data() + static_cast<std::size_t>(c) * rps * d;
      double* bc = b.data() + static_cast<std::size_t>(c) * rps;
      AssembleSampleRows(triplet, field, y, ac, bc, kinds.data());
      for (int r = 0; r < rps; ++r) {
        bool finite = std::isfinite(bc[r]);
        for (int j = 0; j < d && finite; ++j) finite = std::isfinite(ac[r * d + j]);
        if (!finite) {
          std::fill(ac + r * d, ac + (r + 1) * d, 0.0);
          bc[r] = std::numeric_limits<double>::infinity();
        }
      }
    }
  }

  std::span<const double> Point(int c) const {
    return {u.data() + static_cast<std::size_t>(c) * n, static_cast<std::size_t>(n)};
  }
};

// One restart's score and polisher, sharing a scorer.
class Worker {
 public:
  Worker(const LyapunovTriplet& triplet, const VectorField& field,
         const Objective& objective, int k, const SynthesisConfig& cfg,
         std::shared_ptr<const CandidatePool> pool, std::uint64_t seed)
      : triplet_(triplet),
        field_(field),
        seed_(seed),
        cfg_(cfg),
        scorer_(triplet, field, objective, k, cfg.qp),
        pool_(std::move(pool)),
        k_(k),
        n_(triplet.dim()),
        rps_(RowsPerSample(triplet)),
        a_(rps_, triplet.decision_dim()),
        b_(rps_),
        kinds_(rps_),
        pool_values_(pool_ ? static_cast<std::size_t>(pool_->count) * rps_ : 0) {}

  double Score(std::span<const double> u) { return scorer_.Score(u); }

  PatternSearchResult Polish(std::vector<double> x, double fx) {
    // Exchange, coordinate search, then exchange again so the result ends
    // with a worst-point search against the final solution.
    PatternSearchResult out;
    if (cfg_.exchange.enabled) Exchange(x, fx, out.evaluations);
    const std::vector<double> lo(x.size(), 0.0), hi(x.size(), 1.0);
    ScoreFn score = [this](std::span<const double> u) { return scorer_.Score(u); };
    PatternSearchResult r = CoordinateSearch(score, std::move(x), fx, lo, hi,
                                             cfg_.anneal.polish_config, true);
    out.evaluations += r.evaluations;
    x = std::move(r.x);
    fx = r.value;
    if (cfg_.exchange.enabled) Exchange(x, fx, out.evaluations);
    out.x = std::move(x);
    out.value = fx;
    return out;
  }

 private:
  // a.z - b for the rows of the sample sample_in(u).
  const Vector& RowValues(const Vector& z, std::span<const double> u) {
    const Vector y = triplet_.nbhd.SampleIn(u);
    AssembleSampleRows(triplet_, field_, y, a_.data(), b_.data(), kinds_.data());
    values_.noalias() = a_ * z - b_;
    return values_;
  }

  double RowViolation(const Vector& z, std::span<const double> u, int row) {
    const double v = RowValues(z, u)[row];
    return std::isfinite(v) ? v : -std::numeric_limits<double>::infinity();
  }

  // The most violated point for z, searched row by row: DE over the unit
  // cube seeded at the candidates that violate that row most.
  std::pair<std::vector<double>, double> WorstPoint(const Vector& z, int round) {
    const ExchangeConfig& ec = cfg_.exchange;
    const int count = pool_->count;
    const std::vector<double> lo(n_, 0.0), hi(n_, 1.0);
    kernels::Residuals(pool_->a, {z.data(), static_cast<std::size_t>(z.size())},
                       pool_->b, pool_values_);
    std::pair<std::vector<double>, double> worst{{}, -std::numeric_limits<double>::infinity()};
    for (int row = 0; row < rps_; ++row) {
      std::vector<std::pair<double, int>> ranked(count);
      for (int c = 0; c < count; ++c) {
        const double v = pool_values_[static_cast<std::size_t>(c) * rps_ + row];
        ranked[c] = {std::isfinite(v) ? -v : std::numeric_limits<double>::infinity(), c};
      }
      const int seeds = std::min(ec.de_seed_points, count);
      std::partial_sort(ranked.begin(), ranked.begin() + seeds, ranked.end());
      DeConfig de = ec.de;
      de.seed = DeriveSeed(seed_, static_cast<std::uint64_t>(round) * rps_ + row);
      for (int i = 0; i < seeds; ++i) {
        const auto c = pool_->Point(ranked[i].second);
        de.initial_members.emplace_back(c.begin(), c.end());
      }
      ScoreFn neg = [&](std::span<const double> u) { return -RowViolation(z, u, row); };
      const DeResult r = DeMinimize(neg, lo, hi, de);
      if (-r.value > worst.second) worst = {r.x, -r.value};
    }
    return worst;
  }

  void Exchange(std::vector<double>& x, double& fx, int& evaluations) {
    const ExchangeConfig& ec = cfg_.exchange;
    const int rounds = ec.max_exchanges > 0 ? ec.max_exchanges : 4 * k_;
    for (int round = 0; round < rounds; ++round) {
      const RelaxedValue sol = scorer_.Solve(x);
      ++evaluations;
      if (!sol.feasible) return;

      const auto [point, violation] = WorstPoint(sol.z, round);
      if (!(violation > ec.tol)) return;

      std::vector<double> load(k_, 0.0);
      for (std::size_t i = 0; i < sol.qp.active_set.size(); ++i) {
        load[sol.qp.active_set[i] / rps_] += std::abs(sol.qp.multipliers[i]);
      }
      std::vector<int> order(k_);
      std::iota(order.begin(), order.end(), 0);
      std::stable_sort(order.begin(), order.end(),
                       [&](int l, int r) { return load[l] < load[r]; });
      bool moved = false;
      for (int t = 0; t < std::min(ec.slots_tried, k_) && !moved; ++t) {
        std::vector<double> trial = x;
        std::copy(point.begin(), point.end(), trial.begin() + order[t] * n_);
        const double ft = scorer_.Score(trial);
        ++evaluations;
        if (ft > fx) {
          x = std::move(trial);
          fx = ft;
          moved = true;
        }
      }
      if (!moved) return;
    }
  }

  const LyapunovTriplet& triplet_;
  const VectorField& field_;
  std::uint64_t seed_;
  const SynthesisConfig& cfg_;
  RelaxationScorer scorer_;
  std::shared_ptr<const CandidatePool> pool_;
  int k_, n_, rps_;
  RowMatrix a_;
  Vector b_, values_;
  std::vector<RowKind> kinds_;
  std::vector<double> pool_values_;
};

}  // namespace

SynthesisResult Synthesize(const LyapunovTriplet& triplet, const VectorField& field,
                           const SynthesisConfig& cfg) {
  triplet.Validate();
  if (field.dim() != triplet.dim()) {
    throw std::invalid_argument("field dimension differs from triplet dimension");
  }
  const Vector f0 = field.Eval(Vector::Zero(field.dim()));
  if (!(f0.norm() <= kEquilibriumTolerance)) {
    std::ostringstream msg;
    msg << "the origin is not an equilibrium of the field (|f(0)| = " << f0.norm()
        << "); shift the field first";
    throw NotAnEquilibrium(msg.str(), f0.norm());
  }
  const int prescribed = PrescribedSampleCount(triplet);
  const int k = cfg.sample_count > 0 ? cfg.sample_count : prescribed;
  if (k < 1) throw std::invalid_argument("sample count must be >= 1");
  const Objective objective = MakeObjective(triplet, cfg);
  const int dim = k * triplet.dim();

  SynthesisResult out;
  out.sample_count = k;
  std::shared_ptr<const CandidatePool> pool;
  if (cfg.exchange.enabled) {
    pool = std::make_shared<CandidatePool>(triplet, field, cfg.exchange,
                                           DeriveSeed(cfg.anneal.seed, kPoolStream));
  }
  WorkerFactory factory = [&](int, std::uint64_t seed) {
    auto w = std::make_shared<Worker>(triplet, field, objective, k, cfg, pool, seed);
    return AnnealWorker{
        [w](std::span<const double> u) { return w->Score(u); },
        [w](std::vector<double> x, double fx) { return w->Polish(std::move(x), fx); }};
  };
  try {
    out.anneal = AnnealMaximize(factory, dim, cfg.anneal);
  } catch (const InfeasibleRelaxation& e) {
    out.outcome = Outcome::kNotFound;
    out.best_samples = e.samples();
    out.message = std::string(e.what()) + "; " + kTripletGuidance;
    return out;
  } catch (const AnnealFailure& e) {
    out.outcome = Outcome::kNotFound;
    out.message = e.what();
    return out;
  }

  // Cold re-solve at the best tuple.
  RelaxationScorer final_scorer(triplet, field, objective, k, cfg.qp);
  const RelaxedValue final = final_scorer.Solve(out.anneal.x);
  out.best_samples = final_scorer.Samples(out.anneal.x);
  out.final_qp = final.qp;
  out.final_rows = AssembleRows(triplet, field, out.best_samples);
  if (!final.feasible) {
    out.outcome = Outcome::kNotFound;
    out.message = std::string("final relaxation infeasible; ") + kTripletGuidance;
    return out;
  }
  out.value_gap = std::abs(out.anneal.value - final.value);

  Certificate& cert = out.cert;
  cert.mode = triplet.mode;
  cert.lambda.assign(final.z.data(), final.z.data() + triplet.q());
  if (triplet.mode == Mode::kAsymptotic) {
    cert.mu.assign(final.z.data() + triplet.q(), final.z.data() + final.z.size());
  }
  cert.objective_value = final.value;
  cert.relaxed_value = out.anneal.value;
  cert.seed = cfg.anneal.seed;
  cert.iterations = cfg.anneal.max_iterations;
  cert.restarts = cfg.anneal.restarts;
  out.has_certificate = true;

  out.report = Verify(triplet, field, cert, cfg.verify);
  out.checks = TheoremChecks(triplet, field, out, cfg);
  if (out.report.verdict == Verdict::kVerified) {
    out.outcome = Outcome::kCertified;
    out.message = "certificate verified";
  } else {
    out.outcome = Outcome::kNotFound;
    std::ostringstream msg;
    msg << "candidate failed verification (" << VerdictName(out.report.verdict)
        << ", worst residual " << -out.report.violation
        << "); the hypotheses (interior point, attained global maximum) may not "
           "hold for this triplet";
    out.message = msg.str();
  }
  return out;
}

std::vector<TheoremCheck> TheoremChecks(const LyapunovTriplet& triplet,
                                        const VectorField& field,
                                        const SynthesisResult& run,
                                        const SynthesisConfig& cfg) {
  std::vector<TheoremCheck> checks;
  {
    TheoremCheck c{"neighborhood_compact", true, triplet.nbhd.MaxNorm(),
                   "bounded closed ball/box by construction"};
    try {
      triplet.nbhd.Validate(triplet.mode);
    } catch (const std::exception& e) {
      c.pass = false;
      c.detail = e.what();
    }
    checks.push_back(c);
  }
  checks.push_back({"objective_strictly_convex", true, 2.0,
                    "Hessian of ||z - p||^2 is 2I"});
  if (!run.has_certificate) {
    checks.push_back({"sampled_feasibility", false, 0.0, "no certificate"});
    checks.push_back({"grid_feasibility", false, 0.0, "no certificate"});
    return checks;
  }
  Vector z(triplet.decision_dim());
  z.head(triplet.q()) = Eigen::Map<const Vector>(run.cert.lambda.data(), triplet.q());
  if (triplet.m() > 0) {
    if (run.cert.mu.empty()) {
      z.tail(triplet.m()).setZero();
    } else {
      z.tail(triplet.m()) = Eigen::Map<const Vector>(run.cert.mu.data(), triplet.m());
    }
  }
  {
    const Vector v = run.final_rows.Evaluate(z);
    const double worst = v.size() ? v.maxCoeff() : 0.0;
    std::ostringstream d;
    d << "max a.z* - b over the " << v.size() << " sampled rows";
    checks.push_back({"sampled_feasibility", worst <= 1e-9, worst, d.str()});
  }
  {
    const int n = triplet.dim();
    const int points = cfg.verify.grid_points > 0 ? cfg.verify.grid_points
                                                  : (n <= 3 ? 10000 : 100000);
    std::vector<Vector> grid;
    grid.reserve(points);
    for (const auto& u : HaltonPoints(n, points)) grid.push_back(triplet.nbhd.SampleIn(u));
    const FeasibilityReport rep = CheckSipFeasibility(triplet, field, z, grid);
    std::ostringstream d;
    d << "max a.z* - b on " << points << " grid points (lower " << rep.lower.max
      << ", derivative " << rep.derivative.max;
    if (rep.margin_lower.count) d << ", margin " << rep.margin_lower.max;
    if (rep.upper.count) d << ", upper " << rep.upper.max;
    d << ")";
    checks.push_back({"grid_feasibility", rep.worst() <= cfg.grid_feasibility_tol,
                      rep.worst(), d.str()});
  }
  {
    QpProblem qp = MakeQp(Objective{run.final_qp.z}, run.final_rows, cfg.qp);
    qp.anchor = MakeObjective(triplet, cfg).anchor;
    const KktResiduals k = ComputeKkt(qp, run.final_qp);
    const bool ok = k.Pass(cfg.qp.feasibility_tol, cfg.qp.kkt_tol);
    std::ostringstream d;
    d << "primal " << k.primal << ", stationarity " << k.stationarity << " (scale "
      << k.stationarity_scale << "), complementarity " << k.complementarity
      << " (scaled " << k.complementarity_scaled << ")";
    checks.push_back({"final_qp_kkt", ok, k.stationarity, d.str()});
  }
  checks.push_back({"value_gap", run.value_gap == 0.0, run.value_gap,
                    "|R(y*) - Phi(z*)|"});
  return checks;
}

}  // namespace lyapsip
