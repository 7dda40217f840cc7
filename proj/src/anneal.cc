#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <random>
#include <thread>

#include "lyapsip/global_opt.h"

namespace lyapsip {

namespace {

constexpr double kTailLimit = 1e8;
constexpr double kInf = std::numeric_limits<double>::infinity();

// Constants of the distorted Cauchy-Lorentz visiting distribution that depend
// only on qv.
struct VisitingConstants {
  double qv, factor4_p, factor6;

  explicit VisitingConstants(double q) : qv(q) {
    const double factor2 = std::exp((4.0 - qv) * std::log(qv - 1.0));
    const double factor3 = std::exp((2.0 - qv) * std::log(2.0) / (qv - 1.0));
    factor4_p = std::sqrt(M_PI) * factor2 / (factor3 * (3.0 - qv));
    const double factor5 = 1.0 / (qv - 1.0) - 0.5;
    const double d1 = 2.0 - factor5;
    factor6 = M_PI * (1.0 - factor5) / std::sin(M_PI * (1.0 - factor5)) /
              std::exp(std::lgamma(d1));
  }
};

double Fold(double v, BoundaryMode mode) {
  if (mode == BoundaryMode::kClamp) return std::clamp(v, 0.0, 1.0);
  v = std::fmod(std::abs(v), 2.0);
  return v > 1.0 ? 2.0 - v : v;
}

class Annealer {
 public:
  Annealer(AnnealWorker worker, int dim, const AnnealConfig& cfg,
           const VisitingConstants& vc, std::uint64_t seed)
      : score_(std::move(worker.score)),
        polisher_(std::move(worker.polish)),
        dim_(dim),
        cfg_(cfg),
        vc_(vc),
        rng_(seed) {
    run_.seed = seed;
    chain_ = cfg.chain_length > 0 ? cfg.chain_length : 2 * dim;
  }

  AnnealRun Run() {
    std::vector<double> x = cfg_.initial_point.empty()
                                ? std::vector<double>(dim_, 0.5)
                                : cfg_.initial_point;
    double e = Energy(x);
    best_x_ = x;
    best_e_ = e;

    const double qv1 = cfg_.visiting_param - 1.0;
    const double t1 = std::exp(qv1 * std::log(2.0)) - 1.0;
    std::vector<double> visit(dim_);
    std::vector<double> proposal(dim_);
    for (int i = 0; i < cfg_.max_iterations; ++i) {
      const double t2 = std::exp(qv1 * std::log(i + 2.0)) - 1.0;
      const double temp = cfg_.initial_temp * t1 / t2;
      if (temp < cfg_.restart_temp_ratio * cfg_.initial_temp) {
        std::uniform_real_distribution<double> unit(0.0, 1.0);
        for (double& v : x) v = unit(rng_);
        e = Energy(x);
      }
      const double step_temp = temp / (i + 1.0);
      bool improved = false;
      for (int j = 0; j < chain_; ++j) {
        proposal = x;
        if (j < dim_) {
          Visit(temp, dim_, visit);
          for (int k = 0; k < dim_; ++k) {
            proposal[k] = Fold(x[k] + visit[k], cfg_.boundary);
          }
        } else {
          Visit(temp, 1, visit);
          const int k = (j - dim_) % dim_;
          proposal[k] = Fold(x[k] + visit[0], cfg_.boundary);
        }
        const double en = Energy(proposal);
        if (Accept(e, en, step_temp)) {
          x = proposal;
          e = en;
          if (e < best_e_) {
            best_e_ = e;
            best_x_ = x;
            improved = true;
          }
        }
      }
      if (improved && cfg_.polish == PolishMode::kOnImprovement) {
        Polish();
        x = best_x_;
        e = best_e_;
      }
      run_.trace.push_back(-best_e_);
    }
    if (cfg_.polish != PolishMode::kNone) {
      Polish();
      if (!run_.trace.empty()) run_.trace.back() = -best_e_;
    }
    run_.x = best_x_;
    run_.value = -best_e_;
    return std::move(run_);
  }

 private:
  double Energy(const std::vector<double>& x) {
    ++run_.evaluations;
    const double s = score_(x);
    return std::isnan(s) ? kInf : -s;
  }

  // Generalised Metropolis rule; downhill moves are always taken.
  bool Accept(double e, double en, double step_temp) {
    if (en < e) return true;
    if (std::isinf(en)) return false;
    if (std::isinf(e)) return true;
    const double r = unit_(rng_);
    const double qa = cfg_.accept_param;
    const double pqv_temp = 1.0 - (1.0 - qa) * (en - e) / step_temp;
    if (pqv_temp <= 0.0) return false;
    const double pqv = std::exp(std::log(pqv_temp) / (1.0 - qa));
    return r <= pqv;
  }

  void Visit(double temp, int n, std::vector<double>& out) {
    const double qv = vc_.qv;
    const double factor1 = std::exp(std::log(temp) / (qv - 1.0));
    const double factor4 = vc_.factor4_p * factor1;
    const double scale =
        std::exp(-(qv - 1.0) * std::log(vc_.factor6 / factor4) / (3.0 - qv));
    for (int k = 0; k < n; ++k) {
      const double x = normal_(rng_);
      const double y = normal_(rng_);
      const double den = std::exp((qv - 1.0) * std::log(std::abs(y)) / (3.0 - qv));
      double v = x * scale / den;
      if (!(v <= kTailLimit)) v = kTailLimit * unit_(rng_);
      if (v < -kTailLimit) v = -kTailLimit * unit_(rng_);
      out[k] = v;
    }
  }

  void Polish() {
    if (std::isinf(best_e_)) return;
    PatternSearchResult r;
    if (polisher_) {
      r = polisher_(best_x_, -best_e_);
    } else {
      const std::vector<double> lo(dim_, 0.0), hi(dim_, 1.0);
      r = CoordinateSearch(score_, best_x_, -best_e_, lo, hi, cfg_.polish_config,
                           true);
    }
    run_.evaluations += r.evaluations;
    if (-r.value < best_e_) {
      best_e_ = -r.value;
      best_x_ = std::move(r.x);
    }
  }

  ScoreFn score_;
  Polisher polisher_;
  const int dim_;
  const AnnealConfig& cfg_;
  const VisitingConstants& vc_;
  std::mt19937_64 rng_;
  std::normal_distribution<double> normal_{0.0, 1.0};
  std::uniform_real_distribution<double> unit_{0.0, 1.0};
  int chain_ = 0;
  std::vector<double> best_x_;
  double best_e_ = kInf;
  AnnealRun run_;
};

}  // namespace

void AnnealConfig::Validate() const {
  if (max_iterations < 1) throw std::invalid_argument("anneal: max_iterations must be >= 1");
  if (restarts < 1) throw std::invalid_argument("anneal: restarts must be >= 1");
  if (!(initial_temp > 0.0)) throw std::invalid_argument("anneal: initial_temp must be > 0");
  if (!(visiting_param > 1.0 && visiting_param < 3.0)) {
    throw std::invalid_argument("anneal: visiting_param must lie in (1, 3)");
  }
  if (!(accept_param < 1.0)) throw std::invalid_argument("anneal: accept_param must be < 1");
  if (chain_length < 0) throw std::invalid_argument("anneal: chain_length must be >= 0");
  if (threads < 0) throw std::invalid_argument("anneal: threads must be >= 0");
  for (double v : initial_point) {
    if (!(v >= 0.0 && v <= 1.0)) {
      throw std::invalid_argument("anneal: initial point must lie in the unit cube");
    }
  }
}

AnnealResult AnnealMaximize(const WorkerFactory& factory, int dim,
                            const AnnealConfig& cfg) {
  cfg.Validate();
  if (dim < 1) throw std::invalid_argument("anneal: dim must be >= 1");
  if (!cfg.initial_point.empty() && static_cast<int>(cfg.initial_point.size()) != dim) {
    throw std::invalid_argument("anneal: initial point has wrong dimension");
  }
  const VisitingConstants vc(cfg.visiting_param);

  std::vector<AnnealRun> runs(cfg.restarts);
  std::vector<std::exception_ptr> errors(cfg.restarts);
  std::atomic<int> next{0};
  auto worker = [&] {
    for (int r = next++; r < cfg.restarts; r = next++) {
      try {
        const std::uint64_t seed = DeriveSeed(cfg.seed, r);
        Annealer a(factory(r, seed), dim, cfg, vc, seed);
        runs[r] = a.Run();
      } catch (...) {
        errors[r] = std::current_exception();
      }
    }
  };
  int threads = cfg.threads > 0 ? cfg.threads
                                : static_cast<int>(std::thread::hardware_concurrency());
  threads = std::clamp(threads, 1, cfg.restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  for (const auto& err : errors) {
    if (err) std::rethrow_exception(err);
  }

  AnnealResult out;
  out.value = -kInf;
  for (int r = 0; r < cfg.restarts; ++r) {
    if (runs[r].value > out.value) {
      out.value = runs[r].value;
      out.best_restart = r;
    }
  }
  if (std::isinf(out.value) && out.value < 0) {
    throw AnnealFailure("annealing found no point with a finite score in " +
                        std::to_string(cfg.restarts) + " restarts");
  }
  out.x = runs[out.best_restart].x;
  out.runs = std::move(runs);
  return out;
}

AnnealResult AnnealMaximize(const ScoreFactory& factory, int dim,
                            const AnnealConfig& cfg) {
  return AnnealMaximize(
      WorkerFactory([&factory](int, std::uint64_t) { return AnnealWorker{factory(), {}}; }),
      dim, cfg);
}

AnnealResult AnnealMaximize(const ScoreFn& score, int dim,
                            const AnnealConfig& cfg) {
  return AnnealMaximize(ScoreFactory([&score] { return score; }), dim, cfg);
}

}  // namespace lyapsip
