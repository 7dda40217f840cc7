#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace lyapsip {

using ScoreFn = std::function<double(std::span<const double>)>;

/// Builds a fresh score function. Called once per worker so stateful scores
/// (caches, child processes) stay confined to one thread.
using ScoreFactory = std::function<ScoreFn()>;

/// Counter-based seed split: the i-th child seed of `master`.
std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index);

// --- Coordinate pattern search ---------------------------------------------

struct PatternSearchConfig {
  double initial_step = 0.1;
  double min_step = 1e-9;
  int max_evaluations = 20000;
};

struct PatternSearchResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
};

/// Compass search on a box: tries +/- step along each coordinate in turn,
/// accepts strict improvements, and halves the step after a sweep without
/// one. `maximize` selects the direction of improvement. `fx` is f(x).
PatternSearchResult CoordinateSearch(const ScoreFn& f, std::vector<double> x,
                                     double fx, std::span<const double> lo,
                                     std::span<const double> hi,
                                     const PatternSearchConfig& cfg,
                                     bool maximize);

// --- Simulated annealing ---------------------------------------------------

enum class BoundaryMode { kReflect, kClamp };

enum class PolishMode { kNone, kFinal, kOnImprovement };

/// Generalised simulated annealing on the unit cube, patterned on dual
/// annealing: a distorted Cauchy-Lorentz visiting distribution, the
/// generalised Metropolis acceptance rule, and the temperature schedule
///   T(i) = T0 (2^(qv-1) - 1) / ((i + 2)^(qv-1) - 1).
struct AnnealConfig {
  int max_iterations = 30;
  int restarts = 10;
  std::uint64_t seed = 0;
  double initial_temp = 5230.0;
  double restart_temp_ratio = 2e-5;
  double visiting_param = 2.62;
  double accept_param = -5.0;
  /// Proposals per iteration; 0 means 2 * dim (all coordinates moved for the
  /// first dim proposals, one coordinate for each of the next dim).
  int chain_length = 0;
  BoundaryMode boundary = BoundaryMode::kReflect;
  PolishMode polish = PolishMode::kOnImprovement;
  PatternSearchConfig polish_config;
  /// Worker threads; 0 uses the hardware concurrency.
  int threads = 0;
  /// Starting point for every restart; empty means all coordinates 0.5.
  std::vector<double> initial_point;

  void Validate() const;
};

struct AnnealRun {
  std::uint64_t seed = 0;
  std::vector<double> x;
  double value = 0.0;
  /// Best-so-far value after each iteration (nondecreasing). A final polish
  /// is folded into the last entry.
  std::vector<double> trace;
  long evaluations = 0;
};

struct AnnealResult {
  std::vector<double> x;
  double value = 0.0;
  int best_restart = 0;
  std::vector<AnnealRun> runs;
};

/// Raised when every evaluated point scored -inf.
class AnnealFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Local improvement of a point: returns a point scoring at least `fx`.
using Polisher =
    std::function<PatternSearchResult(std::vector<double> x, double fx)>;

/// What one restart works with. An empty polisher means CoordinateSearch on
/// the score with AnnealConfig::polish_config.
struct AnnealWorker {
  ScoreFn score;
  Polisher polish;
};

/// Builds the worker for restart `restart` (whose seed is `seed`).
using WorkerFactory =
    std::function<AnnealWorker(int restart, std::uint64_t seed)>;

/// Maximises the score over [0,1]^dim. Restarts run in parallel workers, each
/// built by `factory` and seeded with DeriveSeed(cfg.seed, r). Exceptions
/// thrown by the score propagate (the first one, by restart index).
/// Deterministic for a deterministic score.
AnnealResult AnnealMaximize(const WorkerFactory& factory, int dim,
                            const AnnealConfig& cfg);
AnnealResult AnnealMaximize(const ScoreFactory& factory, int dim,
                            const AnnealConfig& cfg);

/// Convenience overload for a stateless, thread-safe score.
AnnealResult AnnealMaximize(const ScoreFn& score, int dim,
                            const AnnealConfig& cfg);

// --- Differential evolution ------------------------------------------------

/// best/1/bin differential evolution with dithered mutation, Latin hypercube
/// initialisation and a population-spread stopping rule.
struct DeConfig {
  /// Population size; 0 means 15 * dim.
  int population = 0;
  int generations = 1000;
  double mutation_lo = 0.5;
  double mutation_hi = 1.0;
  double crossover = 0.7;
  double tol = 0.01;
  double atol = 0.0;
  std::uint64_t seed = 0;
  bool polish = true;
  PatternSearchConfig polish_config;
  /// Individuals injected into the initial population (clipped to the box).
  std::vector<std::vector<double>> initial_members;

  void Validate(int dim) const;
};

struct DeResult {
  std::vector<double> x;
  double value = 0.0;
  std::vector<double> trace;  // best value after each generation
  int generations = 0;
  long evaluations = 0;
};

DeResult DeMinimize(const ScoreFn& f, std::span<const double> lo,
                    std::span<const double> hi, const DeConfig& cfg);

}  // namespace lyapsip
