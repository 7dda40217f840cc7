#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "lyapsip/global_opt.h"

namespace lyapsip {

void DeConfig::Validate(int dim) const {
  const int pop = population > 0 ? population : 15 * dim;
  if (pop < 4) throw std::invalid_argument("DE: population must be >= 4");
  if (generations < 0) throw std::invalid_argument("DE: generations must be >= 0");
  if (!(mutation_lo > 0.0 && mutation_lo <= mutation_hi && mutation_hi <= 2.0)) {
    throw std::invalid_argument("DE: need 0 < mutation_lo <= mutation_hi <= 2");
  }
  if (!(crossover >= 0.0 && crossover <= 1.0)) {
    throw std::invalid_argument("DE: crossover must lie in [0, 1]");
  }
}

DeResult DeMinimize(const ScoreFn& f, std::span<const double> lo,
                    std::span<const double> hi, const DeConfig& cfg) {
  const int dim = static_cast<int>(lo.size());
  if (dim < 1 || hi.size() != lo.size()) {
    throw std::invalid_argument("DE: bounds must be nonempty and of equal size");
  }
  for (int k = 0; k < dim; ++k) {
    if (!std::isfinite(lo[k]) || !std::isfinite(hi[k]) || !(lo[k] <= hi[k])) {
      throw std::invalid_argument("DE: bounds must be finite with lo <= hi");
    }
  }
  cfg.Validate(dim);
  const int pop = cfg.population > 0 ? cfg.population : 15 * dim;

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  DeResult out;

  // Latin hypercube initialisation: one point per stratum in each coordinate.
  std::vector<std::vector<double>> members(pop, std::vector<double>(dim));
  for (int k = 0; k < dim; ++k) {
    std::vector<int> perm(pop);
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    for (int i = 0; i < pop; ++i) {
      const double u = (perm[i] + unit(rng)) / pop;
      members[i][k] = lo[k] + u * (hi[k] - lo[k]);
    }
  }
  const int injected = std::min<int>(pop, cfg.initial_members.size());
  for (int i = 0; i < injected; ++i) {
    const auto& m = cfg.initial_members[i];
    if (static_cast<int>(m.size()) != dim) {
      throw std::invalid_argument("DE: injected member has wrong dimension");
    }
    for (int k = 0; k < dim; ++k) members[i][k] = std::clamp(m[k], lo[k], hi[k]);
  }

  auto eval = [&](const std::vector<double>& x) {
    ++out.evaluations;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
  };
  std::vector<double> energy(pop);
  for (int i = 0; i < pop; ++i) energy[i] = eval(members[i]);
  int best = static_cast<int>(std::min_element(energy.begin(), energy.end()) -
                              energy.begin());

  std::vector<double> trial(dim);
  std::uniform_int_distribution<int> pick(0, pop - 1);
  std::uniform_int_distribution<int> pick_dim(0, dim - 1);
  for (int g = 0; g < cfg.generations; ++g) {
    const double scale =
        cfg.mutation_lo + unit(rng) * (cfg.mutation_hi - cfg.mutation_lo);
    for (int i = 0; i < pop; ++i) {
      int r0, r1;
      do r0 = pick(rng); while (r0 == i);
      do r1 = pick(rng); while (r1 == i || r1 == r0);
      const int fill = pick_dim(rng);
      for (int k = 0; k < dim; ++k) {
        if (k == fill || unit(rng) < cfg.crossover) {
          double v = members[best][k] + scale * (members[r0][k] - members[r1][k]);
          if (v < lo[k] || v > hi[k]) v = lo[k] + unit(rng) * (hi[k] - lo[k]);
          trial[k] = v;
        } else {
          trial[k] = members[i][k];
        }
      }
      const double e = eval(trial);
      if (e <= energy[i]) {
        members[i] = trial;
        energy[i] = e;
        if (e <= energy[best]) best = i;
      }
    }
    ++out.generations;
    out.trace.push_back(energy[best]);

    double mean = 0.0;
    for (double e : energy) mean += e;
    mean /= pop;
    double var = 0.0;
    for (double e : energy) var += (e - mean) * (e - mean);
    const double spread = std::sqrt(var / pop);
    if (std::isfinite(spread) && spread <= cfg.atol + cfg.tol * std::abs(mean)) break;
  }

  out.x = members[best];
  out.value = energy[best];
  if (cfg.polish && std::isfinite(out.value)) {
    ScoreFn counted = [&](std::span<const double> x) {
      ++out.evaluations;
      return f(x);
    };
    PatternSearchResult r =
        CoordinateSearch(counted, out.x, out.value, lo, hi, cfg.polish_config, false);
    if (r.value < out.value) {
      out.x = std::move(r.x);
      out.value = r.value;
      if (!out.trace.empty()) out.trace.back() = out.value;
    }
  }
  return out;
}

}  // namespace lyapsip
