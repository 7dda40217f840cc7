#include <algorithm>

#include "lyapsip/global_opt.h"

namespace lyapsip {

std::uint64_t DeriveSeed(std::uint64_t master, std::uint64_t index) {
  // SplitMix64 output function applied to the index-th counter value.
  std::uint64_t z = master + (index + 1) * 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

PatternSearchResult CoordinateSearch(const ScoreFn& f, std::vector<double> x,
                                     double fx, std::span<const double> lo,
                                     std::span<const double> hi,
                                     const PatternSearchConfig& cfg,
                                     bool maximize) {
  const std::size_t dim = x.size();
  if (lo.size() != dim || hi.size() != dim) {
    throw std::invalid_argument("CoordinateSearch: bounds have wrong size");
  }
  auto better = [maximize](double a, double b) {
    return maximize ? a > b : a < b;
  };
  PatternSearchResult out;
  double step = cfg.initial_step;
  std::vector<double> trial = x;
  while (step >= cfg.min_step && out.evaluations < cfg.max_evaluations) {
    bool improved = false;
    for (std::size_t k = 0; k < dim && out.evaluations < cfg.max_evaluations;
         ++k) {
      const double width = hi[k] - lo[k];
      for (double dir : {1.0, -1.0}) {
        const double moved = std::clamp(x[k] + dir * step * width, lo[k], hi[k]);
        if (moved == x[k]) continue;
        trial[k] = moved;
        const double v = f(trial);
        ++out.evaluations;
        if (better(v, fx)) {
          x[k] = moved;
          fx = v;
          improved = true;
          break;
        }
        trial[k] = x[k];
      }
    }
    if (!improved) step *= 0.5;
  }
  out.x = std::move(x);
  out.value = fx;
  return out;
}

}  // namespace lyapsip
