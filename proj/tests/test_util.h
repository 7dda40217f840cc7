#pragma once

#include <random>

#include "lyapsip/dictionary.h"
#include "lyapsip/field.h"

namespace lyapsip::testing {

inline LyapunovTriplet VanDerPolTriplet() {
  LyapunovTriplet t;
  t.nbhd = Neighborhood::Ball(2, 0.5);
  t.alpha = ClassKBound::Power(0.5, 3);
  t.beta = ClassKBound::Power(0.25, 10);
  t.v_dict = MonomialDictionary(2, {2});
  t.w_dict = MonomialDictionary(2, {2, 4, 6, 8, 10, 12});
  t.mode = Mode::kAsymptotic;
  return t;
}

inline LyapunovTriplet PlanarTriplet() {
  LyapunovTriplet t;
  t.nbhd = Neighborhood::Ball(2, 0.2);
  t.alpha = ClassKBound::Power(1.0 / 6, 2);
  t.beta = ClassKBound::Power(1.0 / 12, 2);
  t.v_dict = MonomialDictionary(2, {2});
  t.w_dict = MonomialDictionary(2, {2, 4});
  t.mode = Mode::kAsymptotic;
  return t;
}

inline LyapunovTriplet WhirlingTriplet() {
  LyapunovTriplet t;
  t.nbhd = Neighborhood::Ball(2, 1.0);
  t.alpha = ClassKBound::Power(0.01, 2);
  t.v_dict = MonomialDictionary(2, {2});
  for (auto& b : CosineDictionary(2, {0, 1, 2})) t.v_dict.push_back(b);
  t.mode = Mode::kStability;
  return t;
}

inline Vector RandomVector(std::mt19937_64& rng, int n, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> u(lo, hi);
  Vector v(n);
  for (int i = 0; i < n; ++i) v[i] = u(rng);
  return v;
}

}  // namespace lyapsip::testing
