#pragma once

#include <map>
#include <vector>

#include "lyapsip/dictionary.h"

namespace lyapsip {

/// Sparse multivariate polynomial keyed by exponent multi-index.
class Polynomial {
 public:
  explicit Polynomial(int dim) : dim_(dim) {}

  int dim() const { return dim_; }
  const std::map<std::vector<int>, double>& terms() const { return terms_; }

  /// Adds c * x^exponents (accumulating onto an existing term).
  void AddTerm(const std::vector<int>& exponents, double c);
  double Coefficient(const std::vector<int>& exponents) const;
  double Eval(const Vector& y) const;

  /// Returns z -> P(z + offset).
  Polynomial Shifted(const Vector& offset) const;

 private:
  int dim_;
  std::map<std::vector<int>, double> terms_;
};

/// sum_i coeffs[i] * dict[i] as a polynomial. Throws std::invalid_argument if
/// the dictionary holds a non-monomial element.
Polynomial FromDictionary(const Dictionary& dict, const std::vector<double>& coeffs);

struct DictionaryProjection {
  std::vector<double> coeffs;  // one per dictionary element
  double constant = 0.0;       // the x^0 coefficient
  double max_outside = 0.0;    // largest |c| of other terms outside the dictionary
};

/// Expresses `poly` in terms of a monomial dictionary. Terms outside the
/// dictionary are collected into `constant` / `max_outside` rather than
/// dropped silently.
DictionaryProjection ProjectOntoDictionary(const Polynomial& poly,
                                           const Dictionary& dict);

}  // namespace lyapsip
