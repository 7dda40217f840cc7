#include "lyapsip/polynomial.h"

#include <cmath>
#include <stdexcept>

namespace lyapsip {

namespace {

double Binomial(int n, int k) {
  double r = 1.0;
  for (int i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

}  // namespace

void Polynomial::AddTerm(const std::vector<int>& exponents, double c) {
  if (static_cast<int>(exponents.size()) != dim_) {
    throw std::invalid_argument("polynomial term has wrong dimension");
  }
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("polynomial: negative exponent");
  }
  terms_[exponents] += c;
}

double Polynomial::Coefficient(const std::vector<int>& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

double Polynomial::Eval(const Vector& y) const {
  if (y.size() != dim_) throw std::invalid_argument("polynomial: bad point");
  double sum = 0.0;
  for (const auto& [e, c] : terms_) {
    double term = c;
    for (int k = 0; k < dim_; ++k) {
      for (int j = 0; j < e[k]; ++j) term *= y[k];
    }
    sum += term;
  }
  return sum;
}

Polynomial Polynomial::Shifted(const Vector& offset) const {
  if (offset.size() != dim_) throw std::invalid_argument("polynomial: bad offset");
  // Each coordinate factor (z_k + o_k)^e expands binomially; the product over
  // coordinates is accumulated one coordinate at a time.
  Polynomial out(dim_);
  for (const auto& [e, c] : terms_) {
    std::map<std::vector<int>, double> partial = {{std::vector<int>(dim_, 0), c}};
    for (int k = 0; k < dim_; ++k) {
      std::map<std::vector<int>, double> next;
      for (const auto& [pe, pc] : partial) {
        for (int j = 0; j <= e[k]; ++j) {
          std::vector<int> ne = pe;
          ne[k] = j;
          next[ne] += pc * Binomial(e[k], j) * std::pow(offset[k], e[k] - j);
        }
      }
      partial = std::move(next);
    }
    for (const auto& [pe, pc] : partial) out.terms_[pe] += pc;
  }
  return out;
}

Polynomial FromDictionary(const Dictionary& dict, const std::vector<double>& coeffs) {
  if (dict.size() != coeffs.size()) {
    throw std::invalid_argument("FromDictionary: coefficient count mismatch");
  }
  if (dict.empty()) throw std::invalid_argument("FromDictionary: empty dictionary");
  Polynomial p(dict.front().dim());
  for (std::size_t i = 0; i < dict.size(); ++i) {
    if (dict[i].kind() != BasisFunction::Kind::kMonomial) {
      throw std::invalid_argument(
          "polynomial recentering is only defined for monomial dictionaries (found " +
          dict[i].ToString() + ")");
    }
    p.AddTerm(dict[i].exponents(), coeffs[i]);
  }
  return p;
}

DictionaryProjection ProjectOntoDictionary(const Polynomial& poly,
                                           const Dictionary& dict) {
  DictionaryProjection out;
  out.coeffs.assign(dict.size(), 0.0);
  std::map<std::vector<int>, std::size_t> index;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    if (dict[i].kind() != BasisFunction::Kind::kMonomial) {
      throw std::invalid_argument("ProjectOntoDictionary: non-monomial element " +
                                  dict[i].ToString());
    }
    index[dict[i].exponents()] = i;
  }
  const std::vector<int> zero(poly.dim(), 0);
  for (const auto& [e, c] : poly.terms()) {
    if (e == zero) {
      out.constant += c;
      continue;
    }
    auto it = index.find(e);
    if (it != index.end()) {
      out.coeffs[it->second] = c;
    } else {
      out.max_outside = std::max(out.max_outside, std::abs(c));
    }
  }
  return out;
}

}  // namespace lyapsip
