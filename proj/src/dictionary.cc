#include "lyapsip/dictionary.h"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

namespace lyapsip {

std::string ModeName(Mode mode) {
  switch (mode) {
    case Mode::kStability:
      return "stability";
    case Mode::kAsymptotic:
      return "asymptotic";
    case Mode::kChetaev:
      return "chetaev";
  }
  return "unknown";
}

Mode ParseMode(const std::string& name) {
  if (name == "stability") return Mode::kStability;
  if (name == "asymptotic") return Mode::kAsymptotic;
  if (name == "chetaev") return Mode::kChetaev;
  throw std::invalid_argument("unknown mode '" + name +
                              "' (expected stability, asymptotic or chetaev)");
}

// --- Neighborhood ----------------------------------------------------------

Neighborhood Neighborhood::Ball(int dim, double radius) {
  if (dim < 1) throw std::invalid_argument("ball: dim must be >= 1");
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    throw std::invalid_argument("ball: radius must be positive and finite");
  }
  Neighborhood n;
  n.kind_ = Kind::kBall;
  n.dim_ = dim;
  n.radius_ = radius;
  n.lo_ = Vector::Constant(dim, -radius);
  n.hi_ = Vector::Constant(dim, radius);
  return n;
}

Neighborhood Neighborhood::Box(Vector lo, Vector hi) {
  if (lo.size() < 1 || lo.size() != hi.size()) {
    throw std::invalid_argument("box: lo and hi must have the same size >= 1");
  }
  for (int i = 0; i < lo.size(); ++i) {
    if (!std::isfinite(lo[i]) || !std::isfinite(hi[i]) || !(lo[i] < hi[i])) {
      throw std::invalid_argument("box: need finite lo < hi in every dimension");
    }
  }
  Neighborhood n;
  n.kind_ = Kind::kBox;
  n.dim_ = static_cast<int>(lo.size());
  n.lo_ = std::move(lo);
  n.hi_ = std::move(hi);
  n.radius_ = 0.0;
  return n;
}

bool Neighborhood::Contains(const Vector& y, double tol) const {
  if (y.size() != dim_) return false;
  if (kind_ == Kind::kBall) return y.norm() <= radius_ + tol;
  for (int i = 0; i < dim_; ++i) {
    if (y[i] < lo_[i] - tol || y[i] > hi_[i] + tol) return false;
  }
  return true;
}

double Neighborhood::MaxNorm() const {
  if (kind_ == Kind::kBall) return radius_;
  double sq = 0.0;
  for (int i = 0; i < dim_; ++i) {
    const double c = std::max(std::abs(lo_[i]), std::abs(hi_[i]));
    sq += c * c;
  }
  return std::sqrt(sq);
}

Vector Neighborhood::SampleIn(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != dim_) {
    throw std::invalid_argument("SampleIn: point has wrong dimension");
  }
  Vector y(dim_);
  for (int i = 0; i < dim_; ++i) {
    const double t = std::clamp(u[i], 0.0, 1.0);
    y[i] = lo_[i] + t * (hi_[i] - lo_[i]);
  }
  if (kind_ == Kind::kBall) {
    const double norm = y.norm();
    if (norm > radius_) y *= radius_ / norm;
  }
  return y;
}

void Neighborhood::Validate(Mode mode) const {
  if (dim_ < 1) throw std::invalid_argument("neighborhood: not initialised");
  if (kind_ == Kind::kBall) return;  // radius > 0 enforced at construction.
  for (int i = 0; i < dim_; ++i) {
    if (mode == Mode::kChetaev) {
      if (lo_[i] > 0.0 || hi_[i] < 0.0) {
        throw std::invalid_argument(
            "neighborhood: chetaev box must contain the origin (lo <= 0 <= hi)");
      }
    } else if (!(lo_[i] < 0.0 && hi_[i] > 0.0)) {
      throw std::invalid_argument(
          "neighborhood: box must contain the origin in its interior "
          "(lo < 0 < hi in every dimension)");
    }
  }
}

// --- ClassKBound -----------------------------------------------------------

ClassKBound ClassKBound::Zero() { return ClassKBound(); }

ClassKBound ClassKBound::Power(double c, double p) {
  if (!(c > 0.0) || !std::isfinite(c)) {
    throw std::invalid_argument("class-K bound: coefficient must be > 0");
  }
  if (!(p > 0.0) || !std::isfinite(p)) {
    throw std::invalid_argument("class-K bound: power must be > 0");
  }
  ClassKBound b;
  b.zero_ = false;
  b.c_ = c;
  b.p_ = p;
  return b;
}

double ClassKBound::Value(double r) const {
  if (!(r >= 0.0)) {
    throw std::invalid_argument("class-K bound evaluated at negative radius");
  }
  if (zero_) return 0.0;
  return c_ * std::pow(r, p_);
}

std::string ClassKBound::ToString() const {
  if (zero_) return "0";
  std::ostringstream out;
  out << c_ << "*r^" << p_;
  return out.str();
}

// --- BasisFunction ---------------------------------------------------------

namespace {

inline double IntPow(double x, int e) {
  double result = 1.0;
  for (int k = 0; k < e; ++k) result *= x;
  return result;
}

}  // namespace

BasisFunction BasisFunction::Monomial(std::vector<int> exponents) {
  if (exponents.empty()) {
    throw std::invalid_argument("monomial: empty exponent vector");
  }
  int total = 0;
  for (int e : exponents) {
    if (e < 0) throw std::invalid_argument("monomial: negative exponent");
    total += e;
  }
  if (total < 1) {
    throw std::invalid_argument(
        "monomial: total degree 0 violates phi(0) = 0");
  }
  BasisFunction f;
  f.kind_ = Kind::kMonomial;
  f.exponents_ = std::move(exponents);
  return f;
}

BasisFunction BasisFunction::Cosine(int dim, int frequency) {
  if (dim < 1) throw std::invalid_argument("cosine: dim must be >= 1");
  if (frequency < 0) {
    throw std::invalid_argument("cosine: frequency must be >= 0");
  }
  BasisFunction f;
  f.kind_ = Kind::kCosine;
  f.exponents_.assign(dim, 0);
  f.frequency_ = frequency;
  return f;
}

int BasisFunction::degree() const {
  int total = 0;
  for (int e : exponents_) total += e;
  return total;
}

double BasisFunction::Value(const Vector& y) const {
  if (kind_ == Kind::kCosine) {
    return std::cos(frequency_ * y[0]) - 1.0;
  }
  double v = 1.0;
  for (int k = 0; k < dim(); ++k) v *= IntPow(y[k], exponents_[k]);
  return v;
}

Vector BasisFunction::Gradient(const Vector& y) const {
  Vector g = Vector::Zero(dim());
  if (kind_ == Kind::kCosine) {
    g[0] = -frequency_ * std::sin(frequency_ * y[0]);
    return g;
  }
  for (int k = 0; k < dim(); ++k) {
    if (exponents_[k] == 0) continue;
    double v = exponents_[k];
    for (int j = 0; j < dim(); ++j) {
      v *= IntPow(y[j], j == k ? exponents_[j] - 1 : exponents_[j]);
    }
    g[k] = v;
  }
  return g;
}

double BasisFunction::DirectionalDerivative(const Vector& y,
                                            const Vector& v) const {
  if (kind_ == Kind::kCosine) {
    return -frequency_ * std::sin(frequency_ * y[0]) * v[0];
  }
  double sum = 0.0;
  for (int k = 0; k < dim(); ++k) {
    if (exponents_[k] == 0 || v[k] == 0.0) continue;
    double term = exponents_[k] * v[k];
    for (int j = 0; j < dim(); ++j) {
      term *= IntPow(y[j], j == k ? exponents_[j] - 1 : exponents_[j]);
    }
    sum += term;
  }
  return sum;
}

std::string BasisFunction::Key() const {
  std::ostringstream out;
  if (kind_ == Kind::kCosine) {
    out << "cos:" << frequency_;
    return out.str();
  }
  out << "m:";
  for (int k = 0; k < dim(); ++k) out << (k ? "," : "") << exponents_[k];
  return out.str();
}

std::string BasisFunction::ToString() const {
  std::ostringstream out;
  if (kind_ == Kind::kCosine) {
    out << "cos(" << frequency_ << "*x1)-1";
    return out.str();
  }
  bool first = true;
  for (int k = 0; k < dim(); ++k) {
    if (exponents_[k] == 0) continue;
    if (!first) out << "*";
    out << "x" << (k + 1);
    if (exponents_[k] > 1) out << "^" << exponents_[k];
    first = false;
  }
  return out.str();
}

// --- Dictionaries ----------------------------------------------------------

namespace {

// Exponent vectors of total degree `remaining` spread over positions
// [pos, dim), in lexicographically descending order.
void EnumerateExponents(int pos, int remaining, std::vector<int>& current,
                        Dictionary& out) {
  const int dim = static_cast<int>(current.size());
  if (pos == dim - 1) {
    current[pos] = remaining;
    out.push_back(BasisFunction::Monomial(current));
    return;
  }
  for (int e = remaining; e >= 0; --e) {
    current[pos] = e;
    EnumerateExponents(pos + 1, remaining - e, current, out);
  }
  current[pos] = 0;
}

}  // namespace

Dictionary MonomialDictionary(int dim, std::vector<int> degrees) {
  if (dim < 1) throw std::invalid_argument("monomial dictionary: dim < 1");
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  Dictionary out;
  for (int d : degrees) {
    if (d < 1) {
      throw std::invalid_argument(
          "monomial dictionary: degree " + std::to_string(d) +
          " requested; degrees must be >= 1 so that phi(0) = 0");
    }
    std::vector<int> current(dim, 0);
    EnumerateExponents(0, d, current, out);
  }
  return out;
}

Dictionary CosineDictionary(int dim, std::vector<int> frequencies) {
  std::sort(frequencies.begin(), frequencies.end());
  frequencies.erase(std::unique(frequencies.begin(), frequencies.end()),
                    frequencies.end());
  Dictionary out;
  for (int j : frequencies) out.push_back(BasisFunction::Cosine(dim, j));
  return out;
}

double Combine(const Dictionary& dict, std::span<const double> coeffs,
               const Vector& y) {
  if (coeffs.size() != dict.size()) {
    throw std::invalid_argument("Combine: coefficient count mismatch");
  }
  double sum = 0.0;
  for (std::size_t i = 0; i < dict.size(); ++i) {
    sum += coeffs[i] * dict[i].Value(y);
  }
  return sum;
}

// --- Triplet ---------------------------------------------------------------

namespace {

void CheckDictionary(const Dictionary& dict, int dim, const char* which) {
  std::set<std::string> keys;
  for (const auto& f : dict) {
    if (f.dim() != dim) {
      throw std::invalid_argument(std::string("dictionary ") + which +
                                  ": element " + f.ToString() +
                                  " has wrong dimension");
    }
    if (!keys.insert(f.Key()).second) {
      throw std::invalid_argument(std::string("dictionary ") + which +
                                  ": duplicate element " + f.ToString());
    }
  }
}

}  // namespace

void LyapunovTriplet::Validate() const {
  nbhd.Validate(mode);
  const int n = nbhd.dim();
  if (v_dict.empty()) throw std::invalid_argument("dictionary V: empty");
  CheckDictionary(v_dict, n, "V");
  CheckDictionary(w_dict, n, "W");
  switch (mode) {
    case Mode::kStability:
      if (!w_dict.empty()) {
        throw std::invalid_argument(
            "stability mode: W dictionary must be empty");
      }
      if (!beta.is_zero()) {
        throw std::invalid_argument("stability mode: beta must be zero");
      }
      break;
    case Mode::kAsymptotic:
      if (w_dict.empty()) {
        throw std::invalid_argument(
            "asymptotic mode: W dictionary must be nonempty");
      }
      if (beta.is_zero()) {
        throw std::invalid_argument(
            "asymptotic mode: beta must not be identically zero");
      }
      break;
    case Mode::kChetaev:
      if (!w_dict.empty()) {
        throw std::invalid_argument("chetaev mode: W dictionary must be empty");
      }
      if (!alpha.is_zero() || !beta.is_zero()) {
        throw std::invalid_argument("chetaev mode: alpha and beta must be zero");
      }
      break;
  }
}

}  // namespace lyapsip
