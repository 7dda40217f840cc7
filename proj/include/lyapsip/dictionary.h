#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lyapsip/field.h"

namespace lyapsip {

enum class Mode { kStability, kAsymptotic, kChetaev };

std::string ModeName(Mode mode);
Mode ParseMode(const std::string& name);

/// A compact neighborhood of the origin: a closed Euclidean ball centred at 0
/// or an axis-aligned box.
class Neighborhood {
 public:
  enum class Kind { kBall, kBox };

  static Neighborhood Ball(int dim, double radius);
  static Neighborhood Box(Vector lo, Vector hi);

  Kind kind() const { return kind_; }
  int dim() const { return dim_; }
  double radius() const { return radius_; }
  const Vector& lo() const { return lo_; }
  const Vector& hi() const { return hi_; }

  bool Contains(const Vector& y, double tol = 1e-12) const;

  /// Largest Euclidean norm attained in the set.
  double MaxNorm() const;

  /// Maps u in [0,1]^n onto the set. Boxes rescale affinely. Balls scale the
  /// cube to [-r,r]^n and radially project points outside the ball onto its
  /// boundary, leaving interior points untouched.
  Vector SampleIn(std::span<const double> u) const;

  /// Checks the (L1) requirements: compact, with nonempty interior around the
  /// origin. Chetaev mode allows the origin on the boundary (lo >= 0).
  void Validate(Mode mode) const;

 private:
  Kind kind_ = Kind::kBall;
  int dim_ = 0;
  double radius_ = 0.0;
  Vector lo_, hi_;
};

/// Scaled power law r -> c r^p, or the identically zero bound.
class ClassKBound {
 public:
  static ClassKBound Zero();
  static ClassKBound Power(double c, double p);

  bool is_zero() const { return zero_; }
  double coefficient() const { return c_; }
  double power() const { return p_; }

  /// Throws std::invalid_argument for r < 0.
  double Value(double r) const;
  double operator()(double r) const { return Value(r); }

  std::string ToString() const;

 private:
  bool zero_ = true;
  double c_ = 0.0;
  double p_ = 1.0;
};

/// A continuously differentiable dictionary element vanishing at the origin:
/// a monomial x^e with |e| >= 1, or cos(j x1) - 1.
class BasisFunction {
 public:
  enum class Kind { kMonomial, kCosine };

  static BasisFunction Monomial(std::vector<int> exponents);
  static BasisFunction Cosine(int dim, int frequency);

  Kind kind() const { return kind_; }
  int dim() const { return static_cast<int>(exponents_.size()); }
  const std::vector<int>& exponents() const { return exponents_; }
  int frequency() const { return frequency_; }
  int degree() const;

  double Value(const Vector& y) const;
  Vector Gradient(const Vector& y) const;
  /// <grad phi(y), v> without materialising the gradient.
  double DirectionalDerivative(const Vector& y, const Vector& v) const;

  /// Structural identity ("m:2,0" or "cos:2"); distinct keys stand in for
  /// linear independence.
  std::string Key() const;
  /// Human-readable form, e.g. "x1^2*x2" or "cos(2*x1)-1".
  std::string ToString() const;

  bool operator==(const BasisFunction& other) const {
    return kind_ == other.kind_ && exponents_ == other.exponents_ &&
           frequency_ == other.frequency_;
  }

 private:
  Kind kind_ = Kind::kMonomial;
  std::vector<int> exponents_;  // kMonomial: exponents; kCosine: size = dim.
  int frequency_ = 0;
};

using Dictionary = std::vector<BasisFunction>;

/// All monomials whose total degree lies in `degrees`, graded by the order
/// the degrees are listed (ascending after dedup) and lexicographically
/// descending within a degree: {x1^2, x1 x2, x2^2} for dim 2, degree 2.
Dictionary MonomialDictionary(int dim, std::vector<int> degrees);

/// cos(j x1) - 1 for each listed frequency j >= 0.
Dictionary CosineDictionary(int dim, std::vector<int> frequencies);

/// Evaluates sum_i coeffs[i] * dict[i](y).
double Combine(const Dictionary& dict, std::span<const double> coeffs,
               const Vector& y);

/// (N, (alpha, omega, beta), (Q, M)) together with the certificate mode.
struct LyapunovTriplet {
  Neighborhood nbhd;
  ClassKBound alpha;
  std::optional<ClassKBound> omega;
  ClassKBound beta;
  Dictionary v_dict;
  Dictionary w_dict;
  Mode mode = Mode::kAsymptotic;

  int dim() const { return nbhd.dim(); }
  int q() const { return static_cast<int>(v_dict.size()); }
  int m() const { return static_cast<int>(w_dict.size()); }
  int decision_dim() const { return q() + m(); }

  /// Throws std::invalid_argument naming the offending component.
  void Validate() const;
};

}  // namespace lyapsip
