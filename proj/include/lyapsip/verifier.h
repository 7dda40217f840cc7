#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "lyapsip/dictionary.h"
#include "lyapsip/field.h"
#include "lyapsip/global_opt.h"
#include "lyapsip/polynomial.h"

namespace lyapsip {

/// Coefficients over the triplet's dictionaries plus provenance.
struct Certificate {
  Mode mode = Mode::kAsymptotic;
  std::vector<double> lambda;  // size q
  std::vector<double> mu;      // size m, or empty
  double objective_value = 0.0;
  double relaxed_value = 0.0;
  std::uint64_t seed = 0;
  int iterations = 0;
  int restarts = 0;

  /// Throws std::invalid_argument if sizes do not match the triplet.
  void CheckAgainst(const LyapunovTriplet& triplet) const;
};

double EvalV(const LyapunovTriplet& triplet, const Certificate& cert,
             const Vector& y);
/// <grad V(y), f(y)>.
double EvalVdot(const LyapunovTriplet& triplet, const VectorField& field,
                const Certificate& cert, const Vector& y);
/// The margin function: sum psi_j mu_j, or beta(|y|) when mu is empty.
double EvalW(const LyapunovTriplet& triplet, const Certificate& cert,
             const Vector& y);

enum class Verdict { kVerified, kViolated, kInconclusive };
std::string VerdictName(Verdict v);

struct VerifyConfig {
  /// Low-discrepancy grid size; 0 means 10^4 for n <= 3 and 10^5 above.
  int grid_points = 0;
  DeConfig de;
  /// Grid minimisers injected into each DE population.
  int de_seed_points = 5;
  double tol = 1e-6;
};

struct ResidualMin {
  double value = 0.0;
  Vector argmin;
  double grid_value = 0.0;
  Vector grid_argmin;
};

/// C1 = V - alpha(|y|); C2 = -W - <grad V, f> (chetaev: <grad V, f> - W);
/// C3 = W - beta(|y|), present only when the certificate carries mu.
struct VerificationReport {
  ResidualMin c1, c2;
  std::optional<ResidualMin> c3;
  bool margin_from_beta = false;  // W was taken as beta(|y|)
  int grid_points = 0;
  int de_population = 0;
  int de_generations = 0;
  double tol = 1e-6;
  Verdict verdict = Verdict::kInconclusive;
  double violation = 0.0;  // max(0, -min) over the residuals
  std::string note;
};

/// Minimises the residuals over N on a deterministic grid (Halton points
/// mapped through sample_in, plus the origin) and refines each with DE
/// seeded at the best grid points. Never looks at synthesis samples.
VerificationReport Verify(const LyapunovTriplet& triplet, const VectorField& field,
                          const Certificate& cert, const VerifyConfig& cfg = {});

/// The first `count` points of the Halton sequence in [0,1]^dim (bases are
/// the first dim primes), skipping the all-zero point.
std::vector<std::vector<double>> HaltonPoints(int dim, int count);

struct SphereRow {
  double r = 0.0;
  double min_v = 0.0;
  double alpha = 0.0;
  double max_vdot = 0.0;
  double neg_beta = 0.0;
};

/// Per radius, min V and max <grad V, f> over the sphere of radius r
/// (intersected with N) by DE over hyperspherical angles. Radii must lie in
/// (0, max |y| over N]; throws std::invalid_argument otherwise or when empty.
std::vector<SphereRow> SphereCurves(const LyapunovTriplet& triplet,
                                    const VectorField& field,
                                    const Certificate& cert,
                                    std::vector<double> radii,
                                    const DeConfig& de = {});

/// The certificate's V written in original coordinates: y -> V(y - eq).
/// Monomial dictionaries only.
Polynomial ToOriginalCoordinates(const Dictionary& dict,
                                 const std::vector<double>& lambda,
                                 const Vector& eq);

/// V(eq) for a function given in original coordinates. With a field, also
/// confirms eq is an equilibrium (throws NotAnEquilibrium otherwise).
double CheckEquilibriumValue(const Polynomial& original, const Vector& eq);
double CheckEquilibriumValue(const Polynomial& original, const Vector& eq,
                             const VectorField& original_field);

/// Rewrites an original-coordinate polynomial around eq over `dict`.
/// `equilibrium_value` is the leftover constant (V(eq)); `max_outside` the
/// largest coefficient outside the dictionary.
struct Recentered {
  std::vector<double> lambda;
  double equilibrium_value = 0.0;
  double max_outside = 0.0;
};
Recentered RecenterPolynomial(const Polynomial& original, const Vector& eq,
                              const Dictionary& dict);

}  // namespace lyapsip
