#pragma once

#include <string>
#include <vector>

#include "lyapsip/dictionary.h"
#include "lyapsip/field.h"
#include "lyapsip/global_opt.h"
#include "lyapsip/sip_assembly.h"
#include "lyapsip/verifier.h"

namespace lyapsip {

/// Sample-exchange polish run before the coordinate polish: move the least
/// loaded sample slot to the point of N most violated by the current
/// solution, keeping the move only when R increases.
struct ExchangeConfig {
  bool enabled = true;
  /// Random candidate points scanned per exchange; 0 means 20000 * n. The
  /// count is capped so their stored rows fit in memory_limit_mb.
  int candidates = 0;
  std::size_t memory_limit_mb = 128;
  /// Exchange attempts per polish; 0 means 4 * K.
  int max_exchanges = 0;
  /// The worst point is found by DE seeded at the best candidates.
  DeConfig de;
  int de_seed_points = 5;
  /// Slots tried per exchange, least loaded first.
  int slots_tried = 3;
  /// Violations at or below this count as feasible.
  double tol = 1e-9;
};

struct SynthesisConfig {
  AnnealConfig anneal;
  ExchangeConfig exchange;
  QpSettings qp;
  VerifyConfig verify;
  /// Samples per tuple; 0 means the prescribed count (q, or q + m).
  int sample_count = 0;
  /// Objective anchor p; empty means all ones.
  std::vector<double> anchor;
  /// Tolerance of the grid-feasibility theorem check.
  double grid_feasibility_tol = 1e-6;
};

struct TheoremCheck {
  std::string name;
  bool pass = false;
  double value = 0.0;
  std::string detail;
};

enum class Outcome { kCertified, kNotFound };
std::string OutcomeName(Outcome o);

struct SynthesisResult {
  Outcome outcome = Outcome::kNotFound;
  /// False when the search aborted before a certificate could be formed.
  bool has_certificate = false;
  Certificate cert;
  VerificationReport report;
  AnnealResult anneal;
  std::vector<Vector> best_samples;
  QpSolution final_qp;
  ConstraintBlock final_rows;
  /// |R(y*) - Phi(z*)|; zero since the final QP is the scored one.
  double value_gap = 0.0;
  int sample_count = 0;
  std::vector<TheoremCheck> checks;
  std::string message;
};

/// Outer anneal over sample tuples scoring R, cold re-solve of the QP at the
/// best tuple, coefficient extraction and independent verification.
/// `field` must have its equilibrium at the origin. Never claims instability
/// of a stability problem: the outcome is certified or not-found.
SynthesisResult Synthesize(const LyapunovTriplet& triplet, const VectorField& field,
                           const SynthesisConfig& cfg);

/// Runtime surrogates for the theorem hypotheses: compact N, strictly convex
/// objective, exact sampled feasibility of z* at y*, grid feasibility of z*,
/// KKT certification of the final QP. Reports, never throws.
std::vector<TheoremCheck> TheoremChecks(const LyapunovTriplet& triplet,
                                        const VectorField& field,
                                        const SynthesisResult& run,
                                        const SynthesisConfig& cfg);

/// Guidance printed when a triplet proves infeasible.
extern const char* const kTripletGuidance;

}  // namespace lyapsip
