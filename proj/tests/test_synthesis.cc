#include <doctest.h>

#include <cmath>

#include "lyapsip/artifacts.h"
#include "lyapsip/synthesis.h"
#include "test_util.h"

using namespace lyapsip;
using namespace lyapsip::testing;

namespace {

ShiftedField PlanarAt(double x1, double x2) {
  Vector eq(2);
  eq << x1, x2;
  return ShiftToEquilibrium(MakeBuiltin("planar2d"), eq);
}

LyapunovTriplet PlanarStability() {
  LyapunovTriplet t;
  t.nbhd = Neighborhood::Ball(2, 0.2);
  t.alpha = ClassKBound::Power(1.0 / 6, 2);
  t.v_dict = MonomialDictionary(2, {2});
  t.mode = Mode::kStability;
  return t;
}

SynthesisConfig Quick(std::uint64_t seed) {
  SynthesisConfig c;
  c.anneal.restarts = 2;
  c.anneal.seed = seed;
  c.anneal.threads = 1;
  return c;
}

const TheoremCheck* Find(const SynthesisResult& r, const std::string& name) {
  for (const auto& c : r.checks) {
    if (c.name == name) return &c;
  }
  return nullptr;
}

}  // namespace

TEST_SUITE("synthesis") {

TEST_CASE("planar equilibrium is certified with consistent provenance") {
  const LyapunovTriplet t = PlanarTriplet();
  const ShiftedField f = PlanarAt(2, 0);
  const SynthesisConfig cfg = Quick(3);
  const SynthesisResult r = Synthesize(t, f.field(), cfg);
  REQUIRE(r.outcome == Outcome::kCertified);
  CHECK(r.has_certificate);
  CHECK(r.sample_count == t.q() + t.m());
  CHECK(r.best_samples.size() == static_cast<std::size_t>(r.sample_count));
  CHECK(r.value_gap == 0.0);
  CHECK(r.cert.objective_value == r.anneal.value);
  CHECK(r.anneal.runs[r.anneal.best_restart].trace.back() == r.cert.objective_value);
  CHECK(r.cert.seed == 3);
  CHECK(r.cert.lambda.size() == 3);
  CHECK(r.cert.mu.size() == static_cast<std::size_t>(t.m()));
  for (const auto& c : r.checks) CHECK_MESSAGE(c.pass, c.name << ": " << c.detail);
  for (const auto& y : r.best_samples) CHECK(t.nbhd.Contains(y));
}

TEST_CASE("identical seeds give bitwise identical certificates") {
  const LyapunovTriplet t = PlanarTriplet();
  const ShiftedField f = PlanarAt(0, 3);
  SynthesisConfig cfg = Quick(11);
  const SynthesisResult a = Synthesize(t, f.field(), cfg);
  cfg.anneal.threads = 2;
  const SynthesisResult b = Synthesize(t, f.field(), cfg);
  CHECK(a.cert.lambda == b.cert.lambda);
  CHECK(a.cert.mu == b.cert.mu);
  CHECK(a.cert.objective_value == b.cert.objective_value);
  CHECK(a.anneal.runs[0].trace == b.anneal.runs[0].trace);
  CHECK(ConvergenceCsv(a.anneal) == ConvergenceCsv(b.anneal));
  cfg.anneal.seed = 12;
  const SynthesisResult c = Synthesize(t, f.field(), cfg);
  CHECK(c.anneal.runs[0].seed != a.anneal.runs[0].seed);
}

TEST_CASE("unstable node is never certified") {
  const LyapunovTriplet t = PlanarStability();
  const ShiftedField f = PlanarAt(0, 0);
  const SynthesisResult r = Synthesize(t, f.field(), Quick(1));
  CHECK(r.outcome == Outcome::kNotFound);
  CHECK(r.message.find("triplet") != std::string::npos);
}

TEST_CASE("rescaled objective anchor preserves the verdict") {
  // Replacing phi_i by c phi_i maps lambda to lambda / c; with the anchor
  // scaled by c the programs coincide up to that change of variables.
  const LyapunovTriplet t = PlanarStability();
  const ShiftedField f = PlanarAt(2, 0);
  SynthesisConfig cfg = Quick(4);
  const SynthesisResult base = Synthesize(t, f.field(), cfg);
  for (double c : {0.5, 3.0}) {
    cfg.anchor.assign(t.q(), c);
    const SynthesisResult r = Synthesize(t, f.field(), cfg);
    CHECK(r.report.verdict == base.report.verdict);
  }
  CHECK(base.outcome == Outcome::kCertified);
}

TEST_CASE("truncated budget still reports theorem checks") {
  const LyapunovTriplet t = PlanarTriplet();
  const ShiftedField f = PlanarAt(2, 0);
  SynthesisConfig cfg = Quick(2);
  cfg.anneal.max_iterations = 1;
  cfg.anneal.restarts = 1;
  cfg.anneal.polish = PolishMode::kNone;
  cfg.exchange.enabled = false;
  const SynthesisResult r = Synthesize(t, f.field(), cfg);
  REQUIRE(r.has_certificate);
  CHECK(Find(r, "sampled_feasibility")->pass);
  CHECK(Find(r, "grid_feasibility") != nullptr);
  CHECK(Find(r, "final_qp_kkt")->pass);
  if (r.report.verdict != Verdict::kVerified) CHECK(r.outcome == Outcome::kNotFound);
}

TEST_CASE("stability-mode whirling pendulum is certified") {
  const LyapunovTriplet t = WhirlingTriplet();
  SynthesisConfig cfg = Quick(5);
  cfg.anneal.restarts = 1;
  const SynthesisResult r = Synthesize(t, MakeBuiltin("whirling"), cfg);
  CHECK(r.outcome == Outcome::kCertified);
  CHECK(r.cert.mu.empty());
}

}  // TEST_SUITE
