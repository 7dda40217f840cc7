#include <doctest.h>

#include <cmath>

#include "lyapsip/verifier.h"
#include "test_util.h"

using namespace lyapsip;
using namespace lyapsip::testing;

namespace {

Certificate VdpReference() {
  Certificate c;
  c.mode = Mode::kAsymptotic;
  c.lambda = {1.106, 0.380, 1.106};
  return c;
}

}  // namespace

TEST_SUITE("verifier") {

TEST_CASE("halton points are deterministic and skip the origin") {
  const auto a = HaltonPoints(3, 100), b = HaltonPoints(3, 100);
  CHECK(a == b);
  CHECK(a[0] == std::vector<double>{0.5, 1.0 / 3, 0.2});
  for (const auto& p : a) {
    CHECK(p.size() == 3);
    for (double v : p) CHECK((v > 0.0 && v < 1.0));
  }
}

TEST_CASE("zero certificate with zero lower bound is verified") {
  LyapunovTriplet t = WhirlingTriplet();
  t.alpha = ClassKBound::Zero();
  Certificate c;
  c.mode = Mode::kStability;
  c.lambda.assign(t.q(), 0.0);
  const VerificationReport r = Verify(t, MakeBuiltin("whirling"), c);
  CHECK(r.verdict == Verdict::kVerified);
  CHECK(r.c1.value == 0.0);
  CHECK(r.c2.value == 0.0);
}

TEST_CASE("reference van der Pol certificate passes, W taken from beta") {
  const LyapunovTriplet t = VanDerPolTriplet();
  const VerificationReport r = Verify(t, MakeBuiltin("vanderpol", {{"epsilon", -2.0}}),
                                      VdpReference());
  CHECK(r.verdict == Verdict::kVerified);
  CHECK(r.margin_from_beta);
  CHECK_FALSE(r.c3.has_value());
  CHECK(r.grid_points == 10001);
}

TEST_CASE("a flipped coefficient is caught") {
  const LyapunovTriplet t = VanDerPolTriplet();
  Certificate c = VdpReference();
  c.lambda[0] = -c.lambda[0];
  const VerificationReport r = Verify(t, MakeBuiltin("vanderpol"), c);
  CHECK(r.verdict == Verdict::kViolated);
  CHECK(r.violation > 1e-3);
  CHECK(r.c1.value < -1e-3);
  CHECK(t.nbhd.Contains(r.c1.argmin));
}

TEST_CASE("refinement never loses to the grid") {
  const LyapunovTriplet t = VanDerPolTriplet();
  Certificate c = VdpReference();
  c.lambda[1] = 3.0;  // indefinite
  const VerificationReport r = Verify(t, MakeBuiltin("vanderpol"), c);
  CHECK(r.c1.value <= r.c1.grid_value);
  CHECK(r.c2.value <= r.c2.grid_value);
}

TEST_CASE("denser grids do not raise the minima") {
  const LyapunovTriplet t = VanDerPolTriplet();
  Certificate c = VdpReference();
  c.lambda[1] = 2.5;
  VerifyConfig coarse, fine;
  coarse.grid_points = 2000;
  fine.grid_points = 4000;
  const auto a = Verify(t, MakeBuiltin("vanderpol"), c, coarse);
  const auto b = Verify(t, MakeBuiltin("vanderpol"), c, fine);
  CHECK(b.c1.grid_value <= a.c1.grid_value + 1e-15);
  CHECK(b.c1.value <= a.c1.value + 1e-8);
}

TEST_CASE("sphere curves bracket the bounds for a verified certificate") {
  const LyapunovTriplet t = VanDerPolTriplet();
  std::vector<double> radii;
  for (int i = 1; i <= 10; ++i) radii.push_back(0.05 * i);
  const auto rows = SphereCurves(t, MakeBuiltin("vanderpol"), VdpReference(), radii);
  REQUIRE(rows.size() == 10);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].r == radii[i]);
    CHECK(rows[i].min_v >= rows[i].alpha - 1e-9);
    CHECK(rows[i].max_vdot <= rows[i].neg_beta + 1e-9);
  }
  const auto tiny = SphereCurves(t, MakeBuiltin("vanderpol"), VdpReference(), {1e-6});
  CHECK(tiny[0].min_v <= 1e-11);
  CHECK_THROWS_AS(SphereCurves(t, MakeBuiltin("vanderpol"), VdpReference(), {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(SphereCurves(t, MakeBuiltin("vanderpol"), VdpReference(), {0.6}),
                  std::invalid_argument);
}

TEST_CASE("equilibrium values of recentred certificates") {
  // (x1 - 2)-centred quadratic from the table row at (2, 0).
  Polynomial p(2);
  p.AddTerm({2, 0}, 0.981);
  p.AddTerm({1, 1}, 0.922);
  p.AddTerm({0, 2}, 1.083);
  p.AddTerm({1, 0}, -3.924);
  p.AddTerm({0, 1}, -1.844);
  p.AddTerm({0, 0}, 3.924);
  Vector eq(2);
  eq << 2, 0;
  CHECK(std::abs(CheckEquilibriumValue(p, eq)) <= 1e-9);
  CHECK(std::abs(CheckEquilibriumValue(p, eq, MakeBuiltin("planar2d"))) <= 1e-9);
  CHECK_THROWS_AS(CheckEquilibriumValue(p, Vector::Unit(2, 0), MakeBuiltin("planar2d")),
                  NotAnEquilibrium);
  const Recentered r = RecenterPolynomial(p, eq, MonomialDictionary(2, {2}));
  CHECK(r.lambda[0] == doctest::Approx(0.981));
  CHECK(r.lambda[1] == doctest::Approx(0.922));
  CHECK(r.lambda[2] == doctest::Approx(1.083));
  CHECK(r.max_outside <= 1e-12);
  Vector zero = Vector::Zero(2);
  const Polynomial back = ToOriginalCoordinates(MonomialDictionary(2, {2}), r.lambda, eq);
  CHECK(back.Coefficient({1, 0}) == doctest::Approx(-3.924));
  CHECK(CheckEquilibriumValue(FromDictionary(MonomialDictionary(2, {2}), r.lambda), zero) == 0.0);
}

TEST_CASE("certificate size mismatches are rejected") {
  const LyapunovTriplet t = VanDerPolTriplet();
  Certificate c = VdpReference();
  c.lambda.pop_back();
  CHECK_THROWS_AS(Verify(t, MakeBuiltin("vanderpol"), c), std::invalid_argument);
  c = VdpReference();
  c.mode = Mode::kStability;
  CHECK_THROWS_AS(Verify(t, MakeBuiltin("vanderpol"), c), std::invalid_argument);
}

}  // TEST_SUITE
