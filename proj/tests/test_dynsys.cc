#include <doctest.h>

#include <cmath>
#include <random>

#include "lyapsip/field.h"
#include "test_util.h"

using namespace lyapsip;

namespace {
Vector V2(double a, double b) {
  Vector v(2);
  v << a, b;
  return v;
}
}  // namespace

TEST_SUITE("dynsys") {

TEST_CASE("every builtin is registered with finite defaults") {
  for (const auto& name : BuiltinNames()) {
    const VectorField f = MakeBuiltin(name);
    CHECK(f.dim() >= 2);
    for (const auto& [k, v] : BuiltinDefaults(name)) CHECK(std::isfinite(v));
    CHECK(f.Eval(Vector::Zero(f.dim())).allFinite());
  }
  CHECK_THROWS_AS(MakeBuiltin("nope"), std::invalid_argument);
  CHECK_THROWS_AS(MakeBuiltin("vanderpol", {{"mu", 1.0}}), std::invalid_argument);
  CHECK_THROWS_AS(MakeBuiltin("vanderpol", {{"epsilon", NAN}}), std::invalid_argument);
}

TEST_CASE("origin is an equilibrium of every builtin but the rounded power model") {
  for (const auto& name : BuiltinNames()) {
    const VectorField f = MakeBuiltin(name);
    if (name == "power4d") {
      // Printed four-digit coefficients leave f(0) = (0, 0, 0, 1e-4); the true
      // equilibrium sits about 1e-4 away from the origin.
      CHECK(f.Eval(Vector::Zero(4)).norm() == doctest::Approx(1e-4).epsilon(1e-9));
      Vector eq(4);
      eq << 4.0036917134498786e-05, 0.0, 0.0001201589306433635, 0.0;
      CHECK(f.Eval(eq).norm() <= 1e-15);
      continue;
    }
    CHECK_MESSAGE(f.Eval(Vector::Zero(f.dim())).norm() <= kEquilibriumTolerance, name);
  }
}

TEST_CASE("planar system equilibria and shifting") {
  const VectorField f = MakeBuiltin("planar2d");
  for (const auto& eq : {V2(2, 0), V2(0, 3), V2(0, 0)}) {
    const ShiftedField s = ShiftToEquilibrium(f, eq);
    CHECK(s.Eval(Vector::Zero(2)).norm() <= 1e-12);
    const Vector z = V2(0.1, -0.05);
    CHECK((s.Eval(z) - f.Eval(z + eq)).norm() == 0.0);
  }
  CHECK_THROWS_AS(ShiftToEquilibrium(f, V2(1, 0)), NotAnEquilibrium);
}

TEST_CASE("bhatia branches and continuity across the switching surface") {
  const VectorField f = MakeBuiltin("bhatia");
  const Vector v = f.Eval(V2(2, 1));
  CHECK(v[0] == 2.0);
  CHECK(v[1] == -1.0);
  CHECK(f.Eval(V2(0.5, 0.5))[0] == doctest::Approx(2 * 0.125 * 0.25 - 0.5));
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.3, 3.5);
  for (int i = 0; i < 200; ++i) {
    const double x1 = u(rng);
    const double x2 = 1.0 / x1;
    const double lo = std::nextafter(x2, 0.0), hi = std::nextafter(x2, 10.0);
    const double a = f.Eval(V2(x1, lo))[0], b = f.Eval(V2(x1, hi))[0];
    CHECK(std::abs(a - b) <= 1e-12 * std::max(1.0, std::abs(a)));
  }
}

TEST_CASE("van der Pol and chetaev formulas") {
  const VectorField vdp = MakeBuiltin("vanderpol", {{"epsilon", -2.0}});
  const Vector y = V2(0.3, -0.2);
  const Vector v = vdp.Eval(y);
  CHECK(v[0] == doctest::Approx(-0.2));
  CHECK(v[1] == doctest::Approx(-2.0 * (1 - 0.09) * -0.2 - 0.3));
  const VectorField ch = MakeBuiltin("chetaev");
  CHECK(ch.dim() == 3);
}

TEST_CASE("wrong input size throws") {
  const VectorField f = MakeBuiltin("vanderpol");
  CHECK_THROWS_AS(f.Eval(Vector::Zero(3)), std::invalid_argument);
  const VectorField bad(2, [](const Vector&) { return Vector::Zero(3); }, "bad");
  CHECK_THROWS_AS(bad.Eval(Vector::Zero(2)), std::runtime_error);
}

TEST_CASE("external process field speaks the line protocol") {
  const VectorField f = MakeExternalProcessField(
      "while read a b; do echo \"$b $a\"; done", 2);
  for (int i = 0; i < 3; ++i) {
    const Vector v = f.Eval(V2(0.25 * i, 1.5));
    CHECK(v[0] == 1.5);
    CHECK(v[1] == 0.25 * i);
  }
  const VectorField broken = MakeExternalProcessField("echo 1", 2);
  CHECK_THROWS(broken.Eval(V2(0, 0)));
}

}  // TEST_SUITE
