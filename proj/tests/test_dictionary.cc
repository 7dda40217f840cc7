#include <doctest.h>

#include <cmath>
#include <random>

#include "lyapsip/dictionary.h"
#include "lyapsip/polynomial.h"
#include "test_util.h"

using namespace lyapsip;
using lyapsip::testing::RandomVector;

namespace {

// Central difference with a step scaled to the coordinate.
Vector FdGradient(const BasisFunction& f, const Vector& y) {
  Vector g(y.size());
  for (int i = 0; i < y.size(); ++i) {
    const double h = 1e-6 * std::max(1.0, std::abs(y[i]));
    Vector p = y, m = y;
    p[i] += h;
    m[i] -= h;
    g[i] = (f.Value(p) - f.Value(m)) / (2 * h);
  }
  return g;
}

}  // namespace

TEST_SUITE("dictionary") {

TEST_CASE("monomial dictionary ordering and keys") {
  const Dictionary d = MonomialDictionary(2, {2});
  REQUIRE(d.size() == 3);
  CHECK(d[0].Key() == "m:2,0");
  CHECK(d[1].Key() == "m:1,1");
  CHECK(d[2].Key() == "m:0,2");
  CHECK(d[1].ToString() == "x1*x2");
  CHECK(MonomialDictionary(5, {2}).size() == 15);
  CHECK(MonomialDictionary(5, {2, 4, 6}).size() == 15 + 70 + 210);
  CHECK(MonomialDictionary(2, {2, 3, 4, 5, 6}).size() == 3 + 4 + 5 + 6 + 7);
  CHECK_THROWS_AS(MonomialDictionary(2, {0}), std::invalid_argument);
}

TEST_CASE("cosine elements are offset to vanish at the origin") {
  const Dictionary d = CosineDictionary(2, {0, 1, 2});
  for (const auto& b : d) CHECK(b.Value(Vector::Zero(2)) == 0.0);
  Vector y(2);
  y << 0.7, -0.3;
  CHECK(d[2].Value(y) == doctest::Approx(std::cos(1.4) - 1.0));
  CHECK(d[0].Value(y) == 0.0);
  CHECK(d[2].Key() == "cos:2");
  CHECK_THROWS_AS(BasisFunction::Cosine(2, -1), std::invalid_argument);
}

TEST_CASE("gradients match finite differences for every element kind") {
  std::mt19937_64 rng(11);
  Dictionary all = MonomialDictionary(3, {1, 2, 3, 4, 5, 6});
  for (auto& b : CosineDictionary(3, {0, 1, 2, 3})) all.push_back(b);
  double worst = 0.0;
  for (const auto& f : all) {
    for (int t = 0; t < 20; ++t) {
      const Vector y = RandomVector(rng, 3, -1.5, 1.5);
      const Vector g = f.Gradient(y);
      const Vector fd = FdGradient(f, y);
      const double rel = (g - fd).norm() / std::max(1.0, g.norm());
      worst = std::max(worst, rel);
      const Vector v = RandomVector(rng, 3);
      CHECK(f.DirectionalDerivative(y, v) == doctest::Approx(g.dot(v)).epsilon(1e-12));
    }
  }
  CHECK(worst <= 1e-6);
}

TEST_CASE("combine is linear in the coefficients") {
  const Dictionary d = MonomialDictionary(2, {2, 4});
  std::mt19937_64 rng(5);
  const Vector y = RandomVector(rng, 2);
  std::vector<double> a(d.size()), b(d.size()), s(d.size());
  for (std::size_t i = 0; i < d.size(); ++i) {
    a[i] = i + 0.5;
    b[i] = -2.0 * i;
    s[i] = a[i] + 3.0 * b[i];
  }
  CHECK(Combine(d, s, y) ==
        doctest::Approx(Combine(d, a, y) + 3.0 * Combine(d, b, y)).epsilon(1e-13));
  CHECK_THROWS_AS(Combine(d, std::vector<double>(2), y), std::invalid_argument);
}

TEST_CASE("neighborhood sampling stays inside and fixes interior points") {
  const Neighborhood ball = Neighborhood::Ball(2, 0.5);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int i = 0; i < 500; ++i) {
    const std::vector<double> p{u(rng), u(rng)};
    const Vector y = ball.SampleIn(p);
    CHECK(ball.Contains(y));
    const Vector cube = Vector::Map(p.data(), 2) * 1.0 - Vector::Constant(2, 0.5);
    if (cube.norm() <= 0.5) CHECK((y - cube).norm() <= 1e-15);
  }
  Vector lo(2), hi(2);
  lo << -4, -1;
  hi << 4, 2;
  const Neighborhood box = Neighborhood::Box(lo, hi);
  const std::vector<double> mid{0.5, 0.5};
  CHECK(box.SampleIn(mid)[1] == doctest::Approx(0.5));
  CHECK(box.MaxNorm() == doctest::Approx(std::sqrt(16.0 + 4.0)));
  CHECK_THROWS_AS(Neighborhood::Ball(2, 0.0).Validate(Mode::kAsymptotic), std::invalid_argument);
  Vector z = Vector::Zero(3), one = Vector::Ones(3);
  CHECK_THROWS_AS(Neighborhood::Box(z, one).Validate(Mode::kAsymptotic), std::invalid_argument);
  CHECK_NOTHROW(Neighborhood::Box(z, one).Validate(Mode::kChetaev));
}

TEST_CASE("class-K bounds") {
  const ClassKBound a = ClassKBound::Power(0.5, 3);
  CHECK(a(0.0) == 0.0);
  CHECK(a(2.0) == doctest::Approx(4.0));
  CHECK(ClassKBound::Zero()(3.0) == 0.0);
  CHECK_THROWS_AS(a(-1.0), std::invalid_argument);
  CHECK_THROWS_AS(ClassKBound::Power(0.0, 2), std::invalid_argument);
}

TEST_CASE("triplet validation names the offending component") {
  LyapunovTriplet t = lyapsip::testing::VanDerPolTriplet();
  CHECK_NOTHROW(t.Validate());
  t.beta = ClassKBound::Zero();
  CHECK_THROWS_WITH_AS(t.Validate(), doctest::Contains("beta"), std::invalid_argument);
  t = lyapsip::testing::WhirlingTriplet();
  CHECK_NOTHROW(t.Validate());
  t.w_dict = MonomialDictionary(2, {2});
  CHECK_THROWS_WITH_AS(t.Validate(), doctest::Contains("W"), std::invalid_argument);
  t = lyapsip::testing::VanDerPolTriplet();
  t.v_dict.push_back(t.v_dict[0]);
  CHECK_THROWS_WITH_AS(t.Validate(), doctest::Contains("duplicate"), std::invalid_argument);
}

TEST_CASE("polynomial shift and projection") {
  Polynomial p(2);
  p.AddTerm({2, 0}, 1.0);
  p.AddTerm({1, 0}, -4.0);
  p.AddTerm({0, 0}, 4.0);  // (x1 - 2)^2
  Vector eq(2);
  eq << 2, 0;
  const Polynomial s = p.Shifted(eq);
  CHECK(s.Coefficient({2, 0}) == doctest::Approx(1.0));
  CHECK(std::abs(s.Coefficient({1, 0})) <= 1e-15);
  CHECK(std::abs(s.Coefficient({0, 0})) <= 1e-15);
  const DictionaryProjection proj = ProjectOntoDictionary(s, MonomialDictionary(2, {2}));
  CHECK(proj.coeffs[0] == doctest::Approx(1.0));
  CHECK(proj.max_outside <= 1e-15);
}

}  // TEST_SUITE
