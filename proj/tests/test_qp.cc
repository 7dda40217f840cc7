#include <doctest.h>

#include <cmath>
#include <random>

#include "lyapsip/qp_solver.h"
#include "qp_cases.h"

using namespace lyapsip;
using lyapsip::testing::RandomFeasibleQp;
using lyapsip::testing::RandomInfeasibleQp;

namespace {

bool FarkasValid(const QpProblem& qp, const Vector& y) {
  if (y.size() != qp.rows() || (y.array() < 0).any()) return false;
  const auto [norm, dot] = FarkasResiduals(qp, y);
  return norm <= 1e-8 * std::max(1.0, y.sum()) && dot < 0.0;
}

}  // namespace

TEST_SUITE("qp") {

TEST_CASE("unconstrained and single-row projections in closed form") {
  QpProblem qp;
  qp.anchor = Vector::Ones(3);
  qp.a = RowMatrix(0, 3);
  qp.b = Vector(0);
  QpSolution s = SolveQp(qp);
  CHECK(s.status == QpStatus::kOptimal);
  CHECK(s.value == 0.0);

  qp.a = RowMatrix(1, 3);
  qp.a << 1, 1, 1;
  qp.b = Vector::Constant(1, 0.0);
  s = SolveQp(qp);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.z.norm() <= 1e-14);
  CHECK(s.value == doctest::Approx(3.0));
  REQUIRE(s.multipliers.size() == 1);
  CHECK(s.multipliers[0] == doctest::Approx(2.0));
}

TEST_CASE("matches the brute-force oracle on random feasible problems") {
  std::mt19937_64 rng(2024);
  int mismatches = 0;
  for (int t = 0; t < 500; ++t) {
    const QpProblem qp = RandomFeasibleQp(rng);
    const QpSolution s = SolveQp(qp);
    const QpSolution ref = BruteForceQp(qp);
    REQUIRE(ref.status == QpStatus::kOptimal);
    const bool ok = s.status == QpStatus::kOptimal &&
                    std::abs(s.value - ref.value) <= 1e-8 * std::max(1.0, ref.value) &&
                    (s.z - ref.z).norm() <= 1e-6;
    if (!ok) ++mismatches;
    const KktResiduals k = ComputeKkt(qp, s);
    CHECK(k.Pass(1e-9, 1e-8));
  }
  CHECK(mismatches == 0);
}

TEST_CASE("reports infeasibility with a valid Farkas certificate") {
  std::mt19937_64 rng(77);
  for (int t = 0; t < 100; ++t) {
    const QpProblem qp = RandomInfeasibleQp(rng);
    const QpSolution s = SolveQp(qp);
    REQUIRE(s.status == QpStatus::kInfeasible);
    CHECK(FarkasValid(qp, s.farkas));
    CHECK(BruteForceQp(qp).status == QpStatus::kInfeasible);
  }
}

TEST_CASE("least-distance route agrees with the oracle") {
  std::mt19937_64 rng(9);
  for (int t = 0; t < 200; ++t) {
    const QpProblem qp = RandomFeasibleQp(rng);
    const QpSolution s = SolveQpLeastDistance(qp);
    const QpSolution ref = BruteForceQp(qp);
    REQUIRE(s.status == QpStatus::kOptimal);
    CHECK(s.value == doctest::Approx(ref.value).epsilon(1e-7));
  }
  for (int t = 0; t < 50; ++t) {
    const QpProblem qp = RandomInfeasibleQp(rng);
    CHECK(SolveQpLeastDistance(qp).status == QpStatus::kInfeasible);
  }
}

TEST_CASE("degenerate rows: duplicates, scaled copies and redundant constraints") {
  QpProblem qp;
  qp.anchor = Vector::Ones(2);
  qp.a = RowMatrix(5, 2);
  qp.a << 1, 0,
          1, 0,
          2, 0,
          0, 1,
          1, 1;
  qp.b = Vector(5);
  qp.b << 0, 0, 0, 0.5, 0.5;
  const QpSolution s = SolveQp(qp);
  const QpSolution ref = BruteForceQp(qp);
  REQUIRE(s.status == QpStatus::kOptimal);
  CHECK(s.value == doctest::Approx(ref.value).epsilon(1e-12));
  CHECK((s.z - ref.z).norm() <= 1e-9);
  CHECK(ComputeKkt(qp, s).Pass(1e-9, 1e-8));
}

TEST_CASE("nearly opposite rows are solved to KKT accuracy") {
  // A thin slab: two rows whose normals differ by 1e-7. The optimum needs
  // large multipliers and stresses the factorisation.
  QpProblem qp;
  qp.anchor = Vector::Ones(3);
  qp.a = RowMatrix(3, 3);
  qp.a << 1, 1, 0,
          -1, -1 - 1e-7, 0,
          0, 0, 1;
  qp.b = Vector(3);
  qp.b << 0.1, -0.1, 0.5;
  const QpSolution s = SolveQp(qp);
  REQUIRE(s.status == QpStatus::kOptimal);
  const KktResiduals k = ComputeKkt(qp, s);
  CHECK(k.primal <= 1e-9);
  CHECK(k.Pass(1e-9, 1e-8));
  const QpSolution ref = BruteForceQp(qp);
  CHECK(s.value == doctest::Approx(ref.value).epsilon(1e-7));
}

TEST_CASE("validation rejects malformed problems") {
  QpProblem qp;
  qp.anchor = Vector::Ones(2);
  qp.a = RowMatrix(1, 3);
  qp.b = Vector::Zero(1);
  CHECK_THROWS_AS(SolveQp(qp), std::invalid_argument);
  qp.a = RowMatrix::Zero(1, 2);
  qp.b = Vector::Constant(1, NAN);
  CHECK_THROWS_AS(SolveQp(qp), std::invalid_argument);
}

TEST_CASE("solver is deterministic") {
  std::mt19937_64 rng(3);
  for (int t = 0; t < 50; ++t) {
    const QpProblem qp = RandomFeasibleQp(rng);
    const QpSolution a = SolveQp(qp), b = SolveQp(qp);
    CHECK(a.value == b.value);
    CHECK(a.active_set == b.active_set);
  }
}

}  // TEST_SUITE
