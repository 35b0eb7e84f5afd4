#include <catch_amalgamated.hpp>

#include <cstdint>
#include <vector>

#include <stacksim/lp.hpp>
#include <stacksim/simulation.hpp>

using namespace stacksim;
using Catch::Matchers::WithinAbs;

namespace {

bool feasible_point(const LinearSystem& sys, const std::vector<double>& x, double tol = 1e-7) {
  for (const auto& c : sys.inequalities) {
    double lhs = 0.0;
    for (int j = 0; j < sys.num_vars; ++j) lhs += c.coeffs[j] * x[j];
    if (lhs > c.bound + tol) return false;
  }
  for (const auto& c : sys.equalities) {
    double lhs = 0.0;
    for (int j = 0; j < sys.num_vars; ++j) lhs += c.coeffs[j] * x[j];
    if (std::abs(lhs - c.bound) > tol) return false;
  }
  return true;
}

double dot(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

}  // namespace

TEST_CASE("simplex solves a textbook maximization") {
  // max 3x + 5y  s.t.  x <= 4, 2y <= 12, 3x + 2y <= 18, x,y >= 0: value 36 at (2,6)
  LinearSystem sys;
  sys.num_vars = 2;
  sys.add_le({1, 0}, 4);
  sys.add_le({0, 2}, 12);
  sys.add_le({3, 2}, 18);
  sys.add_le({-1, 0}, 0);
  sys.add_le({0, -1}, 0);

  const LpResult r = lp_solve({3, 5}, LpDirection::maximize, sys);
  REQUIRE(r.status == LpStatus::optimal);
  REQUIRE_THAT(r.value, WithinAbs(36.0, 1e-9));
  REQUIRE_THAT(r.point[0], WithinAbs(2.0, 1e-9));
  REQUIRE_THAT(r.point[1], WithinAbs(6.0, 1e-9));
}

TEST_CASE("free variables are handled without sign restrictions") {
  // min x + y  s.t.  x + 2y >= 3, x - y = -4  has x = -1, y = 2? check: x = y - 4,
  // (y - 4) + 2y >= 3 -> y >= 7/3, objective 2y - 4 minimized at y = 7/3: value 2/3
  LinearSystem sys;
  sys.num_vars = 2;
  sys.add_le({-1, -2}, -3);
  sys.add_eq({1, -1}, -4);

  const LpResult r = lp_solve({1, 1}, LpDirection::minimize, sys);
  REQUIRE(r.status == LpStatus::optimal);
  REQUIRE_THAT(r.value, WithinAbs(2.0 / 3, 1e-9));
  REQUIRE_THAT(r.point[1] - r.point[0], WithinAbs(4.0, 1e-9));
}

TEST_CASE("infeasible and unbounded problems are reported, not solved") {
  LinearSystem sys;
  sys.num_vars = 1;
  sys.add_le({1}, -1);
  sys.add_le({-1}, 0);  // x >= 0 and x <= -1
  REQUIRE(lp_solve({1}, LpDirection::maximize, sys).status == LpStatus::infeasible);
  REQUIRE_FALSE(lp_feasible(sys));

  LinearSystem open;
  open.num_vars = 1;
  open.add_le({-1}, 0);  // x >= 0, maximize x
  REQUIRE(lp_solve({1}, LpDirection::maximize, open).status == LpStatus::unbounded);
  REQUIRE(lp_feasible(open));

  // unbounded in the free part even with an equality present
  LinearSystem half;
  half.num_vars = 2;
  half.add_eq({1, 1}, 1);
  REQUIRE(lp_solve({1, -1}, LpDirection::maximize, half).status == LpStatus::unbounded);
}

TEST_CASE("equalities pin the solution exactly") {
  LinearSystem sys;
  sys.num_vars = 3;
  sys.add_simplex(0, 3);
  sys.add_eq({1, -1, 0}, 0.3);

  const LpResult r = lp_solve({1, 0, 0}, LpDirection::maximize, sys);
  REQUIRE(r.status == LpStatus::optimal);
  REQUIRE_THAT(r.value, WithinAbs(0.65, 1e-9));  // x0 = 0.65, x1 = 0.35, x2 = 0
  REQUIRE_THAT(r.point[0] - r.point[1], WithinAbs(0.3, 1e-9));
  REQUIRE(feasible_point(sys, r.point));
}

TEST_CASE("degenerate pivoting terminates at the optimum") {
  // Beale's cycling example; Bland's rule must reach value 1/20.
  LinearSystem sys;
  sys.num_vars = 4;
  sys.add_le({0.25, -60, -1.0 / 25, 9}, 0);
  sys.add_le({0.5, -90, -1.0 / 50, 3}, 0);
  sys.add_le({0, 0, 1, 0}, 1);
  for (int j = 0; j < 4; ++j) {
    std::vector<double> row(4, 0.0);
    row[j] = -1.0;
    sys.add_le(std::move(row), 0.0);
  }

  const LpResult r = lp_solve({0.75, -150, 1.0 / 50, -6}, LpDirection::maximize, sys);
  REQUIRE(r.status == LpStatus::optimal);
  REQUIRE_THAT(r.value, WithinAbs(0.05, 1e-9));
}

TEST_CASE("redundant equalities do not break phase one") {
  LinearSystem sys;
  sys.num_vars = 2;
  sys.add_eq({1, 1}, 1);
  sys.add_eq({2, 2}, 2);  // same hyperplane again
  sys.add_le({-1, 0}, 0);
  sys.add_le({0, -1}, 0);

  const LpResult r = lp_solve({1, 0}, LpDirection::maximize, sys);
  REQUIRE(r.status == LpStatus::optimal);
  REQUIRE_THAT(r.value, WithinAbs(1.0, 1e-9));
}

TEST_CASE("random simplex-constrained programs match a grid lower bound") {
  // The solver's point must be feasible with matching objective, and at
  // least as good as every lattice point of the feasible region.
  const std::uint64_t stream = rng::stream_seed(2024, 0);
  std::int64_t draw = 0;
  for (int trial = 0; trial < 25; ++trial) {
    const int k = 3;
    LinearSystem sys;
    sys.num_vars = k;
    sys.add_simplex(0, k);

    std::vector<double> cut(k);
    for (double& c : cut) c = 2.0 * rng::unit_draw(stream, draw++) - 1.0;
    sys.add_le(cut, 0.25);

    std::vector<double> objective(k);
    for (double& c : objective) c = 2.0 * rng::unit_draw(stream, draw++) - 1.0;

    const LpResult r = lp_solve(objective, LpDirection::maximize, sys);
    if (r.status != LpStatus::optimal) {
      // the cut may exclude the whole simplex; then no lattice point fits either
      REQUIRE(r.status == LpStatus::infeasible);
      bool any = false;
      for (int i = 0; i <= 20 && !any; ++i)
        for (int j = 0; i + j <= 20 && !any; ++j) {
          const std::vector<double> x = {i / 20.0, j / 20.0, (20 - i - j) / 20.0};
          any = feasible_point(sys, x, 1e-12);
        }
      REQUIRE_FALSE(any);
      continue;
    }

    REQUIRE(feasible_point(sys, r.point));
    REQUIRE_THAT(dot(objective, r.point), WithinAbs(r.value, 1e-9));
    for (int i = 0; i <= 20; ++i)
      for (int j = 0; i + j <= 20; ++j) {
        const std::vector<double> x = {i / 20.0, j / 20.0, (20 - i - j) / 20.0};
        if (feasible_point(sys, x, 1e-12)) REQUIRE(dot(objective, x) <= r.value + 1e-9);
      }
  }
}

TEST_CASE("validate rejects ragged constraint rows") {
  LinearSystem sys;
  sys.num_vars = 3;
  sys.add_le({1, 2}, 0);
  REQUIRE_THROWS_AS(sys.validate(), invalid_input_error);
}
