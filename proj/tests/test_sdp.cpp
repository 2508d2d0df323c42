#include <doctest.h>

#include <random>

#include "domcert/sdp.hpp"

using namespace domcert;
using Eigen::MatrixXd;

namespace {

SdpProblem duffing_convex_problem() {
  SdpProblem prob;
  prob.n = 2;
  MatrixXd a1(2, 2), a2(2, 2);
  a1 << 0, 1, -1, -5;
  a2 << 0, 1, -5, -5;
  prob.constraints.push_back(LyapunovConstraint{a1, 0.0, 0.01});
  prob.constraints.push_back(LyapunovConstraint{a2, 0.0, 0.01});
  return prob;
}

}  // namespace

TEST_CASE("convex-spring vertex LMI is feasible with definite storage") {
  const SdpResult r = solve(duffing_convex_problem());
  REQUIRE(r.status == SdpStatus::Feasible);
  CHECK(min_eig_sym(*r.P) > 0.0);
  for (double m : verify_solution(*r.P, duffing_convex_problem())) CHECK(m <= 1e-7 * 6.0);
}

TEST_CASE("one-dimensional stable system is feasible") {
  SdpProblem prob;
  prob.n = 1;
  prob.constraints.push_back(LyapunovConstraint{-MatrixXd::Identity(1, 1), 0.0, 0.01});
  const SdpResult r = solve(prob);
  REQUIRE(r.status == SdpStatus::Feasible);
  CHECK((*r.P)(0, 0) > 0.0);
}

TEST_CASE("rotation at rate zero is infeasible") {
  // Oracle: for A = [[0,1],[-1,0]], A'P + PA = [[-2b, a-c],[a-c, 2b]] for
  // P = [[a,b],[b,c]], whose largest eigenvalue is +sqrt(4b^2 + (a-c)^2) >= 0,
  // so adding 0.01*I keeps the residual >= 0.01 for every P. Scan a coarse
  // grid to freeze that fact independently of the solver.
  MatrixXd a(2, 2);
  a << 0, 1, -1, 0;
  double best = 1e300;
  for (double pa = -10; pa <= 10; pa += 2.5) {
    for (double pb = -10; pb <= 10; pb += 2.5) {
      for (double pc = -10; pc <= 10; pc += 2.5) {
        MatrixXd p(2, 2);
        p << pa, pb, pb, pc;
        MatrixXd f = a.transpose() * p + p * a + 0.01 * MatrixXd::Identity(2, 2);
        best = std::min(best, max_eig_sym(SymMatrix(f)));
      }
    }
  }
  CHECK(best >= 0.01 - 1e-12);

  SdpProblem prob;
  prob.n = 2;
  prob.constraints.push_back(LyapunovConstraint{a, 0.0, 0.01});
  const SdpResult r = solve(prob);
  CHECK(r.status == SdpStatus::Infeasible);
}

TEST_CASE("verify_solution against published storages") {
  SUBCASE("convex-spring 2x2") {
    MatrixXd p(2, 2);
    p << 0.8696, 0.1482, 0.1482, 0.1304;
    for (double m : verify_solution(SymMatrix(p), duffing_convex_problem())) {
      CHECK(m <= 0.05);
    }
  }
  SUBCASE("identity against the stable diagonal") {
    SdpProblem prob;
    prob.n = 2;
    prob.constraints.push_back(LyapunovConstraint{-MatrixXd::Identity(2, 2), 0.0, 0.0});
    const std::vector<double> m = verify_solution(SymMatrix::Identity(2), prob);
    CHECK(m[0] == doctest::Approx(-2.0));
  }
  SUBCASE("gain-supply 3x3 storage from the saturated PI loop") {
    MatrixXd p(3, 3);
    p << -0.5522, 0.0498, -0.0171,
          0.0498, 1.4946,  0.3068,
         -0.0171, 0.3068,  0.0576;
    SdpProblem prob;
    prob.n = 3;
    MatrixXd b(3, 1), c(1, 3), d(1, 1);
    b << 0, 1, 0;
    c << 1, 0, 0;
    d << 0;
    for (double slope : {-1.0, 1.0}) {
      MatrixXd a(3, 3);
      a << 0, 1, 0, slope, -5, -1, 1, 0, 0;
      prob.constraints.push_back(
          BorderedConstraint{a, b, c, d, gain_supply(1, 1, 0.5636), 2.0, 0.01});
    }
    for (double m : verify_solution(SymMatrix(p), prob)) CHECK(m <= 0.05);
    CHECK(inertia_of(SymMatrix(p)) == Inertia{2, 0, 1});
  }
}

TEST_CASE("feasibility is homogeneous: (cP, c*eps) stays feasible") {
  const SdpResult r = solve(duffing_convex_problem());
  REQUIRE(r.status == SdpStatus::Feasible);
  for (double c : {0.5, 2.0}) {
    SdpProblem scaled = duffing_convex_problem();
    for (auto& lc : scaled.constraints) std::get<LyapunovConstraint>(lc).epsilon *= c;
    const SymMatrix cp(MatrixXd(c * r.P->mat()));
    for (double m : verify_solution(cp, scaled)) CHECK(m <= 1e-7 * 6.0 * c);
  }
}

TEST_CASE("margin optimum scales with the norm bound") {
  SdpProblem prob;
  prob.n = 2;
  MatrixXd a(2, 2);
  a << -1, 0, 0, -2;
  prob.constraints.push_back(LyapunovConstraint{a, 0.0, 0.0});
  prob.objective = SdpObjective::MaximizeMargin;
  const SdpResult r1 = solve(prob);
  prob.norm_bound = 20.0;
  const SdpResult r2 = solve(prob);
  REQUIRE(r1.status == SdpStatus::Feasible);
  REQUIRE(r2.status == SdpStatus::Feasible);
  CHECK(r2.margin == doctest::Approx(2.0 * r1.margin).epsilon(1e-6));
}

TEST_CASE("identical problems solve identically") {
  const SdpResult r1 = solve(duffing_convex_problem());
  const SdpResult r2 = solve(duffing_convex_problem());
  REQUIRE(r1.status == r2.status);
  CHECK((r1.P->mat() - r2.P->mat()).cwiseAbs().maxCoeff() == 0.0);
  CHECK(r1.margin == r2.margin);
}

TEST_CASE("equality constraints pin storage entries") {
  SdpProblem prob = duffing_convex_problem();
  MatrixXd w = MatrixXd::Zero(2, 2);
  w(0, 1) = 1.0;  // <W, P> = P(0,1)
  prob.equalities.push_back(EqualityConstraint{w, 0.4});
  const SdpResult r = solve(prob);
  REQUIRE(r.status == SdpStatus::Feasible);
  CHECK((*r.P)(0, 1) == doctest::Approx(0.4).epsilon(1e-9));

  SUBCASE("inconsistent pins are reported infeasible") {
    prob.equalities.push_back(EqualityConstraint{w, 0.8});
    const SdpResult bad = solve(prob);
    CHECK(bad.status == SdpStatus::Infeasible);
  }
}

TEST_CASE("solver output always re-verifies within tolerance") {
  std::mt19937 rng(23);
  std::normal_distribution<double> dist;
  int feasible_count = 0;
  for (int trial = 0; trial < 12; ++trial) {
    const int n = 2 + trial % 3;
    SdpProblem prob;
    prob.n = n;
    MatrixXd a(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) a(i, j) = dist(rng);
    prob.constraints.push_back(LyapunovConstraint{a, 0.5, 0.01});
    const SdpResult r = solve(prob);
    if (r.status != SdpStatus::Feasible) continue;
    ++feasible_count;
    const std::vector<double> margins = verify_solution(*r.P, prob);
    for (size_t i = 0; i < margins.size(); ++i) {
      CHECK(margins[i] <= 1e-7 * residual_scale(prob.constraints[i]));
    }
  }
  CHECK(feasible_count > 0);
}

TEST_CASE("malformed problems are rejected") {
  SdpProblem prob;
  prob.n = 2;
  CHECK_THROWS_AS(solve(prob), std::invalid_argument);  // no constraints
  prob.constraints.push_back(LyapunovConstraint{MatrixXd::Zero(3, 3), 0.0, 0.0});
  CHECK_THROWS_AS(solve(prob), std::invalid_argument);  // dimension mismatch
  CHECK_THROWS_AS(verify_solution(SymMatrix::Identity(3), duffing_convex_problem()),
                  std::invalid_argument);
}
