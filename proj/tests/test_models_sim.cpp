#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "domcert/models.hpp"
#include "domcert/simulate.hpp"

using namespace domcert;
using Eigen::MatrixXd;
using Eigen::VectorXd;

namespace {

ModelDef linear_decay() {
  ModelDef m;
  m.name = "linear_decay";
  m.n = 1;
  m.vector_field = [](const VectorXd& x) { return VectorXd(-x); };
  m.jacobian = [](const VectorXd&) { return -MatrixXd::Identity(1, 1); };
  m.jac_template = -MatrixXd::Identity(1, 1);
  return m;
}

double tanh_fixed_point() {
  // root of tanh(2x) = x above zero, by bisection
  double lo = 0.5, hi = 1.5;
  for (int i = 0; i < 80; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (std::tanh(2.0 * mid) - mid > 0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

TEST_CASE("builtin duffing exposes the spring slope interval") {
  ModelParams p;
  p.values["dalpha_min"] = 1.0;
  p.values["dalpha_max"] = 5.0;
  const ModelDef m = builtin("duffing", p);
  REQUIRE(m.entry_bounds.size() == 1);
  CHECK(m.entry_bounds[0].row == 1);
  CHECK(m.entry_bounds[0].col == 0);
  CHECK(m.entry_bounds[0].lo == doctest::Approx(-5.0));
  CHECK(m.entry_bounds[0].hi == doctest::Approx(-1.0));
}

TEST_CASE("builtin duffing_dc has the electrical row") {
  const ModelDef m = builtin("duffing_dc", {});
  CHECK(m.n == 3);
  CHECK(m.jac_template(2, 0) == doctest::Approx(0.0));
  CHECK(m.jac_template(2, 1) == doctest::Approx(-10.0));  // -k_e / L
  CHECK(m.jac_template(2, 2) == doctest::Approx(-10.0));  // -R / L
}

TEST_CASE("builtin pendulum field") {
  ModelParams p;
  p.values["c"] = 5.0;
  p.values["u"] = 0.25;
  const ModelDef m = builtin("pendulum", p);
  VectorXd x(2);
  x << 0.3, -0.7;
  const VectorXd d = m.vector_field(x);
  CHECK(d[0] == doctest::Approx(-0.7));
  CHECK(d[1] == doctest::Approx(-std::sin(0.3) + 5.0 * 0.7 + 0.25));
}

TEST_CASE("unknown names and bad parameters are rejected") {
  CHECK_THROWS_AS(builtin("vanderpol", {}), std::invalid_argument);
  ModelParams bad;
  bad.values["c"] = -1.0;
  CHECK_THROWS_AS(builtin("duffing", bad), std::invalid_argument);
  ModelParams order;
  order.values["dalpha_min"] = 2.0;
  order.values["dalpha_max"] = 1.0;
  CHECK_THROWS_AS(builtin("duffing", order), std::invalid_argument);
}

TEST_CASE("jacobian_vertices enumerates the published corner matrices") {
  ModelParams p;
  p.values["dalpha_min"] = -2.0;
  p.values["dalpha_max"] = 5.0;
  const VertexFamily f = jacobian_vertices(builtin("duffing", p));
  REQUIRE(f.vertices.size() == 2);
  std::vector<double> corners{f.vertices[0](1, 0), f.vertices[1](1, 0)};
  std::sort(corners.begin(), corners.end());
  CHECK(corners[0] == doctest::Approx(-5.0));
  CHECK(corners[1] == doctest::Approx(2.0));
  for (const auto& a : f.vertices) {
    CHECK(a(0, 0) == 0.0);
    CHECK(a(0, 1) == 1.0);
    CHECK(a(1, 1) == doctest::Approx(-5.0));
  }
}

TEST_CASE("duffing_dc_pi vertices are the two 4x4 corner matrices") {
  const VertexFamily f = jacobian_vertices(builtin("duffing_dc_pi", {}));
  REQUIRE(f.vertices.size() == 2);
  CHECK(f.n == 4);
  for (const auto& a : f.vertices) {
    CHECK(a(2, 0) == doctest::Approx(-10.0));  // -k_P / L
    CHECK(a(2, 3) == doctest::Approx(50.0));   // k_I / L
    CHECK(a(3, 0) == doctest::Approx(-1.0));
  }
}

TEST_CASE("a linear model yields a single vertex") {
  ModelParams p;
  p.options["alpha"] = "linear";
  const VertexFamily f = jacobian_vertices(builtin("duffing", p));
  CHECK(f.vertices.size() == 1);
  CHECK(f.vertices[0](1, 0) == doctest::Approx(-1.0));
}

TEST_CASE("perturbed oscillator variants widen the vertex family") {
  ModelParams p;
  p.values["kappa_spring"] = 1.5;
  p.values["kappa_damp"] = 0.5;
  const ModelDef m = builtin("mass_spring_tanh_PI", p);
  const VertexFamily f = jacobian_vertices(m);
  CHECK(f.vertices.size() == 4);  // spring and damping entries both bounded
  double lo10 = 1e300, hi10 = -1e300, lo11 = 1e300, hi11 = -1e300;
  for (const auto& a : f.vertices) {
    lo10 = std::min(lo10, a(1, 0));
    hi10 = std::max(hi10, a(1, 0));
    lo11 = std::min(lo11, a(1, 1));
    hi11 = std::max(hi11, a(1, 1));
  }
  CHECK(lo10 == doctest::Approx(-2.5));  // -1 - kappa_spring
  CHECK(hi10 == doctest::Approx(2.5));   // -1 + 2 k_P + kappa_spring
  CHECK(lo11 == doctest::Approx(-5.5));
  CHECK(hi11 == doctest::Approx(-4.5));

  // the perturbed Jacobian stays consistent with its vector field
  std::mt19937 rng(97);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double h = 1e-5;
  for (int trial = 0; trial < 10; ++trial) {
    Eigen::VectorXd x(3);
    x << dist(rng), dist(rng), dist(rng);
    const MatrixXd j = m.jacobian(x);
    MatrixXd fd(3, 3);
    for (int c = 0; c < 3; ++c) {
      Eigen::VectorXd xp = x, xm = x;
      xp[c] += h;
      xm[c] -= h;
      fd.col(c) = (m.vector_field(xp) - m.vector_field(xm)) / (2.0 * h);
    }
    CHECK((j - fd).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + j.cwiseAbs().maxCoeff()));
  }
}

TEST_CASE("unbounded nonlinear entries are reported") {
  ModelParams p;
  p.options["alpha"] = "poly_double_well";
  const ModelDef m = builtin("duffing", p);
  CHECK_THROWS_AS(jacobian_vertices(m), std::invalid_argument);
  ModelParams bounded = p;
  bounded.values["dalpha_max"] = 11.0;
  CHECK(jacobian_vertices(builtin("duffing", bounded)).vertices.size() == 2);
}

TEST_CASE("the lifted pendulum is 1-dominant at rate 2") {
  const ModelDef m = builtin("pendulum", {});
  const VertexFamily f = jacobian_vertices(m);
  REQUIRE(f.vertices.size() == 2);
  const DominanceResult r = solve_dominance(f, 2.0, 0.01);
  REQUIRE(r.status == DominanceStatus::Feasible);
  CHECK(r.certificate->p == 1);
}

TEST_CASE("jacobians match central differences on every builtin") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  const double h = 1e-5;
  for (const std::string& name : builtin_names()) {
    const ModelDef m = builtin(name, {});
    for (int trial = 0; trial < 20; ++trial) {
      VectorXd x(m.n);
      for (int i = 0; i < m.n; ++i) x[i] = dist(rng);
      const MatrixXd j = m.jacobian(x);
      MatrixXd fd(m.n, m.n);
      for (int c = 0; c < m.n; ++c) {
        VectorXd xp = x, xm = x;
        xp[c] += h;
        xm[c] -= h;
        fd.col(c) = (m.vector_field(xp) - m.vector_field(xm)) / (2.0 * h);
      }
      CHECK((j - fd).cwiseAbs().maxCoeff() <= 1e-5 * (1.0 + j.cwiseAbs().maxCoeff()));
    }
  }
}

TEST_CASE("jacobian samples along the position axis") {
  const ModelDef m = builtin("duffing", {});
  const auto grid = axis_grid(2, 0, -5.0, 5.0, 50);
  const auto samples = jacobian_samples(m, grid);
  REQUIRE(samples.size() == 50);
  for (const auto& a : samples) {
    CHECK(a(1, 0) >= -1.5 - 1e-12);  // -dalpha of the double well
    CHECK(a(1, 0) <= 0.5 + 1e-12);
  }
  CHECK(jacobian_samples(m, {grid[0]}).size() == 1);
}

TEST_CASE("integrate matches the closed form for the linear model") {
  const Trajectory t = integrate(linear_decay(), VectorXd::Ones(1), 1e-3, 10.0);
  CHECK(t.endpoint()(0) == doctest::Approx(std::exp(-10.0)).epsilon(1e-6));
  CHECK(t.samples() == 10001);
  CHECK(t.time(1) == doctest::Approx(1e-3));
}

TEST_CASE("halving the step barely moves the endpoint") {
  const ModelDef m = builtin("duffing_dc", {});
  VectorXd x0(3);
  x0 << 0.05, 0, 0;
  const VectorXd a = integrate(m, x0, 2e-3, 40.0).endpoint();
  const VectorXd b = integrate(m, x0, 1e-3, 40.0).endpoint();
  CHECK((a - b).norm() <= 1e-4 * (1.0 + b.norm()));
}

TEST_CASE("divergence reports a blow-up time") {
  ModelDef m;
  m.name = "quadratic";
  m.n = 1;
  m.vector_field = [](const VectorXd& x) { return VectorXd(x.array().square().matrix()); };
  m.jacobian = [](const VectorXd& x) { return MatrixXd(2.0 * x.asDiagonal()); };
  m.jac_template = MatrixXd::Zero(1, 1);
  try {
    integrate(m, 5.0 * VectorXd::Ones(1), 1e-3, 10.0);
    FAIL("expected blow-up");
  } catch (const BlowUpError& e) {
    CHECK(e.time > 0.0);
    CHECK(e.time < 1.0);  // 1/x0 = 0.2
  }
}

TEST_CASE("prolonged integration matches the linear flow and finite differences") {
  SUBCASE("linear model: dx(t) = exp(-t) dx0") {
    const ProlongedTrajectory pt =
        integrate_prolonged(linear_decay(), VectorXd::Zero(1), VectorXd::Ones(1), 1e-3, 5.0);
    CHECK(pt.variational.endpoint()(0) == doctest::Approx(std::exp(-5.0)).epsilon(1e-6));
  }
  SUBCASE("zero variation stays zero") {
    const ModelDef m = builtin("duffing", {});
    VectorXd x0(2);
    x0 << 0.3, -0.2;
    const ProlongedTrajectory pt = integrate_prolonged(m, x0, VectorXd::Zero(2), 1e-3, 2.0);
    CHECK(pt.variational.endpoint().norm() == 0.0);
  }
  SUBCASE("first-order match with a perturbed pair") {
    const ModelDef m = builtin("duffing", {});
    std::mt19937 rng(59);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    VectorXd x0(2), dx0(2);
    x0 << dist(rng), dist(rng);
    dx0 << dist(rng), dist(rng);
    const double T = 3.0;
    const ProlongedTrajectory pt = integrate_prolonged(m, x0, dx0, 1e-3, T);
    double prev_err = -1.0;
    for (double h : {1e-4, 1e-5}) {
      const VectorXd xa = integrate(m, x0 + h * dx0, 1e-3, T).endpoint();
      const VectorXd xb = integrate(m, x0, 1e-3, T).endpoint();
      const double err = ((xa - xb) / h - pt.variational.endpoint()).norm();
      if (prev_err >= 0.0) CHECK(err <= 0.2 * prev_err);  // O(h) decay
      prev_err = err;
    }
  }
}

TEST_CASE("classification of the saturated proportional loop") {
  const ModelDef m = builtin("mass_spring_tanh_P", {});
  VectorXd x0(2);
  x0 << 1, 0;
  const Trajectory t = integrate(m, x0, 1e-3, 100.0);
  const AttractorClass c = classify_attractor(t);
  REQUIRE(c.kind == AttractorClass::Kind::FixedPoint);
  CHECK(std::abs(c.fixed_point(0)) == doctest::Approx(tanh_fixed_point()).epsilon(1e-3));
  CHECK(std::abs(c.fixed_point(1)) < 1e-6);
}

TEST_CASE("classification of the saturated PI oscillator") {
  const ModelDef m = builtin("mass_spring_tanh_PI", {});
  VectorXd x0(3);
  x0 << 1, 0, 0;
  const Trajectory t = integrate(m, x0, 1e-3, 100.0);
  const AttractorClass c = classify_attractor(t);
  REQUIRE(c.kind == AttractorClass::Kind::PeriodicOrbit);
  CHECK(c.period > 0.0);
  CHECK(c.amplitude > 0.1);

  SUBCASE("classification is stable under dt halving and tail shift") {
    const Trajectory t2 = integrate(m, x0, 5e-4, 100.0);
    CHECK(classify_attractor(t2).kind == AttractorClass::Kind::PeriodicOrbit);
    CHECK(classify_attractor(t, 0.4).kind == AttractorClass::Kind::PeriodicOrbit);
    CHECK(classify_attractor(t2, 0.4).period ==
          doctest::Approx(c.period).epsilon(0.05));
  }
}

TEST_CASE("incremental decay holds for the certified double well") {
  const ModelDef m = builtin("duffing", {});
  const DominanceResult cert = solve_dominance(jacobian_vertices(m), 2.0, 0.01);
  REQUIRE(cert.status == DominanceStatus::Feasible);
  std::mt19937 rng(61);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd x0(2), y0(2);
    x0 << dist(rng), dist(rng);
    y0 << dist(rng), dist(rng);
    const DecayCheck d =
        check_incremental_decay(m, cert.certificate->P, 2.0, x0, y0, 1e-3, 15.0);
    CHECK(d.ok);
  }
  SUBCASE("identical starts are trivially nonincreasing") {
    VectorXd x0(2);
    x0 << 0.7, -0.4;
    CHECK(check_incremental_decay(m, cert.certificate->P, 2.0, x0, x0, 1e-3, 5.0).ok);
  }
  SUBCASE("the identity is not a valid storage here") {
    bool violated = false;
    std::mt19937 rng2(67);
    std::uniform_real_distribution<double> d2(-2.0, 2.0);
    for (int trial = 0; trial < 40 && !violated; ++trial) {
      VectorXd x0(2), y0(2);
      x0 << d2(rng2), d2(rng2);
      y0 << d2(rng2), d2(rng2);
      violated = !check_incremental_decay(m, SymMatrix::Identity(2), 2.0, x0, y0, 1e-3, 10.0).ok;
    }
    CHECK(violated);
  }
}

TEST_CASE("the negative cone is forward invariant under the prolonged flow") {
  const ModelDef m = builtin("duffing", {});
  const DominanceResult cert = solve_dominance(jacobian_vertices(m), 2.0, 0.01);
  REQUIRE(cert.status == DominanceStatus::Feasible);
  const SymEigenResult es = sym_eigen(cert.certificate->P);
  REQUIRE(es.values[0] < 0.0);
  std::mt19937 rng(71);
  std::uniform_real_distribution<double> dist(-2.0, 2.0);
  for (int trial = 0; trial < 5; ++trial) {
    VectorXd x0(2);
    x0 << dist(rng), dist(rng);
    const ConeCheck c =
        cone_invariance_check(m, cert.certificate->P, x0, es.vectors.col(0), 1e-3, 10.0);
    CHECK(c.ok);
  }
  SUBCASE("starting outside the cone is a precondition error") {
    CHECK_THROWS_AS(cone_invariance_check(m, cert.certificate->P, VectorXd::Zero(2),
                                          es.vectors.col(1), 1e-3, 1.0),
                    std::invalid_argument);
  }
}

TEST_CASE("cone invariance of a 1-dominant linear flow matches the exponential") {
  MatrixXd a(2, 2);
  a << 1, 0, 0, -4;  // splits 1/1 at rate 2
  const DominanceResult cert = check_dominance_lti(a, 1, 2.0, 0.01);
  REQUIRE(cert.status == DominanceStatus::Feasible);
  ModelDef lin;
  lin.name = "saddle";
  lin.n = 2;
  lin.vector_field = [a](const VectorXd& x) { return VectorXd(a * x); };
  lin.jacobian = [a](const VectorXd&) { return a; };
  lin.jac_template = a;
  const SymEigenResult es = sym_eigen(cert.certificate->P);
  const ConeCheck c =
      cone_invariance_check(lin, cert.certificate->P, VectorXd::Zero(2), es.vectors.col(0),
                            1e-3, 6.0);
  CHECK(c.ok);
  // exp(At) stretches the dominant axis, so the cone ratio stays negative
  CHECK(c.worst_ratio < 0.0);
}

TEST_CASE("50-sample scans agree with the shipped analyses") {
  struct Case {
    const char* name;
    double lambda;
    int p;
  };
  for (const Case& close : {Case{"duffing", 2.0, 1}, Case{"duffing_dc", 2.0, 1},
                            Case{"duffing_dc_pi", 2.0, 2}, Case{"mass_spring_tanh_PI", 2.0, 2}}) {
    const ModelDef m = builtin(close.name, {});
    const auto samples = jacobian_samples(m, axis_grid(m.n, 0, -5.0, 5.0, 50));
    const SplittingReport r = spectral_scan(samples, {close.lambda});
    REQUIRE(r.per_lambda[0].p);
    CHECK(*r.per_lambda[0].p == close.p);
  }
}

TEST_CASE("trajectory CSV format") {
  const Trajectory t = integrate(linear_decay(), VectorXd::Ones(1), 0.5, 1.0);
  const std::string csv = trajectory_csv(t);
  std::istringstream is(csv);
  std::string line;
  std::getline(is, line);
  CHECK(line == "t,x1");
  std::getline(is, line);
  CHECK(line.substr(0, 2) == "0,");
  int rows = 1;
  while (std::getline(is, line)) ++rows;
  CHECK(rows == t.samples());
  CHECK(csv.find("0.5,0.60677") != std::string::npos);  // one RK4 step of dt = 0.5
}

TEST_CASE("classifier preconditions") {
  const Trajectory t = integrate(linear_decay(), VectorXd::Ones(1), 0.1, 2.0);
  CHECK_THROWS_AS(classify_attractor(t), std::invalid_argument);  // tail < 100 samples
}

TEST_CASE("an unfinished ringdown is classified unknown") {
  // the k_P = 0 loop has a lightly damped pair (rate ~0.1); at T = 100 the
  // tail still rings above tolerance but decays, so neither label applies
  ModelParams params;
  params.values["k_P"] = 0.0;
  VectorXd x0(3);
  x0 << 1, 0, 0;
  const Trajectory t = integrate(builtin("mass_spring_tanh_PI", params), x0, 1e-3, 100.0);
  const AttractorClass c = classify_attractor(t);
  CHECK(c.kind == AttractorClass::Kind::Unknown);
  CHECK(!c.diagnostics.empty());
}
