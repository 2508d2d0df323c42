#include "domcert/simulate.hpp"

#include <cmath>
#include <iomanip>
#include <sstream>
#include <vector>

namespace domcert {

namespace {

constexpr double kBlowUpNorm = 1e8;

using Field = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

// Fixed-step RK4 over [0, T]; steps = round(T/dt).
Trajectory rk4(const Field& f, const Eigen::VectorXd& x0, double dt, double T) {
  if (!(dt > 0) || T < dt) throw std::invalid_argument("integrate: need dt > 0 and T >= dt");
  const int steps = static_cast<int>(std::llround(T / dt));
  Trajectory traj;
  traj.dt = dt;
  traj.states.resize(steps + 1, x0.size());
  Eigen::VectorXd x = x0;
  traj.states.row(0) = x.transpose();
  for (int k = 0; k < steps; ++k) {
    const Eigen::VectorXd k1 = f(x);
    const Eigen::VectorXd k2 = f(x + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = f(x + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = f(x + dt * k3);
    x += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!x.allFinite() || x.norm() > kBlowUpNorm) {
      std::ostringstream os;
      os << "trajectory blew up at t = " << (k + 1) * dt;
      throw BlowUpError(os.str(), (k + 1) * dt);
    }
    traj.states.row(k + 1) = x.transpose();
  }
  return traj;
}

}  // namespace

Trajectory integrate(const ModelDef& model, const Eigen::VectorXd& x0, double dt, double T) {
  if (x0.size() != model.n) throw std::invalid_argument("integrate: x0 dimension mismatch");
  return rk4(model.vector_field, x0, dt, T);
}

ProlongedTrajectory integrate_prolonged(const ModelDef& model, const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& dx0, double dt, double T) {
  if (x0.size() != model.n || dx0.size() != model.n) {
    throw std::invalid_argument("integrate_prolonged: state dimension mismatch");
  }
  const int n = model.n;
  const Field aug = [&model, n](const Eigen::VectorXd& z) {
    Eigen::VectorXd d(2 * n);
    d.head(n) = model.vector_field(z.head(n));
    d.tail(n) = model.jacobian(z.head(n)) * z.tail(n);
    return d;
  };
  Eigen::VectorXd z0(2 * n);
  z0 << x0, dx0;
  const Trajectory joint = rk4(aug, z0, dt, T);
  ProlongedTrajectory out;
  out.base.dt = out.variational.dt = dt;
  out.base.states = joint.states.leftCols(n);
  out.variational.states = joint.states.rightCols(n);
  return out;
}

const char* to_string(AttractorClass::Kind k) {
  switch (k) {
    case AttractorClass::Kind::FixedPoint: return "fixed_point";
    case AttractorClass::Kind::PeriodicOrbit: return "periodic_orbit";
    case AttractorClass::Kind::Unknown: return "unknown";
  }
  return "unknown";
}

AttractorClass classify_attractor(const Trajectory& traj, double tail_fraction, double tol) {
  if (tail_fraction <= 0 || tail_fraction > 1) {
    throw std::invalid_argument("classify_attractor: tail_fraction must be in (0, 1]");
  }
  const int last = traj.samples() - 1;
  const int tail_start = static_cast<int>(std::floor((1.0 - tail_fraction) * last));
  if (last - tail_start + 1 < 100) {
    throw std::invalid_argument("classify_attractor: tail must contain at least 100 samples");
  }
  const Eigen::VectorXd ref = traj.endpoint();
  if (tol < 0) tol = 1e-4 * (1.0 + ref.norm());

  const int m = last - tail_start + 1;
  Eigen::VectorXd dist(m);
  for (int i = 0; i < m; ++i) {
    dist[i] = (traj.state(tail_start + i) - ref).norm();
  }
  AttractorClass out;
  out.amplitude = dist.maxCoeff();

  if (out.amplitude <= tol) {
    out.kind = AttractorClass::Kind::FixedPoint;
    out.fixed_point = ref;
    return out;
  }
  if (out.amplitude <= 10.0 * tol) {
    out.diagnostics = "tail displacement between tol and 10*tol (slow transient)";
    return out;
  }

  // Decay guard: a ringdown has shrinking oscillation, a limit cycle does not.
  const double head_max = dist.head(m / 2).maxCoeff();
  const double tail_max = dist.tail(m - m / 2).maxCoeff();
  if (tail_max < 0.75 * head_max || head_max < 0.75 * tail_max) {
    out.diagnostics = "tail oscillation is not steady";
    return out;
  }

  // Recurrence minima: interior local minima of the distance to x(T) that come
  // close to zero. On a periodic orbit they occur once per period.
  const double recur_tol = 0.1 * out.amplitude;
  std::vector<int> minima;
  for (int i = 1; i + 1 < m; ++i) {
    if (dist[i] <= recur_tol && dist[i] < dist[i - 1] && dist[i] <= dist[i + 1]) {
      if (minima.empty() || i - minima.back() > 10) minima.push_back(i);
    }
  }
  if (minima.size() < 2) {
    out.diagnostics = "too few near-zero recurrences in the tail";
    return out;
  }
  double mean_gap = 0.0;
  for (size_t i = 1; i < minima.size(); ++i) mean_gap += minima[i] - minima[i - 1];
  mean_gap /= static_cast<double>(minima.size() - 1);
  for (size_t i = 1; i < minima.size(); ++i) {
    if (std::abs(minima[i] - minima[i - 1] - mean_gap) > 0.25 * mean_gap) {
      out.diagnostics = "recurrences are not uniformly spaced";
      return out;
    }
  }
  out.kind = AttractorClass::Kind::PeriodicOrbit;
  out.period = mean_gap * traj.dt;
  return out;
}

DecayCheck check_incremental_decay(const ModelDef& model, const SymMatrix& P, double lambda,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& y0,
                                   double dt, double T) {
  if (P.dim() != model.n) {
    throw std::invalid_argument("check_incremental_decay: P dimension mismatch");
  }
  const Trajectory tx = integrate(model, x0, dt, T);
  const Trajectory ty = integrate(model, y0, dt, T);
  // Monotonicity of exp(2 lambda t) V telescopes into the per-step condition
  // exp(2 lambda dt) V(k+1) <= V(k), which avoids the large exponentials.
  const double growth = std::exp(2.0 * lambda * dt);
  DecayCheck out;
  out.worst_violation = -std::numeric_limits<double>::infinity();
  for (int k = 0; k + 1 < tx.samples(); ++k) {
    const Eigen::VectorXd e0 = tx.state(k) - ty.state(k);
    const Eigen::VectorXd e1 = tx.state(k + 1) - ty.state(k + 1);
    const double v0 = e0.dot(P.mat() * e0);
    const double v1 = e1.dot(P.mat() * e1);
    const double violation = (growth * v1 - v0) / (1.0 + std::abs(v0));
    if (violation > out.worst_violation) {
      out.worst_violation = violation;
      out.worst_time = tx.time(k + 1);
    }
  }
  out.ok = out.worst_violation <= 1e-6;
  return out;
}

ConeCheck cone_invariance_check(const ModelDef& model, const SymMatrix& P,
                                const Eigen::VectorXd& x0, const Eigen::VectorXd& dx0,
                                double dt, double T, double tol) {
  if (P.dim() != model.n) {
    throw std::invalid_argument("cone_invariance_check: P dimension mismatch");
  }
  const double v0 = dx0.dot(P.mat() * dx0);
  if (v0 > tol * dx0.squaredNorm()) {
    throw std::invalid_argument("cone_invariance_check: dx0 is not in the cone V <= 0");
  }
  const int n = model.n;
  const Field aug = [&model, n](const Eigen::VectorXd& z) {
    Eigen::VectorXd d(2 * n);
    d.head(n) = model.vector_field(z.head(n));
    d.tail(n) = model.jacobian(z.head(n)) * z.tail(n);
    return d;
  };
  const int steps = static_cast<int>(std::llround(T / dt));
  if (!(dt > 0) || steps < 1) {
    throw std::invalid_argument("cone_invariance_check: need dt > 0 and T >= dt");
  }
  Eigen::VectorXd x = x0;
  Eigen::VectorXd dx = dx0;
  if (dx.norm() > 0) dx /= dx.norm();
  ConeCheck out;
  out.worst_ratio = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < steps; ++k) {
    Eigen::VectorXd z(2 * n);
    z << x, dx;
    const Eigen::VectorXd k1 = aug(z);
    const Eigen::VectorXd k2 = aug(z + 0.5 * dt * k1);
    const Eigen::VectorXd k3 = aug(z + 0.5 * dt * k2);
    const Eigen::VectorXd k4 = aug(z + dt * k3);
    z += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    x = z.head(n);
    dx = z.tail(n);
    if (!x.allFinite() || x.norm() > kBlowUpNorm) {
      throw BlowUpError("cone_invariance_check: base trajectory blew up", (k + 1) * dt);
    }
    const double norm = dx.norm();
    if (norm > 0) dx /= norm;  // quadratic homogeneity keeps the sign of V
    const double ratio = dx.dot(P.mat() * dx);
    if (ratio > out.worst_ratio) {
      out.worst_ratio = ratio;
      out.worst_time = (k + 1) * dt;
    }
  }
  out.ok = out.worst_ratio <= tol;
  return out;
}

std::string trajectory_csv(const Trajectory& traj) {
  std::ostringstream os;
  os << "t";
  for (int j = 0; j < traj.dim(); ++j) os << ",x" << j + 1;
  os << "\n";
  os << std::setprecision(12);
  for (int k = 0; k < traj.samples(); ++k) {
    os << traj.time(k);
    for (int j = 0; j < traj.dim(); ++j) os << "," << traj.states(k, j);
    os << "\n";
  }
  return os.str();
}

}  // namespace domcert
