#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

#include "domcert/matrix_core.hpp"
#include "domcert/models.hpp"

namespace domcert {

/// Uniformly sampled orbit; row k of states is x(k*dt).
struct Trajectory {
  double dt = 0.0;
  Eigen::MatrixXd states;  // (samples) x n

  int samples() const { return static_cast<int>(states.rows()); }
  int dim() const { return static_cast<int>(states.cols()); }
  double time(int k) const { return k * dt; }
  Eigen::VectorXd state(int k) const { return states.row(k).transpose(); }
  Eigen::VectorXd endpoint() const { return states.row(states.rows() - 1).transpose(); }
};

struct BlowUpError : std::runtime_error {
  BlowUpError(const std::string& what, double time_) : std::runtime_error(what), time(time_) {}
  double time;
};

/// Classical fixed-step RK4. Throws BlowUpError with the divergence time when
/// the state leaves the finite range.
Trajectory integrate(const ModelDef& model, const Eigen::VectorXd& x0, double dt, double T);

struct ProlongedTrajectory {
  Trajectory base;
  Trajectory variational;
};

/// Joint integration of (x, dx) with dx' = Jf(x) dx.
ProlongedTrajectory integrate_prolonged(const ModelDef& model, const Eigen::VectorXd& x0,
                                        const Eigen::VectorXd& dx0, double dt, double T);

struct AttractorClass {
  enum class Kind { FixedPoint, PeriodicOrbit, Unknown };
  Kind kind = Kind::Unknown;
  Eigen::VectorXd fixed_point;  // set for FixedPoint
  double period = 0.0;          // set for PeriodicOrbit
  double amplitude = 0.0;       // tail oscillation amplitude
  std::string diagnostics;
};

const char* to_string(AttractorClass::Kind k);

/// Tail-based classification: FixedPoint when the tail stays within tol of the
/// endpoint; PeriodicOrbit when the tail recurrence has near-zero minima at
/// near-uniform spacing with amplitude above 10*tol and no decay trend;
/// Unknown otherwise. tol < 0 selects 1e-4 * (1 + |x(T)|).
AttractorClass classify_attractor(const Trajectory& traj, double tail_fraction = 0.5,
                                  double tol = -1.0);

struct DecayCheck {
  bool ok = false;
  double worst_violation = 0.0;
  double worst_time = 0.0;
};

/// Monotonicity of t -> exp(2*lambda*t) * (x-y)' P (x-y) along an integrated
/// pair of orbits, up to integration tolerance.
DecayCheck check_incremental_decay(const ModelDef& model, const SymMatrix& P, double lambda,
                                   const Eigen::VectorXd& x0, const Eigen::VectorXd& y0,
                                   double dt, double T);

struct ConeCheck {
  bool ok = false;
  double worst_ratio = 0.0;  // max over time of V(dx)/|dx|^2
  double worst_time = 0.0;
};

/// Forward invariance of the cone {V <= 0} under the prolonged flow, with the
/// variational state renormalized each step to control exponential growth.
/// Requires V(dx0) <= 0.
ConeCheck cone_invariance_check(const ModelDef& model, const SymMatrix& P,
                                const Eigen::VectorXd& x0, const Eigen::VectorXd& dx0,
                                double dt, double T, double tol = 1e-6);

/// CSV export: header t,x1,...,xn; 12 significant digits.
std::string trajectory_csv(const Trajectory& traj);

}  // namespace domcert
