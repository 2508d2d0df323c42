#pragma once

#include <functional>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "domcert/dissipativity.hpp"
#include "domcert/dominance.hpp"

namespace domcert {

/// Interval bound on one state-dependent Jacobian entry.
struct EntryBound {
  int row = 0;
  int col = 0;
  double lo = 0.0;
  double hi = 0.0;
};

struct ModelParams {
  std::map<std::string, double> values;
  std::map<std::string, std::string> options;

  double get(const std::string& key, double fallback) const;
  std::string get(const std::string& key, const std::string& fallback) const;
};

/// A concrete dynamical model: vector field, Jacobian, interval bounds on the
/// nonlinear Jacobian entries (jac_template holds the constant entries), and
/// the (B, C, D) blocks when the model is open.
struct ModelDef {
  std::string name;
  int n = 0;
  ModelParams params;
  std::function<Eigen::VectorXd(const Eigen::VectorXd&)> vector_field;
  std::function<Eigen::MatrixXd(const Eigen::VectorXd&)> jacobian;
  Eigen::MatrixXd jac_template;
  std::vector<EntryBound> entry_bounds;
  Eigen::MatrixXd B;  // n x m_u; empty when closed
  Eigen::MatrixXd C;  // m_y x n
  Eigen::MatrixXd D;  // m_y x m_u

  bool is_open() const { return B.size() > 0; }
};

/// Built-in models:
///   duffing              2-state mass-spring-damper, spring alpha selectable
///                        (alpha = linear | double_well | poly_double_well),
///                        params c, u, dalpha_min/max; open via (B, C=-x_p).
///   duffing_dc           3-state: duffing driven by a DC motor
///                        (params R, k_f, k_e, L, V).
///   duffing_dc_pi        4-state: voltage PI loop (params k_P, k_I, r).
///   mass_spring_tanh_P   2-state: linear spring, u = k_P*tanh(2 x_p) + v.
///   mass_spring_tanh_PI  3-state: the nominal saturated-PI oscillator
///                        (params k_P, k_I, kappa_spring, kappa_damp,
///                        option output = x_p | x_v).
///   pendulum             2-state, sin spring, lifted to R^2 (params c, u).
ModelDef builtin(const std::string& name, const ModelParams& params = {});

std::vector<std::string> builtin_names();

/// Corner enumeration of the bounded nonlinear entries (2^k vertices).
VertexFamily jacobian_vertices(const ModelDef& model);

/// The A-vertices paired with the model's constant (B, C, D).
OpenVertexFamily open_vertex_family(const ModelDef& model);

std::vector<Eigen::MatrixXd> jacobian_samples(const ModelDef& model,
                                              const std::vector<Eigen::VectorXd>& states);

/// Uniform 1-d sweep along one state axis (other coordinates zero); the
/// standard sampling grid for the spectral scans.
std::vector<Eigen::VectorXd> axis_grid(int n, int axis, double lo, double hi, int count);

}  // namespace domcert
