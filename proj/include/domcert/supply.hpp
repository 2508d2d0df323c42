#pragma once

#include <Eigen/Dense>

namespace domcert {

/// Quadratic supply rate s(dy, du) = dy'Q dy + 2 dy'L du + du'R du.
struct SupplyRate {
  int m_y = 0;
  int m_u = 0;
  Eigen::MatrixXd Q;  // m_y x m_y, symmetric
  Eigen::MatrixXd L;  // m_y x m_u
  Eigen::MatrixXd R;  // m_u x m_u, symmetric
};

SupplyRate zero_supply(int m_y, int m_u);

/// Q = 0, L = I, R = 0: s = 2 dy'du.
SupplyRate passivity_supply(int m);

/// Q = -I, L = 0, R = gamma^2 I. Requires gamma > 0.
SupplyRate gain_supply(int m_y, int m_u, double gamma);

/// (tau Q, tau L, tau R) for tau > 0. A certificate (P, eps) for s becomes
/// (tau P, tau eps) for the scaled supply.
SupplyRate scale_supply(const SupplyRate& s, double tau);

double supply_eval(const SupplyRate& s, const Eigen::VectorXd& dy, const Eigen::VectorXd& du);

/// Throws std::invalid_argument on dimension or symmetry violations.
void check_supply(const SupplyRate& s);

}  // namespace domcert
