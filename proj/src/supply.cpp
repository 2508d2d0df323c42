#include "domcert/supply.hpp"

#include <stdexcept>

namespace domcert {

void check_supply(const SupplyRate& s) {
  if (s.m_y < 1 || s.m_u < 1) {
    throw std::invalid_argument("SupplyRate: dimensions must be positive");
  }
  if (s.Q.rows() != s.m_y || s.Q.cols() != s.m_y || s.L.rows() != s.m_y ||
      s.L.cols() != s.m_u || s.R.rows() != s.m_u || s.R.cols() != s.m_u) {
    throw std::invalid_argument("SupplyRate: inconsistent block dimensions");
  }
  const double scale = 1.0 + s.Q.cwiseAbs().maxCoeff() + s.R.cwiseAbs().maxCoeff();
  if ((s.Q - s.Q.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale ||
      (s.R - s.R.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale) {
    throw std::invalid_argument("SupplyRate: Q and R must be symmetric");
  }
}

SupplyRate zero_supply(int m_y, int m_u) {
  SupplyRate s{m_y, m_u, Eigen::MatrixXd::Zero(m_y, m_y), Eigen::MatrixXd::Zero(m_y, m_u),
               Eigen::MatrixXd::Zero(m_u, m_u)};
  check_supply(s);
  return s;
}

SupplyRate passivity_supply(int m) {
  SupplyRate s{m, m, Eigen::MatrixXd::Zero(m, m), Eigen::MatrixXd::Identity(m, m),
               Eigen::MatrixXd::Zero(m, m)};
  check_supply(s);
  return s;
}

SupplyRate gain_supply(int m_y, int m_u, double gamma) {
  if (gamma <= 0.0) {
    throw std::invalid_argument("gain_supply: gamma must be positive");
  }
  SupplyRate s{m_y, m_u, -Eigen::MatrixXd::Identity(m_y, m_y), Eigen::MatrixXd::Zero(m_y, m_u),
               gamma * gamma * Eigen::MatrixXd::Identity(m_u, m_u)};
  check_supply(s);
  return s;
}

SupplyRate scale_supply(const SupplyRate& s, double tau) {
  if (tau <= 0.0) {
    throw std::invalid_argument("scale_supply: tau must be positive");
  }
  check_supply(s);
  return {s.m_y, s.m_u, tau * s.Q, tau * s.L, tau * s.R};
}

double supply_eval(const SupplyRate& s, const Eigen::VectorXd& dy, const Eigen::VectorXd& du) {
  check_supply(s);
  if (dy.size() != s.m_y || du.size() != s.m_u) {
    throw std::invalid_argument("supply_eval: vector dimensions do not match supply");
  }
  return dy.dot(s.Q * dy) + 2.0 * dy.dot(s.L * du) + du.dot(s.R * du);
}

}  // namespace domcert
