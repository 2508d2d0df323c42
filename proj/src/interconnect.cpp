#include "domcert/interconnect.hpp"

#include <cmath>
#include <sstream>

namespace domcert {

namespace {

Eigen::MatrixXd block_diag(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.rows() + b.rows(), a.cols() + b.cols());
  m.topLeftCorner(a.rows(), a.cols()) = a;
  m.bottomRightCorner(b.rows(), b.cols()) = b;
  return m;
}

}  // namespace

void check_interconnection(const InterconnectionSpec& spec) {
  if (spec.supplies.empty()) throw std::invalid_argument("InterconnectionSpec: no supplies");
  int my = 0;
  int mu = 0;
  for (const auto& s : spec.supplies) {
    check_supply(s);
    my += s.m_y;
    mu += s.m_u;
  }
  if (spec.H.rows() != mu || spec.H.cols() != my) {
    throw std::invalid_argument("InterconnectionSpec: H must be (total m_u) x (total m_y)");
  }
  if (!spec.H.allFinite()) {
    throw std::invalid_argument("InterconnectionSpec: H has non-finite entries");
  }
}

ComposedSupply compose_supplies(const InterconnectionSpec& spec) {
  check_interconnection(spec);
  const std::vector<SupplyRate>& supplies = spec.supplies;
  const Eigen::MatrixXd& H = spec.H;
  int my = 0;
  int mu = 0;
  for (const auto& s : supplies) {
    my += s.m_y;
    mu += s.m_u;
  }
  Eigen::MatrixXd qb = Eigen::MatrixXd::Zero(my, my);
  Eigen::MatrixXd lb = Eigen::MatrixXd::Zero(my, mu);
  Eigen::MatrixXd rb = Eigen::MatrixXd::Zero(mu, mu);
  int oy = 0;
  int ou = 0;
  for (const auto& s : supplies) {
    qb.block(oy, oy, s.m_y, s.m_y) = s.Q;
    lb.block(oy, ou, s.m_y, s.m_u) = s.L;
    rb.block(ou, ou, s.m_u, s.m_u) = s.R;
    oy += s.m_y;
    ou += s.m_u;
  }
  ComposedSupply out;
  out.supply.m_y = my;
  out.supply.m_u = mu;
  out.supply.Q = qb + lb * H + H.transpose() * lb.transpose() + H.transpose() * rb * H;
  out.supply.Q = 0.5 * (out.supply.Q + out.supply.Q.transpose()).eval();
  out.supply.L = lb + H.transpose() * rb;
  out.supply.R = rb;
  out.q_margin = max_eig_sym(SymMatrix(out.supply.Q));
  out.q_negative_semidefinite =
      out.q_margin <= 1e-9 * (1.0 + out.supply.Q.cwiseAbs().maxCoeff());
  return out;
}

ComposedSupply compose_supplies(const std::vector<SupplyRate>& supplies,
                                const Eigen::MatrixXd& H) {
  return compose_supplies(InterconnectionSpec{supplies, H});
}

ComposedSupply feedback_compose(const SupplyRate& s1, const SupplyRate& s2) {
  check_supply(s1);
  check_supply(s2);
  if (s1.m_u != s2.m_y || s2.m_u != s1.m_y) {
    throw std::invalid_argument("feedback_compose: incompatible supply dimensions");
  }
  Eigen::MatrixXd H = Eigen::MatrixXd::Zero(s1.m_u + s2.m_u, s1.m_y + s2.m_y);
  H.topRightCorner(s1.m_u, s2.m_y) = -Eigen::MatrixXd::Identity(s1.m_u, s2.m_y);
  H.bottomLeftCorner(s2.m_u, s1.m_y) = Eigen::MatrixXd::Identity(s2.m_u, s1.m_y);
  return compose_supplies({s1, s2}, H);
}

SmallGainResult small_gain_check(double gamma1, double gamma2) {
  if (!(gamma1 > 0) || !(gamma2 > 0)) {
    throw std::invalid_argument("small_gain_check: gains must be positive");
  }
  SmallGainResult result;
  if (gamma1 * gamma2 > 1.0 + 1e-12) return result;
  // tau must lie in [gamma1^2, 1/gamma2^2]; take the log midpoint.
  const double tau = gamma1 / gamma2;
  const ComposedSupply composed =
      feedback_compose(gain_supply(1, 1, gamma1), scale_supply(gain_supply(1, 1, gamma2), tau));
  if (!composed.q_negative_semidefinite) return result;
  result.satisfiable = true;
  result.tau = tau;
  return result;
}

ClosedLoopFamily build_closed_loop_family(const OpenVertexFamily& f1,
                                          const OpenVertexFamily& f2,
                                          const Eigen::MatrixXd& H) {
  check_open_family(f1);
  check_open_family(f2);
  const int mu = f1.m_u + f2.m_u;
  const int my = f1.m_y + f2.m_y;
  if (H.rows() != mu || H.cols() != my) {
    throw std::invalid_argument("build_closed_loop_family: H dimension mismatch");
  }
  ClosedLoopFamily out;
  out.family.n = f1.n + f2.n;
  for (const auto& v1 : f1.vertices) {
    for (const auto& v2 : f2.vertices) {
      const Eigen::MatrixXd bbar = block_diag(v1.B, v2.B);
      const Eigen::MatrixXd cbar = block_diag(v1.C, v2.C);
      const Eigen::MatrixXd dbar = block_diag(v1.D, v2.D);
      const Eigen::MatrixXd hd = H * dbar;
      if ((hd * hd).cwiseAbs().maxCoeff() > 1e-12 * (1.0 + hd.cwiseAbs().maxCoeff())) {
        out.status = CloseStatus::AlgebraicLoop;
        out.detail = "both feedthrough blocks act on a feedback path";
        out.family.vertices.clear();
        return out;
      }
      // (I - H*Dbar)^{-1} = I + H*Dbar exactly, by nilpotency.
      const Eigen::MatrixXd gain =
          (Eigen::MatrixXd::Identity(mu, mu) + hd) * H * cbar;
      out.family.vertices.push_back(block_diag(v1.A, v2.A) + bbar * gain);
    }
  }
  return out;
}

AggregateResult aggregate_certificates(const DissipativityCertificate& c1,
                                       const DissipativityCertificate& c2,
                                       const Eigen::MatrixXd& H,
                                       const VertexFamily& closed_family) {
  check_family(closed_family);
  AggregateResult result;
  if (closed_family.n != c1.P.dim() + c2.P.dim()) {
    throw std::invalid_argument("aggregate_certificates: closed family dimension mismatch");
  }
  if (std::abs(c1.lambda - c2.lambda) > 1e-9 * (1.0 + std::abs(c1.lambda))) {
    result.detail = "certificates have different rates";
    return result;
  }
  const ComposedSupply composed = compose_supplies({c1.supply, c2.supply}, H);
  if (!composed.q_negative_semidefinite) {
    std::ostringstream os;
    os << "composed Q is not negative semidefinite (max eig " << composed.q_margin << ")";
    result.detail = os.str();
    return result;
  }
  const SymMatrix p_agg(block_diag(c1.P.mat(), c2.P.mat()));
  const int p = c1.p + c2.p;
  const Inertia inertia = inertia_of(p_agg);
  if (inertia.neg != p || inertia.zero != 0) {
    result.detail = "aggregated storage does not have inertia p1 + p2";
    return result;
  }
  const double lambda = c1.lambda;
  const double epsilon = std::min(c1.epsilon, c2.epsilon);
  SdpProblem prob;
  prob.n = closed_family.n;
  for (const auto& a : closed_family.vertices) {
    prob.constraints.push_back(LyapunovConstraint{a, lambda, epsilon});
  }
  const std::vector<double> margins = verify_solution(p_agg, prob);
  double worst = -std::numeric_limits<double>::infinity();
  double worst_scale = 1.0;
  for (size_t i = 0; i < margins.size(); ++i) {
    if (margins[i] > worst) {
      worst = margins[i];
      worst_scale = residual_scale(prob.constraints[i]);
    }
  }
  if (worst > 1e-6 * worst_scale) {
    std::ostringstream os;
    os << "aggregated storage fails the closed-loop vertex LMIs (worst margin " << worst << ")";
    result.detail = os.str();
    return result;
  }
  result.status = AggregateStatus::Ok;
  result.certificate = DominanceCertificate{p_agg, p, lambda, epsilon, worst};
  return result;
}

}  // namespace domcert
