#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "domcert/dissipativity.hpp"
#include "domcert/dominance.hpp"
#include "domcert/supply.hpp"

namespace domcert {

/// Subsystem supplies plus the interconnection u = H*y + v.
struct InterconnectionSpec {
  std::vector<SupplyRate> supplies;
  Eigen::MatrixXd H;  // total m_u x total m_y
};

/// Throws std::invalid_argument when H does not match the aggregated blocks.
void check_interconnection(const InterconnectionSpec& spec);

struct ComposedSupply {
  SupplyRate supply;  // on the aggregated (dy, dv)
  bool q_negative_semidefinite = false;
  double q_margin = 0.0;  // max eigenvalue of the composed Q
};

/// Block composition Q = Qb + Lb*H + H'Lb' + H'Rb*H, L = Lb + H'Rb, R = Rb
/// over block-diagonal Qb, Lb, Rb.
ComposedSupply compose_supplies(const std::vector<SupplyRate>& supplies,
                                const Eigen::MatrixXd& H);
ComposedSupply compose_supplies(const InterconnectionSpec& spec);

/// Negative feedback special case u1 = -y2 + v1, u2 = y1 + v2, i.e.
/// H = [[0, -I], [I, 0]].
ComposedSupply feedback_compose(const SupplyRate& s1, const SupplyRate& s2);

struct SmallGainResult {
  bool satisfiable = false;
  double tau = 0.0;
};

/// Scaling tau with gamma1^2 <= tau <= 1/gamma2^2 (log midpoint) making the
/// feedback of the two gain supplies negative semidefinite in Q; unsatisfiable
/// iff gamma1*gamma2 > 1.
SmallGainResult small_gain_check(double gamma1, double gamma2);

enum class CloseStatus { Ok, AlgebraicLoop };

struct ClosedLoopFamily {
  CloseStatus status = CloseStatus::Ok;
  VertexFamily family;
  std::string detail;
};

/// Materializes the interconnected Jacobian vertices (all pairwise vertex
/// combinations with u = H*y substituted). Requires H*Dbar nilpotent, i.e.
/// zero feedthrough on one side of every loop path.
ClosedLoopFamily build_closed_loop_family(const OpenVertexFamily& f1,
                                          const OpenVertexFamily& f2,
                                          const Eigen::MatrixXd& H);

enum class AggregateStatus { Ok, CompositionUnsound };

struct AggregateResult {
  AggregateStatus status = AggregateStatus::CompositionUnsound;
  std::optional<DominanceCertificate> certificate;
  std::string detail;
};

/// Block-diagonal storage aggregation: P = diag(P1, P2), p = p1 + p2, checked
/// against the materialized closed-loop vertices. Requires a shared rate and a
/// negative semidefinite composed Q.
AggregateResult aggregate_certificates(const DissipativityCertificate& c1,
                                       const DissipativityCertificate& c2,
                                       const Eigen::MatrixXd& H,
                                       const VertexFamily& closed_family);

}  // namespace domcert
