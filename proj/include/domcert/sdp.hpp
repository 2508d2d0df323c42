#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "domcert/matrix_core.hpp"
#include "domcert/supply.hpp"

namespace domcert {

/// A'P + PA + 2*lambda*P + epsilon*I <= 0.
struct LyapunovConstraint {
  Eigen::MatrixXd A;
  double lambda = 0.0;
  double epsilon = 0.0;
};

/// Bordered dissipation LMI in P for an open vertex (A, B, C, D) against a
/// supply rate:
///
///   [ A'P + PA + 2*lambda*P - C'QC + eps*I    PB - C'L - C'QD          ]
///   [ B'P - L'C - D'QC                        -R - D'L - L'D - D'QD    ]  <= 0
struct BorderedConstraint {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
  SupplyRate supply;
  double lambda = 0.0;
  double epsilon = 0.0;
};

using LmiConstraint = std::variant<LyapunovConstraint, BorderedConstraint>;

/// Frobenius inner-product equality <W, P> = rhs; used to pin P entries.
struct EqualityConstraint {
  Eigen::MatrixXd W;
  double rhs = 0.0;
};

enum class SdpObjective { Feasibility, MaximizeMargin };

/// Feasibility / margin maximization over symmetric P with
/// -norm_bound*I <= P <= norm_bound*I. The dominance LMI is homogeneous in P,
/// so the norm bound is what makes feasibility well posed.
struct SdpProblem {
  int n = 0;
  std::vector<LmiConstraint> constraints;
  std::vector<EqualityConstraint> equalities;
  double norm_bound = 10.0;
  SdpObjective objective = SdpObjective::Feasibility;
};

struct SdpSettings {
  double gap_tol = 1e-10;      // barrier duality-gap target (absolute)
  double residual_tol = 1e-7;  // residual acceptance, scaled per constraint
  double newton_tol = 1e-11;   // squared Newton decrement threshold
  int max_newton_iters = 80;
  int max_centerings = 64;
  double eta0 = 1.0;
  double eta_growth = 20.0;
  std::optional<Eigen::MatrixXd> warm_start;
};

struct SolverStats {
  int centerings = 0;
  int newton_steps = 0;
  double final_gap = 0.0;
  double worst_residual = 0.0;
};

enum class SdpStatus { Feasible, Infeasible, NumericFailure };

struct SdpResult {
  SdpStatus status = SdpStatus::NumericFailure;
  std::optional<SymMatrix> P;
  /// MaximizeMargin: the optimal uniform margin t (largest eps* at this
  /// normalization). Feasibility: the achieved uniform slack beyond epsilon.
  double margin = 0.0;
  SolverStats stats;
  std::string detail;
};

const char* to_string(SdpStatus s);

/// Left-hand side F(P) whose negative semidefiniteness the constraint requires.
Eigen::MatrixXd constraint_matrix(const SymMatrix& P, const LmiConstraint& c);

/// Norm scale used to make residual tolerances dimensionless.
double residual_scale(const LmiConstraint& c);

/// Independent residual check: max eigenvalue of F_i(P) per constraint.
/// All <= 0 (within tolerance) iff P is feasible.
std::vector<double> verify_solution(const SymMatrix& P, const SdpProblem& prob);

SdpResult solve(const SdpProblem& prob, const SdpSettings& settings = {});

}  // namespace domcert
