#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "domcert/dominance.hpp"
#include "domcert/matrix_core.hpp"
#include "domcert/sdp.hpp"
#include "domcert/supply.hpp"

namespace domcert {

struct OpenVertex {
  Eigen::MatrixXd A;
  Eigen::MatrixXd B;
  Eigen::MatrixXd C;
  Eigen::MatrixXd D;
};

/// Vertices of an open system's prolonged dynamics. If C or D differ across
/// vertices the family is tagged varying-output; the bordered LMI is then
/// matrix-convex in (C, D) only for Q <= 0, which solve_dissipativity enforces.
struct OpenVertexFamily {
  int n = 0;
  int m_u = 0;
  int m_y = 0;
  std::vector<OpenVertex> vertices;

  bool varying_output() const;
};

void check_open_family(const OpenVertexFamily& family);

struct DissipativityCertificate {
  SymMatrix P;
  int p = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  SupplyRate supply;
  double margin = 0.0;
};

enum class DissipStatus {
  Feasible,
  Infeasible,
  InertiaMismatch,
  VaryingOutputNotConvex,
  NumericFailure
};

const char* to_string(DissipStatus s);

struct DissipResult {
  DissipStatus status = DissipStatus::NumericFailure;
  std::optional<DissipativityCertificate> certificate;
  std::string detail;
};

DissipResult solve_dissipativity(const OpenVertexFamily& family, const SupplyRate& supply,
                                 double lambda, double epsilon,
                                 const SdpSettings& settings = {});

struct MinGainResult {
  bool found = false;
  double gamma = 0.0;
  std::optional<DissipativityCertificate> certificate;
  std::string detail;
  int solves = 0;
};

/// Bisection on the gain-supply level: a probe succeeds when the bordered LMI
/// is feasible and the storage has inertia exactly p. Requires an invalid
/// bracket to be reported, never repaired. Each probe warm-starts from the
/// previous feasible storage.
MinGainResult min_gain(const OpenVertexFamily& family, int p, double lambda, double epsilon,
                       double gamma_lo, double gamma_hi, double tol = 1e-3,
                       const SdpSettings& settings = {});

struct PiDegreeResult {
  bool ok = false;
  int degree = 0;
  std::optional<DissipativityCertificate> certificate;
  std::string detail;
};

/// Passivity degree of the PI controller xc' = u, y = k_P(u) + k_I*xc with
/// monotone proportional term dk_P in [dkp_lo, dkp_hi]: degree 0 for
/// k_I >= 0 (rate 0, non-strict), degree 1 for k_I < 0 (strict for lambda > 0).
PiDegreeResult pi_degree(double k_i, double dkp_lo, double dkp_hi, double lambda,
                         double epsilon = 0.01, const SdpSettings& settings = {});

}  // namespace domcert
