#include "domcert/dissipativity.hpp"

#include <cmath>
#include <sstream>

namespace domcert {

namespace {

constexpr double kPiZeroFloor = 1e-8;

SdpProblem bordered_problem(const OpenVertexFamily& family, const SupplyRate& supply,
                            double lambda, double epsilon) {
  SdpProblem prob;
  prob.n = family.n;
  // A zero supply says nothing about the channel; keeping the border would
  // additionally pin PB = 0, so only the internal block remains.
  const bool zero = supply.Q.isZero(0.0) && supply.L.isZero(0.0) && supply.R.isZero(0.0);
  for (const auto& v : family.vertices) {
    if (zero) {
      prob.constraints.push_back(LyapunovConstraint{v.A, lambda, epsilon});
    } else {
      prob.constraints.push_back(
          BorderedConstraint{v.A, v.B, v.C, v.D, supply, lambda, epsilon});
    }
  }
  return prob;
}

}  // namespace

bool OpenVertexFamily::varying_output() const {
  for (size_t i = 1; i < vertices.size(); ++i) {
    if (vertices[i].C != vertices[0].C || vertices[i].D != vertices[0].D) return true;
  }
  return false;
}

void check_open_family(const OpenVertexFamily& family) {
  if (family.n < 1 || family.m_u < 1 || family.m_y < 1 || family.vertices.empty()) {
    throw std::invalid_argument("OpenVertexFamily: need positive dimensions and a vertex");
  }
  for (const auto& v : family.vertices) {
    if (v.A.rows() != family.n || v.A.cols() != family.n || v.B.rows() != family.n ||
        v.B.cols() != family.m_u || v.C.rows() != family.m_y || v.C.cols() != family.n ||
        v.D.rows() != family.m_y || v.D.cols() != family.m_u) {
      throw std::invalid_argument("OpenVertexFamily: vertex block dimension mismatch");
    }
    if (!v.A.allFinite() || !v.B.allFinite() || !v.C.allFinite() || !v.D.allFinite()) {
      throw std::invalid_argument("OpenVertexFamily: vertex has non-finite entries");
    }
  }
}

const char* to_string(DissipStatus s) {
  switch (s) {
    case DissipStatus::Feasible: return "feasible";
    case DissipStatus::Infeasible: return "infeasible";
    case DissipStatus::InertiaMismatch: return "inertia_mismatch";
    case DissipStatus::VaryingOutputNotConvex: return "varying_output_not_convex";
    case DissipStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

DissipResult solve_dissipativity(const OpenVertexFamily& family, const SupplyRate& supply,
                                 double lambda, double epsilon, const SdpSettings& settings) {
  check_open_family(family);
  check_supply(supply);
  if (supply.m_u != family.m_u || supply.m_y != family.m_y) {
    throw std::invalid_argument("solve_dissipativity: supply dimensions do not match family");
  }
  if (lambda < 0 || epsilon < 0) {
    throw std::invalid_argument("solve_dissipativity: lambda and epsilon must be nonnegative");
  }

  DissipResult result;
  if (family.varying_output()) {
    // -C'QC and -D'QD are quadratic in (C, D); vertex checking is sound only
    // when that map is matrix-convex, i.e. Q <= 0.
    const double q_max = max_eig_sym(SymMatrix(supply.Q));
    if (q_max > 1e-9 * (1.0 + supply.Q.cwiseAbs().maxCoeff())) {
      result.status = DissipStatus::VaryingOutputNotConvex;
      result.detail = "family varies C or D across vertices but Q is not negative semidefinite";
      return result;
    }
  }

  const SdpProblem prob = bordered_problem(family, supply, lambda, epsilon);
  const SdpResult sol = solve(prob, settings);
  if (sol.status == SdpStatus::Infeasible) {
    result.status = DissipStatus::Infeasible;
    result.detail = sol.detail;
    return result;
  }
  if (sol.status == SdpStatus::NumericFailure) {
    result.status = DissipStatus::NumericFailure;
    result.detail = sol.detail;
    return result;
  }
  const Inertia inertia = inertia_of(*sol.P);
  if (inertia.zero != 0) {
    result.status = DissipStatus::InertiaMismatch;
    result.detail = "storage has an eigenvalue at zero";
    return result;
  }
  double worst = -std::numeric_limits<double>::infinity();
  for (double m : verify_solution(*sol.P, prob)) worst = std::max(worst, m);
  result.status = DissipStatus::Feasible;
  result.certificate =
      DissipativityCertificate{*sol.P, inertia.neg, lambda, epsilon, supply, worst};
  return result;
}

MinGainResult min_gain(const OpenVertexFamily& family, int p, double lambda, double epsilon,
                       double gamma_lo, double gamma_hi, double tol,
                       const SdpSettings& settings) {
  check_open_family(family);
  if (!(gamma_lo > 0) || !(gamma_hi > gamma_lo)) {
    throw std::invalid_argument("min_gain: need 0 < gamma_lo < gamma_hi");
  }
  if (!(tol > 0)) throw std::invalid_argument("min_gain: tol must be positive");

  MinGainResult result;
  SdpSettings probe_settings = settings;

  auto probe = [&](double gamma) -> std::optional<DissipativityCertificate> {
    ++result.solves;
    const DissipResult r = solve_dissipativity(
        family, gain_supply(family.m_y, family.m_u, gamma), lambda, epsilon, probe_settings);
    if (r.status != DissipStatus::Feasible || r.certificate->p != p) return std::nullopt;
    probe_settings.warm_start = r.certificate->P.mat();
    return r.certificate;
  };

  auto hi_cert = probe(gamma_hi);
  if (!hi_cert) {
    // Distinguish a genuinely infeasible upper end from a wrong-inertia one.
    const DissipResult r = solve_dissipativity(
        family, gain_supply(family.m_y, family.m_u, gamma_hi), lambda, epsilon, settings);
    if (r.status == DissipStatus::Feasible && r.certificate->p != p) {
      result.detail = "bracket invalid: storage at gamma_hi has inertia " +
                      std::to_string(r.certificate->p) + ", expected " + std::to_string(p);
    } else {
      result.detail = "bracket invalid: infeasible at gamma_hi (" + r.detail + ")";
    }
    return result;
  }
  if (probe(gamma_lo)) {
    result.detail = "bracket invalid: already feasible at gamma_lo";
    return result;
  }

  double lo = gamma_lo;
  double hi = gamma_hi;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (auto cert = probe(mid)) {
      hi = mid;
      hi_cert = std::move(cert);
    } else {
      lo = mid;
    }
  }
  result.found = true;
  result.gamma = hi;
  result.certificate = std::move(hi_cert);
  return result;
}

PiDegreeResult pi_degree(double k_i, double dkp_lo, double dkp_hi, double lambda,
                         double epsilon, const SdpSettings& settings) {
  if (dkp_lo < 0 || dkp_hi < dkp_lo) {
    throw std::invalid_argument("pi_degree: need 0 <= dkp_lo <= dkp_hi (monotone k_P)");
  }
  if (lambda < 0) throw std::invalid_argument("pi_degree: lambda must be nonnegative");

  PiDegreeResult result;
  OpenVertexFamily family;
  family.n = family.m_u = family.m_y = 1;
  for (double d : {dkp_lo, dkp_hi}) {
    family.vertices.push_back(OpenVertex{Eigen::MatrixXd::Zero(1, 1),
                                         Eigen::MatrixXd::Ones(1, 1),
                                         k_i * Eigen::MatrixXd::Ones(1, 1),
                                         d * Eigen::MatrixXd::Ones(1, 1)});
    if (dkp_hi == dkp_lo) break;
  }
  const SupplyRate supply = passivity_supply(1);

  if (k_i == 0.0) {
    // Pure proportional boundary: with a zero-feedthrough vertex the LMI pins
    // P to exactly 0, which the zero-inertia rule rejects. Report the smallest
    // positive storage instead, with its honest (tiny) residual.
    const SymMatrix p_floor(kPiZeroFloor * Eigen::MatrixXd::Ones(1, 1));
    const SdpProblem prob = bordered_problem(family, supply, 0.0, 0.0);
    double worst = -std::numeric_limits<double>::infinity();
    for (double m : verify_solution(p_floor, prob)) worst = std::max(worst, m);
    result.ok = true;
    result.degree = 0;
    result.certificate = DissipativityCertificate{p_floor, 0, 0.0, 0.0, supply, worst};
    result.detail = "k_I = 0 boundary: storage reported at the positive floor";
    return result;
  }

  const double lambda_eff = k_i > 0 ? 0.0 : lambda;
  const double epsilon_eff = k_i > 0 ? 0.0 : epsilon;
  if (k_i < 0 && lambda == 0.0 && epsilon > 0.0) {
    result.detail = "k_I < 0 is only non-strictly passive at rate 0; strictness needs lambda > 0";
    return result;
  }
  const DissipResult r = solve_dissipativity(family, supply, lambda_eff, epsilon_eff, settings);
  if (r.status != DissipStatus::Feasible) {
    result.detail = r.detail.empty() ? to_string(r.status) : r.detail;
    return result;
  }
  const int expected = k_i > 0 ? 0 : 1;
  if (r.certificate->p != expected) {
    result.detail = "unexpected storage inertia " + std::to_string(r.certificate->p);
    return result;
  }
  result.ok = true;
  result.degree = expected;
  result.certificate = r.certificate;
  return result;
}

}  // namespace domcert
