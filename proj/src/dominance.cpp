#include "domcert/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace domcert {

namespace {

std::string split_string(const SpectralSplit& s) {
  std::ostringstream os;
  os << s.unstable << " unstable / " << s.stable << " stable";
  if (s.on_axis > 0) os << " / " << s.on_axis << " on axis";
  return os.str();
}

// Shared tail of check_dominance_lti / solve_dominance: solve the relaxed LMI,
// read the inertia off P, cross-check against the split every vertex showed.
DominanceResult solve_and_check(const VertexFamily& family, int p_expected, double lambda,
                                double epsilon, const SdpSettings& settings,
                                std::vector<SpectralSplit> splits) {
  DominanceResult result;
  result.splits = std::move(splits);

  SdpProblem prob;
  prob.n = family.n;
  for (const auto& a : family.vertices) {
    prob.constraints.push_back(LyapunovConstraint{a, lambda, epsilon});
  }
  const SdpResult sol = solve(prob, settings);
  if (sol.status == SdpStatus::Infeasible) {
    result.status = DominanceStatus::Infeasible;
    result.detail = sol.detail;
    return result;
  }
  if (sol.status == SdpStatus::NumericFailure) {
    result.status = DominanceStatus::NumericFailure;
    result.detail = sol.detail;
    return result;
  }

  const SymMatrix& p_mat = *sol.P;
  const Inertia inertia = inertia_of(p_mat);
  if (inertia.zero != 0) {
    result.status = DominanceStatus::InertiaMismatch;
    result.detail = "storage has an eigenvalue at zero (degenerate family or rate)";
    return result;
  }
  if (inertia.neg != p_expected) {
    std::ostringstream os;
    os << "storage inertia " << inertia.neg << " disagrees with the vertex split " << p_expected;
    result.status = DominanceStatus::InertiaMismatch;
    result.detail = os.str();
    return result;
  }

  double worst = -std::numeric_limits<double>::infinity();
  for (double m : verify_solution(p_mat, prob)) worst = std::max(worst, m);

  result.status = DominanceStatus::Feasible;
  result.certificate = DominanceCertificate{p_mat, inertia.neg, lambda, epsilon, worst};
  return result;
}

}  // namespace

void check_family(const VertexFamily& family) {
  if (family.n < 1 || family.vertices.empty()) {
    throw std::invalid_argument("VertexFamily: need n >= 1 and at least one vertex");
  }
  for (const auto& a : family.vertices) {
    if (a.rows() != family.n || a.cols() != family.n) {
      throw std::invalid_argument("VertexFamily: vertex dimension mismatch");
    }
    if (!a.allFinite()) {
      throw std::invalid_argument("VertexFamily: vertex has non-finite entries");
    }
  }
}

const char* to_string(DominanceStatus s) {
  switch (s) {
    case DominanceStatus::Feasible: return "feasible";
    case DominanceStatus::Infeasible: return "infeasible";
    case DominanceStatus::InertiaMismatch: return "inertia_mismatch";
    case DominanceStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

double default_margin_band(const Eigen::MatrixXd& a) {
  return 1e-6 * (1.0 + a.cwiseAbs().maxCoeff());
}

SpectralSplit spectral_split(const Eigen::MatrixXd& a, double lambda, double band) {
  const Spectrum s = eig_general(a + lambda * Eigen::MatrixXd::Identity(a.rows(), a.cols()));
  SpectralSplit split;
  for (int i = 0; i < s.eigenvalues.size(); ++i) {
    const double re = s.eigenvalues[i].real();
    if (re > band) {
      ++split.unstable;
    } else if (re < -band) {
      ++split.stable;
    } else {
      ++split.on_axis;
    }
  }
  return split;
}

DominanceResult check_dominance_lti(const Eigen::MatrixXd& a, int p, double lambda,
                                    double epsilon, const SdpSettings& settings) {
  const int n = static_cast<int>(a.rows());
  if (p < 0 || p > n) throw std::invalid_argument("check_dominance_lti: need 0 <= p <= n");
  if (lambda < 0 || epsilon < 0) {
    throw std::invalid_argument("check_dominance_lti: lambda and epsilon must be nonnegative");
  }
  const SpectralSplit split = spectral_split(a, lambda, default_margin_band(a));
  if (split.unstable != p || split.stable != n - p) {
    DominanceResult result;
    result.status = DominanceStatus::Infeasible;
    result.splits = {split};
    result.detail = "A + lambda*I splits " + split_string(split) + ", not " +
                    std::to_string(p) + "/" + std::to_string(n - p);
    return result;
  }
  VertexFamily family{n, {a}};
  return solve_and_check(family, p, lambda, epsilon, settings, {split});
}

DominanceResult solve_dominance(const VertexFamily& family, double lambda, double epsilon,
                                const SdpSettings& settings) {
  check_family(family);
  if (lambda < 0 || epsilon < 0) {
    throw std::invalid_argument("solve_dominance: lambda and epsilon must be nonnegative");
  }
  std::vector<SpectralSplit> splits;
  splits.reserve(family.vertices.size());
  for (const auto& a : family.vertices) {
    splits.push_back(spectral_split(a, lambda, default_margin_band(a)));
  }
  // Prop. 1 per vertex: every vertex must split identically and cleanly,
  // otherwise no uniform-inertia storage can exist at this rate.
  const int p0 = splits.front().unstable;
  for (size_t i = 0; i < splits.size(); ++i) {
    if (splits[i].on_axis != 0 || splits[i].unstable != p0) {
      DominanceResult result;
      result.status = DominanceStatus::InertiaMismatch;
      result.splits = splits;
      result.detail = "vertex " + std::to_string(i) + " splits " + split_string(splits[i]) +
                      " (rate outside the admissible interval, or degenerate family)";
      return result;
    }
  }
  return solve_and_check(family, p0, lambda, epsilon, settings, std::move(splits));
}

SplittingReport spectral_scan(const std::vector<Eigen::MatrixXd>& samples,
                              const std::vector<double>& lambda_grid, double margin_band) {
  if (samples.empty() || lambda_grid.empty()) {
    throw std::invalid_argument("spectral_scan: need nonempty samples and grid");
  }
  SplittingReport report;
  report.per_lambda.reserve(lambda_grid.size());
  for (double lambda : lambda_grid) {
    std::optional<int> uniform;
    bool consistent = true;
    for (const auto& a : samples) {
      const double band = margin_band >= 0 ? margin_band : default_margin_band(a);
      const SpectralSplit s = spectral_split(a, lambda, band);
      if (s.on_axis != 0) {
        consistent = false;
        break;
      }
      if (!uniform) {
        uniform = s.unstable;
      } else if (*uniform != s.unstable) {
        consistent = false;
        break;
      }
    }
    report.per_lambda.push_back({lambda, consistent ? uniform : std::nullopt});
  }
  // Merge adjacent grid points with identical consistent split.
  size_t i = 0;
  while (i < report.per_lambda.size()) {
    if (!report.per_lambda[i].p) {
      ++i;
      continue;
    }
    size_t j = i;
    while (j + 1 < report.per_lambda.size() && report.per_lambda[j + 1].p &&
           *report.per_lambda[j + 1].p == *report.per_lambda[i].p) {
      ++j;
    }
    report.intervals.push_back(
        {report.per_lambda[i].lambda, report.per_lambda[j].lambda, *report.per_lambda[i].p});
    i = j + 1;
  }
  return report;
}

RateSearchResult rate_search(const VertexFamily& family, int p,
                             const std::vector<double>& lambda_grid, double epsilon,
                             const SdpSettings& settings) {
  check_family(family);
  if (lambda_grid.empty()) throw std::invalid_argument("rate_search: empty grid");

  RateSearchResult best;
  best.margin_objective = -std::numeric_limits<double>::infinity();
  const SplittingReport scan = spectral_scan(family.vertices, lambda_grid);
  int rejected = 0;
  for (const auto& entry : scan.per_lambda) {
    if (!entry.p || *entry.p != p) {
      ++rejected;
      continue;
    }
    SdpProblem prob;
    prob.n = family.n;
    prob.objective = SdpObjective::MaximizeMargin;
    for (const auto& a : family.vertices) {
      prob.constraints.push_back(LyapunovConstraint{a, entry.lambda, epsilon});
    }
    SdpResult sol;
    try {
      sol = solve(prob, settings);
    } catch (const std::exception& e) {
      best.detail += std::string("lambda ") + std::to_string(entry.lambda) + ": " + e.what() + "; ";
      continue;
    }
    if (sol.status != SdpStatus::Feasible) continue;
    const Inertia inertia = inertia_of(*sol.P);
    if (inertia.neg != p || inertia.zero != 0) continue;
    if (sol.margin > best.margin_objective) {
      double worst = -std::numeric_limits<double>::infinity();
      for (double m : verify_solution(*sol.P, prob)) worst = std::max(worst, m);
      best.found = true;
      best.lambda = entry.lambda;
      best.margin_objective = sol.margin;
      best.certificate = DominanceCertificate{*sol.P, p, entry.lambda, epsilon, worst};
    }
  }
  if (!best.found && best.detail.empty()) {
    best.detail = rejected == static_cast<int>(lambda_grid.size())
                      ? "spectral prefilter rejected every grid rate"
                      : "no grid rate admits a certificate with the requested inertia";
  }
  return best;
}

}  // namespace domcert
