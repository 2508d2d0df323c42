#pragma once

#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "domcert/matrix_core.hpp"
#include "domcert/sdp.hpp"

namespace domcert {

/// Finite set of Jacobian vertices whose convex hull covers the Jacobian image.
struct VertexFamily {
  int n = 0;
  std::vector<Eigen::MatrixXd> vertices;
};

void check_family(const VertexFamily& family);

struct DominanceCertificate {
  SymMatrix P;
  int p = 0;
  double lambda = 0.0;
  double epsilon = 0.0;
  double margin = 0.0;  // worst vertex residual max-eigenvalue, <= 0
};

enum class DominanceStatus { Feasible, Infeasible, InertiaMismatch, NumericFailure };

const char* to_string(DominanceStatus s);

/// Eigenvalue split of A + lambda*I: counts with real part above, below, and
/// within +-band of the imaginary axis.
struct SpectralSplit {
  int unstable = 0;
  int stable = 0;
  int on_axis = 0;
};

SpectralSplit spectral_split(const Eigen::MatrixXd& a, double lambda, double band);

/// Band inside which an eigenvalue counts as lying on the axis.
double default_margin_band(const Eigen::MatrixXd& a);

struct DominanceResult {
  DominanceStatus status = DominanceStatus::NumericFailure;
  std::optional<DominanceCertificate> certificate;
  std::string detail;
  std::vector<SpectralSplit> splits;  // per vertex, at the requested rate
};

/// Dominance of a single LTI vertex. Decides via the eigenvalue split of
/// A + lambda*I first, then produces P from the one-vertex LMI.
DominanceResult check_dominance_lti(const Eigen::MatrixXd& a, int p, double lambda,
                                    double epsilon, const SdpSettings& settings = {});

/// Vertex-relaxed dominance LMI. The inertia constraint is non-convex, so the
/// LMI is solved unconstrained and the inertia of P is checked afterwards
/// against the per-vertex spectral split; a disagreement reports
/// InertiaMismatch rather than attempting a non-convex search.
DominanceResult solve_dominance(const VertexFamily& family, double lambda, double epsilon,
                                const SdpSettings& settings = {});

struct SplittingEntry {
  double lambda = 0.0;
  std::optional<int> p;  // uniform unstable count; nullopt = no consistent split
};

struct SplittingInterval {
  double lo = 0.0;
  double hi = 0.0;
  int p = 0;
};

/// Grid scan of the uniform eigenvalue split across Jacobian samples.
/// Intervals are maximal runs of grid points with identical consistent split,
/// reported at grid resolution (half-step uncertainty at the ends).
struct SplittingReport {
  std::vector<SplittingEntry> per_lambda;
  std::vector<SplittingInterval> intervals;
};

/// margin_band < 0 selects the per-sample default band.
SplittingReport spectral_scan(const std::vector<Eigen::MatrixXd>& samples,
                              const std::vector<double>& lambda_grid,
                              double margin_band = -1.0);

struct RateSearchResult {
  bool found = false;
  double lambda = 0.0;
  std::optional<DominanceCertificate> certificate;
  double margin_objective = 0.0;  // MaximizeMargin optimum at the winning rate
  std::string detail;
};

/// Spectral-scan prefilter over the grid, then margin-maximized solves on the
/// surviving rates; returns the rate with the largest optimum.
RateSearchResult rate_search(const VertexFamily& family, int p,
                             const std::vector<double>& lambda_grid, double epsilon = 0.01,
                             const SdpSettings& settings = {});

}  // namespace domcert
