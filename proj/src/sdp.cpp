#include "domcert/sdp.hpp"

#include <cmath>
#include <sstream>
#include <utility>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

namespace domcert {

namespace {

int sym_dim(int n) { return n * (n + 1) / 2; }

std::vector<std::pair<int, int>> sym_index_pairs(int n) {
  std::vector<std::pair<int, int>> pairs;
  pairs.reserve(sym_dim(n));
  for (int i = 0; i < n; ++i) {
    for (int j = i; j < n; ++j) pairs.emplace_back(i, j);
  }
  return pairs;
}

Eigen::MatrixXd mat_from_svec(const Eigen::VectorXd& v, int n,
                              const std::vector<std::pair<int, int>>& pairs) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    m(pairs[k].first, pairs[k].second) = v[k];
    m(pairs[k].second, pairs[k].first) = v[k];
  }
  return m;
}

Eigen::VectorXd svec_from_mat(const Eigen::MatrixXd& m,
                              const std::vector<std::pair<int, int>>& pairs) {
  Eigen::VectorXd v(static_cast<int>(pairs.size()));
  for (int k = 0; k < static_cast<int>(pairs.size()); ++k) {
    v[k] = m(pairs[k].first, pairs[k].second);
  }
  return v;
}

Eigen::MatrixXd symmetrize(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

// Linear-in-P part of the constraint left-hand side.
Eigen::MatrixXd constraint_linear(const Eigen::MatrixXd& P, const LmiConstraint& c) {
  if (const auto* lc = std::get_if<LyapunovConstraint>(&c)) {
    return symmetrize(lc->A.transpose() * P + P * lc->A + 2.0 * lc->lambda * P);
  }
  const auto& bc = std::get<BorderedConstraint>(c);
  const int n = static_cast<int>(bc.A.rows());
  const int mu = static_cast<int>(bc.B.cols());
  Eigen::MatrixXd f = Eigen::MatrixXd::Zero(n + mu, n + mu);
  f.topLeftCorner(n, n) = bc.A.transpose() * P + P * bc.A + 2.0 * bc.lambda * P;
  f.topRightCorner(n, mu) = P * bc.B;
  f.bottomLeftCorner(mu, n) = bc.B.transpose() * P;
  return symmetrize(f);
}

// Constant (P-independent) part; eps_included selects whether the strictness
// term enters (dropped in MaximizeMargin mode).
Eigen::MatrixXd constraint_constant(const LmiConstraint& c, bool eps_included) {
  if (const auto* lc = std::get_if<LyapunovConstraint>(&c)) {
    const int n = static_cast<int>(lc->A.rows());
    const double e = eps_included ? lc->epsilon : 0.0;
    return e * Eigen::MatrixXd::Identity(n, n);
  }
  const auto& bc = std::get<BorderedConstraint>(c);
  const auto& s = bc.supply;
  const int n = static_cast<int>(bc.A.rows());
  const int mu = static_cast<int>(bc.B.cols());
  const double e = eps_included ? bc.epsilon : 0.0;
  Eigen::MatrixXd f(n + mu, n + mu);
  f.topLeftCorner(n, n) =
      e * Eigen::MatrixXd::Identity(n, n) - bc.C.transpose() * s.Q * bc.C;
  f.topRightCorner(n, mu) = -bc.C.transpose() * s.L - bc.C.transpose() * s.Q * bc.D;
  f.bottomLeftCorner(mu, n) = f.topRightCorner(n, mu).transpose();
  f.bottomRightCorner(mu, mu) = -s.R - bc.D.transpose() * s.L - s.L.transpose() * bc.D -
                                bc.D.transpose() * s.Q * bc.D;
  return symmetrize(f);
}

void check_constraint_dims(int n, const LmiConstraint& c) {
  if (const auto* lc = std::get_if<LyapunovConstraint>(&c)) {
    if (lc->A.rows() != n || lc->A.cols() != n) {
      throw std::invalid_argument("SdpProblem: Lyapunov constraint dimension mismatch");
    }
    if (!lc->A.allFinite() || lc->lambda < 0.0 || lc->epsilon < 0.0) {
      throw std::invalid_argument("SdpProblem: Lyapunov constraint has invalid data");
    }
    return;
  }
  const auto& bc = std::get<BorderedConstraint>(c);
  check_supply(bc.supply);
  const int mu = bc.supply.m_u;
  const int my = bc.supply.m_y;
  if (bc.A.rows() != n || bc.A.cols() != n || bc.B.rows() != n || bc.B.cols() != mu ||
      bc.C.rows() != my || bc.C.cols() != n || bc.D.rows() != my || bc.D.cols() != mu) {
    throw std::invalid_argument("SdpProblem: bordered constraint dimension mismatch");
  }
  if (!bc.A.allFinite() || !bc.B.allFinite() || !bc.C.allFinite() || !bc.D.allFinite() ||
      bc.lambda < 0.0 || bc.epsilon < 0.0) {
    throw std::invalid_argument("SdpProblem: bordered constraint has invalid data");
  }
}

double constraint_epsilon(const LmiConstraint& c) {
  if (const auto* lc = std::get_if<LyapunovConstraint>(&c)) return lc->epsilon;
  return std::get<BorderedConstraint>(c).epsilon;
}

// One barrier block S(z) = G0 + sum_k w_k * Gk - t*I (t only when has_t).
struct Block {
  Eigen::MatrixXd G0;
  std::vector<Eigen::MatrixXd> G;
  bool has_t = false;
  int dim() const { return static_cast<int>(G0.rows()); }
};

Eigen::MatrixXd block_value(const Block& b, const Eigen::VectorXd& w, double t) {
  Eigen::MatrixXd s = b.G0;
  for (int k = 0; k < static_cast<int>(b.G.size()); ++k) s += w[k] * b.G[k];
  if (b.has_t) s -= t * Eigen::MatrixXd::Identity(b.dim(), b.dim());
  return s;
}

// -log det over all blocks; returns false when any block is not positive definite.
bool barrier_value(const std::vector<Block>& blocks, const Eigen::VectorXd& w, double t,
                   double* phi) {
  double acc = 0.0;
  for (const auto& b : blocks) {
    Eigen::LLT<Eigen::MatrixXd> llt(block_value(b, w, t));
    if (llt.info() != Eigen::Success) return false;
    const auto& l = llt.matrixLLT();
    for (int i = 0; i < b.dim(); ++i) {
      if (!(l(i, i) > 0.0) || !std::isfinite(l(i, i))) return false;
      acc -= 2.0 * std::log(l(i, i));
    }
  }
  *phi = acc;
  return true;
}

}  // namespace

const char* to_string(SdpStatus s) {
  switch (s) {
    case SdpStatus::Feasible: return "feasible";
    case SdpStatus::Infeasible: return "infeasible";
    case SdpStatus::NumericFailure: return "numeric_failure";
  }
  return "unknown";
}

Eigen::MatrixXd constraint_matrix(const SymMatrix& P, const LmiConstraint& c) {
  return constraint_constant(c, /*eps_included=*/true) + constraint_linear(P.mat(), c);
}

double residual_scale(const LmiConstraint& c) {
  if (const auto* lc = std::get_if<LyapunovConstraint>(&c)) {
    return 1.0 + lc->A.cwiseAbs().maxCoeff() + 2.0 * lc->lambda;
  }
  const auto& bc = std::get<BorderedConstraint>(c);
  double m = bc.A.cwiseAbs().maxCoeff();
  m = std::max(m, bc.B.cwiseAbs().maxCoeff());
  m = std::max(m, bc.C.cwiseAbs().maxCoeff());
  m = std::max(m, bc.D.cwiseAbs().maxCoeff());
  m = std::max(m, bc.supply.Q.cwiseAbs().maxCoeff());
  m = std::max(m, bc.supply.L.cwiseAbs().maxCoeff());
  m = std::max(m, bc.supply.R.cwiseAbs().maxCoeff());
  return 1.0 + m + 2.0 * bc.lambda;
}

std::vector<double> verify_solution(const SymMatrix& P, const SdpProblem& prob) {
  if (P.dim() != prob.n) {
    throw std::invalid_argument("verify_solution: P dimension does not match problem");
  }
  std::vector<double> margins;
  margins.reserve(prob.constraints.size());
  for (const auto& c : prob.constraints) {
    check_constraint_dims(prob.n, c);
    margins.push_back(max_eig_sym(SymMatrix(constraint_matrix(P, c))));
  }
  return margins;
}

SdpResult solve(const SdpProblem& prob, const SdpSettings& settings) {
  if (prob.n < 1) throw std::invalid_argument("SdpProblem: n must be positive");
  if (prob.constraints.empty()) {
    throw std::invalid_argument("SdpProblem: at least one constraint required");
  }
  if (!(prob.norm_bound > 0.0) || !std::isfinite(prob.norm_bound)) {
    throw std::invalid_argument("SdpProblem: norm_bound must be positive and finite");
  }
  for (const auto& c : prob.constraints) check_constraint_dims(prob.n, c);

  const int n = prob.n;
  const auto pairs = sym_index_pairs(n);
  const int full_dim = sym_dim(n);
  const bool margin_mode = prob.objective == SdpObjective::MaximizeMargin;

  SdpResult result;

  // Equality elimination: P = P0 + sum w_k * basis_k over the kernel of E.
  Eigen::VectorXd p0 = Eigen::VectorXd::Zero(full_dim);
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Identity(full_dim, full_dim);
  if (!prob.equalities.empty()) {
    const int m_eq = static_cast<int>(prob.equalities.size());
    Eigen::MatrixXd e(m_eq, full_dim);
    Eigen::VectorXd g(m_eq);
    for (int r = 0; r < m_eq; ++r) {
      const auto& eq = prob.equalities[r];
      if (eq.W.rows() != n || eq.W.cols() != n) {
        throw std::invalid_argument("SdpProblem: equality weight dimension mismatch");
      }
      for (int k = 0; k < full_dim; ++k) {
        const auto [i, j] = pairs[k];
        e(r, k) = (i == j) ? eq.W(i, i) : eq.W(i, j) + eq.W(j, i);
      }
      g[r] = eq.rhs;
    }
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(e);
    p0 = cod.solve(g);
    if ((e * p0 - g).norm() > 1e-9 * (1.0 + g.norm())) {
      result.status = SdpStatus::Infeasible;
      result.detail = "equality constraints are inconsistent";
      return result;
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(e);
    lu.setThreshold(1e-12);
    kernel = lu.kernel();
    if (kernel.cols() == 1 && kernel.isZero(0.0)) {
      kernel.resize(full_dim, 0);  // equalities determine P fully
    }
  }
  const int nvars = static_cast<int>(kernel.cols());

  const Eigen::MatrixXd P0 = mat_from_svec(p0, n, pairs);
  std::vector<Eigen::MatrixXd> basis(nvars);
  for (int k = 0; k < nvars; ++k) basis[k] = mat_from_svec(kernel.col(k), n, pairs);

  // Barrier blocks: one per LMI constraint (margin variable enters), plus the
  // two norm-bound blocks (margin-free).
  std::vector<Block> blocks;
  blocks.reserve(prob.constraints.size() + 2);
  for (const auto& c : prob.constraints) {
    Block b;
    b.G0 = -(constraint_constant(c, !margin_mode) + constraint_linear(P0, c));
    b.G.resize(nvars);
    for (int k = 0; k < nvars; ++k) b.G[k] = -constraint_linear(basis[k], c);
    b.has_t = true;
    blocks.push_back(std::move(b));
  }
  {
    Block hi;  // norm_bound*I - P >= 0
    hi.G0 = prob.norm_bound * Eigen::MatrixXd::Identity(n, n) - P0;
    hi.G.resize(nvars);
    for (int k = 0; k < nvars; ++k) hi.G[k] = -basis[k];
    blocks.push_back(std::move(hi));
    Block lo;  // norm_bound*I + P >= 0
    lo.G0 = prob.norm_bound * Eigen::MatrixXd::Identity(n, n) + P0;
    lo.G.resize(nvars);
    for (int k = 0; k < nvars; ++k) lo.G[k] = basis[k];
    blocks.push_back(std::move(lo));
  }

  double nu = 0.0;
  for (const auto& b : blocks) nu += b.dim();

  // Starting point. w = 0 is strictly inside the norm bound unless the pinned
  // particular solution itself crosses it.
  Eigen::VectorXd w = Eigen::VectorXd::Zero(nvars);
  if (settings.warm_start && settings.warm_start->rows() == n &&
      settings.warm_start->cols() == n && nvars > 0) {
    const Eigen::VectorXd target = svec_from_mat(symmetrize(*settings.warm_start), pairs) - p0;
    const Eigen::VectorXd w_try = kernel.colPivHouseholderQr().solve(target);
    bool ok = w_try.allFinite();
    if (ok) {
      const Eigen::MatrixXd p_try = mat_from_svec(p0 + kernel * w_try, n, pairs);
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(p_try, Eigen::EigenvaluesOnly);
      ok = es.eigenvalues().cwiseAbs().maxCoeff() < 0.99 * prob.norm_bound;
    }
    if (ok) w = w_try;
  }
  {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
        mat_from_svec(p0 + kernel * w, n, pairs), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().cwiseAbs().maxCoeff() >= prob.norm_bound) {
      result.status = SdpStatus::NumericFailure;
      result.detail = "pinned entries are incompatible with the norm bound";
      return result;
    }
  }
  double t = 0.0;
  {
    double min_eig = std::numeric_limits<double>::infinity();
    for (const auto& b : blocks) {
      if (!b.has_t) continue;
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(block_value(b, w, 0.0),
                                                        Eigen::EigenvaluesOnly);
      min_eig = std::min(min_eig, es.eigenvalues().minCoeff());
    }
    t = min_eig - 1.0 - 0.1 * std::abs(min_eig);
  }

  const int ntot = nvars + 1;  // w variables plus the margin t
  double eta = settings.eta0;
  SolverStats stats;
  std::vector<Eigen::MatrixXd> sinv(blocks.size());
  std::vector<Eigen::MatrixXd> tv(ntot);

  for (int outer = 0; outer < settings.max_centerings; ++outer) {
    ++stats.centerings;
    for (int it = 0; it < settings.max_newton_iters; ++it) {
      // Gradient and Hessian of -eta*t + barrier.
      Eigen::VectorXd grad = Eigen::VectorXd::Zero(ntot);
      grad[nvars] = -eta;
      Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(ntot, ntot);
      bool point_ok = true;
      for (size_t bi = 0; bi < blocks.size(); ++bi) {
        const Block& b = blocks[bi];
        Eigen::LLT<Eigen::MatrixXd> llt(block_value(b, w, t));
        if (llt.info() != Eigen::Success) {
          point_ok = false;
          break;
        }
        sinv[bi] = llt.solve(Eigen::MatrixXd::Identity(b.dim(), b.dim()));
        for (int k = 0; k < nvars; ++k) {
          tv[k] = sinv[bi] * b.G[k];
          grad[k] -= tv[k].trace();
        }
        if (b.has_t) {
          tv[nvars] = -sinv[bi];
          grad[nvars] += sinv[bi].trace();
        } else {
          tv[nvars].setZero(b.dim(), b.dim());
        }
        for (int u = 0; u < ntot; ++u) {
          for (int v = u; v < ntot; ++v) {
            const double huv = tv[u].cwiseProduct(tv[v].transpose()).sum();
            hess(u, v) += huv;
            if (v != u) hess(v, u) += huv;
          }
        }
      }
      if (!point_ok) break;

      Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
      Eigen::VectorXd step = ldlt.solve(-grad);
      if (!step.allFinite()) {
        ldlt.compute(hess + 1e-12 * hess.trace() / ntot *
                                Eigen::MatrixXd::Identity(ntot, ntot));
        step = ldlt.solve(-grad);
        if (!step.allFinite()) break;
      }
      const double dec2 = -grad.dot(step);
      if (!(dec2 > settings.newton_tol * std::max(1.0, eta))) break;

      double f0;
      if (!barrier_value(blocks, w, t, &f0)) break;
      f0 -= eta * t;
      double s = 1.0;
      bool moved = false;
      while (s > 1e-13) {
        const Eigen::VectorXd w_new = w + s * step.head(nvars);
        const double t_new = t + s * step[nvars];
        double phi_new;
        if (barrier_value(blocks, w_new, t_new, &phi_new)) {
          const double f_new = phi_new - eta * t_new;
          if (f_new <= f0 - 0.01 * s * dec2) {
            w = w_new;
            t = t_new;
            moved = true;
            break;
          }
        }
        s *= 0.5;
      }
      ++stats.newton_steps;
      if (!moved) break;
    }
    stats.final_gap = nu / eta;
    if (stats.final_gap <= settings.gap_tol * std::max(1.0, std::abs(t))) break;
    eta *= settings.eta_growth;
  }

  const SymMatrix P(mat_from_svec(p0 + kernel * w, n, pairs));
  const std::vector<double> margins = verify_solution(P, prob);
  double worst_scaled = -std::numeric_limits<double>::infinity();
  double max_scale = 1.0;
  bool residual_ok = true;
  for (size_t i = 0; i < margins.size(); ++i) {
    const double scale = residual_scale(prob.constraints[i]);
    max_scale = std::max(max_scale, scale);
    worst_scaled = std::max(worst_scaled, margins[i] / scale);
    if (margins[i] > settings.residual_tol * scale) residual_ok = false;
  }
  result.P = P;
  result.margin = t;
  result.stats = stats;
  result.stats.worst_residual = worst_scaled;

  if (residual_ok) {
    result.status = SdpStatus::Feasible;
    return result;
  }
  // The barrier path certifies t_opt <= t + gap; conclude infeasibility when
  // even that optimistic margin cannot meet the residual tolerance.
  const double t_upper = t + stats.final_gap;
  double eps_floor = std::numeric_limits<double>::infinity();
  for (const auto& c : prob.constraints) {
    eps_floor = std::min(eps_floor, constraint_epsilon(c));
  }
  const double required = margin_mode ? eps_floor : 0.0;
  if (t_upper < required - settings.residual_tol * max_scale) {
    result.status = SdpStatus::Infeasible;
    std::ostringstream os;
    os << "no admissible P: best uniform margin bounded by " << t_upper;
    result.detail = os.str();
  } else {
    result.status = SdpStatus::NumericFailure;
    result.detail = "solver stalled before residual tolerance was met";
  }
  return result;
}

}  // namespace domcert
