#include "domcert/matrix_core.hpp"

#include <algorithm>
#include <complex>
#include <vector>

#include <Eigen/Eigenvalues>

namespace domcert {

namespace {

void require_finite(const Eigen::MatrixXd& m, const char* who) {
  if (!m.allFinite()) {
    throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
  }
}

}  // namespace

SymMatrix::SymMatrix(const Eigen::MatrixXd& m) {
  if (m.rows() != m.cols() || m.rows() < 1) {
    throw std::invalid_argument("SymMatrix: matrix must be square with n >= 1");
  }
  require_finite(m, "SymMatrix");
  mat_ = 0.5 * (m + m.transpose());
}

SymEigenResult sym_eigen(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat());
  if (es.info() != Eigen::Success) {
    throw EigenSolveError("sym_eigen: iteration did not converge",
                          30 * m.dim());
  }
  return {es.eigenvalues(), es.eigenvectors()};
}

double max_eig_sym(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw EigenSolveError("max_eig_sym: iteration did not converge", 30 * m.dim());
  }
  return es.eigenvalues().maxCoeff();
}

double min_eig_sym(const SymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.mat(), Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw EigenSolveError("min_eig_sym: iteration did not converge", 30 * m.dim());
  }
  return es.eigenvalues().minCoeff();
}

double default_zero_tol(const SymMatrix& m) {
  return m.dim() * m.mat().cwiseAbs().maxCoeff() * 1e-9;
}

Inertia inertia_of(const SymMatrix& m, double zero_tol) {
  if (zero_tol < 0) {
    throw std::invalid_argument("inertia_of: zero_tol must be nonnegative");
  }
  const Eigen::VectorXd vals = sym_eigen(m).values;
  Inertia in;
  for (int i = 0; i < vals.size(); ++i) {
    if (vals[i] < -zero_tol) {
      ++in.neg;
    } else if (vals[i] > zero_tol) {
      ++in.pos;
    } else {
      ++in.zero;
    }
  }
  return in;
}

Inertia inertia_of(const SymMatrix& m) { return inertia_of(m, default_zero_tol(m)); }

Spectrum eig_general(const Eigen::MatrixXd& a) {
  if (a.rows() != a.cols() || a.rows() < 1) {
    throw std::invalid_argument("eig_general: matrix must be square with n >= 1");
  }
  require_finite(a, "eig_general");
  Eigen::EigenSolver<Eigen::MatrixXd> es(a, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) {
    // Eigen's real Schur iteration caps at 40 sweeps per row.
    throw EigenSolveError("eig_general: QR iteration did not converge",
                          40 * static_cast<int>(a.rows()));
  }
  std::vector<std::complex<double>> vals(es.eigenvalues().data(),
                                         es.eigenvalues().data() + a.rows());
  std::sort(vals.begin(), vals.end(), [](const auto& x, const auto& y) {
    if (x.real() != y.real()) return x.real() < y.real();
    return x.imag() < y.imag();
  });
  Spectrum s;
  s.eigenvalues = Eigen::Map<const Eigen::VectorXcd>(vals.data(), vals.size());
  return s;
}

}  // namespace domcert
