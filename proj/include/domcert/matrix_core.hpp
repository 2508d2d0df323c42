#pragma once

#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace domcert {

/// Thrown when an eigenvalue iteration fails to converge.
struct EigenSolveError : std::runtime_error {
  EigenSolveError(const std::string& what, int iterations_)
      : std::runtime_error(what), iterations(iterations_) {}
  int iterations;
};

/// Dense real symmetric matrix. Construction symmetrizes its argument, so
/// entries(i,j) == entries(j,i) holds exactly afterwards.
class SymMatrix {
 public:
  explicit SymMatrix(const Eigen::MatrixXd& m);

  static SymMatrix Zero(int n) { return SymMatrix(Eigen::MatrixXd::Zero(n, n)); }
  static SymMatrix Identity(int n) { return SymMatrix(Eigen::MatrixXd::Identity(n, n)); }

  int dim() const { return static_cast<int>(mat_.rows()); }
  const Eigen::MatrixXd& mat() const { return mat_; }
  double operator()(int i, int j) const { return mat_(i, j); }

 private:
  Eigen::MatrixXd mat_;
};

/// Eigenvalue signature (negative, zero, positive counts) of a symmetric matrix.
struct Inertia {
  int neg = 0;
  int zero = 0;
  int pos = 0;

  int total() const { return neg + zero + pos; }
  bool operator==(const Inertia&) const = default;
};

/// Eigenvalues of a general real matrix, sorted by (real part, imaginary part).
struct Spectrum {
  Eigen::VectorXcd eigenvalues;
};

struct SymEigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // orthonormal columns, matching order
};

SymEigenResult sym_eigen(const SymMatrix& m);

double max_eig_sym(const SymMatrix& m);
double min_eig_sym(const SymMatrix& m);

/// Backward-error threshold below which an eigenvalue counts as zero:
/// n * max|m_ij| * 1e-9.
double default_zero_tol(const SymMatrix& m);

Inertia inertia_of(const SymMatrix& m, double zero_tol);
Inertia inertia_of(const SymMatrix& m);

Spectrum eig_general(const Eigen::MatrixXd& a);

}  // namespace domcert
