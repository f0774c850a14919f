#pragma once

#include <Eigen/Dense>

#include "mwlab/error.hpp"

namespace mwlab {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

struct SymEigen {
  Vec values;   // ascending
  Mat vectors;  // columns
};

/// Cyclic Jacobi eigensolver for symmetric matrices (small d).
SymEigen jacobi_eigen(const Mat& a, double tol = 1e-14);

/// Symmetric positive-definite matrix, validated on construction.
class SpdMatrix {
 public:
  SpdMatrix() = default;
  explicit SpdMatrix(const Mat& m);

  static SpdMatrix identity(int d);
  static SpdMatrix diagonal(const Vec& diag);
  // symmetrizes without validation; for results of SPD-preserving operations
  static SpdMatrix trusted(const Mat& m);

  const Mat& mat() const { return m_; }
  int dim() const { return static_cast<int>(m_.rows()); }
  double operator()(int i, int j) const { return m_(i, j); }

 private:
  Mat m_;
};

bool is_symmetric(const Mat& m, double rel_tol = 1e-12);

SpdMatrix spd_sqrt(const SpdMatrix& a);
SpdMatrix spd_power(const SpdMatrix& a, double t);
SpdMatrix spd_inverse(const SpdMatrix& a);
double spd_min_eigenvalue(const SpdMatrix& a);

/// Largest singular value.
double op_norm(const Mat& a);

struct PolarDecomposition {
  Mat u;
  SpdMatrix w;
};

/// A = U W with U orthogonal and W = (A^T A)^{1/2}.
PolarDecomposition polar_decompose(const Mat& a);

struct SimultaneousDiagonalization {
  Mat s;
  Vec d_a;  // all ones
  Vec d_b;
};

/// A = S^T D_A S, B = S^T D_B S with D_A = I (Cholesky route).
SimultaneousDiagonalization sim_diag(const SpdMatrix& a, const SpdMatrix& b);

/// A^{1/2} (A^{-1/2} B A^{-1/2})^t A^{1/2}
SpdMatrix geo_mean(const SpdMatrix& a, const SpdMatrix& b, double t);
/// S^T D_A^{1-t} D_B^t S from sim_diag.
SpdMatrix geo_mean_congruence(const SpdMatrix& a, const SpdMatrix& b, double t);

double rel_diff(const Mat& a, const Mat& b);

}  // namespace mwlab
