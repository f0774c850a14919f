#pragma once

#include <functional>
#include <optional>
#include <string>

#include "mwlab/sphere.hpp"
#include "mwlab/spd.hpp"

namespace mwlab {

/// A homogeneous function v -> rho(v) on R^d, optionally backed by a matrix
/// (rho(v) = |M v|).
class NormEvaluator {
 public:
  NormEvaluator(int dim, std::function<double(const Vec&)> f, std::string kind, bool is_norm = true);

  static NormEvaluator euclidean(int d);
  static NormEvaluator from_matrix(const Mat& m);

  double operator()(const Vec& v) const { return f_(v); }
  int dim() const { return dim_; }
  const std::optional<Mat>& matrix() const { return matrix_; }
  const std::string& kind() const { return kind_; }
  // false when the evaluator may fail the triangle inequality
  bool is_norm() const { return is_norm_; }

 private:
  int dim_;
  std::function<double(const Vec&)> f_;
  std::optional<Mat> matrix_;
  std::string kind_;
  bool is_norm_;
};

/// sup_w |<v,w>| / rho(w); exact for matrix-backed rho.
double dual_norm(const NormEvaluator& rho, const Vec& v, const DirectionGrid& grid);
double dual_norm(const NormEvaluator& rho, const Vec& v);

/// Evaluator of the dual norm (grid maximization per call).
NormEvaluator dual_of(const NormEvaluator& rho, GridPtr grid);

/// v -> rho0(v)^{1-t} rho1(v)^t
NormEvaluator geo_mean_norm(const NormEvaluator& rho0, const NormEvaluator& rho1, double t);

struct DoubleDualReport {
  SpdMatrix root;  // (A #_t B)^{1/2}
  double ratio_min = 0.0;
  double ratio_max = 0.0;
  int probes = 0;
};

/// Compares the double dual of v -> |A^{1/2}v|^{1-t}|B^{1/2}v|^t with
/// |(A #_t B)^{1/2} v| over probe directions.
DoubleDualReport double_dual_geo(const SpdMatrix& a, const SpdMatrix& b, double t, GridPtr grid, int probes = 32);

}  // namespace mwlab
