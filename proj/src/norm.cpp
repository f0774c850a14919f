#include "mwlab/norm.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace mwlab {

NormEvaluator::NormEvaluator(int dim, std::function<double(const Vec&)> f, std::string kind, bool is_norm)
    : dim_(dim), f_(std::move(f)), kind_(std::move(kind)), is_norm_(is_norm) {}

NormEvaluator NormEvaluator::euclidean(int d) {
  NormEvaluator n(d, [](const Vec& v) { return v.norm(); }, "euclidean");
  n.matrix_ = Mat::Identity(d, d);
  return n;
}

NormEvaluator NormEvaluator::from_matrix(const Mat& m) {
  NormEvaluator n(static_cast<int>(m.cols()), [m](const Vec& v) { return (m * v).norm(); }, "matrix");
  n.matrix_ = m;
  return n;
}

double dual_norm(const NormEvaluator& rho, const Vec& v, const DirectionGrid& grid) {
  if (v.size() != rho.dim() || grid.dim() != rho.dim())
    fail(ErrorKind::DimensionMismatch, "dual_norm dimension mismatch");
  if (rho.matrix()) {
    const Mat& m = *rho.matrix();
    // |<v,w>| / |Mw| maximized at |M^{-T} v|
    Eigen::FullPivLU<Mat> lu(m.transpose());
    if (!lu.isInvertible()) fail(ErrorKind::DegenerateNorm, "matrix norm is degenerate");
    return (lu.solve(v)).norm();
  }
  for (int i = 0; i < grid.size(); ++i)
    if (!(rho(grid.dir(i)) > 0.0)) fail(ErrorKind::DegenerateNorm, "norm vanishes on a probe direction");
  const SphereMax m = maximize_on_sphere([&](const Vec& w) { return std::abs(v.dot(w)) / rho(w); }, grid);
  return m.value;
}

double dual_norm(const NormEvaluator& rho, const Vec& v) {
  return dual_norm(rho, v, *DirectionGrid::canonical(rho.dim()));
}

NormEvaluator dual_of(const NormEvaluator& rho, GridPtr grid) {
  if (rho.matrix()) {
    const Mat mi = rho.matrix()->transpose().inverse();
    return NormEvaluator::from_matrix(mi);
  }
  for (int i = 0; i < grid->size(); ++i)
    if (!(rho(grid->dir(i)) > 0.0)) fail(ErrorKind::DegenerateNorm, "norm vanishes on a probe direction");
  return NormEvaluator(
      rho.dim(),
      [rho, grid](const Vec& v) {
        return maximize_on_sphere([&](const Vec& w) { return std::abs(v.dot(w)) / rho(w); }, *grid).value;
      },
      "dual");
}

NormEvaluator geo_mean_norm(const NormEvaluator& rho0, const NormEvaluator& rho1, double t) {
  if (rho0.dim() != rho1.dim()) fail(ErrorKind::DimensionMismatch, "geo_mean_norm dimension mismatch");
  return NormEvaluator(
      rho0.dim(),
      [rho0, rho1, t](const Vec& v) {
        const double a = rho0(v), b = rho1(v);
        if (t == 0.0) return a;
        if (t == 1.0) return b;
        return std::pow(a, 1.0 - t) * std::pow(b, t);
      },
      "geo-mean", false);
}

DoubleDualReport double_dual_geo(const SpdMatrix& a, const SpdMatrix& b, double t, GridPtr grid, int probes) {
  if (a.dim() != b.dim() || grid->dim() != a.dim()) fail(ErrorKind::DimensionMismatch, "double_dual_geo dimension mismatch");
  DoubleDualReport rep;
  rep.root = spd_sqrt(geo_mean(a, b, t));
  const NormEvaluator pt =
      geo_mean_norm(NormEvaluator::from_matrix(spd_sqrt(a).mat()), NormEvaluator::from_matrix(spd_sqrt(b).mat()), t);
  const NormEvaluator pt_star = dual_of(pt, grid);
  const NormEvaluator pt_star_star = dual_of(pt_star, grid);
  const int d = a.dim();
  const GridPtr probe_grid = DirectionGrid::canonical(d, d == 2 ? 2 * probes : DirectionGrid::default_size(d));
  const int np = d == 2 ? probes : std::min(probes, probe_grid->size() / 2);
  rep.ratio_min = INFINITY;
  rep.ratio_max = 0.0;
  for (int i = 0; i < np; ++i) {
    const Vec v = probe_grid->dir(i);
    const double r = pt_star_star(v) / (rep.root.mat() * v).norm();
    rep.ratio_min = std::min(rep.ratio_min, r);
    rep.ratio_max = std::max(rep.ratio_max, r);
  }
  rep.probes = np;
  return rep;
}

}  // namespace mwlab
