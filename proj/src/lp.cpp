#include "lp.hpp"

#include <cmath>
#include <limits>

namespace mwlab::detail {

double simplex_min(const Mat& a, const Vec& b, const std::vector<double>& c, std::vector<int> basis) {
  const int m = static_cast<int>(a.rows());
  const int n = static_cast<int>(a.cols());
  double cscale = 0.0;
  for (double v : c) cscale = std::max(cscale, std::abs(v));
  const double tol = 1e-13 * std::max(cscale, 1e-300);
  const int max_iter = 50 * n + 100;
  for (int it = 0; it < max_iter; ++it) {
    Mat bm(m, m);
    Vec cb(m);
    for (int i = 0; i < m; ++i) {
      bm.col(i) = a.col(basis[i]);
      cb(i) = c[basis[i]];
    }
    Eigen::PartialPivLU<Mat> lu(bm);
    const Vec xb = lu.solve(b);
    const Vec y = lu.transpose().solve(cb);
    const bool bland = it > 5 * n;
    int enter = -1;
    double best = -tol;
    for (int j = 0; j < n; ++j) {
      const double r = c[j] - y.dot(a.col(j));
      if (r < best) {
        enter = j;
        if (bland) break;
        best = r;
      }
    }
    if (enter < 0) return cb.dot(xb);
    const Vec dir = lu.solve(Vec(a.col(enter)));
    int leave = -1;
    double ratio = std::numeric_limits<double>::infinity();
    for (int i = 0; i < m; ++i) {
      if (dir(i) > 1e-12) {
        const double r = std::max(0.0, xb(i)) / dir(i);
        if (r < ratio || (bland && r == ratio && basis[i] < basis[leave])) {
          ratio = r;
          leave = i;
        }
      }
    }
    if (leave < 0) fail(ErrorKind::SolverFailure, "support LP is unbounded");
    basis[leave] = enter;
  }
  fail(ErrorKind::SolverFailure, "support LP did not converge");
}

}  // namespace mwlab::detail
