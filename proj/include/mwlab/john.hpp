#pragma once

#include "mwlab/body.hpp"

namespace mwlab {

struct JohnResult {
  SpdMatrix m;
  bool inner_ok = false;
  bool outer_ok = false;
  double inner_margin = 0.0;  // max over constraints of |m u| / h(u); <= 1 when E is inside K
  double outer_margin = 0.0;  // sup over K of |m^{-1} v| / sqrt(d); <= 1 when K is inside sqrt(d) E
  double slack = 0.0;
  int iterations = 0;
};

struct JohnOptions {
  int max_iterations = 10000;
  double gradient_tol = 1e-10;
  double mu_final = 1e-17;
};

/// Maximal-volume centered ellipsoid m*B inside K.
JohnResult john_ellipsoid(const ConvexBody& k, const JohnOptions& opts = {});

/// Same problem for explicit constraints |m n_j| <= h_j (n_j spanning, h_j > 0).
JohnResult john_from_constraints(const Mat& normals, const Vec& h, const JohnOptions& opts = {});

}  // namespace mwlab
