#pragma once

#include <vector>

#include "mwlab/spd.hpp"

namespace mwlab::detail {

/// min c^T y  s.t.  A y = b, y >= 0, starting from a feasible basis
/// (column indices). Returns the optimal value.
double simplex_min(const Mat& a, const Vec& b, const std::vector<double>& c, std::vector<int> basis);

}  // namespace mwlab::detail
