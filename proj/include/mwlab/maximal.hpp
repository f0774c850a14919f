#pragma once

#include <optional>

#include "mwlab/fields.hpp"

namespace mwlab {

struct MaximalOptions {
  /// shift of the dyadic grid, entries in {0, 1/3, -1/3}; unset means the standard grid
  std::optional<Vec> grid_shift;
  bool include_base_cube = true;
};

/// Exact Minkowski average of the cell bodies of F inside q.
ConvexBody aumann_average(const SetFunction& f, CubeId q);
/// All dyadic cube averages: out[k][i] is the average over cube (k, i).
std::vector<std::vector<ConvexBody>> cube_averages(const SetFunction& f);

/// Per cell, the hull of the averages over all dyadic cubes containing it.
SetFunction dyadic_maximal(const SetFunction& f, const MaximalOptions& opts = {});
/// Maximal operator over the shifted grid 2^-k([0,1)^n + m + (-1)^k tau)
/// (unit-normalized coordinates), cubes clipped to the domain, levels -2..J.
SetFunction shifted_maximal(const SetFunction& f, const Vec& tau);
/// Minkowski sum of shifted_maximal over all 3^n shifts.
SetFunction combined_bound(const SetFunction& f);
/// all shifts in {0, 1/3, -1/3}^n, the zero shift first
std::vector<Vec> grid_shifts(int n);

struct IntervalOracle {
  /// support samples of the oracle body per cell, on `grid`
  std::vector<std::vector<double>> support;
  GridPtr grid;
  SetFunction bodies;
};
/// Non-dyadic maximal at the cell midpoints (n = 1): all intervals with
/// endpoints on the grid origin + k*step. With extension > 0 the first and
/// last cells are continued constantly for `extension` length units beyond
/// the domain on each side.
IntervalOracle interval_maximal(const SetFunction& f, double step, double extension = 0.0, GridPtr grid = nullptr);

/// Christ-Goldberg: sup over dyadic Q containing x of avg_Q |W(x) W^{-1}(y) f(y)|.
ScalarField christ_goldberg(const MatrixWeight& w, const VectorField& f);

/// N_W H(x) = |W(x) H(x)| W(x)^{-1} B
SetFunction exhaust(const MatrixWeight& w, const SetFunction& h);

/// (sum_x |Q_x| |W(x) F(x)|^p)^{1/p}, max for p = inf; w == nullptr means identity.
double lpk_norm(const SetFunction& f, const MatrixWeight* w, double p);
double lp_norm(const ScalarField& r, double p);
/// measure of the cells where |M^d F(x)| > lambda
double weak_level_measure(const SetFunction& f, double lambda);
/// same, for an already computed maximal function
double level_measure(const SetFunction& mf, double lambda);
double dp_metric(const SetFunction& f, const SetFunction& g, const MatrixWeight* w, double p);

/// Scalar realization of the maximal operator on ellipsoid fields:
/// out(x) = max over dyadic Q containing x of sup_{|u|=1} avg_{y in Q} r(y) |A(y) B(x) u|,
/// i.e. the B(x)-set-norm of M^d(r A B)(x).
ScalarField ellipsoid_maximal_norm(const ScalarField& r, const MatrixWeight& a, const MatrixWeight& b);

}  // namespace mwlab
