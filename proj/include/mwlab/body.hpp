#pragma once

#include <vector>

#include "mwlab/sphere.hpp"
#include "mwlab/spd.hpp"

namespace mwlab {

using Vec2 = Eigen::Vector2d;

/// Bounded, symmetric, convex body in R^d. Immutable after construction.
///  - Ellipsoid: m * closed unit ball, m symmetric positive semidefinite.
///  - Polygon (d = 2): canonical counterclockwise vertex list, closed under
///    negation, starting at the vertex of smallest polar angle in [0, 2pi).
///    A segment has two vertices, the point {0} has none.
///  - Support: support values on a direction grid, read as the outer
///    polyhedron; values are the polyhedron's own support (canonical).
class ConvexBody {
 public:
  enum class Form { Ellipsoid, Polygon, Support };

  static ConvexBody ellipsoid(const Mat& m);
  static ConvexBody ball(int d, double radius = 1.0);
  /// symmetric hull of the given points together with their negatives
  static ConvexBody polygon(const std::vector<Vec2>& points);
  /// Trusted constructor: vertices already in canonical form.
  static ConvexBody polygon_canonical(std::vector<Vec2> verts);
  static ConvexBody segment(const Vec& v);
  static ConvexBody point(int d);
  /// Outer polyhedron of the given support samples (canonicalized; a polygon at d = 2).
  static ConvexBody support_sampled(GridPtr grid, std::vector<double> h);
  /// Trusted constructor: h must already be the support of a convex body at the grid directions.
  static ConvexBody support_exact(GridPtr grid, std::vector<double> h);

  int dim() const { return dim_; }
  Form form() const { return form_; }
  const Mat& ellipsoid_matrix() const { return m_; }
  const std::vector<Vec2>& vertices() const { return verts_; }
  const GridPtr& grid() const { return grid_; }
  const std::vector<double>& support_values() const { return h_; }

  bool is_point() const;
  /// full-dimensional within 1e-12 * scale
  bool is_full_dimensional() const;
  /// outer radius
  double radius() const;

 private:
  Form form_ = Form::Polygon;
  int dim_ = 0;
  Mat m_;
  std::vector<Vec2> verts_;
  GridPtr grid_;
  std::vector<double> h_;
};

double support(const ConvexBody& k, const Vec& u);
double gauge(const ConvexBody& k, const Vec& v);
ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b);
ConvexBody minkowski_sum(const std::vector<ConvexBody>& ks);
/// sum_i w_i K_i with w_i >= 0
ConvexBody weighted_sum(const std::vector<ConvexBody>& ks, const std::vector<double>& w);
ConvexBody scale(const ConvexBody& k, double alpha);
ConvexBody hull_union(const std::vector<ConvexBody>& ks);
ConvexBody polar(const ConvexBody& k);
/// Hausdorff distance in the metric |R(v - w)|.
double hausdorff(const ConvexBody& a, const ConvexBody& b, const Mat& r);
double hausdorff(const ConvexBody& a, const ConvexBody& b);
/// sup_{v in K} |W v|
double set_norm(const ConvexBody& k, const Mat& w);
double set_norm(const ConvexBody& k);

struct Containment {
  bool ok = false;
  double margin = 0.0;  // smallest C' with K1 inside C' K2
};
Containment contains_scaled(const ConvexBody& k1, const ConvexBody& k2, double c);

/// Polygon representation of a d = 2 body; ellipsoids become the outer
/// polygon of their support on the grid.
ConvexBody as_polygon(const ConvexBody& k, GridPtr grid = nullptr);
/// Support values on the grid (d >= 3 representation of any body).
ConvexBody as_support(const ConvexBody& k, GridPtr grid);
/// Facet normals (unit) and offsets of a full-dimensional polygon.
void polygon_facets(const ConvexBody& k, std::vector<Vec2>& normals, std::vector<double>& offsets);

bool approx_equal(const ConvexBody& a, const ConvexBody& b, double tol);

}  // namespace mwlab
