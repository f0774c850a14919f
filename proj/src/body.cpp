#include "mwlab/body.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "lp.hpp"

namespace mwlab {

namespace {

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

double angle01(const Vec2& v) {
  double a = std::atan2(v.y(), v.x());
  if (a < 0) a += 2.0 * std::numbers::pi;
  if (a >= 2.0 * std::numbers::pi) a = 0.0;
  return a;
}

double max_norm(const std::vector<Vec2>& pts) {
  double s = 0.0;
  for (const auto& p : pts) s = std::max(s, p.norm());
  return s;
}

std::vector<Vec2> segment_vertices(const Vec2& p) {
  if (p.norm() == 0.0) return {};
  Vec2 a = p, b = -p;
  if (angle01(b) < angle01(a)) std::swap(a, b);
  return {a, b};
}

// Rotates a symmetric CCW cycle to start at the smallest polar angle and makes
// the second half the exact negation of the first.
std::vector<Vec2> rotate_symmetrize(const std::vector<Vec2>& h) {
  const int m = static_cast<int>(h.size());
  if (m == 0) return {};
  int s = 0;
  for (int i = 1; i < m; ++i)
    if (angle01(h[i]) < angle01(h[s])) s = i;
  const double scale = max_norm(h);
  std::vector<Vec2> half;
  if (m % 2 == 0 && (h[(s + m / 2) % m] + h[s]).norm() <= 1e-9 * scale) {
    for (int i = 0; i < m / 2; ++i) half.push_back(h[(s + i) % m]);
  } else {
    const double a0 = angle01(h[s]);
    for (int i = 0; i < m; ++i) {
      const Vec2& v = h[(s + i) % m];
      if (angle01(v) - a0 < std::numbers::pi - 1e-12) half.push_back(v);
    }
  }
  std::vector<Vec2> out = half;
  for (const auto& v : half) out.push_back(-v);
  return out;
}

// removes duplicate and collinear vertices from a CCW convex cycle
std::vector<Vec2> prune_cycle(std::vector<Vec2> v) {
  const double scale = max_norm(v);
  bool changed = true;
  while (changed && v.size() >= 3) {
    changed = false;
    const int m = static_cast<int>(v.size());
    std::vector<Vec2> out;
    out.reserve(m);
    for (int i = 0; i < m; ++i) {
      const Vec2& prev = v[(i + m - 1) % m];
      const Vec2& cur = v[i];
      const Vec2& next = v[(i + 1) % m];
      const Vec2 e1 = cur - prev, e2 = next - cur;
      if (e1.norm() <= 1e-13 * scale) {
        changed = true;
        continue;
      }
      if (cross(e1, e2) <= 1e-13 * e1.norm() * e2.norm() && e1.dot(e2) > 0) {
        changed = true;
        continue;
      }
      out.push_back(cur);
    }
    v.swap(out);
  }
  return v;
}

double cycle_area(const std::vector<Vec2>& v) {
  double a = 0.0;
  for (size_t i = 0; i < v.size(); ++i) a += cross(v[i], v[(i + 1) % v.size()]);
  return 0.5 * a;
}

std::vector<Vec2> degenerate_to_segment(const std::vector<Vec2>& pts) {
  Vec2 best = Vec2::Zero();
  for (const auto& p : pts)
    if (p.norm() > best.norm()) best = p;
  return segment_vertices(best);
}

std::vector<Vec2> finish_cycle(const std::vector<Vec2>& cyc, const std::vector<Vec2>& pts) {
  const double scale = max_norm(pts);
  if (scale == 0.0) return {};
  std::vector<Vec2> c = prune_cycle(cyc);
  if (c.size() < 3 || cycle_area(c) <= 1e-12 * scale * scale) return degenerate_to_segment(pts);
  return rotate_symmetrize(c);
}

std::vector<Vec2> hull_symmetric(const std::vector<Vec2>& pts_in) {
  std::vector<Vec2> pts;
  pts.reserve(2 * pts_in.size());
  for (const auto& p : pts_in) {
    pts.push_back(p);
    pts.push_back(-p);
  }
  const double scale = max_norm(pts);
  if (scale == 0.0) return {};
  std::sort(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) {
    return a.x() < b.x() || (a.x() == b.x() && a.y() < b.y());
  });
  pts.erase(std::unique(pts.begin(), pts.end(), [](const Vec2& a, const Vec2& b) { return a == b; }), pts.end());
  const int n = static_cast<int>(pts.size());
  if (n < 3) return degenerate_to_segment(pts);
  std::vector<Vec2> h(2 * n);
  int k = 0;
  auto turn = [](const Vec2& o, const Vec2& a, const Vec2& b) {
    const Vec2 oa = a - o, ob = b - o;
    return cross(oa, ob) > 1e-14 * oa.norm() * ob.norm();
  };
  for (int i = 0; i < n; ++i) {
    while (k >= 2 && !turn(h[k - 2], h[k - 1], pts[i])) --k;
    h[k++] = pts[i];
  }
  for (int i = n - 2, t = k + 1; i >= 0; --i) {
    while (k >= t && !turn(h[k - 2], h[k - 1], pts[i])) --k;
    h[k++] = pts[i];
  }
  h.resize(k - 1);
  return finish_cycle(h, pts);
}

// index of the bottom-most (then left-most) vertex
int bottom_index(const std::vector<Vec2>& v) {
  int b = 0;
  for (int i = 1; i < static_cast<int>(v.size()); ++i)
    if (v[i].y() < v[b].y() || (v[i].y() == v[b].y() && v[i].x() < v[b].x())) b = i;
  return b;
}

std::vector<Vec2> polygon_sum(const std::vector<Vec2>& p, const std::vector<Vec2>& q) {
  if (p.empty()) return q;
  if (q.empty()) return p;
  const int m = static_cast<int>(p.size()), n = static_cast<int>(q.size());
  const int bp = bottom_index(p), bq = bottom_index(q);
  std::vector<Vec2> out;
  out.reserve(m + n);
  int i = 0, j = 0;
  while (i < m || j < n) {
    out.push_back(p[(bp + i) % m] + q[(bq + j) % n]);
    const Vec2 ep = p[(bp + i + 1) % m] - p[(bp + i) % m];
    const Vec2 eq = q[(bq + j + 1) % n] - q[(bq + j) % n];
    if (i == m) {
      ++j;
    } else if (j == n) {
      ++i;
    } else {
      const double c = cross(ep, eq);
      if (c > 0) {
        ++i;
      } else if (c < 0) {
        ++j;
      } else {
        ++i;
        ++j;
      }
    }
  }
  std::vector<Vec2> pts = out;
  return finish_cycle(out, pts);
}

// vertices of the polar of a full-dimensional canonical polygon
std::vector<Vec2> polygon_polar(const std::vector<Vec2>& v) {
  std::vector<Vec2> pts;
  const int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i) {
    const Vec2 e = v[(i + 1) % m] - v[i];
    const Vec2 nrm(e.y(), -e.x());
    const double c = nrm.dot(v[i]);
    pts.push_back(nrm / c);
  }
  return finish_cycle(pts, pts);
}

// outer polygon of symmetric support samples at d = 2
std::vector<Vec2> polygon_from_support(const DirectionGrid& g, const std::vector<double>& h) {
  const int n = g.size();
  double hmax = 0.0;
  for (double x : h) hmax = std::max(hmax, x);
  if (hmax == 0.0) return {};
  int kmin = 0;
  for (int i = 1; i < n; ++i)
    if (h[i] < h[kmin]) kmin = i;
  if (h[kmin] <= 1e-12 * hmax) {
    const Vec2 uk(g.dir(kmin)(0), g.dir(kmin)(1));
    const Vec2 e(-uk.y(), uk.x());
    double a = INFINITY;
    for (int i = 0; i < n; ++i) {
      const Vec2 ui(g.dir(i)(0), g.dir(i)(1));
      const double c = std::abs(ui.dot(e));
      if (c > 1e-9) a = std::min(a, h[i] / c);
    }
    if (!(a > 1e-12 * hmax)) return {};
    return segment_vertices(a * e);
  }
  // polar of conv{u_i / h_i}
  std::vector<Vec2> pts(n);
  for (int i = 0; i < n; ++i) pts[i] = Vec2(g.dir(i)(0), g.dir(i)(1)) / h[i];
  const std::vector<Vec2> q = hull_symmetric(pts);
  return polygon_polar(q);
}

double point_segment_dist(const Vec2& p, const Vec2& a, const Vec2& b) {
  const Vec2 ab = b - a;
  const double l2 = ab.squaredNorm();
  double t = l2 > 0 ? (p - a).dot(ab) / l2 : 0.0;
  t = std::clamp(t, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double point_polygon_dist(const Vec2& p, const std::vector<Vec2>& v) {
  const int m = static_cast<int>(v.size());
  if (m == 0) return p.norm();
  if (m == 2) return point_segment_dist(p, v[0], v[1]);
  bool inside = true;
  for (int i = 0; i < m && inside; ++i)
    if (cross(v[(i + 1) % m] - v[i], p - v[i]) < 0) inside = false;
  if (inside) return 0.0;
  double d = INFINITY;
  for (int i = 0; i < m; ++i) d = std::min(d, point_segment_dist(p, v[i], v[(i + 1) % m]));
  return d;
}

Vec2 to2(const Vec& v) { return Vec2(v(0), v(1)); }

Mat canonical_ellipsoid(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorKind::DimensionMismatch, "ellipsoid matrix must be square");
  if (!m.allFinite()) fail(ErrorKind::InvalidArgument, "ellipsoid matrix has non-finite entries");
  const double scale = m.norm();
  if (scale == 0.0) return Mat::Zero(m.rows(), m.cols());
  if (is_symmetric(m)) {
    const SymEigen e = jacobi_eigen(m);
    if (e.values(0) >= -1e-12 * scale) {
      Vec lam = e.values.cwiseMax(0.0);
      Mat r = e.vectors * lam.asDiagonal() * e.vectors.transpose();
      if (e.values(0) >= 0) r = 0.5 * (m + m.transpose());
      return 0.5 * (r + r.transpose());
    }
  }
  const SymEigen e = jacobi_eigen(m * m.transpose());
  Vec s = e.values.cwiseMax(0.0).cwiseSqrt();
  Mat r = e.vectors * s.asDiagonal() * e.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

bool ellipsoid_full_rank(const Mat& m) {
  const SymEigen e = jacobi_eigen(m);
  return e.values(0) > 1e-12 * std::max(std::abs(e.values(e.values.size() - 1)), 1e-300);
}

// c with b = c * a for ellipsoid matrices, or -1
double proportional(const Mat& a, const Mat& b) {
  const double na = a.norm(), nb = b.norm();
  if (na == 0.0 || nb == 0.0) return na == 0.0 && nb == 0.0 ? 1.0 : (na == 0.0 ? -1.0 : 0.0);
  const double c = nb / na;
  if ((b - c * a).norm() <= 1e-15 * nb) return c;
  return -1.0;
}

double lp_support(const DirectionGrid& g, const std::vector<double>& h, const Vec& u) {
  if (u.norm() == 0.0) return 0.0;
  const int d = g.dim();
  // axis columns form a feasible start: the canonical grids list +e_k first
  std::vector<int> basis(d);
  for (int k = 0; k < d; ++k) basis[k] = u(k) >= 0 ? k : g.opposite(k);
  for (int k = 0; k < d; ++k) {
    const Vec ek = Vec::Unit(d, k);
    if ((g.dir(k) - ek).norm() > 0) fail(ErrorKind::SolverFailure, "grid lacks axis directions");
  }
  return detail::simplex_min(g.matrix(), u, h, basis);
}

GridPtr common_grid(const ConvexBody& a, const ConvexBody& b) {
  if (a.form() == ConvexBody::Form::Support) return a.grid();
  if (b.form() == ConvexBody::Form::Support) return b.grid();
  return DirectionGrid::canonical(a.dim());
}

void check_dims(const ConvexBody& a, const ConvexBody& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::DimensionMismatch, "bodies live in different dimensions");
}

}  // namespace

// ---------------------------------------------------------------- construction

ConvexBody ConvexBody::ellipsoid(const Mat& m) {
  ConvexBody k;
  k.form_ = Form::Ellipsoid;
  k.dim_ = static_cast<int>(m.rows());
  k.m_ = canonical_ellipsoid(m);
  return k;
}

ConvexBody ConvexBody::ball(int d, double radius) { return ellipsoid(std::abs(radius) * Mat::Identity(d, d)); }

ConvexBody ConvexBody::polygon(const std::vector<Vec2>& points) {
  ConvexBody k;
  k.form_ = Form::Polygon;
  k.dim_ = 2;
  for (const auto& p : points)
    if (!p.allFinite()) fail(ErrorKind::InvalidArgument, "polygon vertex is not finite");
  k.verts_ = hull_symmetric(points);
  return k;
}

ConvexBody ConvexBody::polygon_canonical(std::vector<Vec2> verts) {
  ConvexBody k;
  k.form_ = Form::Polygon;
  k.dim_ = 2;
  k.verts_ = std::move(verts);
  return k;
}

ConvexBody ConvexBody::segment(const Vec& v) {
  const int d = static_cast<int>(v.size());
  if (d == 1) return ellipsoid(Mat::Constant(1, 1, std::abs(v(0))));
  if (d == 2) {
    ConvexBody k;
    k.form_ = Form::Polygon;
    k.dim_ = 2;
    k.verts_ = segment_vertices(to2(v));
    return k;
  }
  const GridPtr g = DirectionGrid::canonical(d);
  std::vector<double> h(g->size());
  for (int i = 0; i < g->size(); ++i) h[i] = std::abs(g->dir(i).dot(v));
  return support_exact(g, std::move(h));
}

ConvexBody ConvexBody::point(int d) {
  if (d == 2) {
    ConvexBody k;
    k.form_ = Form::Polygon;
    k.dim_ = 2;
    return k;
  }
  return ellipsoid(Mat::Zero(d, d));
}

ConvexBody ConvexBody::support_sampled(GridPtr grid, std::vector<double> h) {
  const int n = grid->size();
  if (static_cast<int>(h.size()) != n) fail(ErrorKind::DimensionMismatch, "support sample count does not match the grid");
  for (double x : h)
    if (!std::isfinite(x) || x < 0) fail(ErrorKind::InvalidArgument, "support values must be finite and nonnegative");
  for (int i = 0; i < n / 2; ++i) {
    const double v = std::min(h[i], h[grid->opposite(i)]);
    h[i] = h[grid->opposite(i)] = v;
  }
  const int d = grid->dim();
  if (d == 1) return ellipsoid(Mat::Constant(1, 1, h[0]));
  if (d == 2) {
    ConvexBody k;
    k.form_ = Form::Polygon;
    k.dim_ = 2;
    k.verts_ = polygon_from_support(*grid, h);
    return k;
  }
  std::vector<double> c(n);
  for (int i = 0; i < n / 2; ++i) {
    const double v = std::min(h[i], lp_support(*grid, h, grid->dir(i)));
    c[i] = c[grid->opposite(i)] = v;
  }
  return support_exact(std::move(grid), std::move(c));
}

ConvexBody ConvexBody::support_exact(GridPtr grid, std::vector<double> h) {
  if (static_cast<int>(h.size()) != grid->size()) fail(ErrorKind::DimensionMismatch, "support sample count does not match the grid");
  if (grid->dim() <= 2) return support_sampled(std::move(grid), std::move(h));
  ConvexBody k;
  k.form_ = Form::Support;
  k.dim_ = grid->dim();
  k.grid_ = std::move(grid);
  k.h_ = std::move(h);
  return k;
}

bool ConvexBody::is_point() const {
  switch (form_) {
    case Form::Ellipsoid: return m_.norm() == 0.0;
    case Form::Polygon: return verts_.empty();
    case Form::Support: return *std::max_element(h_.begin(), h_.end()) == 0.0;
  }
  return false;
}

bool ConvexBody::is_full_dimensional() const {
  switch (form_) {
    case Form::Ellipsoid: return !is_point() && ellipsoid_full_rank(m_);
    case Form::Polygon: return verts_.size() >= 3;
    case Form::Support: {
      const double mx = *std::max_element(h_.begin(), h_.end());
      const double mn = *std::min_element(h_.begin(), h_.end());
      return mx > 0 && mn > 1e-12 * mx;
    }
  }
  return false;
}

double ConvexBody::radius() const { return set_norm(*this); }

// ------------------------------------------------------------------ evaluation

double support(const ConvexBody& k, const Vec& u) {
  if (u.size() != k.dim()) fail(ErrorKind::DimensionMismatch, "direction has wrong dimension");
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid: return (k.ellipsoid_matrix() * u).norm();
    case ConvexBody::Form::Polygon: {
      double s = 0.0;
      for (const auto& v : k.vertices()) s = std::max(s, v.x() * u(0) + v.y() * u(1));
      return s;
    }
    case ConvexBody::Form::Support: return lp_support(*k.grid(), k.support_values(), u);
  }
  return 0.0;
}

double gauge(const ConvexBody& k, const Vec& v) {
  if (v.size() != k.dim()) fail(ErrorKind::DimensionMismatch, "vector has wrong dimension");
  if (v.norm() == 0.0) return 0.0;
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid: {
      const Mat& m = k.ellipsoid_matrix();
      const SymEigen e = jacobi_eigen(m);
      const double top = std::max(e.values(e.values.size() - 1), 0.0);
      double g2 = 0.0;
      for (int i = 0; i < e.values.size(); ++i) {
        const double c = e.vectors.col(i).dot(v);
        if (e.values(i) <= 1e-12 * top) {
          if (std::abs(c) > 1e-12 * v.norm()) fail(ErrorKind::DegenerateBody, "vector outside the span of a degenerate ellipsoid");
          continue;
        }
        g2 += (c / e.values(i)) * (c / e.values(i));
      }
      return std::sqrt(g2);
    }
    case ConvexBody::Form::Polygon: {
      const auto& vs = k.vertices();
      const Vec2 p = to2(v);
      if (vs.empty()) fail(ErrorKind::DegenerateBody, "gauge of the point body");
      if (vs.size() == 2) {
        if (std::abs(cross(p, vs[0])) > 1e-12 * p.norm() * vs[0].norm())
          fail(ErrorKind::DegenerateBody, "vector outside the span of a segment");
        return p.norm() / vs[0].norm();
      }
      std::vector<Vec2> n;
      std::vector<double> c;
      polygon_facets(k, n, c);
      double g = 0.0;
      for (size_t i = 0; i < n.size(); ++i) g = std::max(g, n[i].dot(p) / c[i]);
      return g;
    }
    case ConvexBody::Form::Support: {
      const auto& g = *k.grid();
      const auto& h = k.support_values();
      double r = 0.0;
      for (int i = 0; i < g.size(); ++i) {
        const double c = g.dir(i).dot(v);
        if (c <= 0) continue;
        if (h[i] <= 0) fail(ErrorKind::DegenerateBody, "vector outside a degenerate body");
        r = std::max(r, c / h[i]);
      }
      return r;
    }
  }
  return 0.0;
}

void polygon_facets(const ConvexBody& k, std::vector<Vec2>& normals, std::vector<double>& offsets) {
  normals.clear();
  offsets.clear();
  const auto& v = k.vertices();
  if (v.size() < 3) fail(ErrorKind::DegenerateBody, "polygon is lower-dimensional");
  const int m = static_cast<int>(v.size());
  for (int i = 0; i < m; ++i) {
    const Vec2 e = v[(i + 1) % m] - v[i];
    Vec2 n(e.y(), -e.x());
    n.normalize();
    normals.push_back(n);
    offsets.push_back(n.dot(v[i]));
  }
}

// ------------------------------------------------------------------ arithmetic

ConvexBody as_polygon(const ConvexBody& k, GridPtr grid) {
  if (k.dim() != 2) fail(ErrorKind::DimensionMismatch, "polygon form needs d = 2");
  if (k.form() == ConvexBody::Form::Polygon) return k;
  if (k.form() == ConvexBody::Form::Ellipsoid) {
    const Mat& m = k.ellipsoid_matrix();
    const SymEigen e = jacobi_eigen(m);
    const double top = e.values(1);
    if (top <= 0) return ConvexBody::point(2);
    if (e.values(0) <= 1e-12 * top) return ConvexBody::segment(top * e.vectors.col(1));
    if (!grid) grid = DirectionGrid::canonical(2);
    std::vector<double> h(grid->size());
    for (int i = 0; i < grid->size(); ++i) h[i] = (m * grid->dir(i)).norm();
    return ConvexBody::support_sampled(grid, std::move(h));
  }
  fail(ErrorKind::InvalidArgument, "support form does not occur at d = 2");
}

ConvexBody as_support(const ConvexBody& k, GridPtr grid) {
  if (k.form() == ConvexBody::Form::Support && k.grid() == grid) return k;
  std::vector<double> h(grid->size());
  for (int i = 0; i < grid->size(); ++i) h[i] = support(k, Vec(grid->dir(i)));
  return ConvexBody::support_exact(grid, std::move(h));
}

ConvexBody minkowski_sum(const ConvexBody& a, const ConvexBody& b) {
  check_dims(a, b);
  if (a.is_point()) return b;
  if (b.is_point()) return a;
  if (a.form() == ConvexBody::Form::Ellipsoid && b.form() == ConvexBody::Form::Ellipsoid) {
    const double c = proportional(a.ellipsoid_matrix(), b.ellipsoid_matrix());
    if (c >= 0 || a.dim() == 1) {
      if (a.dim() == 1) return ConvexBody::ellipsoid(a.ellipsoid_matrix() + b.ellipsoid_matrix());
      return ConvexBody::ellipsoid((1.0 + c) * a.ellipsoid_matrix());
    }
  }
  if (a.dim() == 2) {
    const ConvexBody pa = as_polygon(a), pb = as_polygon(b);
    return ConvexBody::polygon_canonical(polygon_sum(pa.vertices(), pb.vertices()));
  }
  const GridPtr g = common_grid(a, b);
  const ConvexBody sa = as_support(a, g), sb = as_support(b, g);
  std::vector<double> h(g->size());
  for (int i = 0; i < g->size(); ++i) h[i] = sa.support_values()[i] + sb.support_values()[i];
  return ConvexBody::support_exact(g, std::move(h));
}

ConvexBody minkowski_sum(const std::vector<ConvexBody>& ks) {
  if (ks.empty()) fail(ErrorKind::InvalidArgument, "empty sum");
  std::vector<double> w(ks.size(), 1.0);
  return weighted_sum(ks, w);
}

ConvexBody weighted_sum(const std::vector<ConvexBody>& ks, const std::vector<double>& w) {
  if (ks.empty() || ks.size() != w.size()) fail(ErrorKind::InvalidArgument, "weighted_sum needs matching nonempty lists");
  const int d = ks[0].dim();
  for (const auto& k : ks)
    if (k.dim() != d) fail(ErrorKind::DimensionMismatch, "bodies live in different dimensions");
  // all ellipsoids proportional to one matrix: stays an ellipsoid
  bool ell = true;
  Mat base;
  double total = 0.0;
  for (size_t i = 0; i < ks.size() && ell; ++i) {
    if (ks[i].form() != ConvexBody::Form::Ellipsoid) {
      ell = false;
      break;
    }
    if (w[i] == 0.0 || ks[i].is_point()) continue;
    if (base.size() == 0) {
      base = ks[i].ellipsoid_matrix();
      total = w[i];
      continue;
    }
    const double c = d == 1 ? ks[i].ellipsoid_matrix()(0, 0) / base(0, 0) : proportional(base, ks[i].ellipsoid_matrix());
    if (c < 0) ell = false;
    else total += w[i] * c;
  }
  if (ell) return base.size() == 0 ? ConvexBody::point(d) : ConvexBody::ellipsoid(total * base);
  if (d == 2) {
    std::vector<std::vector<Vec2>> level;
    for (size_t i = 0; i < ks.size(); ++i) {
      if (w[i] == 0.0) continue;
      std::vector<Vec2> v = as_polygon(ks[i]).vertices();
      for (auto& x : v) x *= std::abs(w[i]);
      level.push_back(std::move(v));
    }
    if (level.empty()) return ConvexBody::point(2);
    while (level.size() > 1) {
      std::vector<std::vector<Vec2>> next;
      for (size_t i = 0; i + 1 < level.size(); i += 2) next.push_back(polygon_sum(level[i], level[i + 1]));
      if (level.size() % 2) next.push_back(level.back());
      level.swap(next);
    }
    return ConvexBody::polygon_canonical(std::move(level[0]));
  }
  GridPtr g;
  for (const auto& k : ks)
    if (k.form() == ConvexBody::Form::Support) {
      g = k.grid();
      break;
    }
  if (!g) g = DirectionGrid::canonical(d);
  std::vector<double> h(g->size(), 0.0);
  for (size_t i = 0; i < ks.size(); ++i) {
    if (w[i] == 0.0) continue;
    const ConvexBody s = as_support(ks[i], g);
    for (int j = 0; j < g->size(); ++j) h[j] += std::abs(w[i]) * s.support_values()[j];
  }
  return ConvexBody::support_exact(g, std::move(h));
}

ConvexBody scale(const ConvexBody& k, double alpha) {
  const double a = std::abs(alpha);
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid: return ConvexBody::ellipsoid(a * k.ellipsoid_matrix());
    case ConvexBody::Form::Polygon: {
      if (a == 0.0) return ConvexBody::point(2);
      std::vector<Vec2> v = k.vertices();
      for (auto& x : v) x *= a;
      return ConvexBody::polygon_canonical(std::move(v));
    }
    case ConvexBody::Form::Support: {
      std::vector<double> h = k.support_values();
      for (auto& x : h) x *= a;
      return ConvexBody::support_exact(k.grid(), std::move(h));
    }
  }
  return k;
}

ConvexBody hull_union(const std::vector<ConvexBody>& ks) {
  if (ks.empty()) fail(ErrorKind::InvalidArgument, "hull of an empty list");
  const int d = ks[0].dim();
  for (const auto& k : ks)
    if (k.dim() != d) fail(ErrorKind::DimensionMismatch, "bodies live in different dimensions");
  if (ks.size() == 1) return ks[0];
  // nested proportional ellipsoids
  bool ell = true;
  int best = -1;
  double bestc = -1.0;
  for (size_t i = 0; i < ks.size() && ell; ++i) {
    if (ks[i].form() != ConvexBody::Form::Ellipsoid) {
      ell = false;
      break;
    }
    const double c = d == 1 ? ks[i].ellipsoid_matrix()(0, 0) / std::max(ks[0].ellipsoid_matrix()(0, 0), 1e-300)
                            : proportional(ks[0].ellipsoid_matrix(), ks[i].ellipsoid_matrix());
    if (d == 1 && ks[0].ellipsoid_matrix()(0, 0) == 0.0) {
      if (ks[i].ellipsoid_matrix()(0, 0) > 0) ell = false;
      continue;
    }
    if (c < 0) ell = false;
    else if (c > bestc) {
      bestc = c;
      best = static_cast<int>(i);
    }
  }
  if (d == 1) {
    double r = 0.0;
    for (const auto& k : ks) r = std::max(r, k.ellipsoid_matrix()(0, 0));
    return ConvexBody::ellipsoid(Mat::Constant(1, 1, r));
  }
  if (ell && best >= 0) return ks[best];
  if (d == 2) {
    std::vector<Vec2> pts;
    for (const auto& k : ks) {
      const ConvexBody p = as_polygon(k);
      pts.insert(pts.end(), p.vertices().begin(), p.vertices().end());
    }
    return ConvexBody::polygon(pts);
  }
  GridPtr g;
  for (const auto& k : ks)
    if (k.form() == ConvexBody::Form::Support) {
      g = k.grid();
      break;
    }
  if (!g) g = DirectionGrid::canonical(d);
  std::vector<double> h(g->size(), 0.0);
  for (const auto& k : ks) {
    const ConvexBody s = as_support(k, g);
    for (int j = 0; j < g->size(); ++j) h[j] = std::max(h[j], s.support_values()[j]);
  }
  return ConvexBody::support_exact(g, std::move(h));
}

ConvexBody polar(const ConvexBody& k) {
  if (!k.is_full_dimensional()) fail(ErrorKind::DegenerateBody, "polar of a lower-dimensional body");
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid: return ConvexBody::ellipsoid(spd_inverse(SpdMatrix::trusted(k.ellipsoid_matrix())).mat());
    case ConvexBody::Form::Polygon: {
      return ConvexBody::polygon_canonical(polygon_polar(k.vertices()));
    }
    case ConvexBody::Form::Support: {
      const auto& g = *k.grid();
      const auto& h = k.support_values();
      std::vector<double> hp(g.size(), 0.0);
      for (int j = 0; j < g.size(); ++j)
        for (int i = 0; i < g.size(); ++i) hp[j] = std::max(hp[j], g.dir(j).dot(g.dir(i)) / h[i]);
      return ConvexBody::support_exact(k.grid(), std::move(hp));
    }
  }
  return k;
}

double set_norm(const ConvexBody& k, const Mat& w) {
  if (w.cols() != k.dim()) fail(ErrorKind::DimensionMismatch, "set_norm matrix has wrong size");
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid: return op_norm(w * k.ellipsoid_matrix());
    case ConvexBody::Form::Polygon: {
      double s = 0.0;
      for (const auto& v : k.vertices()) s = std::max(s, (w * Vec(v)).norm());
      return s;
    }
    case ConvexBody::Form::Support: {
      const Mat wt = w.transpose();
      return maximize_on_sphere([&](const Vec& z) { return support(k, Vec(wt * z)); },
                                *DirectionGrid::canonical(static_cast<int>(w.rows())))
          .value;
    }
  }
  return 0.0;
}

double set_norm(const ConvexBody& k) { return set_norm(k, Mat::Identity(k.dim(), k.dim())); }

Containment contains_scaled(const ConvexBody& k1, const ConvexBody& k2, double c) {
  check_dims(k1, k2);
  if (!k2.is_full_dimensional()) fail(ErrorKind::DegenerateBody, "containment in a lower-dimensional body");
  double margin = 0.0;
  switch (k2.form()) {
    case ConvexBody::Form::Polygon: {
      std::vector<Vec2> n;
      std::vector<double> off;
      polygon_facets(k2, n, off);
      for (size_t i = 0; i < n.size(); ++i) margin = std::max(margin, support(k1, Vec(n[i])) / off[i]);
      break;
    }
    case ConvexBody::Form::Ellipsoid:
      margin = set_norm(k1, spd_inverse(SpdMatrix::trusted(k2.ellipsoid_matrix())).mat());
      break;
    case ConvexBody::Form::Support: {
      const auto& g = *k2.grid();
      for (int i = 0; i < g.size(); ++i)
        margin = std::max(margin, support(k1, Vec(g.dir(i))) / k2.support_values()[i]);
      break;
    }
  }
  return {margin <= c * (1.0 + 1e-12), margin};
}

double hausdorff(const ConvexBody& a, const ConvexBody& b, const Mat& r) {
  check_dims(a, b);
  if (r.rows() != a.dim() || r.cols() != a.dim()) fail(ErrorKind::DimensionMismatch, "metric matrix has wrong size");
  if (a.form() == ConvexBody::Form::Polygon && b.form() == ConvexBody::Form::Polygon) {
    const Eigen::Matrix2d r2 = r;
    auto image = [&](const std::vector<Vec2>& v) {
      std::vector<Vec2> out;
      for (const auto& x : v) out.push_back(r2 * x);
      if (out.size() >= 3 && cycle_area(out) < 0) std::reverse(out.begin(), out.end());
      return out;
    };
    const std::vector<Vec2> ra = image(a.vertices()), rb = image(b.vertices());
    double d = 0.0;
    for (const auto& v : ra) d = std::max(d, point_polygon_dist(v, rb));
    for (const auto& v : rb) d = std::max(d, point_polygon_dist(v, ra));
    if (ra.empty()) d = std::max(d, point_polygon_dist(Vec2::Zero(), rb));
    if (rb.empty()) d = std::max(d, point_polygon_dist(Vec2::Zero(), ra));
    return d;
  }
  const GridPtr g = common_grid(a, b);
  const Mat rt = r.transpose();
  return maximize_on_sphere(
             [&](const Vec& z) {
               const Vec w = rt * z;
               return std::abs(support(a, w) - support(b, w));
             },
             *g)
      .value;
}

double hausdorff(const ConvexBody& a, const ConvexBody& b) {
  return hausdorff(a, b, Mat::Identity(a.dim(), a.dim()));
}

bool approx_equal(const ConvexBody& a, const ConvexBody& b, double tol) {
  if (a.dim() != b.dim()) return false;
  if (a.form() == ConvexBody::Form::Polygon && b.form() == ConvexBody::Form::Polygon) {
    const auto& va = a.vertices();
    const auto& vb = b.vertices();
    if (va.size() != vb.size()) return false;
    const size_t m = va.size();
    for (size_t s = 0; s < std::max<size_t>(m, 1); ++s) {
      bool ok = true;
      for (size_t i = 0; i < m && ok; ++i) ok = (va[i] - vb[(i + s) % m]).norm() <= tol;
      if (ok) return true;
    }
    return false;
  }
  return hausdorff(a, b) <= tol;
}

}  // namespace mwlab
