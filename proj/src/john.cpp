#include "mwlab/john.hpp"

#include <cmath>
#include <vector>

namespace mwlab {

namespace {

struct SymBasis {
  int d;
  std::vector<std::pair<int, int>> idx;
  explicit SymBasis(int dim) : d(dim) {
    for (int i = 0; i < d; ++i)
      for (int j = i; j < d; ++j) idx.emplace_back(i, j);
  }
  int size() const { return static_cast<int>(idx.size()); }
  Mat to_matrix(const Vec& x) const {
    Mat p = Mat::Zero(d, d);
    for (int l = 0; l < size(); ++l) {
      auto [i, j] = idx[l];
      p(i, j) += x(l);
      if (i != j) p(j, i) += x(l);
    }
    return p;
  }
  // tr(X E_l)
  double trace_with(const Mat& x, int l) const {
    auto [i, j] = idx[l];
    return i == j ? x(i, i) : x(i, j) + x(j, i);
  }
  // E_l as a matrix
  Mat basis(int l) const {
    Vec e = Vec::Zero(size());
    e(l) = 1.0;
    return to_matrix(e);
  }
};

}  // namespace

JohnResult john_from_constraints(const Mat& normals, const Vec& h, const JohnOptions& opts) {
  const int d = static_cast<int>(normals.rows());
  const int n = static_cast<int>(normals.cols());
  if (h.size() != n) fail(ErrorKind::DimensionMismatch, "constraint count mismatch");
  double hmax = h.maxCoeff();
  if (!(h.minCoeff() > 1e-12 * hmax)) fail(ErrorKind::DegenerateBody, "body is lower-dimensional");
  {
    Eigen::FullPivLU<Mat> lu(normals * normals.transpose());
    lu.setThreshold(1e-12);
    if (lu.rank() < d) fail(ErrorKind::DegenerateBody, "constraint normals do not span");
  }
  // a_j = n_j / h_j; rescale so that max |a_j| = 1
  Mat a(d, n);
  for (int j = 0; j < n; ++j) a.col(j) = normals.col(j) / h(j);
  double amax = 0.0;
  for (int j = 0; j < n; ++j) amax = std::max(amax, a.col(j).norm());
  a /= amax;

  const SymBasis sb(d);
  const int k = sb.size();
  Mat g(k, n);
  for (int j = 0; j < n; ++j)
    for (int l = 0; l < k; ++l) {
      auto [p, q] = sb.idx[l];
      g(l, j) = p == q ? a(p, j) * a(p, j) : 2.0 * a(p, j) * a(q, j);
    }
  std::vector<Mat> basis(k);
  for (int l = 0; l < k; ++l) basis[l] = sb.basis(l);

  Vec x = Vec::Zero(k);
  for (int l = 0; l < k; ++l)
    if (sb.idx[l].first == sb.idx[l].second) x(l) = 0.5;

  auto objective = [&](const Vec& xv, double mu, bool& ok) {
    ok = false;
    const Mat p = sb.to_matrix(xv);
    Eigen::LLT<Mat> llt(p);
    if (llt.info() != Eigen::Success) return 0.0;
    const Mat l = llt.matrixL();
    double logdet = 0.0;
    for (int i = 0; i < d; ++i) {
      if (!(l(i, i) > 0)) return 0.0;
      logdet += 2.0 * std::log(l(i, i));
    }
    const Vec s = Vec::Ones(n) - g.transpose() * xv;
    double bar = 0.0;
    for (int j = 0; j < n; ++j) {
      if (!(s(j) > 0)) return 0.0;
      bar += std::log(s(j));
    }
    ok = true;
    return -logdet - mu * bar;
  };

  JohnResult res;
  int iters = 0;
  double mu = 1.0;
  while (true) {
    for (int step = 0; step < 200; ++step) {
      const Mat p = sb.to_matrix(x);
      const Mat q = p.llt().solve(Mat::Identity(d, d));
      const Vec s = Vec::Ones(n) - g.transpose() * x;
      Vec grad(k);
      Mat hess(k, k);
      std::vector<Mat> qeq(k);
      for (int l = 0; l < k; ++l) qeq[l] = q * basis[l] * q;
      for (int l = 0; l < k; ++l) {
        grad(l) = -sb.trace_with(q, l);
        for (int m = 0; m < k; ++m) hess(l, m) = sb.trace_with(qeq[l], m);
      }
      Vec w = s.cwiseInverse();
      grad += mu * g * w;
      hess += mu * g * w.cwiseAbs2().asDiagonal() * g.transpose();
      const Vec dx = hess.ldlt().solve(-grad);
      const double dec = -grad.dot(dx);
      ++iters;
      if (iters > opts.max_iterations) fail(ErrorKind::SolverFailure, "John solver hit the iteration cap");
      if (!(dec > opts.gradient_tol * opts.gradient_tol)) break;
      bool ok = false;
      // below the roundoff of the objective the Newton step is taken as is
      if (dec < 1e-13) {
        const Vec xn = x + dx;
        objective(xn, mu, ok);
        if (ok) x = xn;
        break;
      }
      const double f0 = objective(x, mu, ok);
      double t = 1.0;
      bool moved = false;
      while (t > 1e-20) {
        const Vec xn = x + t * dx;
        const double f1 = objective(xn, mu, ok);
        if (ok && f1 <= f0 - 0.25 * t * dec) {
          x = xn;
          moved = true;
          break;
        }
        t *= 0.5;
      }
      if (!moved) break;
    }
    if (mu <= opts.mu_final) break;
    mu *= 0.1;
  }

  // feasibility restored by a uniform shrink
  const double worst = (g.transpose() * x).maxCoeff();
  if (worst > 1.0) x /= worst;
  Mat m = spd_sqrt(SpdMatrix::trusted(sb.to_matrix(x))).mat() / amax;
  double inner = 0.0;
  for (int j = 0; j < n; ++j) inner = std::max(inner, (m * normals.col(j)).norm() / h(j));
  if (inner > 1.0) {
    m /= inner;
    inner = 0.0;
    for (int j = 0; j < n; ++j) inner = std::max(inner, (m * normals.col(j)).norm() / h(j));
  }
  res.m = SpdMatrix(m);
  res.inner_margin = inner;
  res.inner_ok = inner <= 1.0 + 1e-12;
  res.iterations = iters;
  return res;
}

JohnResult john_ellipsoid(const ConvexBody& k, const JohnOptions& opts) {
  if (!k.is_full_dimensional()) fail(ErrorKind::DegenerateBody, "John ellipsoid of a lower-dimensional body");
  const int d = k.dim();
  JohnResult res;
  if (k.form() == ConvexBody::Form::Ellipsoid) {
    res.m = SpdMatrix(k.ellipsoid_matrix());
    res.inner_margin = 1.0;
  } else if (k.form() == ConvexBody::Form::Polygon) {
    std::vector<Vec2> nrm;
    std::vector<double> off;
    polygon_facets(k, nrm, off);
    Mat nm(2, nrm.size());
    Vec h(nrm.size());
    for (size_t i = 0; i < nrm.size(); ++i) {
      nm.col(i) = nrm[i];
      h(i) = off[i];
    }
    res = john_from_constraints(nm, h, opts);
  } else {
    const auto& g = *k.grid();
    Vec h(g.size());
    for (int i = 0; i < g.size(); ++i) h(i) = k.support_values()[i];
    res = john_from_constraints(g.matrix(), h, opts);
  }
  const double sd = std::sqrt(static_cast<double>(d));
  res.outer_margin = set_norm(k, spd_inverse(res.m).mat()) / sd;
  res.inner_ok = res.inner_margin <= 1.0 + 1e-12;
  res.outer_ok = res.outer_margin <= 1.0 + 1e-12;
  res.slack = std::max({0.0, res.inner_margin - 1.0, res.outer_margin - 1.0});
  return res;
}

}  // namespace mwlab
