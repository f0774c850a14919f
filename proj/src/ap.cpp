#include "mwlab/ap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mwlab/error.hpp"
#include "mwlab/john.hpp"
#include "mwlab/maximal.hpp"
#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_p(double p) {
  if (!(p >= 1.0)) fail(ErrorKind::ExponentOutOfRange, "exponent must lie in [1, inf]");
}

// cell matrices of a cube, packed row-major, for allocation-free norm evaluation
struct CubeMats {
  int d = 0;
  std::size_t count = 0;
  std::vector<double> data;
};

CubeMats cube_mats(const MatrixWeight& w, CubeId q) {
  w.domain().check_cube(q);
  CubeMats out;
  out.d = w.dim();
  const auto cells = w.domain().cells_in(q);
  out.count = cells.size();
  out.data.reserve(cells.size() * out.d * out.d);
  for (auto c : cells) {
    const Mat& m = w[c].mat();
    for (int i = 0; i < out.d; ++i)
      for (int j = 0; j < out.d; ++j) out.data.push_back(m(i, j));
  }
  return out;
}

double avg_norm_value(const CubeMats& ms, const Vec& v, double p) {
  const int d = ms.d;
  const double* a = ms.data.data();
  double acc = 0.0;
  for (std::size_t k = 0; k < ms.count; ++k, a += d * d) {
    double s = 0.0;
    for (int i = 0; i < d; ++i) {
      double y = 0.0;
      for (int j = 0; j < d; ++j) y += a[i * d + j] * v(j);
      s += y * y;
    }
    if (std::isinf(p))
      acc = std::max(acc, s);
    else if (p == 2.0)
      acc += s;
    else if (p == 1.0)
      acc += std::sqrt(s);
    else
      acc += std::pow(s, 0.5 * p);
  }
  if (std::isinf(p)) return std::sqrt(acc);
  const double mean = acc / static_cast<double>(ms.count);
  if (p == 1.0) return mean;
  if (p == 2.0) return std::sqrt(mean);
  return std::pow(mean, 1.0 / p);
}

double fast_op_norm(const Mat& a) {
  if (a.rows() == 2 && a.cols() == 2) {
    const double p = a.col(0).squaredNorm(), r = a.col(1).squaredNorm(), q = a.col(0).dot(a.col(1));
    return std::sqrt(0.5 * (p + r) + std::hypot(0.5 * (p - r), q));
  }
  return op_norm(a);
}

// values[i] for all cubes in all_cubes() order; max with ties to the smallest id
ApReport pick_max(const DyadicDomain& dom, const std::vector<double>& values, const std::string& variant, double p) {
  const auto cubes = dom.all_cubes();
  ApReport r;
  r.variant = variant;
  r.p = p;
  r.constant = -kInf;
  for (std::size_t i = 0; i < values.size(); ++i)
    if (values[i] > r.constant) {
      r.constant = values[i];
      r.cube = cubes[i];
    }
  return r;
}

// pairwise |A(x) B(y)|_op for all cells
std::vector<double> pair_norms(const MatrixWeight& a, const MatrixWeight& b) {
  const std::size_t n = a.size();
  std::vector<double> out(n * n);
  parallel_for(n, [&](std::size_t x) {
    for (std::size_t y = 0; y < n; ++y) out[x * n + y] = fast_op_norm(a[x].mat() * b[y].mat());
  }, 4);
  return out;
}

}  // namespace

double conjugate_exponent(double p) {
  check_p(p);
  if (p == 1.0) return kInf;
  if (std::isinf(p)) return 1.0;
  return p / (p - 1.0);
}

Json ap_report_to_json(const ApReport& r) {
  Json j;
  j["variant"] = r.variant;
  if (std::isinf(r.p))
    j["p"] = "inf";
  else
    j["p"] = r.p;
  j["constant"] = r.constant;
  j["cube"] = {{"level", r.cube.level}, {"index", r.cube.index}};
  j["slack"] = r.slack;
  j["cube_family"] = "dyadic subcubes of the base cube (lower bound for the sup over all cubes)";
  return j;
}

NormEvaluator avg_norm(const MatrixWeight& w, CubeId q, double p) {
  check_p(p);
  auto ms = cube_mats(w, q);
  if (p == 2.0) {
    Mat s = Mat::Zero(w.dim(), w.dim());
    for (auto c : w.domain().cells_in(q)) s += w[c].mat() * w[c].mat();
    s /= static_cast<double>(ms.count);
    return NormEvaluator::from_matrix(spd_sqrt(SpdMatrix::trusted(s)).mat());
  }
  return NormEvaluator(w.dim(), [ms = std::move(ms), p](const Vec& v) { return avg_norm_value(ms, v, p); }, "average");
}

ReducingResult reducing_operator_checked(const MatrixWeight& w, CubeId q, double p, GridPtr grid) {
  check_p(p);
  const int d = w.dim();
  const auto ms = cube_mats(w, q);
  auto nv = [&](const Vec& v) { return avg_norm_value(ms, v, p); };
  ReducingResult res;
  if (d == 1) {
    const double r = nv(Vec::Ones(1));
    res.r = SpdMatrix(Mat::Constant(1, 1, r));
    return res;
  }
  if (!grid) grid = DirectionGrid::canonical(d);
  // the polar of the unit ball of the averaged norm has support N; its John
  // ellipsoid M B gives |M v| <= N(v) <= sqrt(d) |M v|
  std::vector<Vec> dirs;
  for (int i = 0; i < grid->size(); ++i) dirs.emplace_back(grid->dir(i));
  for (int i = 0; i < d; ++i) {
    dirs.push_back(Vec::Unit(d, i));
    dirs.push_back(-Vec::Unit(d, i));
  }
  const auto probe = DirectionGrid::canonical(d, std::max(4 * grid->size(), DirectionGrid::default_size(d)));
  std::vector<double> pn(probe->size());
  for (int i = 0; i < probe->size(); ++i) pn[i] = nv(probe->dir(i));
  Mat m;
  // cutting planes: the grid polygon can stick out of the polar body between
  // grid directions, so the worst directions are added until the ellipsoid fits
  for (int round = 0; round < 4; ++round) {
    Mat normals(d, dirs.size());
    Vec h(dirs.size());
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      normals.col(i) = dirs[i];
      h(i) = nv(dirs[i]);
    }
    if (!(h.minCoeff() > 0)) fail(ErrorKind::SolverFailure, "averaged norm vanishes in some direction");
    m = john_from_constraints(normals, h).m.mat();
    std::vector<double> ratio(probe->size());
    for (int i = 0; i < probe->size(); ++i) ratio[i] = (m * probe->dir(i)).norm() / pn[i];
    std::vector<int> bad;
    for (int i = 0; i < probe->size(); ++i) {
      if (ratio[i] <= 1.0 + 1e-9) continue;
      if (d == 2) {
        const int n = probe->size();
        if (ratio[i] >= ratio[(i + 1) % n] && ratio[i] >= ratio[(i + n - 1) % n]) bad.push_back(i);
      } else {
        bad.push_back(i);
      }
    }
    const SphereMax worst = maximize_on_sphere([&](const Vec& u) { return (m * u).norm() / nv(u); }, *probe, 8);
    if (worst.value <= 1.0 + 1e-9) break;
    std::stable_sort(bad.begin(), bad.end(), [&](int x, int y) { return ratio[x] > ratio[y]; });
    if (bad.size() > 16) bad.resize(16);
    for (int i : bad) dirs.emplace_back(probe->dir(i));
    dirs.push_back(worst.arg);
  }
  const SphereMax over = maximize_on_sphere([&](const Vec& u) { return (m * u).norm() / nv(u); }, *probe, 8);
  if (over.value > 1.0) m /= over.value;
  const SphereMax under = maximize_on_sphere([&](const Vec& u) { return nv(u) / (m * u).norm(); }, *probe, 8);
  const SphereMax low = maximize_on_sphere([&](const Vec& u) { return (m * u).norm() / nv(u); }, *probe, 8);
  res.r = SpdMatrix::trusted(m);
  res.lower = 1.0 / low.value;
  res.upper = under.value;
  return res;
}

SpdMatrix reducing_operator(const MatrixWeight& w, CubeId q, double p, GridPtr grid) {
  return reducing_operator_checked(w, q, p, std::move(grid)).r;
}

ApReport ap_constant(const MatrixWeight& w, double p, const std::string& variant, GridPtr grid) {
  check_p(p);
  const DyadicDomain& dom = w.domain();
  const auto cubes = dom.all_cubes();
  const double pp = conjugate_exponent(p);
  std::vector<double> vals(cubes.size());
  if (variant == "reducing") {
    const MatrixWeight wi = w.inverse();
    std::vector<double> slack(cubes.size());
    const double sd = std::sqrt(static_cast<double>(w.dim()));
    parallel_for(cubes.size(), [&](std::size_t i) {
      const ReducingResult a = reducing_operator_checked(w, cubes[i], p, grid);
      const ReducingResult b = reducing_operator_checked(wi, cubes[i], pp, grid);
      vals[i] = fast_op_norm(b.r.mat() * a.r.mat());
      slack[i] = std::max({0.0, 1.0 - a.lower, 1.0 - b.lower, a.upper / sd - 1.0, b.upper / sd - 1.0});
    });
    ApReport r = pick_max(dom, vals, variant, p);
    for (double s : slack) r.slack = std::max(r.slack, s);
    return r;
  }
  const std::size_t n = w.size();
  if (variant == "roudenko") {
    if (!(p > 1.0 && std::isfinite(p))) fail(ErrorKind::ExponentOutOfRange, "roudenko variant needs 1 < p < inf");
    const auto o = pair_norms(w, w.inverse());
    parallel_for(cubes.size(), [&](std::size_t i) {
      const auto cells = dom.cells_in(cubes[i]);
      const double m = static_cast<double>(cells.size());
      double outer = 0.0;
      for (auto x : cells) {
        double inner = 0.0;
        for (auto y : cells) inner += std::pow(o[x * n + y], pp);
        outer += std::pow(inner / m, p / pp);
      }
      vals[i] = std::pow(outer / m, 1.0 / p);
    });
    return pick_max(dom, vals, variant, p);
  }
  if (variant == "a1" || variant == "ainfty") {
    if (variant == "a1" && p != 1.0) fail(ErrorKind::ExponentOutOfRange, "a1 variant needs p = 1");
    if (variant == "ainfty" && !std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "ainfty variant needs p = inf");
    const auto o = variant == "a1" ? pair_norms(w.inverse(), w) : pair_norms(w, w.inverse());
    parallel_for(cubes.size(), [&](std::size_t i) {
      const auto cells = dom.cells_in(cubes[i]);
      double best = 0.0;
      for (auto x : cells) {
        double s = 0.0;
        for (auto y : cells) s += o[x * n + y];
        best = std::max(best, s / static_cast<double>(cells.size()));
      }
      vals[i] = best;
    });
    return pick_max(dom, vals, variant, p);
  }
  fail(ErrorKind::InvalidArgument, "unknown Ap variant '" + variant + "'");
}

ApReport a1k_constant(const SetFunction& f) {
  for (std::size_t c = 0; c < f.size(); ++c)
    if (!f[c].is_full_dimensional()) fail(ErrorKind::DegenerateBody, "cell " + std::to_string(c) + " is not full-dimensional");
  const DyadicDomain& dom = f.domain();
  const auto avg = cube_averages(f);
  const auto cubes = dom.all_cubes();
  std::vector<double> vals(cubes.size(), 0.0);
  parallel_for(cubes.size(), [&](std::size_t i) {
    const CubeId q = cubes[i];
    double best = 0.0;
    for (auto x : dom.cells_in(q)) best = std::max(best, contains_scaled(avg[q.level][q.index], f[x], 1.0).margin);
    vals[i] = best;
  });
  return pick_max(dom, vals, "a1k", 1.0);
}

double duality_check(const MatrixWeight& w, double p, GridPtr grid) {
  const double a = ap_constant(w, p, "reducing", grid).constant;
  const double b = ap_constant(w.inverse(), conjugate_exponent(p), "reducing", grid).constant;
  return a / b;
}

ApReport scalar_oracle_report(const ScalarField& w, double p) {
  check_p(p);
  for (double x : w.values)
    if (!(x > 0) || !std::isfinite(x)) fail(ErrorKind::InvalidArgument, "scalar weight must be positive and finite");
  const double pp = conjugate_exponent(p);
  const DyadicDomain& dom = w.domain;
  const auto cubes = dom.all_cubes();
  std::vector<double> vals(cubes.size());
  auto mean_pow = [&](const std::vector<std::int64_t>& cells, double e, bool invert) {
    if (std::isinf(e)) {
      double m = 0.0;
      for (auto c : cells) m = std::max(m, invert ? 1.0 / w.values[c] : w.values[c]);
      return m;
    }
    double s = 0.0;
    for (auto c : cells) s += std::pow(invert ? 1.0 / w.values[c] : w.values[c], e);
    return std::pow(s / static_cast<double>(cells.size()), 1.0 / e);
  };
  for (std::size_t i = 0; i < cubes.size(); ++i) {
    const auto cells = dom.cells_in(cubes[i]);
    vals[i] = mean_pow(cells, p, false) * mean_pow(cells, pp, true);
  }
  return pick_max(dom, vals, "scalar-oracle", p);
}

double scalar_oracle(const ScalarField& w, double p) { return scalar_oracle_report(w, p).constant; }

}  // namespace mwlab
