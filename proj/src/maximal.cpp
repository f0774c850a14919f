#include "mwlab/maximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>

#include "mwlab/error.hpp"
#include "mwlab/parallel.hpp"

namespace mwlab {

namespace {

ConvexBody average_of(const std::vector<const ConvexBody*>& ks) {
  std::vector<ConvexBody> list;
  list.reserve(ks.size());
  for (const auto* k : ks) list.push_back(*k);
  return weighted_sum(list, std::vector<double>(list.size(), 1.0 / static_cast<double>(list.size())));
}

}  // namespace

ConvexBody aumann_average(const SetFunction& f, CubeId q) {
  const auto cells = f.domain().cells_in(q);
  std::vector<ConvexBody> list;
  list.reserve(cells.size());
  for (auto c : cells) list.push_back(f[c]);
  return weighted_sum(list, std::vector<double>(list.size(), 1.0 / static_cast<double>(list.size())));
}

std::vector<std::vector<ConvexBody>> cube_averages(const SetFunction& f) {
  const DyadicDomain& dom = f.domain();
  const int J = dom.level();
  std::vector<std::vector<ConvexBody>> out(J + 1);
  out[J] = f.cells();
  for (int k = J - 1; k >= 0; --k) {
    const std::int64_t m = dom.cubes_at(k);
    out[k].resize(m);
    parallel_for(m, [&](std::size_t i) {
      std::vector<const ConvexBody*> kids;
      for (const CubeId& c : dom.children({k, static_cast<std::int64_t>(i)})) kids.push_back(&out[k + 1][c.index]);
      out[k][i] = average_of(kids);
    });
  }
  return out;
}

SetFunction dyadic_maximal(const SetFunction& f, const MaximalOptions& opts) {
  if (opts.grid_shift && opts.grid_shift->cwiseAbs().maxCoeff() > 0) return shifted_maximal(f, *opts.grid_shift);
  const DyadicDomain& dom = f.domain();
  const int J = dom.level();
  const auto avg = cube_averages(f);
  std::vector<ConvexBody> hull = opts.include_base_cube ? avg[0] : std::vector<ConvexBody>{};
  if (!opts.include_base_cube && J == 0) fail(ErrorKind::InvalidArgument, "no cubes left without the base cube");
  for (int k = 1; k <= J; ++k) {
    const std::int64_t m = dom.cubes_at(k);
    std::vector<ConvexBody> next(m);
    parallel_for(m, [&](std::size_t i) {
      const CubeId q{k, static_cast<std::int64_t>(i)};
      if (k == 1 && !opts.include_base_cube) {
        next[i] = avg[k][i];
      } else {
        next[i] = hull_union({hull[dom.parent(q).index], avg[k][i]});
      }
    });
    hull.swap(next);
  }
  return SetFunction(dom, std::move(hull));
}

std::vector<Vec> grid_shifts(int n) {
  const double vals[3] = {0.0, 1.0 / 3.0, -1.0 / 3.0};
  std::vector<Vec> out;
  if (n == 1) {
    for (double a : vals) out.push_back(Vec::Constant(1, a));
  } else {
    for (double a : vals)
      for (double b : vals) {
        Vec t(2);
        t << a, b;
        out.push_back(t);
      }
  }
  return out;
}

SetFunction shifted_maximal(const SetFunction& f, const Vec& tau) {
  const DyadicDomain& dom = f.domain();
  const int n = dom.n();
  if (tau.size() != n) fail(ErrorKind::DimensionMismatch, "grid shift must have n entries");
  for (int i = 0; i < n; ++i) {
    const double t = std::abs(tau(i));
    if (t != 0.0 && std::abs(t - 1.0 / 3.0) > 1e-15) fail(ErrorKind::InvalidArgument, "grid shift entries must be 0 or +-1/3");
  }
  const std::int64_t cells = dom.num_cells();
  std::vector<Vec> unit(cells);
  for (std::int64_t c = 0; c < cells; ++c) unit[c] = (dom.cell_midpoint(c) - dom.origin()) / dom.size();
  std::vector<ConvexBody> best(cells);
  for (int j = -2; j <= dom.level(); ++j) {
    const double scale = std::ldexp(1.0, j);
    const double sign = (std::abs(j) % 2 == 0) ? 1.0 : -1.0;
    std::map<std::vector<std::int64_t>, std::vector<std::int64_t>> groups;
    for (std::int64_t c = 0; c < cells; ++c) {
      std::vector<std::int64_t> key(n);
      for (int i = 0; i < n; ++i) key[i] = static_cast<std::int64_t>(std::floor(unit[c](i) * scale - sign * tau(i)));
      groups[key].push_back(c);
    }
    std::vector<const std::vector<std::int64_t>*> list;
    for (const auto& g : groups) list.push_back(&g.second);
    std::vector<ConvexBody> avgs(list.size());
    parallel_for(list.size(), [&](std::size_t g) {
      std::vector<const ConvexBody*> ks;
      for (auto c : *list[g]) ks.push_back(&f[c]);
      avgs[g] = average_of(ks);
    });
    parallel_for(list.size(), [&](std::size_t g) {
      for (auto c : *list[g]) best[c] = (j == -2) ? avgs[g] : hull_union({best[c], avgs[g]});
    });
  }
  return SetFunction(dom, std::move(best));
}

SetFunction combined_bound(const SetFunction& f) {
  std::vector<SetFunction> parts;
  for (const Vec& t : grid_shifts(f.domain().n())) parts.push_back(shifted_maximal(f, t));
  std::vector<ConvexBody> out(f.size());
  parallel_for(f.size(), [&](std::size_t c) {
    std::vector<ConvexBody> ks;
    for (const auto& p : parts) ks.push_back(p[c]);
    out[c] = minkowski_sum(ks);
  });
  return SetFunction(f.domain(), std::move(out));
}

IntervalOracle interval_maximal(const SetFunction& f, double step, double extension, GridPtr grid) {
  const DyadicDomain& dom = f.domain();
  if (dom.n() != 1) fail(ErrorKind::InvalidArgument, "the interval oracle needs n = 1");
  const int d = f.dim();
  if (!grid) grid = DirectionGrid::canonical(d);
  if (grid->dim() != d) fail(ErrorKind::DimensionMismatch, "direction grid has the wrong dimension");
  const double per_cell = dom.cell_edge() / step;
  const std::int64_t s = std::llround(per_cell);
  if (s < 1 || std::abs(per_cell - static_cast<double>(s)) > 1e-9 * per_cell)
    fail(ErrorKind::InvalidArgument, "interval step must divide the cell edge");
  if (extension < 0) fail(ErrorKind::InvalidArgument, "extension must be nonnegative");
  const std::int64_t cells = dom.num_cells();
  const std::int64_t N = cells * s;
  const int nd = grid->size();
  // support of every cell body at every direction
  std::vector<std::vector<double>> h(cells, std::vector<double>(nd));
  parallel_for(cells, [&](std::size_t c) {
    for (int i = 0; i < nd; ++i) h[c][i] = support(f[c], Vec(grid->dir(i)));
  });
  // endpoint positions (step units) with optional virtual endpoints
  std::vector<double> pos;
  const double ext = extension / step;
  if (extension > 0) pos.push_back(-ext);
  for (std::int64_t k = 0; k <= N; ++k) pos.push_back(static_cast<double>(k));
  if (extension > 0) pos.push_back(static_cast<double>(N) + ext);
  const std::size_t P = pos.size();
  const std::size_t first_real = extension > 0 ? 1 : 0;
  std::vector<std::vector<double>> out(cells, std::vector<double>(nd, 0.0));
  parallel_for(nd, [&](std::size_t i) {
    std::vector<double> prefix(P);
    double acc = 0.0;
    prefix[first_real] = 0.0;
    if (extension > 0) prefix[0] = -ext * h[0][i];
    for (std::int64_t k = 0; k < N; ++k) {
      acc += h[k / s][i];
      prefix[first_real + k + 1] = acc;
    }
    if (extension > 0) prefix[P - 1] = acc + ext * h[cells - 1][i];
    // best[c] = max over a <= mid_c < b of the average support
    std::vector<double> best(cells, 0.0);
    std::vector<double> run(cells);
    for (std::size_t a = 0; a + 1 < P; ++a) {
      // cells whose midpoint lies at or after pos[a]
      std::fill(run.begin(), run.end(), -1.0);
      double m = -1.0;
      std::int64_t c = cells - 1;
      for (std::size_t b = P - 1; b > a; --b) {
        const double v = (prefix[b] - prefix[a]) / (pos[b] - pos[a]);
        m = std::max(m, v);
        // record for cells whose midpoint lies in [pos[b-1], pos[b]) once b-1 is passed
        while (c >= 0 && (static_cast<double>(c) + 0.5) * static_cast<double>(s) >= pos[b - 1]) {
          if ((static_cast<double>(c) + 0.5) * static_cast<double>(s) < pos[b] && (static_cast<double>(c) + 0.5) * static_cast<double>(s) >= pos[a])
            run[c] = std::max(run[c], m);
          --c;
        }
      }
      for (std::int64_t cc = 0; cc < cells; ++cc) best[cc] = std::max(best[cc], run[cc]);
    }
    for (std::int64_t cc = 0; cc < cells; ++cc) out[cc][i] = best[cc];
  });
  IntervalOracle r;
  r.grid = grid;
  r.support = out;
  std::vector<ConvexBody> bodies;
  for (std::int64_t c = 0; c < cells; ++c) {
    if (d == 1) bodies.push_back(ConvexBody::ellipsoid(Mat::Constant(1, 1, out[c][0])));
    else bodies.push_back(ConvexBody::support_sampled(grid, out[c]));
  }
  r.bodies = SetFunction(dom, std::move(bodies));
  return r;
}

ScalarField christ_goldberg(const MatrixWeight& w, const VectorField& f) {
  check_same_domain(w.domain(), f.domain);
  if (w.dim() != f.d) fail(ErrorKind::DimensionMismatch, "weight and field dimensions differ");
  const DyadicDomain& dom = w.domain();
  const std::int64_t cells = dom.num_cells();
  std::vector<Vec> g(cells);
  for (std::int64_t y = 0; y < cells; ++y) g[y] = spd_inverse(w[y]).mat() * f.values[y];
  std::vector<double> out(cells, 0.0);
  parallel_for(cells, [&](std::size_t x) {
    const Mat& wx = w[x].mat();
    double best = 0.0;
    for (int k = 0; k <= dom.level(); ++k) {
      const auto ys = dom.cells_in(dom.ancestor(static_cast<std::int64_t>(x), k));
      double s = 0.0;
      for (auto y : ys) s += (wx * g[y]).norm();
      best = std::max(best, s / static_cast<double>(ys.size()));
    }
    out[x] = best;
  });
  return ScalarField(dom, std::move(out));
}

SetFunction exhaust(const MatrixWeight& w, const SetFunction& h) {
  check_same_domain(w.domain(), h.domain());
  if (w.dim() != h.dim()) fail(ErrorKind::DimensionMismatch, "weight and set function dimensions differ");
  std::vector<ConvexBody> out(h.size());
  parallel_for(h.size(), [&](std::size_t c) {
    const double r = set_norm(h[c], w[c].mat());
    out[c] = ConvexBody::ellipsoid(r * spd_inverse(w[c]).mat());
  });
  return SetFunction(h.domain(), std::move(out));
}

namespace {

double combine_p(const std::vector<double>& vals, double measure, double p) {
  if (std::isinf(p)) {
    double m = 0.0;
    for (double v : vals) m = std::max(m, v);
    return m;
  }
  if (p < 1) fail(ErrorKind::InvalidArgument, "exponent must be at least 1");
  double s = 0.0;
  for (double v : vals) s += std::pow(v, p);
  return std::pow(s * measure, 1.0 / p);
}

}  // namespace

double lpk_norm(const SetFunction& f, const MatrixWeight* w, double p) {
  if (w) {
    check_same_domain(w->domain(), f.domain());
    if (w->dim() != f.dim()) fail(ErrorKind::DimensionMismatch, "weight and set function dimensions differ");
  }
  std::vector<double> vals(f.size());
  parallel_for(f.size(), [&](std::size_t c) { vals[c] = w ? set_norm(f[c], (*w)[c].mat()) : set_norm(f[c]); });
  return combine_p(vals, f.domain().cell_measure(), p);
}

double lp_norm(const ScalarField& r, double p) {
  std::vector<double> vals(r.values.size());
  for (std::size_t i = 0; i < vals.size(); ++i) vals[i] = std::abs(r.values[i]);
  return combine_p(vals, r.domain.cell_measure(), p);
}

double level_measure(const SetFunction& mf, double lambda) {
  if (!(lambda > 0)) fail(ErrorKind::InvalidArgument, "level must be positive");
  double m = 0.0;
  for (const auto& k : mf.cells())
    if (set_norm(k) > lambda) m += mf.domain().cell_measure();
  return m;
}

double weak_level_measure(const SetFunction& f, double lambda) { return level_measure(dyadic_maximal(f), lambda); }

double dp_metric(const SetFunction& f, const SetFunction& g, const MatrixWeight* w, double p) {
  check_same_domain(f.domain(), g.domain());
  if (f.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "set functions have different dimensions");
  if (w) check_same_domain(w->domain(), f.domain());
  std::vector<double> vals(f.size());
  parallel_for(f.size(), [&](std::size_t c) {
    vals[c] = w ? hausdorff(f[c], g[c], (*w)[c].mat()) : hausdorff(f[c], g[c]);
  });
  return combine_p(vals, f.domain().cell_measure(), p);
}

namespace {

constexpr int kTableDirs = 512;
// grid maxima below this fraction of the best grid value are not refined
constexpr double kPolishFloor = 0.97;

struct QuadForm {
  double a, b, c;  // |A w|^2 = a w0^2 + 2 b w0 w1 + c w1^2
};

double golden_max(const std::function<double(double)>& f, double lo, double hi, double& arg, double tol = 1e-13) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 80 && hi - lo > tol; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = f(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = f(x1);
    }
  }
  if (f1 >= f2) {
    arg = x1;
    return f1;
  }
  arg = x2;
  return f2;
}

ScalarField ellipsoid_maximal_norm_2d(const ScalarField& r, const MatrixWeight& a, const MatrixWeight& b) {
  const DyadicDomain& dom = r.domain;
  const std::int64_t cells = dom.num_cells();
  const int levels = dom.level();
  std::vector<QuadForm> q(cells);
  for (std::int64_t y = 0; y < cells; ++y) {
    const Mat s = a[y].mat() * a[y].mat();
    q[y] = {s(0, 0), 0.5 * (s(0, 1) + s(1, 0)), s(1, 1)};
  }
  std::vector<double> cs(kTableDirs), sn(kTableDirs);
  for (int j = 0; j < kTableDirs; ++j) {
    cs[j] = std::cos(std::numbers::pi * j / kTableDirs);
    sn[j] = std::sin(std::numbers::pi * j / kTableDirs);
  }
  // tab[k][i * kTableDirs + j] = avg over cube (k, i) of r(y) |A(y) e_j|
  std::vector<std::vector<double>> tab(levels + 1);
  tab[levels].resize(cells * kTableDirs);
  parallel_for(cells, [&](std::size_t y) {
    const QuadForm& f = q[y];
    double* row = &tab[levels][y * kTableDirs];
    for (int j = 0; j < kTableDirs; ++j)
      row[j] = r.values[y] * std::sqrt(std::max(0.0, f.a * cs[j] * cs[j] + 2.0 * f.b * cs[j] * sn[j] + f.c * sn[j] * sn[j]));
  });
  for (int k = levels - 1; k >= 0; --k) {
    tab[k].assign(dom.cubes_at(k) * kTableDirs, 0.0);
    for (std::int64_t i = 0; i < dom.cubes_at(k); ++i) {
      const auto kids = dom.children({k, i});
      double* row = &tab[k][i * kTableDirs];
      for (const CubeId& c : kids) {
        const double* src = &tab[k + 1][c.index * kTableDirs];
        for (int j = 0; j < kTableDirs; ++j) row[j] += src[j];
      }
      for (int j = 0; j < kTableDirs; ++j) row[j] /= static_cast<double>(kids.size());
    }
  }
  std::vector<double> out(cells, 0.0);
  parallel_for(cells, [&](std::size_t x) {
    // sup_u phi(B u) = sup over directions e of phi(e) / |B^{-1} e|
    const Mat bi = b[x].mat().inverse();
    std::vector<double> inv(kTableDirs);
    for (int j = 0; j < kTableDirs; ++j)
      inv[j] = 1.0 / std::hypot(bi(0, 0) * cs[j] + bi(0, 1) * sn[j], bi(1, 0) * cs[j] + bi(1, 1) * sn[j]);
    auto exact = [&](const std::vector<std::int64_t>& ys, double th) {
      const double c = std::cos(th), s = std::sin(th);
      double sum = 0.0;
      for (auto y : ys) {
        const QuadForm& f = q[y];
        sum += r.values[y] * std::sqrt(std::max(0.0, f.a * c * c + 2.0 * f.b * c * s + f.c * s * s));
      }
      return sum / static_cast<double>(ys.size()) / std::hypot(bi(0, 0) * c + bi(0, 1) * s, bi(1, 0) * c + bi(1, 1) * s);
    };
    struct Cand {
      CubeId cube;
      int j;
      double v;
    };
    std::vector<Cand> cands;
    std::vector<double> scan(kTableDirs);
    double best = 0.0;
    for (int lv = 0; lv <= levels; ++lv) {
      const CubeId cube = dom.ancestor(static_cast<std::int64_t>(x), lv);
      const double* row = &tab[lv][cube.index * kTableDirs];
      for (int j = 0; j < kTableDirs; ++j) scan[j] = row[j] * inv[j];
      Cand top[3] = {{cube, -1, -1.0}, {cube, -1, -1.0}, {cube, -1, -1.0}};
      for (int j = 0; j < kTableDirs; ++j) {
        const double prev = scan[(j + kTableDirs - 1) % kTableDirs], next = scan[(j + 1) % kTableDirs];
        best = std::max(best, scan[j]);
        if (scan[j] < prev || scan[j] < next) continue;
        Cand c{cube, j, scan[j]};
        for (auto& t : top)
          if (c.v > t.v) std::swap(c, t);
      }
      for (const auto& t : top)
        if (t.j >= 0) cands.push_back(t);
    }
    const double grid_best = best;
    const double dt = std::numbers::pi / kTableDirs;
    for (const Cand& c : cands) {
      if (c.v < kPolishFloor * grid_best) continue;
      const double th = dt * c.j;
      double arg;
      const auto ys = dom.cells_in(c.cube);
      best = std::max(best, golden_max([&](double t) { return exact(ys, t); }, th - dt, th + dt, arg, 1e-10));
    }
    out[x] = best;
  });
  return ScalarField(dom, std::move(out));
}

}  // namespace

ScalarField ellipsoid_maximal_norm(const ScalarField& r, const MatrixWeight& a, const MatrixWeight& b) {
  check_same_domain(r.domain, a.domain());
  check_same_domain(r.domain, b.domain());
  if (a.dim() != b.dim()) fail(ErrorKind::DimensionMismatch, "weights have different dimensions");
  for (double v : r.values)
    if (v < 0) fail(ErrorKind::InvalidArgument, "radius field must be nonnegative");
  const int d = a.dim();
  if (d == 2) return ellipsoid_maximal_norm_2d(r, a, b);
  const DyadicDomain& dom = r.domain;
  const std::int64_t cells = dom.num_cells();
  std::vector<double> out(cells, 0.0);
  if (d == 1) {
    // |A_y B_x u| = A_y B_x for the single unit direction
    std::vector<double> ra(cells);
    for (std::int64_t y = 0; y < cells; ++y) ra[y] = r.values[y] * a[y](0, 0);
    auto sums = pyramid(dom, ra, [](const std::vector<const double*>& k) {
      double s = 0.0;
      for (auto* v : k) s += *v;
      return s / static_cast<double>(k.size());
    });
    for (std::int64_t x = 0; x < cells; ++x) {
      double best = 0.0;
      for (int lv = 0; lv <= dom.level(); ++lv) best = std::max(best, sums[lv][dom.ancestor(x, lv).index]);
      out[x] = best * b[x](0, 0);
    }
    return ScalarField(dom, std::move(out));
  }
  const auto grid = DirectionGrid::canonical(d);
  parallel_for(cells, [&](std::size_t x) {
    const Mat& bx = b[x].mat();
    double best = 0.0;
    for (int lv = 0; lv <= dom.level(); ++lv) {
      const auto ys = dom.cells_in(dom.ancestor(static_cast<std::int64_t>(x), lv));
      const auto m = maximize_on_sphere(
          [&](const Vec& u) {
            const Vec w = bx * u;
            double s = 0.0;
            for (auto y : ys) s += r.values[y] * (a[y].mat() * w).norm();
            return s / static_cast<double>(ys.size());
          },
          *grid);
      best = std::max(best, m.value);
    }
    out[x] = best;
  });
  return ScalarField(dom, std::move(out));
}

}  // namespace mwlab
