#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mwlab/maximal.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}

// lifted field f = (1,1) on [0,1), (-1,1) on [-1,0)
SetFunction sign_flip(int level) {
  const DyadicDomain dom(1, Vec::Constant(1, -1.0), 2.0, level);
  std::vector<Vec> f;
  for (std::int64_t c = 0; c < dom.num_cells(); ++c) f.push_back(dom.cell_midpoint(c)(0) >= 0 ? v2(1, 1) : v2(-1, 1));
  return lift_vector_field(VectorField(dom, 2, f));
}

// vertex brute force: all sign patterns of a sum of segments
std::vector<Vec2> zonotope_points(const std::vector<Vec2>& gens, double w) {
  std::vector<Vec2> out;
  const std::size_t m = gens.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << m); ++mask) {
    Vec2 s = Vec2::Zero();
    for (std::size_t i = 0; i < m; ++i) s += ((mask >> i) & 1 ? 1.0 : -1.0) * w * gens[i];
    out.push_back(s);
  }
  return out;
}

SetFunction scaled_field(const SetFunction& h, const std::vector<double>& s) {
  std::vector<ConvexBody> out;
  for (std::size_t c = 0; c < h.size(); ++c) out.push_back(scale(h[c], s[c]));
  return SetFunction(h.domain(), out);
}

}  // namespace

TEST_SUITE("maximal") {
  TEST_CASE("aumann average") {
    const DyadicDomain dom = DyadicDomain::unit(1, 3);
    oracle::Rng r(21);
    const ConvexBody k = ConvexBody::polygon(oracle::random_symmetric_points(r, 3));
    const SetFunction c = SetFunction::constant(dom, k);
    CHECK(approx_equal(aumann_average(c, {0, 0}), k, 1e-14));
    CHECK(approx_equal(aumann_average(c, {2, 3}), k, 1e-14));
    const SetFunction f = sign_flip(3);
    const ConvexBody sq = aumann_average(f, {0, 0});
    CHECK(approx_equal(sq, ConvexBody::polygon({Vec2(1, 0), Vec2(0, 1)}), 1e-12));
    const SetFunction half(DyadicDomain::unit(1, 1), {ConvexBody::point(2), k});
    CHECK(approx_equal(aumann_average(half, {0, 0}), scale(k, 0.5), 1e-14));
    CHECK_THROWS_AS(aumann_average(f, {4, 0}), Error);
    // the pyramid agrees with direct averages
    const SetFunction g = oracle::random_setfunction(r, DyadicDomain::unit(1, 4));
    const auto pyr = cube_averages(g);
    for (int lv = 0; lv <= 4; ++lv)
      for (std::int64_t i = 0; i < g.domain().cubes_at(lv); ++i)
        CHECK(hausdorff(pyr[lv][i], aumann_average(g, {lv, i})) < 1e-12);
  }

  TEST_CASE("dyadic maximal on constant and sign-flip fields") {
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    oracle::Rng r(22);
    const ConvexBody k = ConvexBody::polygon(oracle::random_symmetric_points(r, 4));
    const SetFunction m = dyadic_maximal(SetFunction::constant(dom, k));
    for (const auto& b : m.cells()) CHECK(approx_equal(b, k, 1e-12));
    const SetFunction f = sign_flip(3);
    const SetFunction mf = dyadic_maximal(f);
    const DyadicDomain& d3 = f.domain();
    for (std::int64_t c = 0; c < d3.num_cells(); ++c) {
      std::vector<Vec2> pts;
      for (const CubeId& q : d3.all_cubes()) {
        const auto cells = d3.cells_in(q);
        if (std::find(cells.begin(), cells.end(), c) == cells.end()) continue;
        std::vector<Vec2> gens;
        for (auto y : cells) gens.push_back(d3.cell_midpoint(y)(0) >= 0 ? Vec2(1, 1) : Vec2(-1, 1));
        const auto z = zonotope_points(gens, 1.0 / static_cast<double>(cells.size()));
        pts.insert(pts.end(), z.begin(), z.end());
      }
      const ConvexBody brute = ConvexBody::polygon(oracle::jarvis_hull(pts));
      CHECK(hausdorff(mf[c], brute) < 1e-12);
      if (d3.cell_midpoint(c)(0) > 0) {
        CHECK(mf[c].vertices().size() == 6);
        CHECK(approx_equal(mf[c], ConvexBody::polygon({Vec2(1, 1), Vec2(1, 0), Vec2(0, 1)}), 1e-12));
      }
    }
  }

  TEST_CASE("dyadic maximal contains the field and is sublinear") {
    oracle::Rng r(23);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    const SetFunction f = oracle::random_setfunction(r, dom), g = oracle::random_setfunction(r, dom);
    const SetFunction mf = dyadic_maximal(f), mg = dyadic_maximal(g);
    std::vector<ConvexBody> sum;
    for (std::size_t c = 0; c < f.size(); ++c) sum.push_back(minkowski_sum(f[c], g[c]));
    const SetFunction ms = dyadic_maximal(SetFunction(dom, sum));
    const auto grid = DirectionGrid::canonical(2);
    for (std::size_t c = 0; c < f.size(); ++c)
      for (int i = 0; i < grid->size(); ++i) {
        const Vec u = grid->dir(i);
        CHECK(support(f[c], u) <= support(mf[c], u) + 1e-12);
        CHECK(support(ms[c], u) <= support(mf[c], u) + support(mg[c], u) + 1e-12);
      }
  }

  TEST_CASE("power sublinearity") {
    oracle::Rng r(24);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    const SetFunction h = oracle::random_setfunction(r, dom);
    for (double p : {1.5, 2.0, 3.0}) {
      std::vector<double> f(dom.num_cells()), g(dom.num_cells()), fg(dom.num_cells());
      for (std::size_t c = 0; c < f.size(); ++c) {
        const double a = r.uniform(), b = r.uniform();
        f[c] = std::pow(a, p);
        g[c] = std::pow(b, p);
        fg[c] = std::pow(a + b, p);
      }
      const SetFunction mf = dyadic_maximal(scaled_field(h, f)), mg = dyadic_maximal(scaled_field(h, g)),
                        mfg = dyadic_maximal(scaled_field(h, fg));
      for (std::size_t c = 0; c < f.size(); ++c)
        CHECK(std::pow(set_norm(mfg[c]), 1 / p) <= std::pow(set_norm(mf[c]), 1 / p) + std::pow(set_norm(mg[c]), 1 / p) + 1e-12);
    }
  }

  TEST_CASE("aumann hoelder and minkowski per cube") {
    oracle::Rng r(25);
    const DyadicDomain dom = DyadicDomain::unit(1, 3);
    const SetFunction h = oracle::random_setfunction(r, dom);
    for (double p : {1.5, 2.0, 3.0}) {
      const double pp = p / (p - 1);
      std::vector<double> f(dom.num_cells()), g(dom.num_cells());
      for (std::size_t c = 0; c < f.size(); ++c) {
        f[c] = r.uniform();
        g[c] = r.uniform();
      }
      auto field = [&](auto fn) {
        std::vector<double> s(f.size());
        for (std::size_t c = 0; c < s.size(); ++c) s[c] = fn(c);
        return scaled_field(h, s);
      };
      const SetFunction fg = field([&](std::size_t c) { return f[c] * g[c]; });
      const SetFunction fp = field([&](std::size_t c) { return std::pow(f[c], p); });
      const SetFunction gp = field([&](std::size_t c) { return std::pow(g[c], pp); });
      const SetFunction gq = field([&](std::size_t c) { return std::pow(g[c], p); });
      const SetFunction sp = field([&](std::size_t c) { return std::pow(f[c] + g[c], p); });
      for (const CubeId& q : dom.all_cubes()) {
        const double lhs = set_norm(aumann_average(fg, q));
        const double rhs = std::pow(set_norm(aumann_average(fp, q)), 1 / p) * std::pow(set_norm(aumann_average(gp, q)), 1 / pp);
        CHECK(lhs <= rhs + 1e-10);
        const double ml = std::pow(set_norm(aumann_average(sp, q)), 1 / p);
        const double mr = std::pow(set_norm(aumann_average(fp, q)), 1 / p) + std::pow(set_norm(aumann_average(gq, q)), 1 / p);
        CHECK(ml <= mr + 1e-10);
      }
    }
  }

  TEST_CASE("averaging contraction") {
    oracle::Rng r(26);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    for (int rep = 0; rep < 3; ++rep) {
      const SetFunction f = oracle::random_setfunction(r, dom);
      for (const CubeId& q : dom.all_cubes()) {
        const ConvexBody a = aumann_average(f, q);
        std::vector<ConvexBody> cells(f.size(), ConvexBody::point(2));
        for (auto c : dom.cells_in(q)) cells[c] = a;
        const SetFunction af(dom, cells);
        for (double p : {1.0, 1.5, 2.0, 3.0, double(INFINITY)}) CHECK(lpk_norm(af, nullptr, p) <= lpk_norm(f, nullptr, p) * (1 + 1e-12));
      }
    }
  }

  TEST_CASE("interval oracle") {
    const SetFunction f = sign_flip(3);
    auto sq_support = [](const Vec& u) { return std::abs(u(0)) + std::abs(u(1)); };
    double prev = INFINITY;
    for (int r : {6, 7, 8}) {
      const double step = std::ldexp(1.0, -r);
      const IntervalOracle o = interval_maximal(f, step, 1.0 / step);
      double err = 0.0;
      for (std::int64_t c = 4; c < 8; ++c)
        for (int i = 0; i < o.grid->size(); ++i) err = std::max(err, std::abs(o.support[c][i] - sq_support(o.grid->dir(i))));
      CHECK(err < prev);
      prev = err;
    }
    CHECK(prev < 1e-2);
    // without extension, the oracle contains the dyadic maximal function
    const IntervalOracle loc = interval_maximal(f, 0.25, 0.0);
    const SetFunction mf = dyadic_maximal(f);
    for (std::int64_t c = 0; c < 8; ++c)
      for (int i = 0; i < loc.grid->size(); ++i) CHECK(support(mf[c], Vec(loc.grid->dir(i))) <= loc.support[c][i] + 1e-12);
    // the oracle at the cell resolution agrees with a direct enumeration of all cell-aligned intervals
    oracle::Rng rng(27);
    const SetFunction g = oracle::random_setfunction(rng, DyadicDomain::unit(1, 3));
    const IntervalOracle o = interval_maximal(g, 0.125, 0.0, DirectionGrid::canonical(2, 16));
    for (std::int64_t c = 0; c < 8; ++c)
      for (int i = 0; i < 16; ++i) {
        double best = 0.0;
        for (int a = 0; a <= c; ++a)
          for (int b = static_cast<int>(c) + 1; b <= 8; ++b) {
            double s = 0.0;
            for (int y = a; y < b; ++y) s += support(g[y], Vec(o.grid->dir(i)));
            best = std::max(best, s / (b - a));
          }
        CHECK(std::abs(o.support[c][i] - best) < 1e-13);
      }
  }

  TEST_CASE("shifted grids") {
    oracle::Rng r(28);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    const SetFunction f = oracle::random_setfunction(r, dom);
    const SetFunction m0 = shifted_maximal(f, Vec::Zero(1)), md = dyadic_maximal(f);
    for (std::size_t c = 0; c < f.size(); ++c) CHECK(hausdorff(m0[c], md[c]) < 1e-12);
    const ConvexBody k = ConvexBody::polygon(oracle::random_symmetric_points(r, 3));
    for (const Vec& t : grid_shifts(1)) {
      const SetFunction mk = shifted_maximal(SetFunction::constant(dom, k), t);
      for (const auto& b : mk.cells()) CHECK(hausdorff(b, k) < 1e-12);
    }
    CHECK_THROWS_AS(shifted_maximal(f, Vec::Constant(1, 0.25)), Error);
    const SetFunction s = sign_flip(4);
    const SetFunction cb = combined_bound(s);
    const IntervalOracle o = interval_maximal(s, s.domain().cell_edge() / 4, 0.0);
    double worst = 0.0;
    for (std::size_t c = 0; c < s.size(); ++c) worst = std::max(worst, contains_scaled(o.bodies[c], cb[c], 3.0).margin);
    MESSAGE("sign-flip field: oracle inside C * sum of shifted maximals with C = " << worst);
    CHECK(worst <= 3.0);
  }

  TEST_CASE("christ-goldberg") {
    oracle::Rng r(29);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    const Vec v = v2(0.3, -1.2);
    const ScalarField id = christ_goldberg(MatrixWeight::constant(dom, SpdMatrix::identity(2)), VectorField(dom, 2, std::vector<Vec>(16, v)));
    for (double x : id.values) CHECK(std::abs(x - v.norm()) < 1e-15);
    // scalar weights act through the ratio w(x)/w(y)
    std::vector<Vec> fv;
    for (int i = 0; i < 16; ++i) fv.push_back(v2(r.normal(), r.normal()));
    const VectorField f(dom, 2, fv);
    const MatrixWeight ws = gen_power_weight(dom, 2, 0.4, Vec::Zero(1));
    const ScalarField cg = christ_goldberg(ws, f);
    const ScalarField cgi = christ_goldberg(MatrixWeight::constant(dom, SpdMatrix::identity(2)), f);
    for (int i = 0; i < 16; ++i) {
      double best = 0.0, bw = 0.0;
      for (const CubeId& q : dom.all_cubes()) {
        const auto cells = dom.cells_in(q);
        if (std::find(cells.begin(), cells.end(), i) == cells.end()) continue;
        double s = 0.0;
        double sw = 0.0;
        for (auto y : cells) {
          s += fv[y].norm();
          sw += ws[i].mat()(0, 0) / ws[y].mat()(0, 0) * fv[y].norm();
        }
        best = std::max(best, s / cells.size());
        bw = std::max(bw, sw / cells.size());
      }
      CHECK(std::abs(cgi.values[i] - best) < 1e-14);
      CHECK(std::abs(cg.values[i] - bw) < 1e-12 * bw);
    }
    // random matrix weight against enumeration of every cube
    const MatrixWeight w = weight_suite(dom, 1)[0].w;
    const ScalarField cw = christ_goldberg(w, f);
    for (int i = 0; i < 16; ++i) {
      double best = 0.0;
      for (const CubeId& q : dom.all_cubes()) {
        const auto cells = dom.cells_in(q);
        if (std::find(cells.begin(), cells.end(), i) == cells.end()) continue;
        double s = 0.0;
        for (auto y : cells) s += (w[i].mat() * w[y].mat().inverse() * fv[y]).norm();
        best = std::max(best, s / cells.size());
      }
      CHECK(std::abs(cw.values[i] - best) < 1e-12 * best);
    }
  }

  TEST_CASE("exhausting operator") {
    oracle::Rng r(30);
    const DyadicDomain dom = DyadicDomain::unit(1, 3);
    const MatrixWeight w = weight_suite(dom, 2)[1].w;
    const SetFunction e = ellipsoid_field(w.inverse());
    const SetFunction ne = exhaust(w, e);
    for (std::size_t c = 0; c < e.size(); ++c) CHECK(rel_diff(ne[c].ellipsoid_matrix(), e[c].ellipsoid_matrix()) < 1e-12);
    const SetFunction sq = SetFunction::constant(dom, ConvexBody::polygon({Vec2(1, 1), Vec2(-1, 1)}));
    const SetFunction nsq = exhaust(MatrixWeight::constant(dom, SpdMatrix::identity(2)), sq);
    for (const auto& b : nsq.cells()) CHECK(rel_diff(b.ellipsoid_matrix(), std::sqrt(2.0) * Mat::Identity(2, 2)) < 1e-15);
    const SetFunction h = oracle::random_setfunction(r, dom);
    const SetFunction nh = exhaust(w, h);
    for (double p : {1.0, 2.0, 3.0, double(INFINITY)}) CHECK(std::abs(lpk_norm(nh, &w, p) - lpk_norm(h, &w, p)) <= 1e-12 * lpk_norm(h, &w, p));
    const auto grid = DirectionGrid::canonical(2);
    for (std::size_t c = 0; c < h.size(); ++c)
      for (int i = 0; i < grid->size(); i += 5) CHECK(support(h[c], Vec(grid->dir(i))) <= support(nh[c], Vec(grid->dir(i))) * (1 + 1e-12));
  }

  TEST_CASE("lpk norm and level measure") {
    const DyadicDomain dom = DyadicDomain::unit(1, 3);
    const SetFunction ball = SetFunction::constant(dom, ConvexBody::ball(2));
    for (double p : {1.0, 1.5, 2.0, double(INFINITY)}) CHECK(std::abs(lpk_norm(ball, nullptr, p) - 1.0) < 1e-15);
    oracle::Rng r(31);
    const ScalarField s = oracle::random_positive_field(r, dom);
    const SetFunction sb = ellipsoid_field(MatrixWeight::constant(dom, SpdMatrix::identity(2)), &s);
    double mx = 0.0, l2 = 0.0;
    for (double x : s.values) {
      mx = std::max(mx, x);
      l2 += x * x / 8;
    }
    CHECK(lpk_norm(sb, nullptr, INFINITY) == mx);
    CHECK(std::abs(lpk_norm(sb, nullptr, 2.0) - std::sqrt(l2)) < 1e-14);
    CHECK(std::abs(lp_norm(s, 2.0) - std::sqrt(l2)) < 1e-14);
    CHECK(weak_level_measure(ball, 1.5) == 0.0);
    CHECK(weak_level_measure(ball, 1e-9) == 1.0);
    // single spike of norm 1 in cell 5 of 8: the level set is the smallest
    // dyadic cube around the spike whose average still exceeds lambda
    std::vector<ConvexBody> spike(8, ConvexBody::point(2));
    spike[5] = ConvexBody::ball(2);
    const SetFunction sp(dom, spike);
    CHECK(weak_level_measure(sp, 0.9) == 0.125);
    CHECK(weak_level_measure(sp, 0.3) == 0.25);
    CHECK(weak_level_measure(sp, 0.2) == 0.5);
    CHECK(weak_level_measure(sp, 0.1) == 1.0);
  }

  TEST_CASE("d_p metric") {
    oracle::Rng r(32);
    const DyadicDomain dom = DyadicDomain::unit(1, 3);
    const MatrixWeight w = weight_suite(dom, 1)[0].w;
    const SetFunction f = oracle::random_setfunction(r, dom), g = oracle::random_setfunction(r, dom), h = oracle::random_setfunction(r, dom);
    const SetFunction zero = SetFunction::constant(dom, ConvexBody::point(2));
    for (double p : {1.0, 2.0, 3.0}) {
      CHECK(dp_metric(f, f, &w, p) == 0.0);
      CHECK(std::abs(dp_metric(f, zero, &w, p) - lpk_norm(f, &w, p)) < 1e-12);
      CHECK(dp_metric(f, g, &w, p) == dp_metric(g, f, &w, p));
      CHECK(dp_metric(f, h, &w, p) <= dp_metric(f, g, &w, p) + dp_metric(g, h, &w, p) + 1e-12);
      std::vector<ConvexBody> fh, gh;
      for (std::size_t c = 0; c < f.size(); ++c) {
        fh.push_back(minkowski_sum(f[c], h[c]));
        gh.push_back(minkowski_sum(g[c], h[c]));
      }
      // ellipses turn into their outer 256-gons when added to polygons
      CHECK(std::abs(dp_metric(SetFunction(dom, fh), SetFunction(dom, gh), &w, p) - dp_metric(f, g, &w, p)) < 1e-3 * dp_metric(f, g, &w, p));
    }
  }

  TEST_CASE("ellipsoid maximal norm") {
    oracle::Rng r(33);
    const DyadicDomain dom = DyadicDomain::unit(1, 4);
    const MatrixWeight w = weight_suite(dom, 3)[2].w;
    const MatrixWeight wi = w.inverse();
    const ScalarField rr = oracle::random_positive_field(r, dom);
    const ScalarField t = ellipsoid_maximal_norm(rr, wi, w);
    // reference: brute force over every cube and a dense direction sweep
    for (std::int64_t x = 0; x < dom.num_cells(); ++x) {
      double best = 0.0;
      for (const CubeId& q : dom.all_cubes()) {
        const auto cells = dom.cells_in(q);
        if (std::find(cells.begin(), cells.end(), x) == cells.end()) continue;
        for (int k = 0; k < 20000; ++k) {
          const double th = std::numbers::pi * k / 20000;
          const Vec u = v2(std::cos(th), std::sin(th));
          double s = 0.0;
          for (auto y : cells) s += rr.values[y] * (wi[y].mat() * w[x].mat() * u).norm();
          best = std::max(best, s / cells.size());
        }
      }
      CHECK(t.values[x] >= best * (1 - 1e-12));
      CHECK(t.values[x] <= best * (1 + 1e-6));
    }
    // the same quantity from the polygon maximal operator
    const SetFunction mf = dyadic_maximal(ellipsoid_field(wi, &rr));
    for (std::int64_t x = 0; x < dom.num_cells(); ++x) CHECK(std::abs(set_norm(mf[x], w[x].mat()) / t.values[x] - 1) < 1e-3);
  }
}
