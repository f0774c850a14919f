#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mwlab/john.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

ConvexBody square() { return ConvexBody::polygon({Vec2(1, 1), Vec2(-1, 1)}); }
ConvexBody diamond() { return ConvexBody::polygon({Vec2(1, 0), Vec2(0, 1)}); }
Vec v2(double x, double y) {
  Vec v(2);
  v << x, y;
  return v;
}
ConvexBody random_polygon(oracle::Rng& r, int half) { return ConvexBody::polygon(oracle::random_symmetric_points(r, half)); }

}  // namespace

TEST_SUITE("convex_kernel") {
  TEST_CASE("direction grid") {
    for (int d = 1; d <= 4; ++d) {
      const auto g = DirectionGrid::canonical(d);
      CHECK(g->size() == DirectionGrid::default_size(d));
      for (int i = 0; i < g->size(); ++i) {
        CHECK(std::abs(g->dir(i).norm() - 1.0) < 1e-14);
        CHECK((g->dir(i) + g->dir(g->opposite(i))).norm() == 0.0);
      }
    }
    CHECK(DirectionGrid::canonical(3)->size() == 1026);
    CHECK(DirectionGrid::parse(2, "canonical-64")->size() == 64);
    CHECK_THROWS_AS(DirectionGrid::parse(2, "fancy-64"), Error);
  }

  TEST_CASE("support") {
    CHECK(std::abs(support(ConvexBody::ball(2), v2(3, 4)) - 5.0) < 1e-15);
    CHECK(support(square(), v2(1, 0)) == 1.0);
    Mat m(2, 2);
    m << 2, 0, 0, 1;
    CHECK(std::abs(support(ConvexBody::ellipsoid(m), v2(1, 1) / std::sqrt(2.0)) - std::sqrt(2.5)) < 1e-15);
  }

  TEST_CASE("gauge") {
    CHECK(std::abs(gauge(ConvexBody::ball(2), v2(0, 2)) - 2.0) < 1e-15);
    Mat m(2, 2);
    m << 2, 0, 0, 1;
    CHECK(std::abs(gauge(ConvexBody::ellipsoid(m), v2(2, 0)) - 1.0) < 1e-15);
    CHECK(std::abs(gauge(square(), v2(1, 1)) - 1.0) < 1e-15);
    CHECK(gauge(square(), v2(0, 0)) == 0.0);
    CHECK_THROWS_AS(gauge(ConvexBody::segment(v2(1, 1)), v2(1, 0)), Error);
    CHECK(std::abs(gauge(ConvexBody::segment(v2(1, 1)), v2(2, 2)) - 2.0) < 1e-14);
  }

  TEST_CASE("canonical polygon form") {
    const ConvexBody a = ConvexBody::polygon({Vec2(1, 1), Vec2(-1, 1), Vec2(0, 0.5), Vec2(1, 0)});
    CHECK(a.vertices().size() == 4);
    const ConvexBody b = ConvexBody::polygon({Vec2(-1, -1), Vec2(1, -1)});
    REQUIRE(a.vertices().size() == b.vertices().size());
    for (size_t i = 0; i < a.vertices().size(); ++i) CHECK(a.vertices()[i] == b.vertices()[i]);
    // counterclockwise, symmetric
    const auto& v = a.vertices();
    for (size_t i = 0; i < v.size(); ++i) {
      CHECK(oracle::cross(v[(i + 1) % v.size()] - v[i], v[(i + 2) % v.size()] - v[(i + 1) % v.size()]) > 0);
      CHECK(v[(i + v.size() / 2) % v.size()] == -v[i]);
    }
  }

  TEST_CASE("minkowski sum") {
    oracle::Rng r(11);
    const ConvexBody k = random_polygon(r, 4);
    CHECK(approx_equal(minkowski_sum(k, ConvexBody::point(2)), k, 0.0));
    const ConvexBody bb = minkowski_sum(ConvexBody::ball(2), ConvexBody::ball(2));
    REQUIRE(bb.form() == ConvexBody::Form::Ellipsoid);
    CHECK(rel_diff(bb.ellipsoid_matrix(), 2.0 * Mat::Identity(2, 2)) < 1e-15);
    // two diagonal segments: brute-force hull of the vertex sums
    const ConvexBody s = minkowski_sum(ConvexBody::segment(v2(1, 1)), ConvexBody::segment(v2(-1, 1)));
    std::vector<Vec2> sums;
    for (double a : {1.0, -1.0})
      for (double b : {1.0, -1.0}) sums.push_back(a * Vec2(1, 1) + b * Vec2(-1, 1));
    const auto hull = oracle::jarvis_hull(sums);
    CHECK(hull.size() == 4);
    CHECK(s.vertices().size() == 4);
    for (const auto& h : hull) {
      bool found = false;
      for (const auto& v : s.vertices()) found = found || (v - h).norm() < 1e-14;
      CHECK(found);
    }
    // support additivity on grid directions, random polygons
    const auto g = DirectionGrid::canonical(2);
    for (int rep = 0; rep < 20; ++rep) {
      const ConvexBody p = random_polygon(r, 2 + rep % 6), q = random_polygon(r, 2 + rep % 5);
      const ConvexBody pq = minkowski_sum(p, q);
      for (int i = 0; i < g->size(); ++i) {
        const Vec u = g->dir(i);
        CHECK(std::abs(support(pq, u) - support(p, u) - support(q, u)) < 1e-12);
      }
      // vertex-sum brute force
      std::vector<Vec2> all;
      for (const auto& a : p.vertices())
        for (const auto& b : q.vertices()) all.push_back(a + b);
      CHECK(oracle::jarvis_hull(all).size() == pq.vertices().size());
    }
    // mixed ellipsoid + polygon: sum of grid supports
    const ConvexBody e = ConvexBody::ellipsoid(oracle::random_spd(r, 2));
    const ConvexBody ep = minkowski_sum(e, square());
    for (int i = 0; i < g->size(); ++i) {
      const Vec u = g->dir(i);
      CHECK(std::abs(support(ep, u) - support(e, u) - support(square(), u)) < 1e-12);
    }
    CHECK_THROWS_AS(minkowski_sum(square(), ConvexBody::ball(3)), Error);
  }

  TEST_CASE("scale") {
    CHECK(approx_equal(scale(square(), 1.0), square(), 0.0));
    const ConvexBody b = scale(ConvexBody::ball(2), -2.0);
    CHECK(rel_diff(b.ellipsoid_matrix(), 2.0 * Mat::Identity(2, 2)) == 0.0);
    CHECK(approx_equal(scale(square(), 0.5), ConvexBody::polygon({Vec2(0.5, 0.5), Vec2(-0.5, 0.5)}), 1e-15));
  }

  TEST_CASE("hull_union") {
    CHECK(approx_equal(hull_union({square()}), square(), 0.0));
    const ConvexBody h = hull_union({ConvexBody::segment(v2(1, 1)), ConvexBody::segment(v2(-1, 1))});
    CHECK(approx_equal(h, square(), 1e-15));
    const ConvexBody n = hull_union({ConvexBody::ball(2), ConvexBody::ball(2, 2.0)});
    CHECK(rel_diff(n.ellipsoid_matrix(), 2.0 * Mat::Identity(2, 2)) == 0.0);
    oracle::Rng r(12);
    const auto g = DirectionGrid::canonical(2);
    for (int rep = 0; rep < 10; ++rep) {
      const ConvexBody p = random_polygon(r, 3), q = random_polygon(r, 4);
      const ConvexBody u = hull_union({p, q});
      for (int i = 0; i < g->size(); i += 7) {
        const Vec d = g->dir(i);
        CHECK(std::abs(support(u, d) - std::max(support(p, d), support(q, d))) < 1e-14);
      }
    }
  }

  TEST_CASE("polar") {
    const ConvexBody pb = polar(ConvexBody::ball(2));
    CHECK(rel_diff(pb.ellipsoid_matrix(), Mat::Identity(2, 2)) < 1e-15);
    oracle::Rng r(13);
    const Mat m = oracle::random_spd(r, 3);
    CHECK(rel_diff(polar(ConvexBody::ellipsoid(m)).ellipsoid_matrix(), m.inverse()) < 1e-12);
    CHECK(approx_equal(polar(square()), diamond(), 1e-15));
    // brute force from the definition: sup over sampled boundary of the square
    for (int k = 0; k < 64; ++k) {
      const double th = 2.0 * std::numbers::pi * k / 64;
      const Vec w = v2(std::cos(th), std::sin(th));
      double brute = 0.0;
      for (int j = 0; j <= 400; ++j) {
        const double s = -1.0 + 2.0 * j / 400;
        for (Vec2 b : {Vec2(1, s), Vec2(-1, s), Vec2(s, 1), Vec2(s, -1)}) brute = std::max(brute, w.dot(Vec(b)));
      }
      CHECK(std::abs(gauge(polar(square()), w) - brute) < 1e-12);
    }
    for (int rep = 0; rep < 20; ++rep) {
      const ConvexBody p = random_polygon(r, 3 + rep % 5);
      CHECK(approx_equal(polar(polar(p)), p, 1e-10));
      for (int k = 0; k < 10; ++k) {
        const Vec v = Vec::Random(2);
        CHECK(std::abs(gauge(p, v) - support(polar(p), v)) < 1e-10);
      }
    }
    CHECK_THROWS_AS(polar(ConvexBody::segment(v2(1, 0))), Error);
  }

  TEST_CASE("support sampled bodies") {
    const auto g2 = DirectionGrid::canonical(2, 8);
    std::vector<double> h(8, 1.0);
    const ConvexBody oct = ConvexBody::support_sampled(g2, h);
    CHECK(oct.form() == ConvexBody::Form::Polygon);
    CHECK(oct.vertices().size() == 8);
    // consistent values: a redundant constraint is lowered to the attained support
    std::vector<double> h2 = {1, 5, 1, 5, 1, 5, 1, 5};
    const ConvexBody sq = ConvexBody::support_sampled(g2, h2);
    CHECK(approx_equal(sq, square(), 1e-14));
    const auto g3 = DirectionGrid::canonical(3);
    std::vector<double> h3(g3->size());
    for (int i = 0; i < g3->size(); ++i) h3[i] = g3->dir(i).cwiseAbs().sum();  // cube [-1,1]^3
    const ConvexBody cube = ConvexBody::support_sampled(g3, h3);
    for (int i = 0; i < g3->size(); i += 50) CHECK(std::abs(cube.support_values()[i] - h3[i]) < 1e-10);
    std::vector<double> h4 = h3;
    h4[0] = h4[g3->opposite(0)] = 7.0;
    const ConvexBody cube2 = ConvexBody::support_sampled(g3, h4);
    // neighbouring facets still bound the first axis just above 1
    CHECK(cube2.support_values()[0] > 1.0);
    CHECK(cube2.support_values()[0] < 1.01);
    for (int i = 0; i < g3->size(); ++i) CHECK(cube2.support_values()[i] >= cube.support_values()[i] - 1e-12);
    Vec v(3);
    v << 0.3, -0.2, 0.9;
    CHECK(std::abs(gauge(cube, v) - support(polar(cube), v)) < 1e-10);
    CHECK(std::abs(set_norm(cube) - std::sqrt(3.0)) < 1e-6);
  }

  TEST_CASE("hausdorff") {
    oracle::Rng r(14);
    const ConvexBody k = random_polygon(r, 5);
    CHECK(hausdorff(k, k) == 0.0);
    CHECK(std::abs(hausdorff(ConvexBody::ball(2), ConvexBody::ball(2, 2.0)) - 1.0) < 1e-12);
    for (int rep = 0; rep < 10; ++rep) {
      const ConvexBody a = random_polygon(r, 3 + rep % 3), b = random_polygon(r, 4);
      CHECK(std::abs(hausdorff(a, b) - oracle::dense_support_sup_diff(a, b)) < 1e-6);
      const ConvexBody c = random_polygon(r, 3);
      CHECK(hausdorff(a, b) == hausdorff(b, a));
      CHECK(hausdorff(a, c) <= hausdorff(a, b) + hausdorff(b, c) + 1e-12);
      const Mat w = oracle::random_spd(r, 2);
    }
    const Mat w = oracle::random_spd(r, 2);
    const ConvexBody a = random_polygon(r, 4), b = random_polygon(r, 3);
    // metric |W.| equals the Euclidean distance of the images
    std::vector<Vec2> wa, wb;
    for (const auto& v : a.vertices()) wa.push_back(Eigen::Matrix2d(w) * v);
    for (const auto& v : b.vertices()) wb.push_back(Eigen::Matrix2d(w) * v);
    CHECK(std::abs(hausdorff(a, b, w) - hausdorff(ConvexBody::polygon(wa), ConvexBody::polygon(wb))) < 1e-12);
  }

  TEST_CASE("set_norm") {
    CHECK(set_norm(ConvexBody::ball(2), Mat::Identity(2, 2)) == doctest::Approx(1.0).epsilon(1e-15));
    oracle::Rng r(15);
    const Mat m = oracle::random_spd(r, 3), w = oracle::random_spd(r, 3);
    Eigen::JacobiSVD<Mat> svd(w * m);
    CHECK(std::abs(set_norm(ConvexBody::ellipsoid(m), w) - svd.singularValues()(0)) < 1e-12 * svd.singularValues()(0));
    Mat d(2, 2);
    d << 2, 0, 0, 1;
    CHECK(std::abs(set_norm(square(), d) - std::sqrt(5.0)) < 1e-15);
  }

  TEST_CASE("contains_scaled") {
    const auto self = contains_scaled(square(), square(), 1.0);
    CHECK(self.ok);
    CHECK(std::abs(self.margin - 1.0) < 1e-15);
    const auto big = contains_scaled(ConvexBody::ball(2, 2.0), ConvexBody::ball(2), 1.0);
    CHECK_FALSE(big.ok);
    CHECK(std::abs(big.margin - 2.0) < 1e-15);
    const auto sq = contains_scaled(square(), ConvexBody::ball(2), std::sqrt(2.0));
    CHECK(sq.ok);
    CHECK(std::abs(sq.margin - std::sqrt(2.0)) < 1e-15);
    CHECK_THROWS_AS(contains_scaled(square(), ConvexBody::segment(v2(1, 0)), 1.0), Error);
  }

  TEST_CASE("john ellipsoid") {
    oracle::Rng r(16);
    const Mat m0 = oracle::random_spd(r, 2);
    const JohnResult e = john_ellipsoid(ConvexBody::ellipsoid(m0));
    CHECK(rel_diff(e.m.mat(), m0) < 1e-9);
    const JohnResult s = john_ellipsoid(square());
    CHECK(rel_diff(s.m.mat(), Mat::Identity(2, 2)) < 1e-9);
    CHECK(std::abs(s.outer_margin - 1.0) < 1e-9);
    for (int rep = 0; rep < 10; ++rep) {
      const ConvexBody hex = random_polygon(r, 3);
      const JohnResult j = john_ellipsoid(hex);
      CHECK(j.inner_ok);
      CHECK(j.outer_margin <= 1.0 + 1e-7);
      std::vector<Vec2> n;
      std::vector<double> off;
      polygon_facets(hex, n, off);
      CHECK(std::abs(std::log(j.m.mat().determinant()) - oracle::john_logdet_oracle(n, off)) < 1e-4);
      CHECK(contains_scaled(ConvexBody::ellipsoid(j.m.mat()), hex, 1.0).margin <= 1.0 + 1e-7);
      CHECK(contains_scaled(hex, ConvexBody::ellipsoid(j.m.mat()), std::sqrt(2.0)).margin <= std::sqrt(2.0) + 1e-7);
    }
    // regular polygon circumscribed about a disc of radius 3
    std::vector<double> h(256, 3.0);
    const JohnResult c = john_ellipsoid(ConvexBody::support_sampled(DirectionGrid::canonical(2), h));
    CHECK(rel_diff(c.m.mat(), 3.0 * Mat::Identity(2, 2)) < 1e-10);
    CHECK_THROWS_AS(john_ellipsoid(ConvexBody::segment(v2(1, 2))), Error);
    // d = 3 support-sampled cube
    const auto g3 = DirectionGrid::canonical(3);
    std::vector<double> h3(g3->size());
    for (int i = 0; i < g3->size(); ++i) h3[i] = g3->dir(i).cwiseAbs().sum();
    const JohnResult c3 = john_ellipsoid(ConvexBody::support_exact(g3, h3));
    CHECK(rel_diff(c3.m.mat(), Mat::Identity(3, 3)) < 1e-8);
    CHECK(c3.inner_ok);
  }
}
