#include <cmath>

#include "doctest.h"
#include "mwlab/rdf.hpp"
#include "oracles.hpp"

using namespace mwlab;

namespace {

DyadicDomain sym_domain(int level) { return DyadicDomain(1, Vec::Constant(1, -1.0), 2.0, level); }

// sup over dyadic cubes containing x of the average of f
std::vector<double> scalar_dyadic_max(const DyadicDomain& dom, const std::vector<double>& f) {
  std::vector<double> out(f.size(), 0.0);
  for (const CubeId& q : dom.all_cubes()) {
    const auto cells = dom.cells_in(q);
    double s = 0.0;
    for (auto c : cells) s += f[c];
    s /= cells.size();
    for (auto c : cells) out[c] = std::max(out[c], s);
  }
  return out;
}

}  // namespace

TEST_SUITE("rdf_factor") {
  TEST_CASE("geometric series on trivial operators") {
    oracle::Rng r(51);
    const DyadicDomain dom = sym_domain(3);
    const ScalarField g = oracle::random_positive_field(r, dom);
    IterationConfig cfg;
    const ScalarOperator zero = [](const ScalarField& f) { return ScalarField::constant(f.domain, 0.0); };
    const ScalarOperator id = [](const ScalarField& f) { return f; };
    const auto z = iterate(zero, g, cfg);
    for (std::size_t i = 0; i < g.size(); ++i) CHECK(z.sum.values[i] == g.values[i]);
    for (int k : {1, 5, 30}) {
      cfg.k_max = k;
      const auto s = iterate(id, g, cfg);
      for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(s.sum.values[i] - (2 - std::ldexp(1.0, 1 - k)) * g.values[i]) < 1e-14 * g.values[i]);
      CHECK(s.escalations == 0);
    }
    const SetFunction sg = oracle::random_setfunction(r, dom);
    cfg.k_max = 4;
    const auto ss = iterate(SetOperator([](const SetFunction& f) { return f; }), sg, cfg);
    for (std::size_t i = 0; i < sg.size(); ++i) CHECK(hausdorff(ss.sum[i], scale(sg[i], 1.875)) < 1e-12 * (1 + set_norm(sg[i])));
  }

  TEST_CASE("bound escalation and validation") {
    oracle::Rng r(52);
    const DyadicDomain dom = sym_domain(3);
    const ScalarField g = oracle::random_positive_field(r, dom);
    IterationConfig cfg;
    cfg.k_max = 6;
    const ScalarOperator three = [](const ScalarField& f) {
      auto v = f.values;
      for (auto& x : v) x *= 3;
      return ScalarField(f.domain, v);
    };
    const auto s = iterate(three, g, cfg);
    CHECK(s.escalations == 2);
    CHECK(s.bound == 4.0);
    const ScalarOperator big = [](const ScalarField& f) {
      auto v = f.values;
      for (auto& x : v) x *= 100;
      return ScalarField(f.domain, v);
    };
    CHECK_THROWS_AS(iterate(big, g, cfg), Error);
    const ScalarOperator flip = [](const ScalarField& f) {
      auto v = f.values;
      for (auto& x : v) x = 1 / x;
      return ScalarField(f.domain, v);
    };
    try {
      iterate(flip, g, cfg);
      CHECK(false);
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::NonMonotoneOperator);
    }
    cfg.bound = -1;
    CHECK_THROWS_AS(iterate(three, g, cfg), Error);
  }

  TEST_CASE("certified bounds") {
    const DyadicDomain dom = sym_domain(4);
    CHECK(certify_bound(ScalarOperator([](const ScalarField& f) { return f; }), dom, 2.0, 32, 2.0) == 2.0);
    CHECK_THROWS_AS(certify_bound(ScalarOperator([](const ScalarField& f) { return f; }), dom, 2.0, 16, 2.0), Error);
    const MatrixWeight id = MatrixWeight::constant(dom, SpdMatrix::identity(2));
    const SetOperator root = [](const SetFunction& f) { return SetFunction::constant(f.domain(), aumann_average(f, {0, 0})); };
    CHECK(certify_bound(root, id, 2.0, 32, 2.0) <= 2.0 * (1 + 1e-12));
    const SetOperator md = [](const SetFunction& f) { return dyadic_maximal(f); };
    const double b = certify_bound(md, id, 2.0, 32, 2.0);
    // measured maximal ratios of the probes never exceed the strong (2,2) constant 2^{1} * 2
    CHECK(b > 2.0);
    CHECK(b <= 2.0 * 4.0);
  }

  TEST_CASE("maximal operator iteration on set functions") {
    oracle::Rng r(53);
    const DyadicDomain dom = sym_domain(3);
    const MatrixWeight id = MatrixWeight::constant(dom, SpdMatrix::identity(2));
    const SetOperator md = [](const SetFunction& f) { return dyadic_maximal(f); };
    IterationConfig cfg;
    cfg.k_max = 12;
    cfg.bound = certify_bound(md, id, 2.0, 32, 2.0);
    for (int rep = 0; rep < 2; ++rep) {
      const SetFunction g = oracle::random_setfunction(r, dom);
      const auto s = iterate(md, g, cfg);
      const IterationCheck c = check_iteration(md, g, s.sum, s.bound, 2.0);
      CHECK(c.containment <= 1e-12);
      CHECK(c.norm_excess <= s.tail + 1e-12);
      CHECK(c.absorption <= s.tail + 1e-12);
    }
  }

  TEST_CASE("P_W iteration on ellipsoid fields") {
    oracle::Rng r(54);
    const DyadicDomain dom = sym_domain(4);
    for (const auto& nw : weight_suite(dom, 3)) {
      const ScalarOperator pw = op_PW(nw.w);
      // the scalar realization matches the set-valued pipeline
      const ScalarField rr = oracle::random_positive_field(r, dom);
      const ScalarField fast = pw(rr);
      const SetFunction slow = exhaust(nw.w, dyadic_maximal(ellipsoid_field(nw.w.inverse(), &rr)));
      for (std::size_t x = 0; x < rr.size(); ++x) {
        const Mat& e = slow[x].ellipsoid_matrix();
        const Mat expect = nw.w.inverse()[x].mat();
        CHECK(rel_diff(e / fast.values[x], expect) < 2e-3);
      }
      IterationConfig cfg;
      cfg.bound = certify_bound(pw, dom, 2.0, 32, 2.0);
      const auto s = iterate(pw, rr, cfg);
      const IterationCheck c = check_iteration(pw, rr, s.sum, s.bound, 2.0);
      CHECK(c.containment <= 0.0);
      CHECK(c.norm_excess <= s.tail);
      CHECK(c.absorption <= std::ldexp(c.g_norm, -28));
      // absorption makes the ellipsoid field an A1 body field (polygon rounding aside)
      const ApReport k = a1k_constant(ellipsoid_field(nw.w.inverse(), &s.sum));
      CHECK(k.constant <= 2 * s.bound * (1 + 1e-3));
    }
  }

  TEST_CASE("A1 weights and A1 body fields") {
    const DyadicDomain dom = sym_domain(4);
    for (const auto& nw : weight_suite(dom, 3)) {
      const double k = a1k_constant(ellipsoid_field(nw.w)).constant;
      const double a = ap_constant(nw.w, 1.0, "a1").constant;
      CHECK(k <= a * (1 + 1e-9));
      CHECK(a <= 2 * k * (1 + 1e-9));
    }
  }

  TEST_CASE("T1 and T2") {
    oracle::Rng r(55);
    const DyadicDomain dom = sym_domain(4);
    const MatrixWeight id = MatrixWeight::constant(dom, SpdMatrix::identity(2));
    for (double p : {1.5, 2.0, 3.0}) {
      const ScalarField c = ScalarField::constant(dom, 0.7);
      for (double v : op_T1(id, p)(c).values) CHECK(std::abs(v - 0.7) < 1e-14);
      for (double v : op_T2(id, p)(c).values) CHECK(std::abs(v - 0.7) < 1e-14);
      // scalar weight: T1 r = (w M(r^{p'} / w))^{1/p'}, T2 r = (M(r^p w) / w)^{1/p}
      const double pp = p / (p - 1);
      const ScalarField w = oracle::random_positive_field(r, dom);
      const MatrixWeight ws = oracle::embed_scalar(w, 2);
      const ScalarField rr = oracle::random_positive_field(r, dom);
      std::vector<double> a(16), b(16);
      for (int i = 0; i < 16; ++i) {
        a[i] = std::pow(rr.values[i], pp) / w.values[i];
        b[i] = std::pow(rr.values[i], p) * w.values[i];
      }
      const auto ma = scalar_dyadic_max(dom, a), mb = scalar_dyadic_max(dom, b);
      const ScalarField t1 = op_T1(ws, p)(rr), t2 = op_T2(ws, p)(rr);
      for (int i = 0; i < 16; ++i) {
        const double e1 = std::pow(w.values[i] * ma[i], 1 / pp), e2 = std::pow(mb[i] / w.values[i], 1 / p);
        CHECK(std::abs(t1.values[i] - e1) < 1e-12 * e1);
        CHECK(std::abs(t2.values[i] - e2) < 1e-12 * e2);
      }
      // sublinearity on a non-commuting weight
      const MatrixWeight wr = weight_suite(dom, 1)[0].w;
      const ScalarField s = oracle::random_positive_field(r, dom);
      std::vector<double> sum(16);
      for (int i = 0; i < 16; ++i) sum[i] = rr.values[i] + s.values[i];
      for (const ScalarOperator& t : {op_T1(wr, p), op_T2(wr, p)}) {
        const ScalarField ta = t(rr), tb = t(s), ts = t(ScalarField(dom, sum));
        for (int i = 0; i < 16; ++i) CHECK(ts.values[i] <= ta.values[i] + tb.values[i] + 1e-10);
      }
    }
    CHECK_THROWS_AS(op_T1(id, 1.0), Error);
  }

  TEST_CASE("factorization") {
    oracle::Rng r(56);
    const DyadicDomain dom = sym_domain(4);
    FactorizationOptions opts;
    opts.measure_ap = false;
    const Mat a = oracle::random_spd(r, 2);
    const FactorizationResult fc = factorize(MatrixWeight::constant(dom, SpdMatrix(a)), 2.0, opts);
    for (double x : fc.rbar.values) CHECK(std::abs(x / fc.rbar.values[0] - 1) < 1e-12);
    CHECK(std::abs(fc.a1.constant - 1) < 1e-8);
    CHECK(std::abs(fc.ainfty.constant - 1) < 1e-8);
    CHECK(fc.product_residual <= 1e-12);
    // scalar weight, p = 2
    const ScalarField w = oracle::scalar_test_weights(dom)[3];
    const FactorizationResult fs = factorize(oracle::embed_scalar(w, 2), 2.0, opts);
    std::vector<double> w0(16), w1(16);
    for (int i = 0; i < 16; ++i) {
      w0[i] = fs.rbar.values[i] * fs.rbar.values[i] * w.values[i];
      w1[i] = w.values[i] / (fs.rbar.values[i] * fs.rbar.values[i]);
      CHECK(std::abs(std::sqrt(w0[i] * w1[i]) / w.values[i] - 1) < 1e-12);
    }
    CHECK(std::abs(fs.a1.constant / scalar_oracle(ScalarField(dom, w0), 1.0) - 1) < 1e-12);
    CHECK(std::abs(fs.ainfty.constant / scalar_oracle(ScalarField(dom, w1), INFINITY) - 1) < 1e-12);
    CHECK(fs.a1.constant <= std::pow(2 * fs.bound, 2.0) * (1 + 1e-9));
    CHECK(fs.ainfty.constant <= std::pow(2 * fs.bound, 2.0) * (1 + 1e-9));
    for (const auto& nw : weight_suite(dom, 3)) {
      const FactorizationResult f = factorize(nw.w, 1.5, opts);
      CHECK(f.product_residual <= 1e-12);
      CHECK(std::isfinite(f.a1.constant));
      CHECK(std::isfinite(f.ainfty.constant));
      CHECK(f.a1.constant <= std::pow(2 * f.bound, 1.5) * (1 + 1e-9));
      CHECK(f.ainfty.constant <= std::pow(2 * f.bound, 3.0) * (1 + 1e-9));
      const Json j = factorization_to_json(f);
      CHECK(j["rbar"]["values"].size() == 16);
    }
    CHECK_THROWS_AS(factorize(MatrixWeight::constant(dom, SpdMatrix(a)), 1.0, opts), Error);
  }

  TEST_CASE("reverse factorization") {
    oracle::Rng r(57);
    const DyadicDomain dom = sym_domain(3);
    const MatrixWeight w = weight_suite(dom, 1)[0].w;
    const ReverseResult same = reverse_factorize(w, w, 2.0, 2.0, 0.3);
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(same.w[c].mat(), w[c].mat()) < 1e-12);
    CHECK(same.q == doctest::Approx(2.0));
    CHECK(same.c_measured <= 1 + 1e-9);
    std::vector<SpdMatrix> d0, d1;
    for (int i = 0; i < 8; ++i) {
      d0.push_back(SpdMatrix::diagonal(Eigen::Vector2d(r.uniform(0.2, 3), r.uniform(0.2, 3))));
      d1.push_back(SpdMatrix::diagonal(Eigen::Vector2d(r.uniform(0.2, 3), r.uniform(0.2, 3))));
    }
    const MatrixWeight a(dom, d0), b(dom, d1);
    const ReverseResult rr = reverse_factorize(a, b, 1.0, INFINITY, 0.25, "auto");
    CHECK(rr.q == doctest::Approx(4.0 / 3.0));
    for (int i = 0; i < 8; ++i)
      for (int k = 0; k < 2; ++k)
        CHECK(std::abs(rr.w[i](k, k) - std::pow(d0[i](k, k), 0.75) * std::pow(d1[i](k, k), 0.25)) < 1e-12 * rr.w[i](k, k));
    CHECK(std::isfinite(rr.c_measured));
    FactorizationOptions opts;
    opts.measure_ap = false;
    const FactorizationResult f = factorize(w, 3.0, opts);
    const ReverseResult back = reverse_factorize(f.w0, f.w1, 1.0, INFINITY, 2.0 / 3.0, "auto");
    CHECK(back.q == doctest::Approx(3.0));
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(back.w[c].mat(), w[c].mat()) < 1e-10);
    CHECK_THROWS_AS(reverse_factorize(w, w, 2.0, 2.0, 1.0), Error);
  }

  TEST_CASE("duo rescaling") {
    const DyadicDomain dom = sym_domain(3);
    const MatrixWeight w = weight_suite(dom, 1)[0].w;
    oracle::Rng r(58);
    const ScalarField s = oracle::random_positive_field(r, dom);
    const DuoResult same = duo_rescale(w, 2.0, s, 2.0, "up");
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(same.w[c].mat(), w[c].mat()) < 1e-15);
    const DuoResult one = duo_rescale(w, 2.0, ScalarField::constant(dom, 1.0), 4.0, "up");
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(one.w[c].mat(), w[c].mat()) < 1e-15);
    const DuoResult up = duo_rescale(w, 2.0, s, 4.0, "up");
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(up.w[c].mat(), std::sqrt(s.values[c]) * w[c].mat()) < 1e-14);
    const DuoResult down = duo_rescale(w, 3.0, s, 1.0, "down");
    for (std::size_t c = 0; c < w.size(); ++c) CHECK(rel_diff(down.w[c].mat(), s.values[c] * w[c].mat()) < 1e-14);
    CHECK_THROWS_AS(duo_rescale(w, 2.0, s, 1.5, "up"), Error);
    CHECK_THROWS_AS(duo_rescale(w, 2.0, s, 3.0, "down"), Error);
  }
}
