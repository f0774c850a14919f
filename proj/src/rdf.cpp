#include "mwlab/rdf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "mwlab/error.hpp"
#include "mwlab/parallel.hpp"
#include "mwlab/random.hpp"

namespace mwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void check_config(const IterationConfig& cfg) {
  if (!(cfg.bound > 0) || !std::isfinite(cfg.bound)) fail(ErrorKind::InvalidArgument, "bound must be positive and finite");
  if (cfg.k_max < 1) fail(ErrorKind::InvalidArgument, "k_max must be at least 1");
  if (!(cfg.safety > 1)) fail(ErrorKind::InvalidArgument, "safety factor must exceed 1");
}

ScalarField add(const ScalarField& a, const ScalarField& b) {
  check_same_domain(a.domain, b.domain);
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] + b.values[i];
  return ScalarField(a.domain, std::move(v));
}

ScalarField mul(const ScalarField& a, double c) {
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = c * a.values[i];
  return ScalarField(a.domain, std::move(v));
}

SetFunction add(const SetFunction& a, const SetFunction& b) {
  check_same_domain(a.domain(), b.domain());
  std::vector<ConvexBody> v(a.size());
  parallel_for(v.size(), [&](std::size_t i) { v[i] = minkowski_sum(a[i], b[i]); });
  return SetFunction(a.domain(), std::move(v));
}

SetFunction mul(const SetFunction& a, double c) {
  std::vector<ConvexBody> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = scale(a[i], c);
  return SetFunction(a.domain(), std::move(v));
}

// directions at which support differences are measured
std::vector<Vec> probe_dirs(const ConvexBody& a, const ConvexBody& b) {
  const int d = a.dim();
  const auto grid = DirectionGrid::canonical(d, d == 2 ? 4096 : 0);
  std::vector<Vec> out;
  for (int i = 0; i < grid->size(); ++i) out.emplace_back(grid->dir(i));
  if (d == 2)
    for (const ConvexBody* k : {&a, &b})
      if (k->form() == ConvexBody::Form::Polygon && k->vertices().size() >= 4) {
        std::vector<Vec2> nrm;
        std::vector<double> off;
        polygon_facets(*k, nrm, off);
        for (const auto& n : nrm) out.emplace_back(n);
      }
  return out;
}

// sup_u (h_a(u) - c h_b(u))_+
double support_excess(const ConvexBody& a, const ConvexBody& b, double c) {
  double worst = 0.0;
  for (const Vec& u : probe_dirs(a, b)) worst = std::max(worst, support(a, u) - c * support(b, u));
  return worst;
}

ConvexBody random_body(Rng& rng, int d) {
  const double kind = rng.uniform();
  if (d == 2 && kind < 0.6) {
    std::vector<Vec2> pts;
    const int m = 1 + static_cast<int>(rng.uniform() * 5);
    for (int i = 0; i < m; ++i) pts.emplace_back(rng.uniform(-1, 1), rng.uniform(-1, 1));
    pts.emplace_back(rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0));
    pts.emplace_back(-rng.uniform(0.05, 1.0), rng.uniform(0.05, 1.0));
    return ConvexBody::polygon(pts);
  }
  Mat a(d, d);
  for (int i = 0; i < d; ++i)
    for (int j = 0; j < d; ++j) a(i, j) = rng.uniform(-1, 1);
  return ConvexBody::ellipsoid(spd_sqrt(SpdMatrix::trusted(a * a.transpose() + 0.05 * Mat::Identity(d, d))).mat());
}

// probe family: lognormal-ish fields, single spikes, steps and constants
std::vector<double> random_profile(Rng& rng, std::int64_t cells, int which) {
  std::vector<double> v(cells, 0.0);
  switch (which % 4) {
    case 0:
      for (auto& x : v) x = std::exp(2.0 * (rng.uniform() - 0.5) * 2.0);
      break;
    case 1:
      v[static_cast<std::size_t>(rng.uniform() * static_cast<double>(cells)) % cells] = 1.0;
      break;
    case 2: {
      const auto cut = static_cast<std::int64_t>(rng.uniform() * static_cast<double>(cells));
      const double a = rng.uniform(0.1, 1.0), b = rng.uniform(0.1, 1.0);
      for (std::int64_t i = 0; i < cells; ++i) v[i] = i < cut ? a : b;
      break;
    }
    default:
      for (auto& x : v) x = 1.0;
  }
  return v;
}

void probe_scalar(const ScalarOperator& t, const ScalarField& g, std::uint64_t seed) {
  Rng rng(seed);
  double mean = 0.0;
  for (double x : g.values) mean += std::abs(x);
  mean = mean / static_cast<double>(g.size()) + 1e-300;
  std::vector<double> extra(g.size());
  for (auto& x : extra) x = rng.uniform() * mean;
  const ScalarField e(g.domain, extra);
  const ScalarField tg = t(g), te = t(e), tge = t(add(g, e));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double scale_i = std::max({std::abs(tg.values[i]), std::abs(tge.values[i]), 1e-300});
    if (tg.values[i] > tge.values[i] + 1e-9 * scale_i)
      fail(ErrorKind::NonMonotoneOperator, "operator is not monotone at cell " + std::to_string(i));
    if (tge.values[i] > tg.values[i] + te.values[i] + 1e-9 * scale_i)
      fail(ErrorKind::NonMonotoneOperator, "operator is not sublinear at cell " + std::to_string(i));
  }
}

void probe_set(const SetOperator& t, const SetFunction& g, std::uint64_t seed) {
  Rng rng(seed);
  double mean = 0.0;
  for (const auto& k : g.cells()) mean += set_norm(k);
  mean = mean / static_cast<double>(g.size()) + 1e-300;
  std::vector<ConvexBody> big(g.size());
  for (std::size_t i = 0; i < g.size(); ++i)
    big[i] = minkowski_sum(g[i], ConvexBody::ball(g.dim(), 0.25 * rng.uniform() * mean));
  const SetFunction tg = t(g), tb = t(SetFunction(g.domain(), big));
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double tol = 1e-9 * std::max(set_norm(tb[i]), 1e-300);
    if (support_excess(tg[i], tb[i], 1.0) > tol)
      fail(ErrorKind::NonMonotoneOperator, "operator is not monotone at cell " + std::to_string(i));
  }
}

template <class Field, class Norm>
IterationResult<Field> iterate_impl(const std::function<Field(const Field&)>& t, const Field& g,
                                    const IterationConfig& cfg, const Norm& norm) {
  check_config(cfg);
  const double gn = norm(g);
  double b = cfg.bound;
  for (int esc = 0; esc <= 5; ++esc) {
    Field sum = g, cur = g;
    bool ok = true;
    for (int k = 1; k < cfg.k_max; ++k) {
      Field next = t(cur);
      const double nc = norm(cur), nn = norm(next);
      if (nn > b * nc * (1 + 1e-9)) {
        ok = false;
        break;
      }
      cur = mul(next, 1.0 / b);
      sum = add(sum, mul(cur, std::ldexp(1.0, -k)));
    }
    if (ok) return {sum, b, esc, std::ldexp(gn, 1 - cfg.k_max)};
    b *= cfg.safety;
  }
  fail(ErrorKind::BoundViolation, "operator norm exceeds the bound after 5 escalations");
}

ScalarField field_pow(const ScalarField& r, double e) {
  std::vector<double> v(r.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(r.values[i], e);
  return ScalarField(r.domain, std::move(v));
}

ApReport measure(const MatrixWeight& w, double q, const std::string& variant, const GridPtr& grid) {
  if (variant == "auto") {
    if (q == 1.0) return ap_constant(w, q, "a1");
    if (std::isinf(q)) return ap_constant(w, q, "ainfty");
    return ap_constant(w, q, "roudenko");
  }
  return ap_constant(w, q, variant, grid);
}

}  // namespace

IterationResult<ScalarField> iterate(const ScalarOperator& t, const ScalarField& g, const IterationConfig& cfg) {
  check_config(cfg);
  for (double x : g.values)
    if (!(x >= 0)) fail(ErrorKind::InvalidArgument, "iteration needs a nonnegative field");
  if (cfg.validate) probe_scalar(t, g, cfg.seed);
  return iterate_impl<ScalarField>(t, g, cfg, [&](const ScalarField& f) { return lp_norm(f, cfg.p); });
}

IterationResult<SetFunction> iterate(const SetOperator& t, const SetFunction& g, const IterationConfig& cfg,
                                     const MatrixWeight* w) {
  check_config(cfg);
  if (cfg.validate) probe_set(t, g, cfg.seed);
  return iterate_impl<SetFunction>(t, g, cfg, [&](const SetFunction& f) { return lpk_norm(f, w, cfg.p); });
}

double certify_bound(const ScalarOperator& t, const DyadicDomain& dom, double p, int probes, double safety,
                     std::uint64_t seed) {
  if (probes < 32) fail(ErrorKind::InvalidArgument, "certify_bound needs at least 32 probes");
  Rng rng(seed);
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    const ScalarField f(dom, random_profile(rng, dom.num_cells(), i));
    const double n = lp_norm(f, p);
    if (n > 0) best = std::max(best, lp_norm(t(f), p) / n);
  }
  if (!std::isfinite(best) || !(best > 0)) fail(ErrorKind::BoundViolation, "operator norm estimate is not finite and positive");
  return safety * best;
}

double certify_bound(const SetOperator& t, const MatrixWeight& w, double p, int probes, double safety,
                     std::uint64_t seed) {
  if (probes < 32) fail(ErrorKind::InvalidArgument, "certify_bound needs at least 32 probes");
  Rng rng(seed);
  const DyadicDomain& dom = w.domain();
  double best = 0.0;
  for (int i = 0; i < probes; ++i) {
    const auto prof = random_profile(rng, dom.num_cells(), i);
    std::vector<ConvexBody> cells;
    for (std::int64_t c = 0; c < dom.num_cells(); ++c) cells.push_back(scale(random_body(rng, w.dim()), prof[c]));
    const SetFunction f(dom, cells);
    const double n = lpk_norm(f, &w, p);
    if (n > 0) best = std::max(best, lpk_norm(t(f), &w, p) / n);
  }
  return safety * best;
}

IterationCheck check_iteration(const ScalarOperator& t, const ScalarField& g, const ScalarField& sg, double bound,
                               double p) {
  IterationCheck c;
  c.g_norm = lp_norm(g, p);
  const ScalarField tsg = t(sg);
  for (std::size_t i = 0; i < g.size(); ++i) {
    c.containment = std::max(c.containment, g.values[i] - sg.values[i]);
    c.absorption = std::max(c.absorption, tsg.values[i] - 2 * bound * sg.values[i]);
  }
  c.norm_excess = lp_norm(sg, p) - 2 * c.g_norm;
  return c;
}

IterationCheck check_iteration(const SetOperator& t, const SetFunction& g, const SetFunction& sg, double bound,
                               double p, const MatrixWeight* w) {
  IterationCheck c;
  c.g_norm = lpk_norm(g, w, p);
  const SetFunction tsg = t(sg);
  std::vector<double> cont(g.size()), abs(g.size());
  parallel_for(g.size(), [&](std::size_t i) {
    cont[i] = support_excess(g[i], sg[i], 1.0);
    abs[i] = support_excess(tsg[i], sg[i], 2 * bound);
  });
  for (std::size_t i = 0; i < g.size(); ++i) {
    c.containment = std::max(c.containment, cont[i]);
    c.absorption = std::max(c.absorption, abs[i]);
  }
  c.norm_excess = lpk_norm(sg, w, p) - 2 * c.g_norm;
  return c;
}

ScalarOperator op_PW(const MatrixWeight& w) {
  const MatrixWeight wi = w.inverse();
  return [w, wi](const ScalarField& r) { return ellipsoid_maximal_norm(r, wi, w); };
}

ScalarOperator op_T1(const MatrixWeight& w, double p) {
  if (!(p > 1) || std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "T1 needs 1 < p < inf");
  const double pp = conjugate_exponent(p);
  const MatrixWeight wi = w.inverse();
  return [w, wi, pp](const ScalarField& r) { return field_pow(ellipsoid_maximal_norm(field_pow(r, pp), wi, w), 1 / pp); };
}

ScalarOperator op_T2(const MatrixWeight& w, double p) {
  if (!(p > 1) || std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "T2 needs 1 < p < inf");
  const MatrixWeight wi = w.inverse();
  return [w, wi, p](const ScalarField& r) { return field_pow(ellipsoid_maximal_norm(field_pow(r, p), w, wi), 1 / p); };
}

ScalarOperator op_sum(const ScalarOperator& a, const ScalarOperator& b) {
  return [a, b](const ScalarField& r) { return add(a(r), b(r)); };
}

FactorizationResult factorize(const MatrixWeight& w, double p, const FactorizationOptions& opts) {
  if (!(p > 1) || std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "factorization needs 1 < p < inf");
  const DyadicDomain& dom = w.domain();
  const double pp = conjugate_exponent(p), q = p * pp;
  FactorizationResult res;
  res.p = p;
  res.seed = opts.seed;
  if (opts.measure_ap) {
    res.ap = ap_constant(w, p, "reducing", opts.grid);
    if (!std::isfinite(res.ap.constant)) fail(ErrorKind::NotInAp, "weight is not in A_p numerically");
  }
  ScalarField r0 = opts.start ? *opts.start : ScalarField::constant(dom, 1.0);
  check_same_domain(r0.domain, dom);
  for (double x : r0.values)
    if (!(x > 0) || !std::isfinite(x)) fail(ErrorKind::InvalidArgument, "seed field must be positive");
  r0 = mul(r0, 1.0 / lp_norm(r0, q));
  const ScalarOperator t = op_sum(op_T1(w, p), op_T2(w, p));
  IterationConfig cfg;
  cfg.k_max = opts.k_max;
  cfg.p = q;
  cfg.safety = opts.safety;
  cfg.seed = opts.seed;
  cfg.bound = certify_bound(t, dom, q, opts.probes, opts.safety, opts.seed);
  const auto it = iterate(t, r0, cfg);
  res.rbar = it.sum;
  res.bound = it.bound;
  res.escalations = it.escalations;
  res.w0 = w.scaled(res.rbar, p);
  res.w1 = w.scaled(res.rbar, -pp);
  for (std::size_t c = 0; c < w.size(); ++c) {
    const Mat prod = spd_power(res.w0[c], 1 / p).mat() * spd_power(res.w1[c], 1 / pp).mat();
    res.product_residual = std::max(res.product_residual, rel_diff(prod, w[c].mat()));
  }
  res.a1 = ap_constant(res.w0, 1.0, "a1");
  res.ainfty = ap_constant(res.w1, kInf, "ainfty");
  return res;
}

Json factorization_to_json(const FactorizationResult& f) {
  Json j;
  j["p"] = f.p;
  j["seed"] = f.seed;
  j["bound"] = f.bound;
  j["escalations"] = f.escalations;
  j["product_residual"] = f.product_residual;
  j["a1_w0"] = ap_report_to_json(f.a1);
  j["ainfty_w1"] = ap_report_to_json(f.ainfty);
  if (f.ap.variant.empty())
    j["ap_w"] = nullptr;
  else
    j["ap_w"] = ap_report_to_json(f.ap);
  j["rbar"] = scalar_field_to_json(f.rbar);
  return j;
}

ReverseResult reverse_factorize(const MatrixWeight& w0, const MatrixWeight& w1, double q0, double q1, double t,
                                const std::string& variant, GridPtr grid) {
  check_same_domain(w0.domain(), w1.domain());
  if (w0.dim() != w1.dim()) fail(ErrorKind::DimensionMismatch, "weights have different dimensions");
  if (!(q0 >= 1) || !(q1 >= 1)) fail(ErrorKind::ExponentOutOfRange, "q0 and q1 must lie in [1, inf]");
  if (!(t > 0 && t < 1)) fail(ErrorKind::ExponentOutOfRange, "t must lie in (0, 1)");
  auto inv = [](double x) { return std::isinf(x) ? 0.0 : 1.0 / x; };
  ReverseResult res;
  res.q = 1.0 / ((1 - t) * inv(q0) + t * inv(q1));
  std::vector<SpdMatrix> cells(w0.size());
  for (std::size_t c = 0; c < w0.size(); ++c) {
    const SpdMatrix a = SpdMatrix::trusted(w0[c].mat() * w0[c].mat());
    const SpdMatrix b = SpdMatrix::trusted(w1[c].mat() * w1[c].mat());
    cells[c] = spd_sqrt(geo_mean(a, b, t));
  }
  res.w = MatrixWeight(w0.domain(), std::move(cells));
  res.wbar = measure(res.w, res.q, variant, grid);
  res.w0 = measure(w0, q0, variant, grid);
  res.w1 = measure(w1, q1, variant, grid);
  res.c_measured = res.wbar.constant / (std::pow(res.w0.constant, 1 - t) * std::pow(res.w1.constant, t));
  return res;
}

Json reverse_to_json(const ReverseResult& r) {
  Json j;
  j["q"] = std::isinf(r.q) ? Json("inf") : Json(r.q);
  j["wbar"] = ap_report_to_json(r.wbar);
  j["w0"] = ap_report_to_json(r.w0);
  j["w1"] = ap_report_to_json(r.w1);
  j["c_measured"] = r.c_measured;
  return j;
}

DuoResult duo_rescale(const MatrixWeight& w, double p, const ScalarField& s, double p0, const std::string& direction,
                      GridPtr grid) {
  if (!(p > 1) || std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "p must lie in (1, inf)");
  double e = 0.0;
  if (direction == "up") {
    if (!(p0 >= p)) fail(ErrorKind::ExponentOutOfRange, "the up branch needs p0 >= p");
    e = 1 - p / p0;
  } else if (direction == "down") {
    if (!(p0 <= p && p0 >= 1)) fail(ErrorKind::ExponentOutOfRange, "the down branch needs 1 <= p0 <= p");
    e = 1 - conjugate_exponent(p) / conjugate_exponent(p0);
  } else {
    fail(ErrorKind::InvalidArgument, "direction must be 'up' or 'down'");
  }
  DuoResult res;
  res.w = w.scaled(s, e);
  res.report = ap_constant(res.w, p0, "reducing", std::move(grid));
  return res;
}

}  // namespace mwlab
