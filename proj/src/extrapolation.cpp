#include "mwlab/extrapolation.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "mwlab/error.hpp"
#include "mwlab/io.hpp"
#include "mwlab/parallel.hpp"
#include "mwlab/random.hpp"

namespace mwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr int kDemoInputs = 4;

ScalarField weighted_abs(const VectorField& f, const MatrixWeight& w) {
  check_same_domain(f.domain, w.domain());
  if (f.d != w.dim()) fail(ErrorKind::DimensionMismatch, "field and weight dimensions differ");
  std::vector<double> v(f.values.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = (w[i].mat() * f.values[i]).norm();
  return ScalarField(f.domain, std::move(v));
}

ApReport measure(const MatrixWeight& w, double q, const std::string& variant, const GridPtr& grid) {
  if (variant == "auto") {
    if (q == 1.0) return ap_constant(w, q, "a1");
    if (std::isinf(q)) return ap_constant(w, q, "ainfty");
    return ap_constant(w, q, "roudenko");
  }
  return ap_constant(w, q, variant, grid);
}

Json num(double x) { return std::isinf(x) ? Json("inf") : Json(x); }

// vector field with |W(x) f(x)| = m(x)
VectorField along_first_axis(const MatrixWeight& w, const ScalarField& m) {
  const int d = w.dim();
  Vec e = Vec::Zero(d);
  e(0) = 1.0;
  std::vector<Vec> v(m.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    const Vec wi = w[i].mat().inverse() * e;
    v[i] = m.values[i] * wi / (w[i].mat() * wi).norm();
  }
  return VectorField(m.domain, d, std::move(v));
}

VectorField demo_input(const DyadicDomain& dom, int d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<Vec> v(dom.num_cells());
  for (auto& x : v) {
    x = Vec(d);
    for (int k = 0; k < d; ++k) x(k) = rng.uniform(-1, 1);
    x *= std::exp(rng.uniform(-1, 1)) / std::max(x.norm(), 1e-3);
  }
  return VectorField(dom, d, std::move(v));
}

}  // namespace

const char* case_name(CaseId c) {
  switch (c) {
    case CaseId::I: return "I";
    case CaseId::II: return "II";
    case CaseId::III: return "III";
    case CaseId::IV: return "IV";
  }
  return "?";
}

CaseId classify_case(double p, double p0) {
  if (!(p > 1) || std::isinf(p)) fail(ErrorKind::ExponentOutOfRange, "p must lie in (1, inf)");
  if (!(p0 >= 1)) fail(ErrorKind::ExponentOutOfRange, "p0 must lie in [1, inf]");
  if (std::isinf(p0)) return CaseId::II;
  if (p0 == 1.0) return CaseId::IV;
  if (p0 > p) return CaseId::I;
  if (p0 < p) return CaseId::III;
  fail(ErrorKind::CaseMismatch, "p0 = p needs no rescaling");
}

double weighted_norm(const VectorField& f, const MatrixWeight& w, double p) {
  return lp_norm(weighted_abs(f, w), p);
}

double extrapolation_exponent(double p, double p0) {
  const double pp = conjugate_exponent(p), pp0 = conjugate_exponent(p0);
  const double a = std::isinf(p0) ? 0.0 : p / p0;
  const double b = std::isinf(pp0) ? 0.0 : pp / pp0;
  return std::max(a, b);
}

ScalarField build_hbar(const MatrixWeight& w, double p, const VectorField& f, const VectorField& g) {
  const ScalarField a = weighted_abs(f, w), b = weighted_abs(g, w);
  const double na = lp_norm(a, p), nb = lp_norm(b, p);
  if (!(na > 0) || !(nb > 0) || !std::isfinite(na) || !std::isfinite(nb))
    fail(ErrorKind::ZeroNorm, "f and g need positive finite L^p(W) norms");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = a.values[i] / na + b.values[i] / nb;
  return ScalarField(a.domain, std::move(v));
}

ScalarField dual_extremizer(const MatrixWeight& w, double p, const VectorField& f) {
  const ScalarField a = weighted_abs(f, w);
  const double na = lp_norm(a, p);
  if (!(na > 0) || !std::isfinite(na)) fail(ErrorKind::ZeroNorm, "f needs a positive finite L^p(W) norm");
  std::vector<double> v(a.size());
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = std::pow(a.values[i] / na, p - 1);
  return ScalarField(a.domain, std::move(v));
}

ChainReport rescale_weight(const ExtrapolationCase& c, const ExtrapolationConfig& cfg) {
  const double p = c.p, p0 = c.p0;
  if (classify_case(p, p0) != c.id)
    fail(ErrorKind::CaseMismatch, std::string("exponents do not match case ") + case_name(c.id));
  const MatrixWeight& w = c.w;
  const DyadicDomain& dom = w.domain();
  const double pp = conjugate_exponent(p);

  ChainReport r;
  r.id = c.id;
  r.p = p;
  r.p0 = p0;
  r.exponent = extrapolation_exponent(p, p0);

  const bool primal = c.id == CaseId::I || c.id == CaseId::II;
  const ScalarField seed = primal ? build_hbar(w, p, c.f, c.g) : dual_extremizer(w, p, c.f);
  // primal: P_W on L^p, dual: N_I M' on L^{p'}
  const ScalarOperator t = primal ? op_PW(w) : op_PW(w.inverse());
  const double norm_p = primal ? p : pp;
  IterationConfig it_cfg;
  it_cfg.k_max = cfg.k_max;
  it_cfg.p = norm_p;
  it_cfg.safety = cfg.safety;
  it_cfg.seed = cfg.seed;
  it_cfg.bound = certify_bound(t, dom, norm_p, cfg.probes, cfg.safety, cfg.seed);
  const auto it = iterate(t, seed, it_cfg);
  r.rescaling = it.sum;
  r.bound = it.bound;
  r.tail = it.tail;

  const double nf = weighted_norm(c.f, w, p);
  switch (c.id) {
    case CaseId::I: {
      r.w0 = w.scaled(r.rescaling, -(p0 - p) / p0);
      r.chain.push_back({"I2 <= 4^p", std::pow(lp_norm(r.rescaling, p), p), std::pow(4.0, p)});
      r.chain.push_back({"||f||_{L^p0(W0)} <= ||f||_{L^p(W)}", weighted_norm(c.f, r.w0, p0), nf});
      r.chain.push_back({"||g||_{L^p0(W0)} <= ||g||_{L^p(W)}", weighted_norm(c.g, r.w0, p0), weighted_norm(c.g, w, p)});
      break;
    }
    case CaseId::II:
      r.w0 = w.scaled(r.rescaling, -1.0);
      r.chain.push_back({"||f||_{L^inf(W0)} <= ||f||_{L^p(W)}", weighted_norm(c.f, r.w0, kInf), nf});
      break;
    case CaseId::III: {
      r.w0 = w.scaled(r.rescaling, 1 - pp / conjugate_exponent(p0));
      const double n0 = weighted_norm(c.f, r.w0, p0), nr = lp_norm(r.rescaling, pp);
      const double ratio_conj = p / (p - p0);  // (p/p0)'
      r.chain.push_back({"||f||_{L^p(W)} <= ||f||_{L^p0(W0)}", nf, n0});
      r.chain.push_back({"||R h||_{p'} <= 2", nr, 2.0});
      r.chain.push_back({"||f||_{L^p0(W0)}^p0 <= ||R h||_{p'}^{p'/(p/p0)'} ||f||_{L^p(W)}^p0", std::pow(n0, p0),
                         std::pow(nr, pp / ratio_conj) * std::pow(nf, p0)});
      r.chain.push_back({"||f||_{L^p0(W0)}^p0 <= 2^{1/(p/p0)'} ||f||_{L^p(W)}^p0", std::pow(n0, p0),
                         std::pow(2.0, 1 / ratio_conj) * std::pow(nf, p0), false});
      break;
    }
    case CaseId::IV: {
      r.w0 = w.scaled(r.rescaling, 1.0);
      const double n0 = weighted_norm(c.f, r.w0, 1.0), nr = lp_norm(r.rescaling, pp);
      r.chain.push_back({"||R h||_{p'} <= 2", nr, 2.0});
      r.chain.push_back({"||f||_{L^1(W0)} <= ||R h||_{p'} ||f||_{L^p(W)}", n0, nr * nf});
      r.chain.push_back({"||f||_{L^1(W0)} <= 2^{1/p'} ||f||_{L^p(W)}", n0, std::pow(2.0, 1 / pp) * nf, false});
      break;
    }
  }

  if (cfg.measure) {
    r.ap_w = measure(w, p, cfg.variant, cfg.grid);
    r.ap_w0 = measure(r.w0, p0, cfg.variant, cfg.grid);
    r.kp_ratio = r.ap_w0.constant / std::pow(r.ap_w.constant, r.exponent);
  }
  return r;
}

Json chain_to_json(const ChainReport& r) {
  Json j;
  j["case"] = case_name(r.id);
  j["p"] = num(r.p);
  j["p0"] = num(r.p0);
  j["bound"] = r.bound;
  j["tail"] = r.tail;
  Json chain = Json::array();
  for (const auto& s : r.chain) {
    Json e;
    e["name"] = s.name;
    e["lhs"] = s.lhs;
    e["rhs"] = s.rhs;
    e["slack"] = s.slack();
    e["exact"] = s.exact;
    e["holds"] = s.slack() <= r.tail;
    chain.push_back(e);
  }
  j["chain"] = chain;
  j["exponent"] = r.exponent;
  if (!r.ap_w.variant.empty()) {
    j["ap_w"] = ap_report_to_json(r.ap_w);
    j["ap_w0"] = ap_report_to_json(r.ap_w0);
    j["kp_ratio"] = r.kp_ratio;
  }
  j["w0"] = weight_to_json(r.w0);
  return j;
}

VectorField demo_operator(const std::string& op_id, const MatrixWeight& w, const VectorField& g) {
  check_same_domain(g.domain, w.domain());
  if (op_id == "christ-goldberg") return along_first_axis(w, christ_goldberg(w, g));
  if (op_id == "exhaust-maximal") {
    const SetFunction m = dyadic_maximal(lift_vector_field(g));
    std::vector<double> v(m.size());
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = set_norm(m[i], w[i].mat());
    return along_first_axis(w, ScalarField(g.domain, std::move(v)));
  }
  if (op_id == "dyadic-average") {
    // average over the ancestor halfway up the tree
    const DyadicDomain& dom = g.domain;
    const int level = dom.level() / 2;
    std::vector<Vec> out(g.values.size());
    for (std::int64_t q = 0; q < dom.cubes_at(level); ++q) {
      const auto cells = dom.cells_in({level, q});
      Vec avg = Vec::Zero(g.d);
      for (auto c : cells) avg += g.values[c];
      avg /= static_cast<double>(cells.size());
      for (auto c : cells) out[c] = avg;
    }
    return VectorField(dom, g.d, std::move(out));
  }
  fail(ErrorKind::InvalidArgument, "unknown operator '" + op_id + "'");
}

DemoTable extrapolation_demo(const std::string& op_id, double p0, double p, const std::vector<NamedWeight>& suite,
                             const ExtrapolationConfig& cfg) {
  if (op_id != "christ-goldberg" && op_id != "dyadic-average" && op_id != "exhaust-maximal")
    fail(ErrorKind::InvalidArgument, "unknown operator '" + op_id + "'");
  const bool same = p == p0;
  const CaseId id = same ? CaseId::I : classify_case(p, p0);
  DemoTable t;
  t.op_id = op_id;
  t.p = p;
  t.p0 = p0;
  t.rows.resize(suite.size());
  const double e = same ? 1.0 : extrapolation_exponent(p, p0);
  parallel_for(suite.size(), [&](std::size_t i) {
    const MatrixWeight& w = suite[i].w;
    DemoRow& row = t.rows[i];
    row.weight_id = suite[i].id;
    row.held_out = i % 2 == 1;
    row.case_name = same ? "p=p0" : case_name(id);
    row.ap_w = measure(w, p, cfg.variant, cfg.grid).constant;
    // ratios are maxima over a fixed input family shared by all weights
    for (int k = 0; k < kDemoInputs; ++k) {
      const VectorField g = demo_input(w.domain(), w.dim(), cfg.seed + 1000 * (k + 1));
      const VectorField f = demo_operator(op_id, w, g);
      const double conclusion = weighted_norm(f, w, p) / weighted_norm(g, w, p);
      row.conclusion = std::max(row.conclusion, conclusion);
      if (same) {
        row.hypothesis = row.conclusion;
        row.ap_w0 = row.ap_w;
        continue;
      }
      ExtrapolationConfig inner = cfg;
      inner.measure = false;
      const ChainReport rep = rescale_weight({id, p, p0, f, g, w}, inner);
      row.hypothesis = std::max(row.hypothesis, weighted_norm(f, rep.w0, p0) / weighted_norm(g, rep.w0, p0));
      row.ap_w0 = std::max(row.ap_w0, measure(rep.w0, p0, cfg.variant, cfg.grid).constant);
    }
  });

  // envelope exp(c) ([W]^e)^beta: least-squares slope on the fitting rows, intercept lifted to cover them
  std::vector<double> xs, ys;
  for (const auto& row : t.rows)
    if (!row.held_out) {
      xs.push_back(e * std::log(row.ap_w));
      ys.push_back(std::log(row.conclusion));
    }
  double beta = 0.0;
  if (xs.size() >= 2) {
    double mx = 0, my = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) mx += xs[k], my += ys[k];
    mx /= static_cast<double>(xs.size());
    my /= static_cast<double>(xs.size());
    double sxy = 0, sxx = 0;
    for (std::size_t k = 0; k < xs.size(); ++k) sxy += (xs[k] - mx) * (ys[k] - my), sxx += (xs[k] - mx) * (xs[k] - mx);
    if (sxx > 1e-14) beta = std::max(0.0, sxy / sxx);
  }
  double c = -kInf;
  for (std::size_t k = 0; k < xs.size(); ++k) c = std::max(c, ys[k] - beta * xs[k]);
  if (xs.empty()) c = 0.0;
  t.fit_log_c = c;
  t.fit_slope = beta;
  for (auto& row : t.rows) row.envelope = std::exp(c + beta * e * std::log(row.ap_w));
  return t;
}

std::string demo_to_csv(const DemoTable& t) {
  std::ostringstream os;
  os << "weight_id,[W]_{A_p},case,[W0]_{A_{p0}},hypothesis_ratio,conclusion_ratio,K_p_envelope,slack\n";
  for (const auto& r : t.rows)
    os << r.weight_id << ',' << format_double(r.ap_w) << ',' << r.case_name << ',' << format_double(r.ap_w0) << ','
       << format_double(r.hypothesis) << ',' << format_double(r.conclusion) << ',' << format_double(r.envelope) << ','
       << format_double(r.slack()) << '\n';
  return os.str();
}

}  // namespace mwlab
