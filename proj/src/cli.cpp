#include "mwlab/cli.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <numbers>
#include <sstream>

#include "CLI11.hpp"
#include "mwlab/error.hpp"
#include "mwlab/extrapolation.hpp"
#include "mwlab/io.hpp"
#include "mwlab/john.hpp"
#include "mwlab/random.hpp"

namespace mwlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

enum class Type { Num, Exponent, Int, Str, NumList };

struct Key {
  const char* name;
  Type type;
  Json def;
  const char* help;
};

const std::vector<Key>& schema() {
  static const std::vector<Key> keys = {
      {"origin", Type::NumList, Json::array({0.0}), "lower corner of the base cube"},
      {"size", Type::Num, 1.0, "edge length of the base cube"},
      {"level", Type::Int, 6, "finest dyadic level J"},
      {"n", Type::Int, 1, "space dimension"},
      {"d", Type::Int, 2, "vector dimension"},
      {"p", Type::Exponent, 2.0, "exponent p"},
      {"p0", Type::Exponent, 4.0, "exponent p0"},
      {"t", Type::Num, 0.5, "interpolation parameter"},
      {"q0", Type::Exponent, 1.0, "exponent of weight0"},
      {"q1", Type::Exponent, "inf", "exponent of weight1"},
      {"weight", Type::Str, "", "matrix weight file"},
      {"weight0", Type::Str, "", "first weight file"},
      {"weight1", Type::Str, "", "second weight file"},
      {"setfn", Type::Str, "", "set function file"},
      {"field", Type::Str, "", "scalar field file"},
      {"f", Type::Str, "", "vector field file"},
      {"g", Type::Str, "", "vector field file"},
      {"out", Type::Str, "", "output path (stdout when empty)"},
      {"svg", Type::Str, "", "optional SVG output path"},
      {"directions", Type::Int, 256, "direction grid size"},
      {"k_max", Type::Int, 30, "iteration length"},
      {"safety", Type::Num, 2.0, "bound escalation factor"},
      {"tol", Type::Num, 1e-10, "solver tolerance"},
      {"probes", Type::Int, 32, "random probes for operator bounds"},
      {"seed", Type::Int, 1, "random seed"},
      {"format", Type::Str, "json", "json or csv"},
      {"variant", Type::Str, "reducing", "A_p variant"},
      {"kind", Type::Str, "identity", "weight family: identity, power, rotating, suite"},
      {"alpha", Type::Num, 0.0, "power exponent"},
      {"center", Type::NumList, Json::array(), "power weight center (origin when empty)"},
      {"a", Type::Num, 1.0, "log eigenvalue a"},
      {"b", Type::Num, 0.0, "log eigenvalue b"},
      {"omega", Type::Num, 2.0, "rotation frequency"},
      {"index", Type::Int, 0, "suite index"},
      {"op", Type::Str, "christ-goldberg", "demo operator"},
      {"suite", Type::Str, "power", "demo weights: power or matrix"},
      {"alphas", Type::NumList, Json::array({0.0, 0.2, 0.4, 0.6, 0.8}), "power sweep exponents"},
      {"count", Type::Int, 3, "matrix suite size"},
      {"case", Type::Str, "", "expected extrapolation case (I, II, III, IV)"},
  };
  return keys;
}

const Key& key(const std::string& name) {
  for (const auto& k : schema())
    if (name == k.name) return k;
  fail(ErrorKind::InvalidArgument, "unknown key '" + name + "'");
}

const std::vector<std::string> kDomainKeys = {"origin", "size", "level", "n", "d"};

std::vector<std::string> keys_of(const std::string& cmd) {
  auto cat = [](std::vector<std::string> a, const std::vector<std::string>& b) {
    a.insert(a.end(), b.begin(), b.end());
    return a;
  };
  if (cmd == "gen-weight") return cat(kDomainKeys, {"kind", "alpha", "center", "a", "b", "omega", "index", "out"});
  if (cmd == "ap-constant") return {"weight", "p", "variant", "directions", "out"};
  if (cmd == "maximal") return {"setfn", "out", "svg"};
  if (cmd == "john") return {"setfn", "tol", "out", "svg"};
  if (cmd == "rdf") return {"weight", "p", "field", "k_max", "safety", "probes", "seed", "out"};
  if (cmd == "factorize") return {"weight", "p", "k_max", "safety", "probes", "seed", "directions", "out"};
  if (cmd == "reverse-factorize") return {"weight0", "weight1", "q0", "q1", "t", "variant", "directions", "out"};
  if (cmd == "extrapolate")
    return {"weight", "p", "p0", "case", "f", "g", "k_max", "safety", "probes", "seed", "variant", "directions", "out"};
  if (cmd == "demo")
    return cat(kDomainKeys, {"op", "p", "p0", "suite", "alphas", "count", "k_max", "safety", "probes", "seed", "variant",
                             "directions", "format", "out"});
  return {};
}

const std::vector<std::pair<std::string, std::string>> kCommands = {
    {"gen-weight", "generate a matrix weight"},
    {"ap-constant", "matrix A_p constant of a weight"},
    {"maximal", "dyadic convex-set maximal function"},
    {"john", "John ellipsoids of the cell bodies"},
    {"rdf", "Rubio de Francia iteration of P_W"},
    {"factorize", "Jones factorization W0, W1 of an A_p weight"},
    {"reverse-factorize", "geometric-mean reverse factorization"},
    {"extrapolate", "extrapolation weight rescaling with chain checks"},
    {"demo", "extrapolation demonstrator table"},
};

std::string dashed(std::string s) {
  for (auto& c : s)
    if (c == '_') c = '-';
  return s;
}

std::string underscored(std::string s) {
  for (auto& c : s)
    if (c == '-') c = '_';
  return s;
}

double parse_number(const std::string& s, const std::string& what, bool allow_inf) {
  if (allow_inf && (s == "inf" || s == "infinity")) return kInf;
  char* end = nullptr;
  const double v = std::strtod(s.c_str(), &end);
  if (s.empty() || *end != '\0' || !std::isfinite(v)) fail(ErrorKind::InvalidArgument, what + ": not a number: '" + s + "'");
  return v;
}

// normalizes a flag string or a config value to the schema type
Json coerce(const Key& k, const Json& v) {
  const std::string what = k.name;
  auto num = [&](const Json& x, bool inf) -> double {
    if (x.is_number()) return x.get<double>();
    if (x.is_string()) return parse_number(x.get<std::string>(), what, inf);
    fail(ErrorKind::InvalidArgument, what + ": expected a number");
  };
  switch (k.type) {
    case Type::Num:
      return num(v, false);
    case Type::Exponent: {
      const double x = num(v, true);
      return std::isinf(x) ? Json("inf") : Json(x);
    }
    case Type::Int: {
      const double x = num(v, false);
      if (x != std::floor(x) || std::abs(x) > 1e15) fail(ErrorKind::InvalidArgument, what + ": expected an integer");
      return static_cast<std::int64_t>(x);
    }
    case Type::Str:
      if (!v.is_string()) fail(ErrorKind::InvalidArgument, what + ": expected a string");
      return v;
    case Type::NumList: {
      Json out = Json::array();
      if (v.is_array()) {
        for (const auto& x : v) out.push_back(num(x, false));
      } else if (v.is_number()) {
        out.push_back(v.get<double>());
      } else if (v.is_string()) {
        std::stringstream ss(v.get<std::string>());
        std::string item;
        while (std::getline(ss, item, ',')) out.push_back(parse_number(item, what, false));
      } else {
        fail(ErrorKind::InvalidArgument, what + ": expected a list of numbers");
      }
      return out;
    }
  }
  return v;
}

struct Config {
  std::string command;
  Json values;  // resolved, in schema order

  double num(const char* k) const {
    const Json& v = values.at(k);
    return v.is_string() ? kInf : v.get<double>();
  }
  std::int64_t integer(const char* k) const { return values.at(k).get<std::int64_t>(); }
  std::string str(const char* k) const { return values.at(k).get<std::string>(); }
  std::vector<double> list(const char* k) const { return values.at(k).get<std::vector<double>>(); }
};

Config resolve(const std::string& cmd, const std::string& config_path, const std::map<std::string, std::string>& flags) {
  const auto keys = keys_of(cmd);
  std::map<std::string, Json> chosen;
  if (!config_path.empty()) {
    const Json file = read_json_file(config_path);
    if (!file.is_object()) fail(ErrorKind::InvalidArgument, "config file must hold a JSON object");
    for (const auto& [name, v] : file.items()) {
      const std::string k = underscored(name);
      if (k == "command" || k == "subcommand") continue;
      const Key& spec = key(k);  // unknown keys are an error, keys of other subcommands are ignored
      if (std::find(keys.begin(), keys.end(), k) != keys.end()) chosen[k] = coerce(spec, v);
    }
  }
  for (const auto& [k, v] : flags) chosen[k] = coerce(key(k), Json(v));
  Config c;
  c.command = cmd;
  c.values = Json::object();
  for (const auto& k : keys) c.values[k] = chosen.count(k) ? chosen[k] : coerce(key(k), key(k).def);
  return c;
}

// ---------------------------------------------------------------- validation

void require_file(const Config& c, const char* k) {
  const std::string path = c.str(k);
  if (path.empty()) fail(ErrorKind::InvalidArgument, std::string("--") + dashed(k) + " is required");
  if (!std::filesystem::exists(path) || std::filesystem::is_directory(path)) fail(ErrorKind::InvalidArgument, "no such file: " + path);
}

void check_exponent(double p, const char* k, bool allow_one, bool allow_inf) {
  const bool ok = (p > 1 && std::isfinite(p)) || (allow_one && p == 1.0) || (allow_inf && std::isinf(p));
  if (!ok) fail(ErrorKind::ExponentOutOfRange, std::string(k) + " out of range");
}

DyadicDomain domain_of(const Config& c) {
  const int n = static_cast<int>(c.integer("n"));
  if (n < 1 || n > 3) fail(ErrorKind::InvalidArgument, "n must lie in 1..3");
  const int level = static_cast<int>(c.integer("level"));
  if (level < 0 || level * n > 20) fail(ErrorKind::InvalidArgument, "level out of range");
  const auto o = c.list("origin");
  Vec origin(n);
  for (int i = 0; i < n; ++i) origin(i) = o.empty() ? 0.0 : o[std::min<std::size_t>(i, o.size() - 1)];
  if (!(c.num("size") > 0)) fail(ErrorKind::InvalidArgument, "size must be positive");
  return DyadicDomain(n, origin, c.num("size"), level);
}

GridPtr grid_of(const Config& c, int d) {
  const auto m = c.integer("directions");
  if (m < 8 || m > 1 << 16) fail(ErrorKind::InvalidArgument, "directions must lie in 8..65536");
  return DirectionGrid::canonical(d, d == 2 ? static_cast<int>(m) : 0);
}

MatrixWeight weight_file(const Config& c, const char* k) {
  require_file(c, k);
  return load_weight(c.str(k));
}

// ---------------------------------------------------------------- output

Json report(const Config& c, Json result) {
  Json j;
  j["schema"] = "mwlab-report-v1";
  j["command"] = c.command;
  j["config"] = c.values;
  j["result"] = std::move(result);
  return j;
}

void write_out(const Config& c, const std::string& text) {
  const std::string path = c.str("out");
  if (path.empty())
    std::cout << text;
  else
    write_text_file(path, text);
}

Json num_json(double x) { return std::isinf(x) ? Json("inf") : Json(x); }

// ---------------------------------------------------------------- subcommands

void cmd_gen_weight(const Config& c) {
  const DyadicDomain dom = domain_of(c);
  const int d = static_cast<int>(c.integer("d"));
  if (d < 1 || d > 8) fail(ErrorKind::InvalidArgument, "d must lie in 1..8");
  const std::string kind = c.str("kind");
  MatrixWeight w;
  if (kind == "identity") {
    w = MatrixWeight::constant(dom, SpdMatrix::identity(d));
  } else if (kind == "power") {
    auto ctr = c.list("center");
    Vec center = dom.origin();
    if (!ctr.empty()) {
      if (static_cast<int>(ctr.size()) != dom.n()) fail(ErrorKind::InvalidArgument, "center needs n entries");
      for (int i = 0; i < dom.n(); ++i) center(i) = ctr[i];
    }
    w = gen_power_weight(dom, d, c.num("alpha"), center);
  } else if (kind == "rotating") {
    if (d != 2) fail(ErrorKind::DimensionMismatch, "rotating weights need d = 2");
    w = gen_rotating_weight(dom, c.num("a"), c.num("b"), c.num("omega"));
  } else if (kind == "suite") {
    if (d != 2) fail(ErrorKind::DimensionMismatch, "suite weights need d = 2");
    const auto i = c.integer("index");
    if (i < 0 || i > 63) fail(ErrorKind::InvalidArgument, "index must lie in 0..63");
    w = weight_suite(dom, static_cast<int>(i) + 1).back().w;
  } else {
    fail(ErrorKind::InvalidArgument, "unknown kind '" + kind + "'");
  }
  Json j = weight_to_json(w);
  j["config"] = c.values;
  write_out(c, dump_json(j));
}

void cmd_ap_constant(const Config& c) {
  const double p = c.num("p");
  check_exponent(p, "p", true, true);
  const MatrixWeight w = weight_file(c, "weight");
  const ApReport r = ap_constant(w, p, c.str("variant"), grid_of(c, w.dim()));
  write_out(c, dump_json(report(c, ap_report_to_json(r))));
}

std::vector<LabeledBody> labeled(const SetFunction& f, const std::string& prefix) {
  std::vector<LabeledBody> out;
  for (std::size_t i = 0; i < f.size(); ++i) out.emplace_back(prefix + std::to_string(i), f[i]);
  return out;
}

void cmd_maximal(const Config& c) {
  require_file(c, "setfn");
  const SetFunction f = load_setfunction(c.str("setfn"));
  if (!c.str("svg").empty() && f.dim() != 2) fail(ErrorKind::DimensionMismatch, "SVG output needs d = 2");
  const SetFunction m = dyadic_maximal(f);
  Json res;
  Json norms = Json::array();
  for (const auto& k : m.cells()) norms.push_back(set_norm(k));
  res["norms"] = norms;
  res["maximal"] = setfunction_to_json(m);
  write_out(c, dump_json(report(c, res)));
  if (!c.str("svg").empty()) emit_svg(labeled(m, "M"), c.str("svg"));
}

void cmd_john(const Config& c) {
  require_file(c, "setfn");
  const SetFunction f = load_setfunction(c.str("setfn"));
  if (!c.str("svg").empty() && f.dim() != 2) fail(ErrorKind::DimensionMismatch, "SVG output needs d = 2");
  JohnOptions opts;
  opts.gradient_tol = c.num("tol");
  if (!(opts.gradient_tol > 0)) fail(ErrorKind::InvalidArgument, "tol must be positive");
  Json cells = Json::array();
  std::vector<LabeledBody> bodies;
  for (std::size_t i = 0; i < f.size(); ++i) {
    Json e;
    if (!f[i].is_full_dimensional()) {
      e["degenerate"] = true;
      cells.push_back(e);
      continue;
    }
    const JohnResult jr = john_ellipsoid(f[i], opts);
    e["m"] = matrix_to_json(jr.m.mat());
    e["log_det"] = std::log(jr.m.mat().determinant());
    e["inner_margin"] = jr.inner_margin;
    e["outer_margin"] = jr.outer_margin;
    e["iterations"] = jr.iterations;
    cells.push_back(e);
    bodies.emplace_back("K" + std::to_string(i), f[i]);
    bodies.emplace_back("E" + std::to_string(i), ConvexBody::ellipsoid(jr.m.mat()));
  }
  Json res;
  res["cells"] = cells;
  write_out(c, dump_json(report(c, res)));
  if (!c.str("svg").empty()) emit_svg(bodies, c.str("svg"));
}

IterationConfig iteration_of(const Config& c, double p) {
  IterationConfig it;
  it.k_max = static_cast<int>(c.integer("k_max"));
  it.safety = c.num("safety");
  it.seed = static_cast<std::uint64_t>(c.integer("seed"));
  it.p = p;
  if (it.k_max < 1 || it.k_max > 200) fail(ErrorKind::InvalidArgument, "k_max must lie in 1..200");
  if (!(it.safety > 1)) fail(ErrorKind::InvalidArgument, "safety must exceed 1");
  if (c.integer("probes") < 32) fail(ErrorKind::InvalidArgument, "probes must be at least 32");
  return it;
}

void cmd_rdf(const Config& c) {
  const double p = c.num("p");
  check_exponent(p, "p", false, false);
  IterationConfig it = iteration_of(c, p);
  const MatrixWeight w = weight_file(c, "weight");
  ScalarField g = ScalarField::constant(w.domain(), 1.0);
  if (!c.str("field").empty()) {
    require_file(c, "field");
    g = scalar_field_from_json(read_json_file(c.str("field")));
    check_same_domain(g.domain, w.domain());
  }
  const ScalarOperator t = op_PW(w);
  it.bound = certify_bound(t, w.domain(), p, static_cast<int>(c.integer("probes")), it.safety, it.seed);
  const auto r = iterate(t, g, it);
  const IterationCheck chk = check_iteration(t, g, r.sum, r.bound, p);
  Json res;
  res["bound"] = r.bound;
  res["escalations"] = r.escalations;
  res["tail"] = r.tail;
  res["containment"] = chk.containment;
  res["norm_excess"] = chk.norm_excess;
  res["absorption"] = chk.absorption;
  res["g_norm"] = chk.g_norm;
  res["sum"] = scalar_field_to_json(r.sum);
  write_out(c, dump_json(report(c, res)));
}

void cmd_factorize(const Config& c) {
  const double p = c.num("p");
  check_exponent(p, "p", false, false);
  const IterationConfig it = iteration_of(c, p);
  const MatrixWeight w = weight_file(c, "weight");
  FactorizationOptions o;
  o.k_max = it.k_max;
  o.safety = it.safety;
  o.seed = it.seed;
  o.probes = static_cast<int>(c.integer("probes"));
  o.grid = grid_of(c, w.dim());
  const FactorizationResult f = factorize(w, p, o);
  const Json rep = report(c, factorization_to_json(f));
  const std::string dir = c.str("out");
  if (dir.empty()) {
    std::cout << dump_json(rep);
    return;
  }
  std::filesystem::create_directories(dir);
  const std::filesystem::path base(dir);
  write_text_file((base / "report.json").string(), dump_json(rep));
  write_text_file((base / "w0.json").string(), dump_json(weight_to_json(f.w0)));
  write_text_file((base / "w1.json").string(), dump_json(weight_to_json(f.w1)));
}

void cmd_reverse(const Config& c) {
  const double q0 = c.num("q0"), q1 = c.num("q1"), t = c.num("t");
  check_exponent(q0, "q0", true, true);
  check_exponent(q1, "q1", true, true);
  if (!(t > 0 && t < 1)) fail(ErrorKind::ExponentOutOfRange, "t must lie in (0, 1)");
  const MatrixWeight w0 = weight_file(c, "weight0"), w1 = weight_file(c, "weight1");
  const ReverseResult r = reverse_factorize(w0, w1, q0, q1, t, c.str("variant"), grid_of(c, w0.dim()));
  Json res = reverse_to_json(r);
  res["w"] = weight_to_json(r.w);
  write_out(c, dump_json(report(c, res)));
}

VectorField vector_input(const Config& c, const char* k, const MatrixWeight& w, std::uint64_t seed) {
  if (!c.str(k).empty()) {
    require_file(c, k);
    VectorField f = vector_field_from_json(read_json_file(c.str(k)));
    check_same_domain(f.domain, w.domain());
    if (f.d != w.dim()) fail(ErrorKind::DimensionMismatch, std::string(k) + " has the wrong dimension");
    return f;
  }
  // deterministic default input
  Rng rng(seed);
  std::vector<Vec> v(w.domain().num_cells());
  for (auto& x : v) {
    x = Vec(w.dim());
    for (int i = 0; i < w.dim(); ++i) x(i) = rng.uniform(-1, 1);
  }
  return VectorField(w.domain(), w.dim(), std::move(v));
}

ExtrapolationConfig extrapolation_of(const Config& c, double p, int d) {
  const IterationConfig it = iteration_of(c, p);
  ExtrapolationConfig e;
  e.k_max = it.k_max;
  e.safety = it.safety;
  e.seed = it.seed;
  e.probes = static_cast<int>(c.integer("probes"));
  e.variant = c.str("variant");
  e.grid = grid_of(c, d);
  return e;
}

void cmd_extrapolate(const Config& c) {
  const double p = c.num("p"), p0 = c.num("p0");
  check_exponent(p, "p", false, false);
  check_exponent(p0, "p0", true, true);
  const CaseId id = classify_case(p, p0);
  if (!c.str("case").empty() && c.str("case") != case_name(id))
    fail(ErrorKind::CaseMismatch, "exponents give case " + std::string(case_name(id)) + ", not " + c.str("case"));
  const MatrixWeight w = weight_file(c, "weight");
  const ExtrapolationConfig e = extrapolation_of(c, p, w.dim());
  const VectorField f = vector_input(c, "f", w, e.seed + 11), g = vector_input(c, "g", w, e.seed + 12);
  const ChainReport r = rescale_weight({id, p, p0, f, g, w}, e);
  write_out(c, dump_json(report(c, chain_to_json(r))));
}

void cmd_demo(const Config& c) {
  const double p = c.num("p"), p0 = c.num("p0");
  check_exponent(p, "p", false, false);
  check_exponent(p0, "p0", true, true);
  const DyadicDomain dom = domain_of(c);
  const int d = static_cast<int>(c.integer("d"));
  std::vector<NamedWeight> suite;
  if (c.str("suite") == "power") {
    if (d < 1 || d > 8) fail(ErrorKind::InvalidArgument, "d must lie in 1..8");
    suite = power_sweep(dom, d, c.list("alphas"));
  } else if (c.str("suite") == "matrix") {
    if (d != 2) fail(ErrorKind::DimensionMismatch, "the matrix suite needs d = 2");
    const auto n = c.integer("count");
    if (n < 1 || n > 64) fail(ErrorKind::InvalidArgument, "count must lie in 1..64");
    suite = weight_suite(dom, static_cast<int>(n));
  } else {
    fail(ErrorKind::InvalidArgument, "suite must be 'power' or 'matrix'");
  }
  const std::string fmt = c.str("format");
  if (fmt != "csv" && fmt != "json") fail(ErrorKind::InvalidArgument, "format must be 'json' or 'csv'");
  const DemoTable t = extrapolation_demo(c.str("op"), p0, p, suite, extrapolation_of(c, p, d));
  if (fmt == "csv") {
    write_out(c, demo_to_csv(t));
    return;
  }
  Json rows = Json::array();
  for (const auto& r : t.rows) {
    Json e;
    e["weight_id"] = r.weight_id;
    e["ap_w"] = r.ap_w;
    e["case"] = r.case_name;
    e["ap_w0"] = r.ap_w0;
    e["hypothesis_ratio"] = r.hypothesis;
    e["conclusion_ratio"] = r.conclusion;
    e["K_p_envelope"] = r.envelope;
    e["slack"] = r.slack();
    e["held_out"] = r.held_out;
    rows.push_back(e);
  }
  Json res;
  res["op"] = t.op_id;
  res["p"] = num_json(t.p);
  res["p0"] = num_json(t.p0);
  res["exponent"] = p == p0 ? 1.0 : extrapolation_exponent(p, p0);
  res["fit_log_c"] = t.fit_log_c;
  res["fit_slope"] = t.fit_slope;
  res["rows"] = rows;
  write_out(c, dump_json(report(c, res)));
}

void dispatch(const Config& c) {
  const std::string& s = c.command;
  if (s == "gen-weight") return cmd_gen_weight(c);
  if (s == "ap-constant") return cmd_ap_constant(c);
  if (s == "maximal") return cmd_maximal(c);
  if (s == "john") return cmd_john(c);
  if (s == "rdf") return cmd_rdf(c);
  if (s == "factorize") return cmd_factorize(c);
  if (s == "reverse-factorize") return cmd_reverse(c);
  if (s == "extrapolate") return cmd_extrapolate(c);
  if (s == "demo") return cmd_demo(c);
}

// ---------------------------------------------------------------- svg

std::string fmt6(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s(buf);
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::string xml_escape(const std::string& s) {
  std::string out;
  for (char ch : s) {
    if (ch == '<') out += "&lt;";
    else if (ch == '>') out += "&gt;";
    else if (ch == '&') out += "&amp;";
    else if (ch == '"') out += "&quot;";
    else out += ch;
  }
  return out;
}

}  // namespace

std::string render_svg(const std::vector<LabeledBody>& bodies) {
  constexpr int kPanel = 160;
  const std::size_t m = bodies.size();
  const int cols = m == 0 ? 1 : static_cast<int>(std::ceil(std::sqrt(static_cast<double>(m))));
  const int rows = m == 0 ? 1 : static_cast<int>((m + cols - 1) / cols);
  double rmax = 0.0;
  std::vector<std::vector<Vec2>> polys;
  for (const auto& [id, k] : bodies) {
    if (k.dim() != 2) fail(ErrorKind::DimensionMismatch, "SVG output needs d = 2 bodies");
    const ConvexBody poly = as_polygon(k);
    polys.push_back(poly.vertices());
    for (const auto& v : poly.vertices()) rmax = std::max(rmax, v.norm());
  }
  const double scale = rmax > 0 ? 0.4 * kPanel / rmax : 1.0;
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << cols * kPanel << "\" height=\"" << rows * kPanel
     << "\" viewBox=\"0 0 " << cols * kPanel << ' ' << rows * kPanel << "\">\n";
  os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  for (std::size_t i = 0; i < m; ++i) {
    const double cx = (static_cast<double>(i % cols) + 0.5) * kPanel;
    const double cy = (static_cast<double>(i / cols) + 0.5) * kPanel;
    os << "<g id=\"" << xml_escape(bodies[i].first) << "\">\n";
    os << "<line x1=\"" << fmt6(cx - 0.45 * kPanel) << "\" y1=\"" << fmt6(cy) << "\" x2=\"" << fmt6(cx + 0.45 * kPanel)
       << "\" y2=\"" << fmt6(cy) << "\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n";
    os << "<line x1=\"" << fmt6(cx) << "\" y1=\"" << fmt6(cy - 0.45 * kPanel) << "\" x2=\"" << fmt6(cx)
       << "\" y2=\"" << fmt6(cy + 0.45 * kPanel) << "\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n";
    os << "<polygon points=\"";
    for (std::size_t k = 0; k < polys[i].size(); ++k) {
      if (k) os << ' ';
      os << fmt6(cx + scale * polys[i][k].x()) << ',' << fmt6(cy - scale * polys[i][k].y());
    }
    os << "\" fill=\"#4682b4\" fill-opacity=\"0.35\" stroke=\"#1f3f5f\" stroke-width=\"1\"/>\n";
    os << "<text x=\"" << fmt6(cx - 0.47 * kPanel) << "\" y=\"" << fmt6(cy - 0.40 * kPanel)
       << "\" font-family=\"monospace\" font-size=\"11\">" << xml_escape(bodies[i].first) << "</text>\n";
    os << "</g>\n";
  }
  os << "</svg>\n";
  return os.str();
}

void emit_svg(const std::vector<LabeledBody>& bodies, const std::string& path) {
  write_text_file(path, render_svg(bodies));
}

int run(const std::vector<std::string>& args) {
  CLI::App app{"mwlab: matrix weights and convex-set valued maximal operators"};
  app.require_subcommand(1);
  std::string config_path;
  std::map<std::string, std::map<std::string, std::string>> raw;
  std::map<std::string, CLI::App*> subs;
  for (const auto& [name, help] : kCommands) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config_path, "JSON config with the same keys as the flags");
    for (const auto& k : keys_of(name)) {
      const Key& spec = key(k);
      sub->add_option_function<std::string>(
          "--" + dashed(k), [&raw, name = name, k](const std::string& v) { raw[name][k] = v; }, spec.help);
    }
    subs[name] = sub;
  }
  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    app.exit(e);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    std::cerr << "mwlab: " << e.what() << "\n";
    return kExitUsage;
  }
  std::string cmd;
  for (const auto& [name, sub] : subs)
    if (sub->parsed()) cmd = name;
  try {
    dispatch(resolve(cmd, config_path, raw[cmd]));
  } catch (const Error& e) {
    std::cerr << "mwlab " << cmd << ": " << e.what() << "\n";
    return e.is_solver_failure() ? kExitSolver : kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "mwlab " << cmd << ": " << e.what() << "\n";
    return kExitSolver;
  }
  return kExitOk;
}

int run(int argc, const char* const* argv) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args);
}

}  // namespace mwlab
