#include "mwlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mwlab/error.hpp"

namespace mwlab {

std::string format_double(double x) {
  if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "cannot serialize a non-finite number");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s(buf);
  if (s.find_first_of(".eE") == std::string::npos) s += ".0";
  return s;
}

namespace {

void dump_string(std::ostringstream& os, const std::string& s) { os << Json(s).dump(); }

bool is_scalar(const Json& j) { return !j.is_array() && !j.is_object(); }

void dump_rec(std::ostringstream& os, const Json& j, int indent, int depth) {
  const std::string pad(static_cast<std::size_t>(indent * (depth + 1)), ' ');
  const std::string pad_end(static_cast<std::size_t>(indent * depth), ' ');
  switch (j.type()) {
    case Json::value_t::number_float:
      os << format_double(j.get<double>());
      return;
    case Json::value_t::string:
      dump_string(os, j.get<std::string>());
      return;
    case Json::value_t::array: {
      if (j.empty()) {
        os << "[]";
        return;
      }
      bool flat = true;
      for (const auto& e : j) flat = flat && (is_scalar(e) || (e.is_array() && std::all_of(e.begin(), e.end(), is_scalar)));
      if (flat && j.size() <= 4096) {
        os << '[';
        bool first = true;
        for (const auto& e : j) {
          if (!first) os << ", ";
          first = false;
          dump_rec(os, e, indent, depth + 1);
        }
        os << ']';
        return;
      }
      os << "[\n";
      bool first = true;
      for (const auto& e : j) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        dump_rec(os, e, indent, depth + 1);
      }
      os << '\n' << pad_end << ']';
      return;
    }
    case Json::value_t::object: {
      if (j.empty()) {
        os << "{}";
        return;
      }
      os << "{\n";
      bool first = true;
      for (auto it = j.begin(); it != j.end(); ++it) {
        if (!first) os << ",\n";
        first = false;
        os << pad;
        dump_string(os, it.key());
        os << ": ";
        dump_rec(os, it.value(), indent, depth + 1);
      }
      os << '\n' << pad_end << '}';
      return;
    }
    default:
      os << j.dump();
  }
}

const Json& member(const Json& j, const char* key, const std::string& where) {
  if (!j.is_object() || !j.contains(key)) fail(ErrorKind::SchemaMismatch, where + ": missing field \"" + key + "\"");
  return j.at(key);
}

double number(const Json& j, const std::string& where) {
  if (!j.is_number()) fail(ErrorKind::SchemaMismatch, where + ": expected a number");
  const double x = j.get<double>();
  if (!std::isfinite(x)) fail(ErrorKind::SchemaMismatch, where + ": non-finite number");
  return x;
}

int integer(const Json& j, const std::string& where) {
  if (!j.is_number_integer()) fail(ErrorKind::SchemaMismatch, where + ": expected an integer");
  return j.get<int>();
}

void expect_schema(const Json& j, const std::string& schema) {
  const Json& s = member(j, "schema", "file");
  if (!s.is_string() || s.get<std::string>() != schema)
    fail(ErrorKind::SchemaMismatch, "expected schema \"" + schema + "\"");
}

std::string cell_where(std::size_t i) { return "cell " + std::to_string(i); }

GridPtr grid_from_header(const Json& j, int d) {
  if (d <= 2 || !j.contains("dirs")) return DirectionGrid::canonical(d);
  if (!j.at("dirs").is_string()) fail(ErrorKind::SchemaMismatch, "dirs must be a string");
  try {
    return DirectionGrid::parse(d, j.at("dirs").get<std::string>());
  } catch (const Error& e) {
    fail(ErrorKind::SchemaMismatch, e.what());
  }
}

}  // namespace

std::string dump_json(const Json& j, int indent) {
  std::ostringstream os;
  dump_rec(os, j, indent, 0);
  os << '\n';
  return os.str();
}

Json parse_json_text(const std::string& text) {
  try {
    return Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    fail(ErrorKind::ParseError, e.what());
  }
}

Json read_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::InvalidArgument, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  try {
    return parse_json_text(ss.str());
  } catch (const Error& e) {
    fail(ErrorKind::ParseError, path + ": " + e.what());
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::InvalidArgument, "cannot write " + path);
  out << text;
  if (!out) fail(ErrorKind::InvalidArgument, "write failed for " + path);
}

Json matrix_to_json(const Mat& m) {
  Json a = Json::array();
  for (int i = 0; i < m.rows(); ++i)
    for (int j = 0; j < m.cols(); ++j) a.push_back(m(i, j));
  return a;
}

Mat matrix_from_json(const Json& j, int d, const std::string& where) {
  if (!j.is_array() || static_cast<int>(j.size()) != d * d)
    fail(ErrorKind::SchemaMismatch, where + ": expected " + std::to_string(d * d) + " matrix entries");
  Mat m(d, d);
  for (int i = 0; i < d; ++i)
    for (int k = 0; k < d; ++k) m(i, k) = number(j[i * d + k], where);
  return m;
}

Json domain_to_json(const DyadicDomain& dom) {
  Json o = Json::object();
  Json origin = Json::array();
  for (int i = 0; i < dom.n(); ++i) origin.push_back(dom.origin()(i));
  o["origin"] = origin;
  o["size"] = dom.size();
  return o;
}

namespace {

DyadicDomain domain_from_header(const Json& j) {
  const int n = integer(member(j, "n", "header"), "n");
  const Json& d = member(j, "domain", "header");
  const Json& origin = member(d, "origin", "domain");
  if (!origin.is_array() || static_cast<int>(origin.size()) != n) fail(ErrorKind::SchemaMismatch, "domain origin must have n entries");
  Vec o(n);
  for (int i = 0; i < n; ++i) o(i) = number(origin[i], "domain origin");
  const double size = number(member(d, "size", "domain"), "domain size");
  const int level = integer(member(j, "level", "header"), "level");
  try {
    return DyadicDomain(n, o, size, level);
  } catch (const Error& e) {
    fail(ErrorKind::SchemaMismatch, e.what());
  }
}

void put_header(Json& o, const char* schema, const DyadicDomain& dom, int d) {
  o["schema"] = schema;
  o["n"] = dom.n();
  o["d"] = d;
  o["domain"] = domain_to_json(dom);
  o["level"] = dom.level();
}

const Json& cells_array(const Json& j, const DyadicDomain& dom, const char* key) {
  const Json& c = member(j, key, "file");
  if (!c.is_array() || static_cast<std::int64_t>(c.size()) != dom.num_cells())
    fail(ErrorKind::SchemaMismatch, std::string(key) + " must list " + std::to_string(dom.num_cells()) + " cells");
  return c;
}

}  // namespace

DyadicDomain domain_from_json(const Json& j) { return domain_from_header(j); }

Json body_to_json(const ConvexBody& k) {
  Json o = Json::object();
  switch (k.form()) {
    case ConvexBody::Form::Ellipsoid:
      o["type"] = "ellipsoid";
      o["m"] = matrix_to_json(k.ellipsoid_matrix());
      break;
    case ConvexBody::Form::Polygon: {
      o["type"] = "polygon";
      Json v = Json::array();
      for (const auto& p : k.vertices()) v.push_back(Json::array({p.x(), p.y()}));
      o["verts"] = v;
      break;
    }
    case ConvexBody::Form::Support: {
      o["type"] = "support";
      Json h = Json::array();
      for (double x : k.support_values()) h.push_back(x);
      o["h"] = h;
      break;
    }
  }
  return o;
}

ConvexBody body_from_json(const Json& j, int d, const GridPtr& grid, const std::string& where) {
  const Json& t = member(j, "type", where);
  if (!t.is_string()) fail(ErrorKind::SchemaMismatch, where + ": body type must be a string");
  const std::string type = t.get<std::string>();
  try {
    if (type == "ellipsoid") return ConvexBody::ellipsoid(matrix_from_json(member(j, "m", where), d, where));
    if (type == "polygon") {
      if (d != 2) fail(ErrorKind::SchemaMismatch, where + ": polygon bodies need d = 2");
      const Json& v = member(j, "verts", where);
      if (!v.is_array()) fail(ErrorKind::SchemaMismatch, where + ": verts must be an array");
      std::vector<Vec2> pts;
      for (const auto& p : v) {
        if (!p.is_array() || p.size() != 2) fail(ErrorKind::SchemaMismatch, where + ": vertices must be pairs");
        pts.emplace_back(number(p[0], where), number(p[1], where));
      }
      return ConvexBody::polygon(pts);
    }
    if (type == "support") {
      const Json& h = member(j, "h", where);
      if (!h.is_array() || static_cast<int>(h.size()) != grid->size())
        fail(ErrorKind::SchemaMismatch, where + ": support samples must match the direction grid");
      std::vector<double> v;
      for (const auto& x : h) v.push_back(number(x, where));
      return ConvexBody::support_sampled(grid, v);
    }
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::SchemaMismatch) throw;
    fail(e.kind(), where + ": " + e.what());
  }
  fail(ErrorKind::SchemaMismatch, where + ": unknown body type \"" + type + "\"");
}

Json weight_to_json(const MatrixWeight& w) {
  Json o = Json::object();
  put_header(o, "mwlab-weight-v1", w.domain(), w.dim());
  Json cells = Json::array();
  for (const auto& c : w.cells()) cells.push_back(matrix_to_json(c.mat()));
  o["cells"] = cells;
  return o;
}

MatrixWeight weight_from_json(const Json& j) {
  expect_schema(j, "mwlab-weight-v1");
  const DyadicDomain dom = domain_from_header(j);
  const int d = integer(member(j, "d", "header"), "d");
  if (d < 1) fail(ErrorKind::SchemaMismatch, "d must be positive");
  const Json& cells = cells_array(j, dom, "cells");
  std::vector<SpdMatrix> out;
  out.reserve(cells.size());
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const Mat m = matrix_from_json(cells[i], d, cell_where(i));
    try {
      out.emplace_back(m);
    } catch (const Error& e) {
      fail(ErrorKind::NotSPD, cell_where(i) + ": " + e.what());
    }
  }
  return MatrixWeight(dom, std::move(out));
}

void save_weight(const MatrixWeight& w, const std::string& path) { write_text_file(path, dump_json(weight_to_json(w))); }
MatrixWeight load_weight(const std::string& path) { return weight_from_json(read_json_file(path)); }

Json setfunction_to_json(const SetFunction& f) {
  Json o = Json::object();
  put_header(o, "mwlab-setfunction-v1", f.domain(), f.dim());
  GridPtr g = DirectionGrid::canonical(f.dim());
  for (const auto& k : f.cells())
    if (k.form() == ConvexBody::Form::Support) g = k.grid();
  o["dirs"] = g->name();
  Json cells = Json::array();
  for (const auto& k : f.cells()) cells.push_back(body_to_json(k));
  o["cells"] = cells;
  return o;
}

SetFunction setfunction_from_json(const Json& j) {
  expect_schema(j, "mwlab-setfunction-v1");
  const DyadicDomain dom = domain_from_header(j);
  const int d = integer(member(j, "d", "header"), "d");
  if (d < 1) fail(ErrorKind::SchemaMismatch, "d must be positive");
  const GridPtr grid = grid_from_header(j, d);
  const Json& cells = cells_array(j, dom, "cells");
  std::vector<ConvexBody> out;
  for (std::size_t i = 0; i < cells.size(); ++i) out.push_back(body_from_json(cells[i], d, grid, cell_where(i)));
  return SetFunction(dom, std::move(out));
}

void save_setfunction(const SetFunction& f, const std::string& path) {
  write_text_file(path, dump_json(setfunction_to_json(f)));
}
SetFunction load_setfunction(const std::string& path) { return setfunction_from_json(read_json_file(path)); }

Json scalar_field_to_json(const ScalarField& f) {
  Json o = Json::object();
  put_header(o, "mwlab-scalar-v1", f.domain, 1);
  Json v = Json::array();
  for (double x : f.values) v.push_back(x);
  o["values"] = v;
  return o;
}

ScalarField scalar_field_from_json(const Json& j) {
  expect_schema(j, "mwlab-scalar-v1");
  const DyadicDomain dom = domain_from_header(j);
  const Json& v = cells_array(j, dom, "values");
  std::vector<double> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back(number(v[i], cell_where(i)));
  return ScalarField(dom, std::move(out));
}

Json vector_field_to_json(const VectorField& f) {
  Json o = Json::object();
  put_header(o, "mwlab-vector-v1", f.domain, f.d);
  Json v = Json::array();
  for (const auto& x : f.values) {
    Json e = Json::array();
    for (int i = 0; i < x.size(); ++i) e.push_back(x(i));
    v.push_back(e);
  }
  o["values"] = v;
  return o;
}

VectorField vector_field_from_json(const Json& j) {
  expect_schema(j, "mwlab-vector-v1");
  const DyadicDomain dom = domain_from_header(j);
  const int d = integer(member(j, "d", "header"), "d");
  const Json& v = cells_array(j, dom, "values");
  std::vector<Vec> out;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_array() || static_cast<int>(v[i].size()) != d) fail(ErrorKind::SchemaMismatch, cell_where(i) + ": expected d entries");
    Vec x(d);
    for (int k = 0; k < d; ++k) x(k) = number(v[i][k], cell_where(i));
    out.push_back(x);
  }
  return VectorField(dom, d, std::move(out));
}

}  // namespace mwlab
