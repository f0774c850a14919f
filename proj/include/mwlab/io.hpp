#pragma once

#include <string>

#include "json.hpp"
#include "mwlab/fields.hpp"

namespace mwlab {

using Json = nlohmann::ordered_json;

/// 17 significant digits, always with a decimal point or exponent.
std::string format_double(double x);
/// Deterministic serializer: fixed key order, floats via format_double,
/// arrays of scalars on one line.
std::string dump_json(const Json& j, int indent = 2);

Json read_json_file(const std::string& path);
Json parse_json_text(const std::string& text);
void write_text_file(const std::string& path, const std::string& text);

Json matrix_to_json(const Mat& m);  // row-major flat array
Mat matrix_from_json(const Json& j, int d, const std::string& where);

Json domain_to_json(const DyadicDomain& dom);
DyadicDomain domain_from_json(const Json& j);

Json body_to_json(const ConvexBody& k);
ConvexBody body_from_json(const Json& j, int d, const GridPtr& grid, const std::string& where);

Json weight_to_json(const MatrixWeight& w);
MatrixWeight weight_from_json(const Json& j);
void save_weight(const MatrixWeight& w, const std::string& path);
MatrixWeight load_weight(const std::string& path);

Json setfunction_to_json(const SetFunction& f);
SetFunction setfunction_from_json(const Json& j);
void save_setfunction(const SetFunction& f, const std::string& path);
SetFunction load_setfunction(const std::string& path);

Json scalar_field_to_json(const ScalarField& f);
ScalarField scalar_field_from_json(const Json& j);
Json vector_field_to_json(const VectorField& f);
VectorField vector_field_from_json(const Json& j);

}  // namespace mwlab
