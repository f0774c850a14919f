#pragma once

#include <functional>
#include <string>
#include <vector>

#include "mwlab/body.hpp"
#include "mwlab/dyadic.hpp"

namespace mwlab {

struct ScalarField {
  DyadicDomain domain;
  std::vector<double> values;

  ScalarField() = default;
  ScalarField(DyadicDomain dom, std::vector<double> v);
  static ScalarField constant(const DyadicDomain& dom, double c);
  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
};

/// Piecewise-constant SPD-valued weight on the finest cells.
class MatrixWeight {
 public:
  MatrixWeight() = default;
  MatrixWeight(DyadicDomain dom, std::vector<SpdMatrix> cells);
  static MatrixWeight constant(const DyadicDomain& dom, const SpdMatrix& a);

  const DyadicDomain& domain() const { return dom_; }
  int dim() const { return d_; }
  std::size_t size() const { return cells_.size(); }
  const SpdMatrix& operator[](std::size_t i) const { return cells_[i]; }
  const std::vector<SpdMatrix>& cells() const { return cells_; }

  MatrixWeight inverse() const;
  /// cellwise s(x)^power * W(x)
  MatrixWeight scaled(const ScalarField& s, double power) const;
  MatrixWeight scaled(double c) const;
  /// true when every cell is a scalar multiple of the identity
  bool is_scalar() const;
  /// cellwise scalar w(x) when is_scalar()
  ScalarField scalar_part() const;

 private:
  DyadicDomain dom_;
  int d_ = 0;
  std::vector<SpdMatrix> cells_;
};

struct VectorField {
  DyadicDomain domain;
  int d = 0;
  std::vector<Vec> values;

  VectorField() = default;
  VectorField(DyadicDomain dom, int d, std::vector<Vec> v);
};

/// Piecewise-constant body-valued function.
class SetFunction {
 public:
  SetFunction() = default;
  SetFunction(DyadicDomain dom, std::vector<ConvexBody> cells);
  static SetFunction constant(const DyadicDomain& dom, const ConvexBody& k);

  const DyadicDomain& domain() const { return dom_; }
  int dim() const { return d_; }
  std::size_t size() const { return cells_.size(); }
  const ConvexBody& operator[](std::size_t i) const { return cells_[i]; }
  const std::vector<ConvexBody>& cells() const { return cells_; }

 private:
  DyadicDomain dom_;
  int d_ = 0;
  std::vector<ConvexBody> cells_;
};

void check_same_domain(const DyadicDomain& a, const DyadicDomain& b);

/// |x - c|^alpha * I evaluated at cell midpoints; cells whose closure contains
/// c use the cell average of |x - c|^alpha when it is finite (alpha > -n).
MatrixWeight gen_power_weight(const DyadicDomain& dom, int d, double alpha, const Vec& center);
/// cell average of |x - c|^alpha over the axis-parallel box [lo, hi] (c inside the box)
double box_power_average(const Vec& lo, const Vec& hi, const Vec& c, double alpha);

using PositionFn = std::function<double(const Vec&)>;
/// W(x) = R(omega * s(x)) diag(e^{a(x)}, e^{b(x)}) R(omega * s(x))^T, d = 2,
/// with s(x) the sum of the coordinates of the cell midpoint.
MatrixWeight gen_rotating_weight(const DyadicDomain& dom, const PositionFn& a, const PositionFn& b, double omega);
MatrixWeight gen_rotating_weight(const DyadicDomain& dom, double a, double b, double omega);

/// F(x) = conv{f(x), -f(x)}
SetFunction lift_vector_field(const VectorField& f);
/// F(x) = r(x) * W(x) B (ellipsoid-valued)
SetFunction ellipsoid_field(const MatrixWeight& w, const ScalarField* r = nullptr);

struct NamedWeight {
  std::string id;
  MatrixWeight w;
};
/// Deterministic family of genuinely matrix-valued (non-commuting) d = 2 weights.
std::vector<NamedWeight> weight_suite(const DyadicDomain& dom, int count);
/// gen_power_weight(dom, d, alpha, origin) for each alpha
std::vector<NamedWeight> power_sweep(const DyadicDomain& dom, int d, const std::vector<double>& alphas);

}  // namespace mwlab
