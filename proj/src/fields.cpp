#include "mwlab/fields.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "mwlab/error.hpp"

namespace mwlab {

void check_same_domain(const DyadicDomain& a, const DyadicDomain& b) {
  if (a != b) fail(ErrorKind::DomainMismatch, "fields live on different dyadic domains");
}

namespace {

void check_count(const DyadicDomain& dom, std::size_t n, const char* what) {
  if (static_cast<std::int64_t>(n) != dom.num_cells()) {
    std::ostringstream os;
    os << what << " has " << n << " cells, domain has " << dom.num_cells();
    fail(ErrorKind::DimensionMismatch, os.str());
  }
}

}  // namespace

ScalarField::ScalarField(DyadicDomain dom, std::vector<double> v) : domain(std::move(dom)), values(std::move(v)) {
  check_count(domain, values.size(), "scalar field");
  for (double x : values)
    if (!std::isfinite(x)) fail(ErrorKind::InvalidArgument, "scalar field has non-finite values");
}

ScalarField ScalarField::constant(const DyadicDomain& dom, double c) {
  return ScalarField(dom, std::vector<double>(dom.num_cells(), c));
}

MatrixWeight::MatrixWeight(DyadicDomain dom, std::vector<SpdMatrix> cells) : dom_(std::move(dom)), cells_(std::move(cells)) {
  check_count(dom_, cells_.size(), "matrix weight");
  d_ = cells_.front().dim();
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (cells_[i].dim() != d_) fail(ErrorKind::DimensionMismatch, "weight cells have different sizes");
    if (!cells_[i].mat().allFinite()) {
      std::ostringstream os;
      os << "cell " << i << " has non-finite entries";
      fail(ErrorKind::NotSPD, os.str());
    }
  }
}

MatrixWeight MatrixWeight::constant(const DyadicDomain& dom, const SpdMatrix& a) {
  return MatrixWeight(dom, std::vector<SpdMatrix>(dom.num_cells(), a));
}

MatrixWeight MatrixWeight::inverse() const {
  std::vector<SpdMatrix> out;
  out.reserve(cells_.size());
  for (const auto& c : cells_) out.push_back(spd_inverse(c));
  return MatrixWeight(dom_, std::move(out));
}

MatrixWeight MatrixWeight::scaled(const ScalarField& s, double power) const {
  check_same_domain(dom_, s.domain);
  std::vector<SpdMatrix> out;
  out.reserve(cells_.size());
  for (std::size_t i = 0; i < cells_.size(); ++i) {
    if (!(s.values[i] > 0)) fail(ErrorKind::NotSPD, "scaling field must be positive");
    out.push_back(SpdMatrix::trusted(std::pow(s.values[i], power) * cells_[i].mat()));
  }
  return MatrixWeight(dom_, std::move(out));
}

MatrixWeight MatrixWeight::scaled(double c) const {
  if (!(c > 0)) fail(ErrorKind::NotSPD, "scale must be positive");
  std::vector<SpdMatrix> out;
  out.reserve(cells_.size());
  for (const auto& m : cells_) out.push_back(SpdMatrix::trusted(c * m.mat()));
  return MatrixWeight(dom_, std::move(out));
}

bool MatrixWeight::is_scalar() const {
  for (const auto& c : cells_) {
    const Mat& m = c.mat();
    const Mat diff = m - m(0, 0) * Mat::Identity(d_, d_);
    if (diff.cwiseAbs().maxCoeff() != 0.0) return false;
  }
  return true;
}

ScalarField MatrixWeight::scalar_part() const {
  if (!is_scalar()) fail(ErrorKind::InvalidArgument, "weight is not a scalar multiple of the identity");
  std::vector<double> v;
  v.reserve(cells_.size());
  for (const auto& c : cells_) v.push_back(c(0, 0));
  return ScalarField(dom_, std::move(v));
}

VectorField::VectorField(DyadicDomain dom, int dd, std::vector<Vec> v) : domain(std::move(dom)), d(dd), values(std::move(v)) {
  check_count(domain, values.size(), "vector field");
  for (const auto& x : values) {
    if (x.size() != d) fail(ErrorKind::DimensionMismatch, "vector field entries have the wrong length");
    if (!x.allFinite()) fail(ErrorKind::InvalidArgument, "vector field has non-finite entries");
  }
}

SetFunction::SetFunction(DyadicDomain dom, std::vector<ConvexBody> cells) : dom_(std::move(dom)), cells_(std::move(cells)) {
  check_count(dom_, cells_.size(), "set function");
  d_ = cells_.front().dim();
  for (const auto& k : cells_)
    if (k.dim() != d_) fail(ErrorKind::DimensionMismatch, "set function bodies have different dimensions");
}

SetFunction SetFunction::constant(const DyadicDomain& dom, const ConvexBody& k) {
  return SetFunction(dom, std::vector<ConvexBody>(dom.num_cells(), k));
}

namespace {

double simpson(const std::function<double(double)>& f, double a, double b, int panels = 16384) {
  if (b <= a) return 0.0;
  const double h = (b - a) / panels;
  double s = f(a) + f(b);
  for (int i = 1; i < panels; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
  return s * h / 3.0;
}

// integral of |x|^alpha over [0,A] x [0,B] in polar coordinates
double corner_integral(double a, double b, double alpha) {
  if (a <= 0 || b <= 0) return 0.0;
  const double phi = std::atan2(b, a);
  const double e = alpha + 2.0;
  auto f1 = [&](double th) { return std::pow(a / std::cos(th), e) / e; };
  auto f2 = [&](double th) { return std::pow(b / std::sin(th), e) / e; };
  return simpson(f1, 0.0, phi) + simpson(f2, phi, 0.5 * std::numbers::pi);
}

}  // namespace

double box_power_average(const Vec& lo, const Vec& hi, const Vec& c, double alpha) {
  const int n = static_cast<int>(lo.size());
  if (alpha <= -n) fail(ErrorKind::InvalidArgument, "power average diverges for alpha <= -n");
  for (int i = 0; i < n; ++i)
    if (c(i) < lo(i) || c(i) > hi(i)) fail(ErrorKind::InvalidArgument, "center must lie in the box");
  if (n == 1) {
    const double l = c(0) - lo(0), r = hi(0) - c(0);
    return (std::pow(l, alpha + 1) + std::pow(r, alpha + 1)) / ((alpha + 1) * (hi(0) - lo(0)));
  }
  const double l0 = c(0) - lo(0), r0 = hi(0) - c(0), l1 = c(1) - lo(1), r1 = hi(1) - c(1);
  const double total = corner_integral(l0, l1, alpha) + corner_integral(r0, l1, alpha) + corner_integral(l0, r1, alpha) +
                       corner_integral(r0, r1, alpha);
  return total / ((hi(0) - lo(0)) * (hi(1) - lo(1)));
}

MatrixWeight gen_power_weight(const DyadicDomain& dom, int d, double alpha, const Vec& center) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "weight dimension must be positive");
  if (center.size() != dom.n()) fail(ErrorKind::DimensionMismatch, "center must have n coordinates");
  const double h = dom.cell_edge();
  std::vector<SpdMatrix> cells;
  cells.reserve(dom.num_cells());
  for (std::int64_t i = 0; i < dom.num_cells(); ++i) {
    const Vec lo = dom.cube_lower({dom.level(), i});
    const Vec hi = lo + Vec::Constant(dom.n(), h);
    bool touches = true;
    for (int k = 0; k < dom.n(); ++k) touches = touches && center(k) >= lo(k) && center(k) <= hi(k);
    double v;
    if (touches && alpha > -dom.n()) {
      v = box_power_average(lo, hi, center, alpha);
    } else {
      const double r = (dom.cell_midpoint(i) - center).norm();
      if (r == 0.0 && alpha < 0) fail(ErrorKind::InvalidArgument, "power weight is infinite at the center cell");
      v = std::pow(r, alpha);
    }
    cells.push_back(SpdMatrix::trusted(v * Mat::Identity(d, d)));
  }
  return MatrixWeight(dom, std::move(cells));
}

MatrixWeight gen_rotating_weight(const DyadicDomain& dom, const PositionFn& a, const PositionFn& b, double omega) {
  std::vector<SpdMatrix> cells;
  cells.reserve(dom.num_cells());
  for (std::int64_t i = 0; i < dom.num_cells(); ++i) {
    const Vec x = dom.cell_midpoint(i);
    const double th = omega * x.sum();
    Mat r(2, 2);
    r << std::cos(th), -std::sin(th), std::sin(th), std::cos(th);
    Vec dg(2);
    dg << std::exp(a(x)), std::exp(b(x));
    cells.emplace_back(r * dg.asDiagonal() * r.transpose());
  }
  return MatrixWeight(dom, std::move(cells));
}

MatrixWeight gen_rotating_weight(const DyadicDomain& dom, double a, double b, double omega) {
  return gen_rotating_weight(dom, [a](const Vec&) { return a; }, [b](const Vec&) { return b; }, omega);
}

SetFunction lift_vector_field(const VectorField& f) {
  std::vector<ConvexBody> cells;
  cells.reserve(f.values.size());
  for (const auto& v : f.values) cells.push_back(ConvexBody::segment(v));
  return SetFunction(f.domain, std::move(cells));
}

SetFunction ellipsoid_field(const MatrixWeight& w, const ScalarField* r) {
  if (r) check_same_domain(w.domain(), r->domain);
  std::vector<ConvexBody> cells;
  cells.reserve(w.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double s = r ? r->values[i] : 1.0;
    if (s < 0) fail(ErrorKind::InvalidArgument, "ellipsoid radius field must be nonnegative");
    cells.push_back(ConvexBody::ellipsoid(s * w[i].mat()));
  }
  return SetFunction(w.domain(), std::move(cells));
}

std::vector<NamedWeight> weight_suite(const DyadicDomain& dom, int count) {
  std::vector<NamedWeight> out;
  const double pi = std::numbers::pi;
  auto unit = [&dom](const Vec& x) { return (x.sum() - dom.origin().sum()) / (dom.n() * dom.size()); };
  for (int i = 0; i < count; ++i) {
    const int k = i / 3;
    std::ostringstream id;
    MatrixWeight w;
    switch (i % 3) {
      case 0: {
        const double amp = 0.5 + 0.25 * k;
        w = gen_rotating_weight(
            dom, [=](const Vec& x) { return 1.0 + amp * std::sin(2 * pi * unit(x)); }, [](const Vec&) { return -0.5; },
            2 * pi * (1 + k % 2) / dom.size());
        id << "rot-sin-" << k;
        break;
      }
      case 1: {
        const double alpha = (k % 2 ? -1.0 : 1.0) * (0.15 + 0.05 * (k % 3));
        w = gen_rotating_weight(
            dom, [=](const Vec& x) { return alpha * std::log(unit(x)) + 0.7; },
            [=](const Vec& x) { return alpha * std::log(unit(x)) - 0.7; }, pi / dom.size());
        id << "rot-power-" << k;
        break;
      }
      default: {
        const double s = 1.0 + 0.5 * k;
        w = gen_rotating_weight(
            dom, [=](const Vec& x) { return 2.0 * s * unit(x); }, [=](const Vec& x) { return -s * unit(x); },
            3 * pi / dom.size());
        id << "rot-exp-" << k;
        break;
      }
    }
    out.push_back({id.str(), std::move(w)});
  }
  return out;
}

std::vector<NamedWeight> power_sweep(const DyadicDomain& dom, int d, const std::vector<double>& alphas) {
  std::vector<NamedWeight> out;
  for (double a : alphas) {
    std::ostringstream id;
    id.precision(10);
    id << "power-" << a;
    out.push_back({id.str(), gen_power_weight(dom, d, a, dom.origin())});
  }
  return out;
}

}  // namespace mwlab
