#include "mwlab/dyadic.hpp"

#include <cmath>
#include <sstream>

#include "mwlab/error.hpp"

namespace mwlab {

DyadicDomain::DyadicDomain(int n, Vec origin, double size, int level)
    : n_(n), origin_(std::move(origin)), size_(size), level_(level) {
  if (n != 1 && n != 2) fail(ErrorKind::InvalidArgument, "domain dimension n must be 1 or 2");
  if (origin_.size() != n) fail(ErrorKind::DimensionMismatch, "domain origin must have n coordinates");
  if (!origin_.allFinite() || !std::isfinite(size) || !(size > 0)) fail(ErrorKind::InvalidArgument, "domain size must be positive and finite");
  if (level < 0 || n * level > 40) fail(ErrorKind::InvalidArgument, "domain level out of range");
}

DyadicDomain DyadicDomain::unit(int n, int level) { return DyadicDomain(n, Vec::Zero(n), 1.0, level); }

std::int64_t DyadicDomain::cubes_total() const {
  std::int64_t t = 0;
  for (int k = 0; k <= level_; ++k) t += cubes_at(k);
  return t;
}

double DyadicDomain::cube_edge(int level) const { return std::ldexp(size_, -level); }

double DyadicDomain::cube_measure(int level) const { return std::pow(cube_edge(level), n_); }

std::vector<std::int64_t> DyadicDomain::coords(int level, std::int64_t index) const {
  if (n_ == 1) return {index};
  const std::int64_t side = std::int64_t{1} << level;
  return {index / side, index % side};
}

std::int64_t DyadicDomain::index_of(int level, const std::vector<std::int64_t>& c) const {
  if (n_ == 1) return c[0];
  return (c[0] << level) + c[1];
}

void DyadicDomain::check_cube(CubeId q) const {
  if (q.level < 0 || q.level > level_ || q.index < 0 || q.index >= cubes_at(q.level)) {
    std::ostringstream os;
    os << "cube (level " << q.level << ", index " << q.index << ") is not a dyadic subcube of the domain";
    fail(ErrorKind::CubeOutsideDomain, os.str());
  }
}

Vec DyadicDomain::cube_lower(CubeId q) const {
  check_cube(q);
  const auto c = coords(q.level, q.index);
  Vec x(n_);
  for (int i = 0; i < n_; ++i) x(i) = origin_(i) + static_cast<double>(c[i]) * cube_edge(q.level);
  return x;
}

Vec DyadicDomain::cell_midpoint(std::int64_t cell) const {
  return cube_lower({level_, cell}) + Vec::Constant(n_, 0.5 * cell_edge());
}

CubeId DyadicDomain::ancestor(std::int64_t cell, int level) const {
  check_cube({level_, cell});
  if (level < 0 || level > level_) fail(ErrorKind::CubeOutsideDomain, "ancestor level out of range");
  auto c = coords(level_, cell);
  for (auto& x : c) x >>= (level_ - level);
  return {level, index_of(level, c)};
}

CubeId DyadicDomain::parent(CubeId q) const {
  check_cube(q);
  if (q.level == 0) fail(ErrorKind::CubeOutsideDomain, "the base cube has no parent");
  auto c = coords(q.level, q.index);
  for (auto& x : c) x >>= 1;
  return {q.level - 1, index_of(q.level - 1, c)};
}

std::vector<CubeId> DyadicDomain::children(CubeId q) const {
  check_cube(q);
  if (q.level == level_) return {};
  const auto c = coords(q.level, q.index);
  std::vector<CubeId> out;
  if (n_ == 1) {
    out.push_back({q.level + 1, 2 * c[0]});
    out.push_back({q.level + 1, 2 * c[0] + 1});
  } else {
    for (int a = 0; a < 2; ++a)
      for (int b = 0; b < 2; ++b) out.push_back({q.level + 1, index_of(q.level + 1, {2 * c[0] + a, 2 * c[1] + b})});
  }
  return out;
}

std::vector<std::int64_t> DyadicDomain::cells_in(CubeId q) const {
  check_cube(q);
  const auto c = coords(q.level, q.index);
  const int shift = level_ - q.level;
  const std::int64_t w = std::int64_t{1} << shift;
  std::vector<std::int64_t> out;
  if (n_ == 1) {
    for (std::int64_t i = 0; i < w; ++i) out.push_back((c[0] << shift) + i);
  } else {
    for (std::int64_t i = 0; i < w; ++i)
      for (std::int64_t j = 0; j < w; ++j) out.push_back(index_of(level_, {(c[0] << shift) + i, (c[1] << shift) + j}));
  }
  return out;
}

std::vector<CubeId> DyadicDomain::all_cubes() const {
  std::vector<CubeId> out;
  out.reserve(cubes_total());
  for (int k = 0; k <= level_; ++k)
    for (std::int64_t i = 0; i < cubes_at(k); ++i) out.push_back({k, i});
  return out;
}

std::int64_t DyadicDomain::flat_id(CubeId q) const {
  check_cube(q);
  std::int64_t t = 0;
  for (int k = 0; k < q.level; ++k) t += cubes_at(k);
  return t + q.index;
}

bool DyadicDomain::operator==(const DyadicDomain& o) const {
  return n_ == o.n_ && level_ == o.level_ && size_ == o.size_ && origin_ == o.origin_;
}

}  // namespace mwlab
