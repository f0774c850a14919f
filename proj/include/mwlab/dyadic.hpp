#pragma once

#include <cstdint>
#include <vector>

#include "mwlab/spd.hpp"

namespace mwlab {

/// A dyadic subcube of the base cube: level 0 is the base cube itself.
/// Within a level, cubes are indexed lexicographically by their integer
/// coordinates (first coordinate most significant).
struct CubeId {
  int level = 0;
  std::int64_t index = 0;
  bool operator==(const CubeId&) const = default;
  auto operator<=>(const CubeId&) const = default;
};

class DyadicDomain {
 public:
  DyadicDomain() = default;
  DyadicDomain(int n, Vec origin, double size, int level);
  static DyadicDomain unit(int n, int level);

  int n() const { return n_; }
  const Vec& origin() const { return origin_; }
  double size() const { return size_; }
  int level() const { return level_; }

  std::int64_t num_cells() const { return cubes_at(level_); }
  std::int64_t cubes_at(int level) const { return std::int64_t{1} << (n_ * level); }
  std::int64_t cubes_total() const;
  double cell_measure() const { return cube_measure(level_); }
  double cube_measure(int level) const;
  double total_measure() const { return cube_measure(0); }
  double cell_edge() const { return cube_edge(level_); }
  double cube_edge(int level) const;

  /// integer coordinates of a cube at the given level
  std::vector<std::int64_t> coords(int level, std::int64_t index) const;
  std::int64_t index_of(int level, const std::vector<std::int64_t>& c) const;
  Vec cube_lower(CubeId q) const;
  Vec cell_midpoint(std::int64_t cell) const;
  /// finest-level ancestor chain: the cube at `level` containing `cell`
  CubeId ancestor(std::int64_t cell, int level) const;
  CubeId parent(CubeId q) const;
  std::vector<CubeId> children(CubeId q) const;
  /// finest cells inside q, in lexicographic order
  std::vector<std::int64_t> cells_in(CubeId q) const;
  /// all cubes ordered by (level, index)
  std::vector<CubeId> all_cubes() const;
  /// position of q in all_cubes()
  std::int64_t flat_id(CubeId q) const;
  void check_cube(CubeId q) const;

  bool operator==(const DyadicDomain& o) const;
  bool operator!=(const DyadicDomain& o) const { return !(*this == o); }

 private:
  int n_ = 1;
  Vec origin_ = Vec::Zero(1);
  double size_ = 1.0;
  int level_ = 0;
};

/// Bottom-up pyramid of per-cube aggregates. out[k][i] is the value for cube
/// (k, i); leaves are out[J]; combine receives the children in lexicographic order.
template <class T, class Combine>
std::vector<std::vector<T>> pyramid(const DyadicDomain& dom, std::vector<T> leaves, Combine combine) {
  const int J = dom.level();
  std::vector<std::vector<T>> out(J + 1);
  out[J] = std::move(leaves);
  for (int k = J - 1; k >= 0; --k) {
    const std::int64_t m = dom.cubes_at(k);
    out[k].reserve(m);
    for (std::int64_t i = 0; i < m; ++i) {
      std::vector<const T*> kids;
      for (const CubeId& c : dom.children({k, i})) kids.push_back(&out[k + 1][c.index]);
      out[k].push_back(combine(kids));
    }
  }
  return out;
}

}  // namespace mwlab
