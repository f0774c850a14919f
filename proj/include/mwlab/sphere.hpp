#pragma once

#include <functional>
#include <memory>
#include <string>

#include "mwlab/spd.hpp"

namespace mwlab {

/// Deterministic symmetric discretization of the unit sphere.
/// Index i and i + N/2 are exact negatives of each other.
class DirectionGrid {
 public:
  static std::shared_ptr<const DirectionGrid> canonical(int d, int n = 0);
  static std::shared_ptr<const DirectionGrid> parse(int d, const std::string& name);
  static int default_size(int d);

  int dim() const { return dim_; }
  int size() const { return static_cast<int>(dirs_.cols()); }
  int opposite(int i) const { return (i + size() / 2) % size(); }
  Eigen::Ref<const Vec> dir(int i) const { return dirs_.col(i); }
  const Mat& matrix() const { return dirs_; }
  std::string name() const { return "canonical-" + std::to_string(size()); }
  // d=2 only: angle of direction i
  double angle(int i) const;

 private:
  DirectionGrid(int d, int n);
  int dim_;
  Mat dirs_;
};

using GridPtr = std::shared_ptr<const DirectionGrid>;

struct SphereMax {
  double value = 0.0;
  Vec arg;
};

/// Maximize f over the unit sphere: grid scan followed by local polish of the
/// best local maxima (golden section at d=2, pattern search at d>=3).
SphereMax maximize_on_sphere(const std::function<double(const Vec&)>& f, const DirectionGrid& grid,
                             int polish_candidates = 3);

Vec unit_from_angle(double theta);

}  // namespace mwlab
