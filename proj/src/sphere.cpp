#include "mwlab/sphere.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <vector>

namespace mwlab {

namespace {

double radical_inverse(unsigned long long i, unsigned base) {
  double inv = 1.0 / base, f = inv, r = 0.0;
  while (i > 0) {
    r += f * static_cast<double>(i % base);
    i /= base;
    f *= inv;
  }
  return r;
}

// inverse of the standard normal CDF (Acklam's rational approximation, refined by one Halley step)
double normal_quantile(double p) {
  static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
                             1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00};
  static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
                             6.680131188771972e+01, -1.328068155288572e+01};
  static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
                             -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00};
  static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
                             3.754408661907416e+00};
  double x;
  if (p < 0.02425) {
    double q = std::sqrt(-2 * std::log(p));
    x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else if (p > 1 - 0.02425) {
    double q = std::sqrt(-2 * std::log(1 - p));
    x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
        ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1);
  } else {
    double q = p - 0.5, r = q * q;
    x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
        (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1);
  }
  double e = 0.5 * std::erfc(-x / std::sqrt(2.0)) - p;
  double u = e * std::sqrt(2 * std::numbers::pi) * std::exp(x * x / 2);
  return x - u / (1 + x * u / 2);
}

const unsigned kPrimes[] = {2, 3, 5, 7, 11, 13, 17, 19, 23, 29};

}  // namespace

Vec unit_from_angle(double theta) {
  Vec v(2);
  v << std::cos(theta), std::sin(theta);
  return v;
}

int DirectionGrid::default_size(int d) {
  switch (d) {
    case 1: return 2;
    case 2: return 256;
    case 3: return 1026;
    default: return 2048;
  }
}

DirectionGrid::DirectionGrid(int d, int n) : dim_(d), dirs_(d, n) {
  const int half = n / 2;
  if (d == 1) {
    dirs_(0, 0) = 1.0;
    dirs_(0, 1) = -1.0;
    return;
  }
  if (d == 2) {
    for (int k = 0; k < half; ++k) {
      const double th = 2.0 * std::numbers::pi * k / n;
      dirs_(0, k) = std::cos(th);
      dirs_(1, k) = std::sin(th);
    }
    dirs_(0, 0) = 1.0;
    dirs_(1, 0) = 0.0;
    if (half % 2 == 0) {
      dirs_(0, half / 2) = 0.0;
      dirs_(1, half / 2) = 1.0;
    }
  } else {
    for (int k = 0; k < d; ++k) {
      dirs_.col(k).setZero();
      dirs_(k, k) = 1.0;
    }
    if (d == 3) {
      const int m = half - 3;
      const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
      for (int i = 0; i < m; ++i) {
        const double z = (i + 0.5) / m;
        const double r = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        dirs_(0, 3 + i) = r * std::cos(phi);
        dirs_(1, 3 + i) = r * std::sin(phi);
        dirs_(2, 3 + i) = z;
      }
    } else {
      for (int i = d; i < half; ++i) {
        Vec g(d);
        for (int k = 0; k < d; ++k) g(k) = normal_quantile(radical_inverse(i + 1, kPrimes[k % 10]));
        // upper half-space representative
        if (g(d - 1) < 0) g = -g;
        dirs_.col(i) = g / g.norm();
      }
    }
  }
  for (int k = 0; k < half; ++k) dirs_.col(k + half) = -dirs_.col(k);
}

std::shared_ptr<const DirectionGrid> DirectionGrid::canonical(int d, int n) {
  if (d < 1) fail(ErrorKind::InvalidArgument, "direction grid needs d >= 1");
  if (n == 0) n = default_size(d);
  if (d == 1) n = 2;
  if (n % 2 != 0 || n < 2 * d) fail(ErrorKind::InvalidArgument, "direction grid size must be even and >= 2d");
  static std::mutex mu;
  static std::map<std::pair<int, int>, std::shared_ptr<const DirectionGrid>> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto& slot = cache[{d, n}];
  if (!slot) slot.reset(new DirectionGrid(d, n));
  return slot;
}

std::shared_ptr<const DirectionGrid> DirectionGrid::parse(int d, const std::string& name) {
  const std::string prefix = "canonical-";
  if (name.rfind(prefix, 0) != 0) fail(ErrorKind::SchemaMismatch, "unknown direction grid '" + name + "'");
  int n = 0;
  try {
    n = std::stoi(name.substr(prefix.size()));
  } catch (const std::exception&) {
    fail(ErrorKind::SchemaMismatch, "unknown direction grid '" + name + "'");
  }
  return canonical(d, n);
}

double DirectionGrid::angle(int i) const { return std::atan2(dirs_(1, i), dirs_(0, i)); }

namespace {

double golden_max(const std::function<double(double)>& g, double lo, double hi, double& best_x) {
  const double r = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - r * (hi - lo), x2 = lo + r * (hi - lo);
  double f1 = g(x1), f2 = g(x2);
  for (int it = 0; it < 60 && hi - lo > 1e-13; ++it) {
    if (f1 < f2) {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + r * (hi - lo);
      f2 = g(x2);
    } else {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - r * (hi - lo);
      f1 = g(x1);
    }
  }
  if (f1 >= f2) {
    best_x = x1;
    return f1;
  }
  best_x = x2;
  return f2;
}

}  // namespace

SphereMax maximize_on_sphere(const std::function<double(const Vec&)>& f, const DirectionGrid& grid,
                             int polish_candidates) {
  const int n = grid.size();
  const int d = grid.dim();
  std::vector<double> vals(n);
  for (int i = 0; i < n; ++i) vals[i] = f(grid.dir(i));
  SphereMax best;
  int ib = static_cast<int>(std::max_element(vals.begin(), vals.end()) - vals.begin());
  best.value = vals[ib];
  best.arg = grid.dir(ib);
  if (d == 1 || polish_candidates <= 0) return best;

  // candidates: best local maxima (d=2 by neighbor comparison, otherwise top values)
  std::vector<int> cand;
  if (d == 2) {
    for (int i = 0; i < n; ++i) {
      const double l = vals[(i + n - 1) % n], r = vals[(i + 1) % n];
      if (vals[i] >= l && vals[i] >= r) cand.push_back(i);
    }
  } else {
    cand.resize(n);
    for (int i = 0; i < n; ++i) cand[i] = i;
  }
  std::stable_sort(cand.begin(), cand.end(), [&](int a, int b) { return vals[a] > vals[b]; });
  if (static_cast<int>(cand.size()) > polish_candidates) cand.resize(polish_candidates);

  if (d == 2) {
    const double h = 2.0 * std::numbers::pi / n;
    for (int i : cand) {
      const double th = grid.angle(i);
      double x = th;
      const double v = golden_max([&](double t) { return f(unit_from_angle(t)); }, th - h, th + h, x);
      if (v > best.value) {
        best.value = v;
        best.arg = unit_from_angle(x);
      }
    }
    return best;
  }
  for (int i : cand) {
    Vec u = grid.dir(i);
    double fu = vals[i];
    double step = 2.0 / std::sqrt(static_cast<double>(n));
    while (step > 1e-10) {
      bool moved = false;
      // tangent basis by Gram-Schmidt against u
      for (int k = 0; k < d; ++k) {
        Vec e = Vec::Unit(d, k) - u(k) * u;
        const double en = e.norm();
        if (en < 1e-8) continue;
        e /= en;
        for (double sgn : {1.0, -1.0}) {
          Vec w = u + sgn * step * e;
          w.normalize();
          const double fw = f(w);
          if (fw > fu) {
            u = w;
            fu = fw;
            moved = true;
          }
        }
      }
      if (!moved) step *= 0.5;
    }
    if (fu > best.value) {
      best.value = fu;
      best.arg = u;
    }
  }
  return best;
}

}  // namespace mwlab
