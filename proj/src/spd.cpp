#include "mwlab/spd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace mwlab {

SymEigen jacobi_eigen(const Mat& a_in, double tol) {
  const int n = static_cast<int>(a_in.rows());
  if (a_in.cols() != n) fail(ErrorKind::DimensionMismatch, "jacobi_eigen needs a square matrix");
  Mat a = 0.5 * (a_in + a_in.transpose());
  Mat v = Mat::Identity(n, n);
  const double scale = std::max(a.norm(), 1e-300);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) off += a(i, j) * a(i, j);
    if (std::sqrt(2.0 * off) <= tol * scale) break;
    for (int p = 0; p < n; ++p) {
      for (int q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (int k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (int k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (int k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<int> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int i, int j) { return a(i, i) < a(j, j); });
  SymEigen out{Vec(n), Mat(n, n)};
  for (int k = 0; k < n; ++k) {
    out.values(k) = a(order[k], order[k]);
    out.vectors.col(k) = v.col(order[k]);
  }
  return out;
}

bool is_symmetric(const Mat& m, double rel_tol) {
  if (m.rows() != m.cols()) return false;
  return (m - m.transpose()).norm() <= rel_tol * std::max(m.norm(), 1e-300);
}

namespace {

void validate_spd(const Mat& m) {
  if (m.rows() != m.cols() || m.rows() == 0) fail(ErrorKind::NotSPD, "matrix is not square");
  if (!m.allFinite()) fail(ErrorKind::NotSPD, "non-finite entries");
  if (!is_symmetric(m)) fail(ErrorKind::NotSPD, "matrix is not symmetric");
  const SymEigen e = jacobi_eigen(m);
  if (!(e.values(0) > 0.0)) {
    std::ostringstream os;
    os << "smallest eigenvalue " << e.values(0) << " is not positive";
    fail(ErrorKind::NotSPD, os.str());
  }
}

template <class F>
Mat spectral_apply(const Mat& a, F f) {
  const SymEigen e = jacobi_eigen(a);
  Vec fv(e.values.size());
  for (int i = 0; i < fv.size(); ++i) fv(i) = f(e.values(i));
  Mat r = e.vectors * fv.asDiagonal() * e.vectors.transpose();
  return 0.5 * (r + r.transpose());
}

}  // namespace

SpdMatrix::SpdMatrix(const Mat& m) : m_(0.5 * (m + m.transpose())) { validate_spd(m); }

SpdMatrix SpdMatrix::identity(int d) { return trusted(Mat::Identity(d, d)); }

SpdMatrix SpdMatrix::diagonal(const Vec& diag) { return SpdMatrix(Mat(diag.asDiagonal())); }

SpdMatrix SpdMatrix::trusted(const Mat& m) {
  SpdMatrix s;
  s.m_ = 0.5 * (m + m.transpose());
  return s;
}

SpdMatrix spd_sqrt(const SpdMatrix& a) {
  return SpdMatrix::trusted(spectral_apply(a.mat(), [](double x) { return std::sqrt(x); }));
}

SpdMatrix spd_power(const SpdMatrix& a, double t) {
  if (t == 1.0) return a;
  return SpdMatrix::trusted(spectral_apply(a.mat(), [t](double x) { return std::pow(x, t); }));
}

SpdMatrix spd_inverse(const SpdMatrix& a) {
  return SpdMatrix::trusted(spectral_apply(a.mat(), [](double x) { return 1.0 / x; }));
}

double spd_min_eigenvalue(const SpdMatrix& a) { return jacobi_eigen(a.mat()).values(0); }

double op_norm(const Mat& a) {
  if (a.size() == 0) return 0.0;
  const SymEigen e = jacobi_eigen(a.transpose() * a);
  return std::sqrt(std::max(0.0, e.values(e.values.size() - 1)));
}

PolarDecomposition polar_decompose(const Mat& a) {
  if (a.rows() != a.cols()) fail(ErrorKind::DimensionMismatch, "polar_decompose needs a square matrix");
  const SymEigen e = jacobi_eigen(a.transpose() * a);
  const double smax = std::sqrt(std::max(0.0, e.values(e.values.size() - 1)));
  const double smin = std::sqrt(std::max(0.0, e.values(0)));
  if (!(smin > 1e-14 * smax)) fail(ErrorKind::Singular, "matrix is singular");
  Vec s(e.values.size()), sinv(e.values.size());
  for (int i = 0; i < s.size(); ++i) {
    s(i) = std::sqrt(e.values(i));
    sinv(i) = 1.0 / s(i);
  }
  Mat w = e.vectors * s.asDiagonal() * e.vectors.transpose();
  Mat winv = e.vectors * sinv.asDiagonal() * e.vectors.transpose();
  return {a * winv, SpdMatrix::trusted(w)};
}

SimultaneousDiagonalization sim_diag(const SpdMatrix& a, const SpdMatrix& b) {
  const int d = a.dim();
  if (b.dim() != d) fail(ErrorKind::DimensionMismatch, "sim_diag operands differ in size");
  Eigen::LLT<Mat> llt(a.mat());
  if (llt.info() != Eigen::Success) fail(ErrorKind::NotSPD, "Cholesky factorization failed");
  const Mat l = llt.matrixL();
  const Mat linv = l.triangularView<Eigen::Lower>().solve(Mat::Identity(d, d));
  const SymEigen e = jacobi_eigen(linv * b.mat() * linv.transpose());
  return {e.vectors.transpose() * l.transpose(), Vec::Ones(d), e.values};
}

SpdMatrix geo_mean(const SpdMatrix& a, const SpdMatrix& b, double t) {
  if (b.dim() != a.dim()) fail(ErrorKind::DimensionMismatch, "geo_mean operands differ in size");
  const SymEigen e = jacobi_eigen(a.mat());
  Vec s(e.values.size()), si(e.values.size());
  for (int i = 0; i < s.size(); ++i) {
    s(i) = std::sqrt(e.values(i));
    si(i) = 1.0 / s(i);
  }
  const Mat r = e.vectors * s.asDiagonal() * e.vectors.transpose();
  const Mat ri = e.vectors * si.asDiagonal() * e.vectors.transpose();
  const Mat c = spectral_apply(ri * b.mat() * ri, [t](double x) { return std::pow(x, t); });
  return SpdMatrix::trusted(r * c * r);
}

SpdMatrix geo_mean_congruence(const SpdMatrix& a, const SpdMatrix& b, double t) {
  const SimultaneousDiagonalization sd = sim_diag(a, b);
  Vec dt(sd.d_b.size());
  for (int i = 0; i < dt.size(); ++i) dt(i) = std::pow(sd.d_a(i), 1.0 - t) * std::pow(sd.d_b(i), t);
  return SpdMatrix::trusted(sd.s.transpose() * dt.asDiagonal() * sd.s);
}

double rel_diff(const Mat& a, const Mat& b) {
  return (a - b).norm() / std::max({a.norm(), b.norm(), 1e-300});
}

}  // namespace mwlab
