#pragma once

#include <cstdint>
#include <functional>
#include <string>

#include "mwlab/ap.hpp"
#include "mwlab/maximal.hpp"

namespace mwlab {

using ScalarOperator = std::function<ScalarField(const ScalarField&)>;
using SetOperator = std::function<SetFunction(const SetFunction&)>;

struct IterationConfig {
  double bound = 1.0;  // B, an upper bound for the operator norm
  int k_max = 30;
  double p = 2.0;      // exponent of the norm used for bound validation
  double safety = 2.0;
  bool validate = true;  // monotonicity probe before iterating
  std::uint64_t seed = 1;
};

template <class Field>
struct IterationResult {
  Field sum;
  double bound = 0.0;  // final B after escalations
  int escalations = 0;
  double tail = 0.0;   // 2^{1 - k_max} ||G||
};

/// S G = sum_{k < k_max} 2^{-k} B^{-k} T^k G, with ||T G_k|| <= B ||G_k|| checked
/// at every step (B escalated by the safety factor, at most 5 times).
IterationResult<ScalarField> iterate(const ScalarOperator& t, const ScalarField& g, const IterationConfig& cfg);
/// w == nullptr means the unweighted norm.
IterationResult<SetFunction> iterate(const SetOperator& t, const SetFunction& g, const IterationConfig& cfg,
                                     const MatrixWeight* w = nullptr);

/// B = safety * max over random probes of ||T G|| / ||G||.
double certify_bound(const ScalarOperator& t, const DyadicDomain& dom, double p, int probes, double safety,
                     std::uint64_t seed = 7);
double certify_bound(const SetOperator& t, const MatrixWeight& w, double p, int probes, double safety,
                     std::uint64_t seed = 7);

struct IterationCheck {
  double containment = 0.0;  // max of (G - SG)_+ over cells and directions
  double norm_excess = 0.0;  // ||SG|| - 2 ||G||
  double absorption = 0.0;   // max of (T SG - 2B SG)_+
  double g_norm = 0.0;
};
IterationCheck check_iteration(const ScalarOperator& t, const ScalarField& g, const ScalarField& sg, double bound,
                               double p);
IterationCheck check_iteration(const SetOperator& t, const SetFunction& g, const SetFunction& sg, double bound,
                               double p, const MatrixWeight* w = nullptr);

/// P_W = N_W o M on ellipsoid fields r W^{-1} B, as a map of radii.
ScalarOperator op_PW(const MatrixWeight& w);
/// r -> |W(x) M^d(r^{p'} W^{-1} B)(x)|^{1/p'}
ScalarOperator op_T1(const MatrixWeight& w, double p);
/// r -> |W(x)^{-1} M^d(r^p W B)(x)|^{1/p}
ScalarOperator op_T2(const MatrixWeight& w, double p);
ScalarOperator op_sum(const ScalarOperator& a, const ScalarOperator& b);

struct FactorizationOptions {
  int k_max = 30;
  double safety = 2.0;
  int probes = 32;
  std::uint64_t seed = 1;
  const ScalarField* start = nullptr;  // default r = 1, normalized in L^q
  bool measure_ap = true;              // [W]_{A_p} via the reducing variant
  GridPtr grid;
};

struct FactorizationResult {
  MatrixWeight w0, w1;
  ScalarField rbar;
  ApReport a1;       // [W0]_{A_1}
  ApReport ainfty;   // [W1]_{A_inf}
  ApReport ap;       // [W]_{A_p}, constant 0 when not measured
  double product_residual = 0.0;
  double bound = 0.0;
  int escalations = 0;
  double p = 2.0;
  std::uint64_t seed = 1;
};

FactorizationResult factorize(const MatrixWeight& w, double p, const FactorizationOptions& opts = {});
Json factorization_to_json(const FactorizationResult& f);

struct ReverseResult {
  MatrixWeight w;
  double q = 0.0;
  ApReport wbar, w0, w1;
  double c_measured = 0.0;  // [Wbar]_{A_q} / ([W0]^{1-t} [W1]^t)
};

/// Wbar = (W0^2 #_t W1^2)^{1/2}, 1/q = (1-t)/q0 + t/q1.
ReverseResult reverse_factorize(const MatrixWeight& w0, const MatrixWeight& w1, double q0, double q1, double t,
                                const std::string& variant = "reducing", GridPtr grid = nullptr);
Json reverse_to_json(const ReverseResult& r);

struct DuoResult {
  MatrixWeight w;
  ApReport report;  // [Wbar]_{A_p0}
};

/// up (p0 > p): Wbar = s^{1-p/p0} W, i.e. W^{p/p0} W1^{1-p/p0} with W1 = s W;
/// down (p0 < p): Wbar = r^{1-p'/p0'} W, i.e. W0^{1-p'/p0'} W^{p'/p0'} with W0 = r W.
DuoResult duo_rescale(const MatrixWeight& w, double p, const ScalarField& s, double p0, const std::string& direction,
                      GridPtr grid = nullptr);

}  // namespace mwlab
