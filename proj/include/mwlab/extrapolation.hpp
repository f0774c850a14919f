#pragma once

#include <string>
#include <vector>

#include "mwlab/rdf.hpp"

namespace mwlab {

enum class CaseId { I, II, III, IV };

const char* case_name(CaseId c);
/// I: 1 < p < p0 < inf, II: p0 = inf, III: 1 < p0 < p, IV: p0 = 1
CaseId classify_case(double p, double p0);

struct ExtrapolationCase {
  CaseId id = CaseId::I;
  double p = 2.0, p0 = 4.0;
  VectorField f, g;
  MatrixWeight w;
};

struct ExtrapolationConfig {
  int k_max = 30;
  double safety = 2.0;
  int probes = 32;
  std::uint64_t seed = 1;
  std::string variant = "reducing";  // how [W]_{A_p} and [W0]_{A_p0} are measured
  bool measure = true;
  GridPtr grid;
};

struct ChainStep {
  std::string name;
  double lhs = 0.0, rhs = 0.0;
  /// false for the closed-form constants 2^{1/(p/p0)'} and 2^{1/p'}, which need
  /// int (R h)^{p'} <= 2 rather than the guaranteed ||R h||_{p'} <= 2
  bool exact = true;
  double slack() const { return lhs - rhs; }
};

struct ChainReport {
  CaseId id = CaseId::I;
  double p = 0.0, p0 = 0.0;
  MatrixWeight w0;
  ScalarField rescaling;  // R_W hbar (I, II) or R_I' h (III, IV)
  double bound = 0.0;
  std::vector<ChainStep> chain;
  ApReport ap_w, ap_w0;
  double exponent = 0.0;  // max{p/p0, p'/p0'}
  double kp_ratio = 0.0;  // [W0]_{A_p0} / [W]_{A_p}^exponent
  double tail = 0.0;
};

/// |W f| / ||f|| + |W g| / ||g||, norms in L^p(W).
ScalarField build_hbar(const MatrixWeight& w, double p, const VectorField& f, const VectorField& g);
/// |W f|^{p-1} / ||f||^{p-1}, the L^p duality extremizer (||h||_{p'} = 1).
ScalarField dual_extremizer(const MatrixWeight& w, double p, const VectorField& f);

/// ||f||_{L^p(W)}; p = inf gives the sup.
double weighted_norm(const VectorField& f, const MatrixWeight& w, double p);
double extrapolation_exponent(double p, double p0);

ChainReport rescale_weight(const ExtrapolationCase& c, const ExtrapolationConfig& cfg = {});
Json chain_to_json(const ChainReport& r);

struct DemoRow {
  std::string weight_id;
  double ap_w = 0.0;
  std::string case_name;
  double ap_w0 = 0.0;
  double hypothesis = 0.0;
  double conclusion = 0.0;
  double envelope = 0.0;
  bool held_out = false;
  double slack() const { return envelope - conclusion; }
};

struct DemoTable {
  std::string op_id;
  double p = 0.0, p0 = 0.0;
  double fit_log_c = 0.0, fit_slope = 0.0;  // envelope = exp(c) ([W]^exponent)^slope
  std::vector<DemoRow> rows;
};

/// op_id in {christ-goldberg, dyadic-average, exhaust-maximal}; even rows fit the
/// envelope, odd rows are held out.
DemoTable extrapolation_demo(const std::string& op_id, double p0, double p, const std::vector<NamedWeight>& suite,
                             const ExtrapolationConfig& cfg = {});
std::string demo_to_csv(const DemoTable& t);

/// the hypothesis pair (f, g) of the demo operators for a given g
VectorField demo_operator(const std::string& op_id, const MatrixWeight& w, const VectorField& g);

}  // namespace mwlab
