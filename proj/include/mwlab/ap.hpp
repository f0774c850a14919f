#pragma once

#include <string>

#include "mwlab/fields.hpp"
#include "mwlab/io.hpp"
#include "mwlab/norm.hpp"

namespace mwlab {

struct ApReport {
  double constant = 0.0;
  std::string variant;  // reducing, roudenko, a1, ainfty, a1k, scalar-oracle
  double p = 2.0;
  CubeId cube{0, 0};
  double slack = 0.0;
};

Json ap_report_to_json(const ApReport& r);

/// v -> (avg_{y in Q} |W(y) v|^p)^{1/p}; max over Q for p = inf.
NormEvaluator avg_norm(const MatrixWeight& w, CubeId q, double p);

struct ReducingResult {
  SpdMatrix r;
  // min and max of avg_norm(v) / |R v| over the probe directions
  double lower = 1.0;
  double upper = 1.0;
};

/// SPD R with |Rv| <= avg_norm(v) <= sqrt(d)|Rv|.
ReducingResult reducing_operator_checked(const MatrixWeight& w, CubeId q, double p, GridPtr grid = nullptr);
SpdMatrix reducing_operator(const MatrixWeight& w, CubeId q, double p, GridPtr grid = nullptr);

/// variant: reducing (any p), roudenko (1 < p < inf), a1 (p = 1), ainfty (p = inf).
/// Sup over all dyadic subcubes of the base cube.
ApReport ap_constant(const MatrixWeight& w, double p, const std::string& variant, GridPtr grid = nullptr);

/// smallest C with avg_Q F inside C F(x) for every cell x and dyadic Q containing x
ApReport a1k_constant(const SetFunction& f);

/// ap_constant(W, p, reducing) / ap_constant(W^{-1}, p', reducing)
double duality_check(const MatrixWeight& w, double p, GridPtr grid = nullptr);

/// sup_Q (avg_Q w^p)^{1/p} (avg_Q w^{-p'})^{1/p'}
ApReport scalar_oracle_report(const ScalarField& w, double p);
double scalar_oracle(const ScalarField& w, double p);

double conjugate_exponent(double p);

}  // namespace mwlab
