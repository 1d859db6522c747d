// Graph filters: declarative filter specs, spectral application, low-pass
// diagnostics, boosting, and alignment-error bounds for PCA-style
// centrality estimates.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <variant>
#include <vector>

#include "blindcen/graph.hpp"

namespace blindcen {

// h(lambda) = sum_t coefficients[t] * lambda^t.
struct PolynomialFilter {
  std::vector<double> coefficients;
};

// h(lambda) = 1 / (1 - alpha * lambda); corresponds to (I - alpha A)^{-1}.
// Defined for any eigenvalue except the pole at lambda = 1/alpha. Gains past
// the pole are negative; low-pass behaviour is then judged on |h|.
struct IirFilter {
  double alpha = 0.1;
};

// h(lambda) = inner(lambda) - rho, i.e. H(A) - rho I. A boosted filter
// cannot be boosted again; the variant below encodes that invariant.
struct BoostedFilter {
  std::variant<PolynomialFilter, IirFilter> inner;
  double rho = 1.0;
};

using FilterSpec = std::variant<PolynomialFilter, IirFilter, BoostedFilter>;

// Scalar gain at one eigenvalue. IIR gains throw std::domain_error only at
// the pole, when |1 - alpha * lambda| <= 1e-12.
double filter_gain(const FilterSpec& f, double lambda);

// Y = V diag(h(lambda_j)) V^T X. For IIR filters this equals the solution
// of (I - alpha A) Y = X, and for polynomial filters the truncated power
// series sum_t h_t A^t X.
Eigen::MatrixXd apply_filter(const FilterSpec& f,
                             const SpectralDecomposition& sd,
                             const Eigen::MatrixXd& x);

// max_{j>=2} |h(lambda_j)| / |h(lambda_1)|. Values below 1 mean the filter
// is 1-low-pass on this spectrum.
double lowpass_ratio(const FilterSpec& f, const SpectralDecomposition& sd);

// Wraps f as H(A) - rho I. Throws if f is already boosted.
FilterSpec boost(const FilterSpec& f, double rho);

// Realized boosting factor: lowpass_ratio(boost(f, rho)) / lowpass_ratio(f).
// This is the tight value of the c_boost constant; any upper bound of the
// left-hand ratio is at least this number.
double compute_c_boost(const FilterSpec& f, double rho,
                       const SpectralDecomposition& sd);

// Diagnostics for the PCA alignment-error bound and its boosted variant.
// gamma_bound = sqrt(2) * lowpass_ratio * ||V_rest^T B q1||_2 / (v1^T B q1)
// with q1 the top right singular vector of H(A)B (sign-fixed so the
// denominator is positive); boosted_bound = c_boost * gamma_bound.
struct DiagnosticsBundle {
  double lowpass_ratio = 0.0;
  double gamma_bound = 0.0;
  double boosted_bound = 0.0;
  double c_boost = 0.0;
  Eigen::VectorXd q1;
  // The low-pass condition is checked on signed gains,
  // h(l1) > max_{j>=2} h(l_j); this margin and flag record how the
  // absolute-value form of the condition compares.
  double signed_gain_margin = 0.0;
  bool abs_form_differs = false;
};

// Preconditions: (i) |v1^T B q1| > 1e-12 and (ii) h(lambda_1) strictly
// dominates all other signed gains. Violations throw std::domain_error
// naming the failed condition. f must not already be boosted; rho selects
// the boosted filter the c_boost/boosted_bound entries refer to.
DiagnosticsBundle alignment_error_bound(const FilterSpec& f,
                               const SpectralDecomposition& sd,
                               const Eigen::MatrixXd& b, double rho = 1.0);

// JSON round-trip for CLI configs. Schema:
//   {"kind":"poly","coefficients":[h0,...]}
//   {"kind":"iir","alpha":0.1}
//   {"kind":"boosted","inner":{...},"rho":1.0}
std::string filter_to_json(const FilterSpec& f);
FilterSpec filter_from_json(const std::string& text);

}  // namespace blindcen
