// Centrality estimators working only on observed signals: covariance PCA
// and the filter-robust low-rank + sparse route.

#pragma once

#include <Eigen/Dense>

#include "blindcen/filters.hpp"
#include "blindcen/graph.hpp"
#include "blindcen/proxsolve.hpp"
#include "blindcen/signals.hpp"

namespace blindcen {

enum class CovarianceSource { exact, sample };

struct CovarianceEstimate {
  Eigen::MatrixXd matrix;
  CovarianceSource source = CovarianceSource::sample;
};

// (1/m) Y Y^T. The generative model is zero-mean, so no centering.
CovarianceEstimate sample_covariance(const SignalDataset& ds);

// H(A) B (H(A) B)^T, the m -> infinity limit of sample_covariance.
CovarianceEstimate exact_covariance(const FilterSpec& f,
                                    const SpectralDecomposition& sd,
                                    const InfluenceMatrix& b);

// Top eigenvector of the covariance, sign-canonicalized and unit-norm.
// A (near-)tied leading eigenpair sets `warning` but still returns the
// chosen vector.
CentralityEstimate pca_centrality(const CovarianceEstimate& c);

// Least-squares estimate of the composite map H(A) B from paired signals:
// Y Z^T (Z Z^T)^(-1). Requires m >= k and a full-row-rank Z.
struct HBEstimate {
  Eigen::MatrixXd matrix;  // n x k
};

HBEstimate estimate_hb(const SignalDataset& ds);

// Top left singular vector of a low-rank surrogate, canonicalized.
CentralityEstimate centrality_from_lowrank(const Eigen::MatrixXd& lbar,
                                           Method method);

// Both robust readouts from one decomposition of estimate_hb(ds):
//   plain     : top left singular vector of L_hat
//   quantized : top left singular vector of estimate - threshold_sparse(S_hat)
struct RobustPair {
  CentralityEstimate plain;
  CentralityEstimate quantized;
  Decomposition decomposition;
  HBEstimate hb;
};

RobustPair robust_centrality_both(const SignalDataset& ds,
                                  const SolverConfig& cfg);

CentralityEstimate robust_centrality(const SignalDataset& ds,
                                     const SolverConfig& cfg, bool quantize);

}  // namespace blindcen
