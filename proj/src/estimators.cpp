#include "blindcen/estimators.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace blindcen {

namespace {

bool near_tied(double top, double second) {
  return top - second <= 1e-10 * std::max(1.0, std::abs(top));
}

}  // namespace

CovarianceEstimate sample_covariance(const SignalDataset& ds) {
  if (ds.Y.cols() < 1)
    throw std::invalid_argument("sample_covariance: no samples");
  const auto n = ds.Y.rows();
  const double scale = 1.0 / static_cast<double>(ds.Y.cols());
  Eigen::MatrixXd c = Eigen::MatrixXd::Zero(n, n);
  c.selfadjointView<Eigen::Lower>().rankUpdate(ds.Y, scale);
  c = c.selfadjointView<Eigen::Lower>();
  return {std::move(c), CovarianceSource::sample};
}

CovarianceEstimate exact_covariance(const FilterSpec& f,
                                    const SpectralDecomposition& sd,
                                    const InfluenceMatrix& b) {
  const Eigen::MatrixXd hb = apply_filter(f, sd, b.entries);
  Eigen::MatrixXd c = hb * hb.transpose();
  c = 0.5 * (c + c.transpose()).eval();
  return {std::move(c), CovarianceSource::exact};
}

CentralityEstimate pca_centrality(const CovarianceEstimate& c) {
  if (c.matrix.rows() != c.matrix.cols() || c.matrix.rows() < 1)
    throw std::invalid_argument("pca_centrality: covariance must be square");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(c.matrix);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("pca_centrality: eigendecomposition failed");
  const auto n = c.matrix.rows();
  CentralityEstimate est;
  est.method = Method::pca;
  est.scores = solver.eigenvectors().col(n - 1);  // ascending order
  canonicalize_sign(est.scores);
  est.scores.normalize();
  if (n >= 2 &&
      near_tied(solver.eigenvalues()(n - 1), solver.eigenvalues()(n - 2)))
    est.warning = "leading covariance eigenvalue is (near-)tied; principal "
                  "direction is not well determined";
  return est;
}

HBEstimate estimate_hb(const SignalDataset& ds) {
  const auto k = ds.Z.rows();
  const auto m = ds.Z.cols();
  if (ds.Y.cols() != m)
    throw std::invalid_argument("estimate_hb: Y and Z sample counts differ");
  if (m < k)
    throw std::invalid_argument(
        "estimate_hb: need at least as many samples as latent factors");
  const Eigen::MatrixXd gram = ds.Z * ds.Z.transpose();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(gram);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("estimate_hb: Gram eigendecomposition failed");
  // Rank test on the Gram eigenvalues themselves: a numerically zero
  // eigenvalue sits at machine-epsilon times the largest one, so the cut
  // must be applied before taking square roots (a 1e-12 relative cut here
  // corresponds to a singular-value ratio of 1e-6).
  const double eig_max = solver.eigenvalues()(k - 1);
  const double eig_min = solver.eigenvalues()(0);
  if (eig_min <= 1e-12 * std::max(1.0, eig_max)) {
    std::ostringstream msg;
    msg << "estimate_hb: latent factors are rank deficient (smallest "
           "singular value "
        << std::sqrt(std::max(0.0, eig_min)) << " vs largest "
        << std::sqrt(std::max(0.0, eig_max)) << ")";
    throw std::runtime_error(msg.str());
  }
  // HB^T = (Z Z^T)^(-1) Z Y^T, solved against the SPD Gram matrix.
  Eigen::MatrixXd hb_t =
      gram.llt().solve(ds.Z * ds.Y.transpose());
  return {hb_t.transpose()};
}

CentralityEstimate centrality_from_lowrank(const Eigen::MatrixXd& lbar,
                                           Method method) {
  if (lbar.norm() == 0.0)
    throw std::domain_error(
        "centrality_from_lowrank: low-rank component is exactly zero");
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(lbar, Eigen::ComputeThinU);
  CentralityEstimate est;
  est.method = method;
  est.scores = svd.matrixU().col(0);
  canonicalize_sign(est.scores);
  est.scores.normalize();
  const auto& sv = svd.singularValues();
  if (sv.size() >= 2 && near_tied(sv(0), sv(1)))
    est.warning = "leading singular value is (near-)tied; principal "
                  "direction is not well determined";
  return est;
}

RobustPair robust_centrality_both(const SignalDataset& ds,
                                  const SolverConfig& cfg) {
  RobustPair out;
  out.hb = estimate_hb(ds);
  out.decomposition = decompose(out.hb.matrix, cfg);
  out.plain = centrality_from_lowrank(out.decomposition.L_hat, Method::robust);
  const Eigen::MatrixXd lbar =
      out.hb.matrix - threshold_sparse(out.decomposition.S_hat, cfg.beta);
  out.quantized = centrality_from_lowrank(lbar, Method::robust_quantized);
  return out;
}

CentralityEstimate robust_centrality(const SignalDataset& ds,
                                     const SolverConfig& cfg, bool quantize) {
  RobustPair pair = robust_centrality_both(ds, cfg);
  return quantize ? std::move(pair.quantized) : std::move(pair.plain);
}

}  // namespace blindcen
