// File-based ingestion of entity observations (rows of Y, e.g. daily
// returns) and driver series (rows of Z, e.g. search-trend scores), joined
// on a shared date axis and normalized for the estimators.

#pragma once

#include <Eigen/Dense>
#include <string>
#include <utility>
#include <vector>

#include "blindcen/estimators.hpp"
#include "blindcen/proxsolve.hpp"

namespace blindcen {

struct PreprocessOptions {
  bool standardize_drivers = true;  // per-driver: subtract mean, unit variance
  bool center_returns = true;       // per-entity: subtract mean
  bool whiten_drivers = false;      // joint decorrelation; overrides
                                    // standardize_drivers when set
};

// Everything needed to reproduce the processed matrices from the aligned raw
// ones; apply_preprocessing(rawY, rawZ, record) is bit-exact.
struct PreprocessRecord {
  bool center_returns = false;
  bool standardize_drivers = false;
  bool whiten_drivers = false;
  Eigen::VectorXd return_means;   // n, used iff center_returns
  Eigen::VectorXd driver_means;   // k, used iff standardize or whiten
  Eigen::VectorXd driver_scales;  // k, used iff standardize_drivers
  Eigen::MatrixXd whitening;      // k x k, used iff whiten_drivers
  int dropped_dates = 0;          // common dates dropped for missing cells
  std::vector<std::string> steps;
};

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> apply_preprocessing(
    const Eigen::MatrixXd& raw_y, const Eigen::MatrixXd& raw_z,
    const PreprocessRecord& record);

struct AlignedPanel {
  std::vector<std::string> entity_labels;  // n
  std::vector<std::string> driver_labels;  // k
  std::vector<std::string> dates;          // m, strictly increasing
  Eigen::MatrixXd Y;                       // n x m
  Eigen::MatrixXd Z;                       // k x m
  PreprocessRecord preprocessing;

  int n() const { return static_cast<int>(Y.rows()); }
  int k() const { return static_cast<int>(Z.rows()); }
  int m() const { return static_cast<int>(Y.cols()); }
};

// Both files: header "date,<label1>,...,<labelN>", one row per date,
// "." decimals. Rows are inner-joined on the date string and sorted
// ascending; a date with any empty cell in either file is dropped and
// counted. Non-numeric cells are parse errors naming file, line, and
// column. Constant driver columns (or m < 2) make standardization and
// whitening degenerate and are rejected.
AlignedPanel load_panel(const std::string& returns_path,
                        const std::string& drivers_path,
                        const PreprocessOptions& options = {});

struct InfluenceEntry {
  int entity_index = 0;
  std::string entity;
  double weight = 0.0;  // entry of threshold_sparse(S_hat, beta) / beta
};

struct RealReport {
  CentralityEstimate pca;
  CentralityEstimate robust;
  CentralityEstimate robust_quantized;
  Decomposition decomposition;
  HBEstimate hb;
  double beta_used = 0.0;
  // One ranked list per driver: entries sorted by weight descending (ties
  // toward the lower index), always exactly `top_count` long — trailing
  // entries may carry weight 0 when a driver has few above-threshold links.
  std::vector<std::vector<InfluenceEntry>> influence;
};

RealReport run_real_pipeline(const AlignedPanel& panel,
                             const SolverConfig& cfg, int top_count = 8);

}  // namespace blindcen
