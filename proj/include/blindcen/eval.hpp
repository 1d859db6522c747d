// Error metrics and the Monte-Carlo benchmark over synthetic graphs.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>
#include <vector>

#include "blindcen/estimators.hpp"
#include "blindcen/filters.hpp"
#include "blindcen/proxsolve.hpp"
#include "blindcen/signals.hpp"

namespace blindcen {

// min over sign of ||truth -/+ est||_2 (both inputs as given, not rescaled).
double alignment_error(const Eigen::VectorXd& truth,
                       const Eigen::VectorXd& est);

// Indices of the k_top largest |scores|; ties resolved toward the lower index.
std::vector<int> topk_indices(const Eigen::VectorXd& scores, int k_top);

// |topk(scores) ∩ reference| / |reference|, and 1 minus it.
double topk_overlap(const std::vector<int>& reference,
                    const Eigen::VectorXd& scores);
double topk_error(const std::vector<int>& reference,
                  const Eigen::VectorXd& scores);

struct ExperimentConfig {
  int n = 100;
  int core_size = 10;
  double p = 0.05;
  std::vector<int> k_grid = {10, 20, 30, 40, 50, 60, 70, 80, 90, 100};
  int m = 10000;
  int trials = 50;
  SparsityPattern pattern = SparsityPattern::uniform_fraction;
  FilterSpec filter = IirFilter{0.1};
  SolverConfig solver;
  bool auto_lambda_s = true;  // lambda_S = c0 + c1 / sqrt(k) per grid point
  double lambda_s_c0 = 0.2;
  double lambda_s_c1 = 2.0;
  CovarianceSource covariance_mode = CovarianceSource::exact;
  std::uint64_t master_seed = 0;
  int threads = 0;        // 0 = hardware concurrency
  int resample_cap = 100; // disconnected-graph redraws per trial

  SolverConfig solver_for(int k) const;
};

struct ErrorCell {
  int k = 0;
  Method method = Method::pca;
  double mean_error = 0.0;   // over successful trials
  double std_error = 0.0;    // sample std (n-1); 0 when fewer than 2
  double mean_overlap = 0.0;
  int trials = 0;            // successes
  int failures = 0;
};

struct ErrorReport {
  ExperimentConfig config;
  std::vector<ErrorCell> cells;  // k ascending x {pca, robust, robust-quantized}
  double wall_seconds = 0.0;
};

// Seed schema per (k, trial): trial_seed = derive_seed(master, "trial", k,
// trial); graph attempt a uses derive_seed(trial_seed, "graph", a), the
// influence matrix "influence", the latents "latents". Results are reduced
// in a fixed order, so reports are bit-identical for any thread count.
ErrorReport run_benchmark(const ExperimentConfig& cfg);

// Header k,method,mean_error,std_error,trials,failures; %.17g numerics.
void write_error_report_csv(const ErrorReport& report, const std::string& path);
std::string error_report_csv(const ErrorReport& report);

// Full mirror: config echo plus every cell including mean_overlap.
void write_error_report_json(const ErrorReport& report, const std::string& path);
std::string error_report_json(const ErrorReport& report);

}  // namespace blindcen
