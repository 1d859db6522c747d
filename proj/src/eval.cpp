#include "blindcen/eval.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <fstream>
#include <numeric>
#include <stdexcept>
#include <thread>

#include <json.hpp>

#include "blindcen/graph.hpp"
#include "blindcen/io.hpp"
#include "blindcen/rng.hpp"

namespace blindcen {

double alignment_error(const Eigen::VectorXd& truth,
                       const Eigen::VectorXd& est) {
  if (truth.size() != est.size())
    throw std::invalid_argument("alignment_error: dimension mismatch");
  return std::min((truth - est).norm(), (truth + est).norm());
}

std::vector<int> topk_indices(const Eigen::VectorXd& scores, int k_top) {
  const int n = static_cast<int>(scores.size());
  if (k_top < 1 || k_top > n)
    throw std::invalid_argument("topk_indices: k_top out of range");
  std::vector<int> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
    return std::abs(scores(a)) > std::abs(scores(b));
  });
  order.resize(static_cast<std::size_t>(k_top));
  return order;
}

double topk_overlap(const std::vector<int>& reference,
                    const Eigen::VectorXd& scores) {
  if (reference.empty())
    throw std::invalid_argument("topk_overlap: empty reference set");
  const auto top = topk_indices(scores, static_cast<int>(reference.size()));
  int hits = 0;
  for (int idx : top)
    if (std::find(reference.begin(), reference.end(), idx) != reference.end())
      ++hits;
  return static_cast<double>(hits) / static_cast<double>(reference.size());
}

double topk_error(const std::vector<int>& reference,
                  const Eigen::VectorXd& scores) {
  return 1.0 - topk_overlap(reference, scores);
}

SolverConfig ExperimentConfig::solver_for(int k) const {
  SolverConfig cfg = solver;
  if (auto_lambda_s)
    cfg.lambda_S = lambda_s_c0 + lambda_s_c1 / std::sqrt(static_cast<double>(k));
  return cfg;
}

namespace {

constexpr int kMethodCount = 3;
constexpr Method kMethods[kMethodCount] = {Method::pca, Method::robust,
                                           Method::robust_quantized};

struct MethodOutcome {
  bool ok = false;
  double error = 0.0;
  double overlap = 0.0;
};

struct TrialOutcome {
  MethodOutcome per_method[kMethodCount];
};

TrialOutcome run_trial(const ExperimentConfig& cfg, int k,
                       std::uint64_t trial) {
  TrialOutcome out;
  const std::uint64_t trial_seed =
      derive_seed(cfg.master_seed, "trial", static_cast<std::uint64_t>(k),
                  trial);

  Graph g;
  bool connected = false;
  for (int attempt = 0; attempt < cfg.resample_cap; ++attempt) {
    g = generate_sbm_core_periphery(
        cfg.n, cfg.core_size, cfg.p,
        derive_seed(trial_seed, "graph", static_cast<std::uint64_t>(attempt)));
    if (is_connected(g)) {
      connected = true;
      break;
    }
  }
  if (!connected) return out;  // every method fails for this trial

  std::vector<int> core(static_cast<std::size_t>(cfg.core_size));
  std::iota(core.begin(), core.end(), 0);

  try {
    const SpectralDecomposition sd = spectral_decompose(g);
    eigen_centrality(sd, g);  // validates the spectral-gap precondition
    const InfluenceMatrix b = generate_influence(
        cfg.pattern, cfg.n, k, derive_seed(trial_seed, "influence"));
    const Eigen::MatrixXd z =
        sample_latents(k, cfg.m, derive_seed(trial_seed, "latents"));
    const SignalDataset ds = synthesize(cfg.filter, sd, b, z);

    try {
      const CovarianceEstimate cov =
          cfg.covariance_mode == CovarianceSource::exact
              ? exact_covariance(cfg.filter, sd, b)
              : sample_covariance(ds);
      const CentralityEstimate est = pca_centrality(cov);
      out.per_method[0] = {true, topk_error(core, est.scores),
                           topk_overlap(core, est.scores)};
    } catch (const std::exception&) {
      // PCA failure; robust methods still run.
    }

    try {
      const RobustPair pair = robust_centrality_both(ds, cfg.solver_for(k));
      out.per_method[1] = {true, topk_error(core, pair.plain.scores),
                           topk_overlap(core, pair.plain.scores)};
      out.per_method[2] = {true, topk_error(core, pair.quantized.scores),
                           topk_overlap(core, pair.quantized.scores)};
    } catch (const std::exception&) {
      // Robust-path failure leaves both robust outcomes marked failed.
    }
  } catch (const std::exception&) {
    // Shared-setup failure (degenerate spectrum etc.): all methods fail.
  }
  return out;
}

}  // namespace

ErrorReport run_benchmark(const ExperimentConfig& cfg) {
  if (cfg.n < 1 || cfg.core_size < 1 || cfg.m < 1 || cfg.trials < 1 ||
      cfg.resample_cap < 1)
    throw std::invalid_argument("run_benchmark: counts must be >= 1");
  if (cfg.k_grid.empty())
    throw std::invalid_argument("run_benchmark: empty k grid");
  for (int k : cfg.k_grid)
    if (k < 1) throw std::invalid_argument("run_benchmark: k must be >= 1");

  const auto t0 = std::chrono::steady_clock::now();

  const std::size_t n_k = cfg.k_grid.size();
  const std::size_t n_jobs = n_k * static_cast<std::size_t>(cfg.trials);
  std::vector<TrialOutcome> slots(n_jobs);

  unsigned thread_count = cfg.threads > 0
                              ? static_cast<unsigned>(cfg.threads)
                              : std::max(1u, std::thread::hardware_concurrency());
  thread_count = std::min<unsigned>(thread_count,
                                    static_cast<unsigned>(n_jobs));

  std::atomic<std::size_t> next_job{0};
  auto worker = [&] {
    while (true) {
      const std::size_t job = next_job.fetch_add(1);
      if (job >= n_jobs) break;
      const std::size_t k_index = job / static_cast<std::size_t>(cfg.trials);
      const std::size_t trial = job % static_cast<std::size_t>(cfg.trials);
      slots[job] = run_trial(cfg, cfg.k_grid[k_index],
                             static_cast<std::uint64_t>(trial));
    }
  };

  if (thread_count <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(thread_count);
    for (unsigned t = 0; t < thread_count; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  // Deterministic reduction: fixed (k, method, trial) order regardless of
  // which thread produced each slot.
  ErrorReport report;
  report.config = cfg;
  for (std::size_t ki = 0; ki < n_k; ++ki) {
    for (int mi = 0; mi < kMethodCount; ++mi) {
      ErrorCell cell;
      cell.k = cfg.k_grid[ki];
      cell.method = kMethods[mi];
      std::vector<double> errors;
      double overlap_sum = 0.0;
      for (int trial = 0; trial < cfg.trials; ++trial) {
        const MethodOutcome& mo =
            slots[ki * static_cast<std::size_t>(cfg.trials) +
                  static_cast<std::size_t>(trial)]
                .per_method[mi];
        if (mo.ok) {
          errors.push_back(mo.error);
          overlap_sum += mo.overlap;
        } else {
          ++cell.failures;
        }
      }
      cell.trials = static_cast<int>(errors.size());
      if (!errors.empty()) {
        const double mean =
            std::accumulate(errors.begin(), errors.end(), 0.0) /
            static_cast<double>(errors.size());
        cell.mean_error = mean;
        cell.mean_overlap = overlap_sum / static_cast<double>(errors.size());
        if (errors.size() >= 2) {
          double ss = 0.0;
          for (double e : errors) ss += (e - mean) * (e - mean);
          cell.std_error =
              std::sqrt(ss / static_cast<double>(errors.size() - 1));
        }
      }
      report.cells.push_back(cell);
    }
  }

  report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
          .count();
  return report;
}

std::string error_report_csv(const ErrorReport& report) {
  std::string out = "k,method,mean_error,std_error,trials,failures\n";
  for (const ErrorCell& c : report.cells) {
    out += std::to_string(c.k);
    out += ',';
    out += method_name(c.method);
    out += ',';
    out += format_double(c.mean_error);
    out += ',';
    out += format_double(c.std_error);
    out += ',';
    out += std::to_string(c.trials);
    out += ',';
    out += std::to_string(c.failures);
    out += '\n';
  }
  return out;
}

void write_error_report_csv(const ErrorReport& report,
                            const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << error_report_csv(report);
  if (!f) throw std::runtime_error("write failed: " + path);
}

std::string error_report_json(const ErrorReport& report) {
  nlohmann::json j;
  const ExperimentConfig& cfg = report.config;
  j["config"] = {
      {"n", cfg.n},
      {"core_size", cfg.core_size},
      {"p", cfg.p},
      {"k_grid", cfg.k_grid},
      {"m", cfg.m},
      {"trials", cfg.trials},
      {"pattern", pattern_name(cfg.pattern)},
      {"filter", nlohmann::json::parse(filter_to_json(cfg.filter))},
      {"covariance_mode",
       cfg.covariance_mode == CovarianceSource::exact ? "exact" : "sample"},
      {"master_seed", cfg.master_seed},
      {"resample_cap", cfg.resample_cap},
      {"solver",
       {{"lambda_L", cfg.solver.lambda_L},
        {"lambda_S", cfg.solver.lambda_S},
        {"auto_lambda_s", cfg.auto_lambda_s},
        {"lambda_s_c0", cfg.lambda_s_c0},
        {"lambda_s_c1", cfg.lambda_s_c1},
        {"max_iters", cfg.solver.max_iters},
        {"tol", cfg.solver.tol},
        {"fp_tol", cfg.solver.fp_tol},
        {"beta", cfg.solver.beta}}},
  };
  // wall_seconds is deliberately not serialized: reports from identical
  // configs and seeds must be byte-identical.
  nlohmann::json cells = nlohmann::json::array();
  for (const ErrorCell& c : report.cells) {
    cells.push_back({{"k", c.k},
                     {"method", method_name(c.method)},
                     {"mean_error", c.mean_error},
                     {"std_error", c.std_error},
                     {"mean_overlap", c.mean_overlap},
                     {"trials", c.trials},
                     {"failures", c.failures}});
  }
  j["cells"] = std::move(cells);
  return j.dump(2) + "\n";
}

void write_error_report_json(const ErrorReport& report,
                             const std::string& path) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path);
  f << error_report_json(report);
  if (!f) throw std::runtime_error("write failed: " + path);
}

}  // namespace blindcen
