// blindcen: estimate eigenvector centrality from filtered graph signals.
//
// Commands:
//   simulate  draw a graph + influence matrix + latents, write the dataset
//   estimate  run estimators on an existing Y.csv / Z.csv pair
//   bench     Monte-Carlo error curves over k (fig1a/fig1b/fig1c presets)
//   real      ingest a returns/drivers CSV panel and run the full pipeline
//
// Every command reads an optional --config JSON, applies explicit flags on
// top, echoes the effective configuration to <out>/run_config.json, and is
// bit-reproducible from that echo.

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include "blindcen/estimators.hpp"
#include "blindcen/eval.hpp"
#include "blindcen/filters.hpp"
#include "blindcen/graph.hpp"
#include "blindcen/ingest.hpp"
#include "blindcen/io.hpp"
#include "blindcen/proxsolve.hpp"
#include "blindcen/rng.hpp"
#include "blindcen/signals.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace blindcen;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path);
  if (!f) throw std::runtime_error("cannot open for writing: " + path.string());
  f << text;
  if (!f) throw std::runtime_error("write failed: " + path.string());
}

void write_json_file(const fs::path& path, const json& j) {
  write_text(path, j.dump(2) + "\n");
}

json parse_json_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw std::runtime_error("cannot open config: " + path);
  try {
    return json::parse(f);
  } catch (const json::exception& e) {
    throw std::runtime_error(path + ": " + e.what());
  }
}

json default_solver_json() {
  return {{"lambda_L", 0.1},     {"lambda_S", 0.4},
          {"auto_lambda_s", true}, {"lambda_s_c0", 0.2},
          {"lambda_s_c1", 2.0},  {"max_iters", 500},
          {"tol", 1e-8},         {"fp_tol", 1e-8},
          {"beta", 0.1}};
}

json default_filter_json() { return {{"kind", "iir"}, {"alpha", 0.1}}; }

json defaults_for(const std::string& command) {
  if (command == "simulate")
    return {{"command", "simulate"},
            {"out", "sim_out"},
            {"seed", std::uint64_t{0}},
            {"n", 100},
            {"core_size", 10},
            {"p", 0.05},
            {"k", 20},
            {"m", 1000},
            {"pattern", "a"},
            {"filter", default_filter_json()},
            {"resample_cap", 100}};
  if (command == "estimate")
    return {{"command", "estimate"},
            {"out", "est_out"},
            {"seed", std::uint64_t{0}},
            {"y", "Y.csv"},
            {"z", "Z.csv"},
            {"methods", json::array({"pca", "robust", "robust-quantized"})},
            {"quantize", false},
            {"solver", default_solver_json()}};
  if (command == "bench")
    return {{"command", "bench"},
            {"out", "bench_out"},
            {"seed", std::uint64_t{0}},
            {"n", 100},
            {"core_size", 10},
            {"p", 0.05},
            {"k_grid", json::array({10, 20, 30, 40, 50, 60, 70, 80, 90, 100})},
            {"m", 10000},
            {"trials", 50},
            {"pattern", "a"},
            {"filter", default_filter_json()},
            {"covariance", "exact"},
            {"solver", default_solver_json()},
            {"threads", 0},
            {"resample_cap", 100}};
  if (command == "real")
    return {{"command", "real"},
            {"out", "real_out"},
            {"seed", std::uint64_t{0}},
            {"returns", ""},
            {"drivers", ""},
            {"top", 8},
            {"standardize_drivers", true},
            {"center_returns", true},
            {"whiten_drivers", false},
            {"solver", default_solver_json()}};
  throw std::logic_error("unknown command: " + command);
}

// Overlay src onto dst, rejecting keys the command does not define.
void apply_config(json& dst, const json& src, const std::string& where) {
  if (!src.is_object())
    throw std::runtime_error(where + ": config must be a JSON object");
  for (const auto& [key, value] : src.items()) {
    if (!dst.contains(key))
      throw std::runtime_error(where + ": unknown key '" + key + "'");
    if (key == "solver") {
      json& solver = dst["solver"];
      if (!value.is_object())
        throw std::runtime_error(where + ": 'solver' must be an object");
      for (const auto& [skey, svalue] : value.items()) {
        if (!solver.contains(skey))
          throw std::runtime_error(where + ": unknown solver key '" + skey +
                                   "'");
        solver[skey] = svalue;
      }
    } else {
      dst[key] = value;
    }
  }
}

SolverConfig solver_from_config(const json& cfg, int k_for_auto) {
  const json& s = cfg.at("solver");
  SolverConfig solver;
  solver.lambda_L = s.at("lambda_L").get<double>();
  solver.lambda_S = s.at("lambda_S").get<double>();
  solver.max_iters = s.at("max_iters").get<int>();
  solver.tol = s.at("tol").get<double>();
  solver.fp_tol = s.at("fp_tol").get<double>();
  solver.beta = s.at("beta").get<double>();
  if (s.at("auto_lambda_s").get<bool>() && k_for_auto > 0)
    solver.lambda_S = s.at("lambda_s_c0").get<double>() +
                      s.at("lambda_s_c1").get<double>() /
                          std::sqrt(static_cast<double>(k_for_auto));
  return solver;
}

FilterSpec filter_from_config(const json& cfg) {
  return filter_from_json(cfg.at("filter").dump());
}

json centrality_json(const CentralityEstimate& est) {
  json j;
  j["method"] = method_name(est.method);
  j["scores"] = std::vector<double>(est.scores.data(),
                                    est.scores.data() + est.scores.size());
  j["ranking"] = topk_indices(est.scores, static_cast<int>(est.scores.size()));
  if (est.warning) j["warning"] = *est.warning;
  return j;
}

json diagnostics_json(const Decomposition& d) {
  return {{"iterations", d.iterations},
          {"converged", d.converged},
          {"final_objective", d.final_objective()}};
}

fs::path prepare_out_dir(const json& cfg) {
  const fs::path out = cfg.at("out").get<std::string>();
  fs::create_directories(out);
  return out;
}

struct SimDraw {
  Graph graph;
  SpectralDecomposition sd;
  CentralityEstimate truth;
  InfluenceMatrix b;
  Eigen::MatrixXd z;
  SignalDataset ds;
};

// Shared by simulate and internal fixtures: one dataset draw at `seed`,
// resampling disconnected graphs up to the cap.
SimDraw draw_dataset(int n, int core_size, double p, int k, int m,
                     SparsityPattern pattern, const FilterSpec& filter,
                     std::uint64_t seed, int resample_cap) {
  SimDraw d;
  bool connected = false;
  for (int attempt = 0; attempt < resample_cap; ++attempt) {
    d.graph = generate_sbm_core_periphery(
        n, core_size, p,
        derive_seed(seed, "graph", static_cast<std::uint64_t>(attempt)));
    if (is_connected(d.graph)) {
      connected = true;
      break;
    }
  }
  if (!connected)
    throw std::runtime_error(
        "no connected graph within the resample cap; raise p or the cap");
  d.sd = spectral_decompose(d.graph);
  d.truth = eigen_centrality(d.sd, d.graph);
  d.b = generate_influence(pattern, n, k, derive_seed(seed, "influence"));
  d.z = sample_latents(k, m, derive_seed(seed, "latents"));
  d.ds = synthesize(filter, d.sd, d.b, d.z);
  return d;
}

int run_simulate(const json& cfg) {
  const fs::path out = prepare_out_dir(cfg);
  const SimDraw d = draw_dataset(
      cfg.at("n").get<int>(), cfg.at("core_size").get<int>(),
      cfg.at("p").get<double>(), cfg.at("k").get<int>(),
      cfg.at("m").get<int>(), pattern_from_name(cfg.at("pattern")),
      filter_from_config(cfg), cfg.at("seed").get<std::uint64_t>(),
      cfg.at("resample_cap").get<int>());
  save_edge_list(d.graph, (out / "graph.edges").string());
  write_matrix_csv(d.b.entries, (out / "B.csv").string());
  write_matrix_csv(d.ds.Z, (out / "Z.csv").string());
  write_matrix_csv(d.ds.Y, (out / "Y.csv").string());
  write_json_file(out / "truth.json", centrality_json(d.truth));
  write_json_file(out / "run_config.json", cfg);
  return 0;
}

int run_estimate(const json& cfg) {
  const fs::path out = prepare_out_dir(cfg);
  SignalDataset ds;
  ds.Y = read_matrix_csv(cfg.at("y").get<std::string>());
  ds.Z = read_matrix_csv(cfg.at("z").get<std::string>());

  std::vector<Method> methods;
  for (const auto& name : cfg.at("methods")) {
    Method m = method_from_name(name.get<std::string>());
    if (cfg.at("quantize").get<bool>() && m == Method::robust)
      m = Method::robust_quantized;
    if (std::find(methods.begin(), methods.end(), m) == methods.end())
      methods.push_back(m);
  }
  if (methods.empty()) throw std::runtime_error("no methods requested");

  const bool wants_robust =
      std::find(methods.begin(), methods.end(), Method::robust) !=
          methods.end() ||
      std::find(methods.begin(), methods.end(), Method::robust_quantized) !=
          methods.end();

  for (Method m : methods) {
    if (m == Method::pca) {
      const CentralityEstimate est = pca_centrality(sample_covariance(ds));
      write_json_file(out / "centrality_pca.json", centrality_json(est));
    }
  }
  if (wants_robust) {
    const SolverConfig solver =
        solver_from_config(cfg, static_cast<int>(ds.Z.rows()));
    const RobustPair pair = robust_centrality_both(ds, solver);
    for (Method m : methods) {
      if (m == Method::robust)
        write_json_file(out / "centrality_robust.json",
                        centrality_json(pair.plain));
      if (m == Method::robust_quantized)
        write_json_file(out / "centrality_robust-quantized.json",
                        centrality_json(pair.quantized));
    }
    write_matrix_csv(pair.decomposition.L_hat, (out / "L.csv").string());
    write_matrix_csv(pair.decomposition.S_hat, (out / "S.csv").string());
    write_json_file(out / "diagnostics.json",
                    diagnostics_json(pair.decomposition));
  }
  write_json_file(out / "run_config.json", cfg);
  return 0;
}

int run_bench(const json& cfg) {
  const fs::path out = prepare_out_dir(cfg);
  ExperimentConfig ec;
  ec.n = cfg.at("n").get<int>();
  ec.core_size = cfg.at("core_size").get<int>();
  ec.p = cfg.at("p").get<double>();
  ec.k_grid = cfg.at("k_grid").get<std::vector<int>>();
  ec.m = cfg.at("m").get<int>();
  ec.trials = cfg.at("trials").get<int>();
  ec.pattern = pattern_from_name(cfg.at("pattern"));
  ec.filter = filter_from_config(cfg);
  const std::string cov = cfg.at("covariance").get<std::string>();
  if (cov == "exact")
    ec.covariance_mode = CovarianceSource::exact;
  else if (cov == "sample")
    ec.covariance_mode = CovarianceSource::sample;
  else
    throw std::runtime_error("covariance must be 'exact' or 'sample', got '" +
                             cov + "'");
  ec.solver = solver_from_config(cfg, 0);
  ec.auto_lambda_s = cfg.at("solver").at("auto_lambda_s").get<bool>();
  ec.lambda_s_c0 = cfg.at("solver").at("lambda_s_c0").get<double>();
  ec.lambda_s_c1 = cfg.at("solver").at("lambda_s_c1").get<double>();
  ec.master_seed = cfg.at("seed").get<std::uint64_t>();
  ec.threads = cfg.at("threads").get<int>();
  ec.resample_cap = cfg.at("resample_cap").get<int>();

  const ErrorReport report = run_benchmark(ec);
  write_error_report_csv(report, (out / "report.csv").string());
  write_error_report_json(report, (out / "report.json").string());
  write_json_file(out / "run_config.json", cfg);
  std::cerr << "bench: " << report.cells.size() << " cells in "
            << report.wall_seconds << "s\n";
  return 0;
}

int run_real(const json& cfg) {
  const fs::path out = prepare_out_dir(cfg);
  PreprocessOptions options;
  options.standardize_drivers = cfg.at("standardize_drivers").get<bool>();
  options.center_returns = cfg.at("center_returns").get<bool>();
  options.whiten_drivers = cfg.at("whiten_drivers").get<bool>();
  const AlignedPanel panel =
      load_panel(cfg.at("returns").get<std::string>(),
                 cfg.at("drivers").get<std::string>(), options);
  const SolverConfig solver = solver_from_config(cfg, panel.k());
  const RealReport report =
      run_real_pipeline(panel, solver, cfg.at("top").get<int>());

  write_json_file(out / "centrality_pca.json", centrality_json(report.pca));
  write_json_file(out / "centrality_robust.json",
                  centrality_json(report.robust));
  write_json_file(out / "centrality_robust-quantized.json",
                  centrality_json(report.robust_quantized));
  write_matrix_csv(report.decomposition.L_hat, (out / "L.csv").string());
  write_matrix_csv(report.decomposition.S_hat, (out / "S.csv").string());
  write_json_file(out / "diagnostics.json",
                  diagnostics_json(report.decomposition));

  json panel_info = {{"entities", panel.entity_labels},
                     {"drivers", panel.driver_labels},
                     {"num_dates", panel.m()},
                     {"dropped_dates", panel.preprocessing.dropped_dates},
                     {"preprocessing", panel.preprocessing.steps}};
  write_json_file(out / "panel.json", panel_info);

  json influence;
  influence["beta"] = report.beta_used;
  json sections = json::array();
  for (std::size_t j = 0; j < report.influence.size(); ++j) {
    json entries = json::array();
    for (std::size_t r = 0; r < report.influence[j].size(); ++r) {
      const InfluenceEntry& e = report.influence[j][r];
      entries.push_back({{"rank", r + 1},
                         {"entity", e.entity},
                         {"entity_index", e.entity_index},
                         {"weight", e.weight}});
    }
    sections.push_back({{"driver", panel.driver_labels[j]},
                        {"entries", std::move(entries)}});
  }
  influence["sections"] = std::move(sections);
  write_json_file(out / "influence.json", influence);
  write_json_file(out / "run_config.json", cfg);
  return 0;
}

void apply_preset(json& cfg, const std::string& preset) {
  if (preset != "fig1a" && preset != "fig1b" && preset != "fig1c")
    throw std::runtime_error("unknown preset '" + preset +
                             "' (expected fig1a, fig1b, or fig1c)");
  cfg["n"] = 100;
  cfg["core_size"] = 10;
  cfg["p"] = 0.05;
  cfg["k_grid"] = json::array({10, 20, 30, 40, 50, 60, 70, 80, 90, 100});
  cfg["m"] = 10000;  // desk-scale default; --full-m restores 100000
  cfg["trials"] = 50;
  cfg["filter"] = default_filter_json();
  cfg["covariance"] = "exact";
  cfg["pattern"] = preset == "fig1a" ? "a" : (preset == "fig1b" ? "b" : "c");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "blind eigenvector-centrality estimation from low-pass graph signals"};
  app.require_subcommand(1);

  std::string config_path, out_dir, pattern, filter_json, covariance, preset;
  std::string y_path, z_path, returns_path, drivers_path;
  std::uint64_t seed = 0;
  int n = 0, core_size = 0, k = 0, m = 0, trials = 0, threads = 0, top = 0,
      max_iters = 0, resample_cap = 0;
  double p = 0, lambda_l = 0, lambda_s = 0, tol = 0, fp_tol = 0, beta = 0,
         c0 = 0, c1 = 0;
  bool quantize = false, full_m = false, auto_ls = true, standardize = true,
       center = true, whiten = false;
  std::vector<std::string> methods;
  std::vector<int> k_grid;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config_path, "JSON config file");
    sub->add_option("--seed", seed, "master seed (u64)");
    sub->add_option("--out", out_dir, "output directory");
  };
  auto add_solver = [&](CLI::App* sub) {
    sub->add_option("--lambda-L", lambda_l, "nuclear-norm penalty");
    sub->add_option("--lambda-S", lambda_s,
                    "l1 penalty (setting it disables the k-scaled default)");
    sub->add_option("--auto-lambda-s", auto_ls,
                    "scale lambda_S as c0 + c1/sqrt(k)");
    sub->add_option("--max-iters", max_iters, "solver sweep cap");
    sub->add_option("--tol", tol, "relative objective decrease tolerance");
    sub->add_option("--fp-tol", fp_tol, "block-movement tolerance");
    sub->add_option("--beta", beta, "quantization threshold");
  };

  CLI::App* sim = app.add_subcommand("simulate", "synthesize a dataset");
  add_common(sim);
  sim->add_option("--n", n, "graph size");
  sim->add_option("--core-size", core_size, "planted core size");
  sim->add_option("--p", p, "SBM base edge probability");
  sim->add_option("--k", k, "latent factor count");
  sim->add_option("--m", m, "sample count");
  sim->add_option("--pattern", pattern, "influence sparsity pattern a|b|c");
  sim->add_option("--filter", filter_json, "filter spec as inline JSON");
  sim->add_option("--resample-cap", resample_cap,
                  "disconnected-graph redraw limit");

  CLI::App* est = app.add_subcommand("estimate", "estimate from Y/Z files");
  add_common(est);
  est->add_option("--y", y_path, "observations CSV (n x m)");
  est->add_option("--z", z_path, "latent factors CSV (k x m)");
  est->add_option("--method", methods, "methods: pca,robust,robust-q")
      ->delimiter(',');
  est->add_option("--quantize", quantize,
                  "treat 'robust' as its quantized variant");
  add_solver(est);

  CLI::App* bench = app.add_subcommand("bench", "Monte-Carlo error curves");
  add_common(bench);
  bench->add_option("--preset", preset, "fig1a|fig1b|fig1c");
  bench->add_option("--n", n, "graph size");
  bench->add_option("--core-size", core_size, "planted core size");
  bench->add_option("--p", p, "SBM base edge probability");
  bench->add_option("--k-grid", k_grid, "latent dimensions, comma-separated")
      ->delimiter(',');
  bench->add_option("--m", m, "sample count");
  bench->add_flag("--full-m", full_m, "restore the full m = 100000");
  bench->add_option("--trials", trials, "Monte-Carlo trials per k");
  bench->add_option("--pattern", pattern, "influence sparsity pattern a|b|c");
  bench->add_option("--filter", filter_json, "filter spec as inline JSON");
  bench->add_option("--covariance", covariance, "PCA covariance: exact|sample");
  bench->add_option("--threads", threads, "worker threads (0 = hardware)");
  bench->add_option("--resample-cap", resample_cap,
                    "disconnected-graph redraw limit");
  add_solver(bench);

  CLI::App* real = app.add_subcommand("real", "run on an ingested CSV panel");
  add_common(real);
  real->add_option("--returns", returns_path, "entity observations CSV");
  real->add_option("--drivers", drivers_path, "driver series CSV");
  real->add_option("--top", top, "entries per driver in the influence report");
  real->add_option("--standardize-drivers", standardize,
                   "standardize driver rows");
  real->add_option("--center-returns", center, "center entity rows");
  real->add_option("--whiten-drivers", whiten, "jointly whiten driver rows");
  add_solver(real);

  CLI11_PARSE(app, argc, argv);

  try {
    CLI::App* sub = app.get_subcommands().front();
    json cfg = defaults_for(sub->get_name());

    auto given = [&](const char* flag) {
      const CLI::Option* opt = sub->get_option_no_throw(flag);
      return opt != nullptr && opt->count() > 0;
    };

    if (given("--preset")) apply_preset(cfg, preset);
    if (given("--config"))
      apply_config(cfg, parse_json_file(config_path), config_path);
    if (!cfg.at("command").get<std::string>().empty() &&
        cfg.at("command").get<std::string>() != sub->get_name())
      throw std::runtime_error("config is for command '" +
                               cfg.at("command").get<std::string>() +
                               "' but '" + sub->get_name() + "' was invoked");

    auto set_if = [&](const char* flag, const char* key, auto&& value) {
      if (given(flag)) cfg[key] = value;
    };
    set_if("--seed", "seed", seed);
    set_if("--out", "out", out_dir);
    set_if("--n", "n", n);
    set_if("--core-size", "core_size", core_size);
    set_if("--p", "p", p);
    set_if("--k", "k", k);
    set_if("--m", "m", m);
    set_if("--trials", "trials", trials);
    set_if("--pattern", "pattern", pattern);
    set_if("--covariance", "covariance", covariance);
    set_if("--threads", "threads", threads);
    set_if("--resample-cap", "resample_cap", resample_cap);
    set_if("--top", "top", top);
    set_if("--y", "y", y_path);
    set_if("--z", "z", z_path);
    set_if("--returns", "returns", returns_path);
    set_if("--drivers", "drivers", drivers_path);
    set_if("--quantize", "quantize", quantize);
    set_if("--standardize-drivers", "standardize_drivers", standardize);
    set_if("--center-returns", "center_returns", center);
    set_if("--whiten-drivers", "whiten_drivers", whiten);
    if (given("--k-grid")) cfg["k_grid"] = k_grid;
    if (given("--method")) cfg["methods"] = methods;
    if (given("--filter")) {
      cfg["filter"] = json::parse(filter_json);
      filter_from_config(cfg);  // validate eagerly
    }
    if (given("--full-m") && !given("--m")) cfg["m"] = 100000;

    auto set_solver = [&](const char* flag, const char* key, auto&& value) {
      if (given(flag)) cfg["solver"][key] = value;
    };
    set_solver("--lambda-L", "lambda_L", lambda_l);
    set_solver("--lambda-S", "lambda_S", lambda_s);
    set_solver("--auto-lambda-s", "auto_lambda_s", auto_ls);
    set_solver("--max-iters", "max_iters", max_iters);
    set_solver("--tol", "tol", tol);
    set_solver("--fp-tol", "fp_tol", fp_tol);
    set_solver("--beta", "beta", beta);
    if (given("--lambda-S") && !given("--auto-lambda-s"))
      cfg["solver"]["auto_lambda_s"] = false;

    if (sub->get_name() == "simulate") return run_simulate(cfg);
    if (sub->get_name() == "estimate") return run_estimate(cfg);
    if (sub->get_name() == "bench") return run_bench(cfg);
    return run_real(cfg);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
