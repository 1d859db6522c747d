#include "blindcen/ingest.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>

namespace blindcen {

namespace {

struct RawTable {
  std::vector<std::string> labels;  // header minus the "date" cell
  // date -> row values; a missing (empty) cell leaves the optional empty
  std::map<std::string, std::vector<std::optional<double>>> rows;
};

std::vector<std::string> split_csv_line(std::string line) {
  if (!line.empty() && line.back() == '\r') line.pop_back();
  std::vector<std::string> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    fields.push_back(line.substr(
        start, comma == std::string::npos ? std::string::npos : comma - start));
    if (comma == std::string::npos) break;
    start = comma + 1;
  }
  return fields;
}

RawTable read_table(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::string line;
  if (!std::getline(in, line))
    throw std::runtime_error(path + ": empty file, expected a header row");
  RawTable table;
  {
    auto header = split_csv_line(std::move(line));
    if (header.empty() || header.front() != "date")
      throw std::runtime_error(path +
                               ":1: header must start with a 'date' column");
    if (header.size() < 2)
      throw std::runtime_error(path + ":1: header has no data columns");
    std::set<std::string> seen;
    for (std::size_t j = 1; j < header.size(); ++j) {
      if (header[j].empty())
        throw std::runtime_error(path + ":1: empty label in column " +
                                 std::to_string(j + 1));
      if (!seen.insert(header[j]).second)
        throw std::runtime_error(path + ":1: duplicate column label '" +
                                 header[j] + "'");
      table.labels.push_back(header[j]);
    }
  }
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    auto fields = split_csv_line(std::move(line));
    if (fields.size() == 1 && fields.front().empty()) continue;  // blank line
    if (fields.size() != table.labels.size() + 1)
      throw std::runtime_error(
          path + ":" + std::to_string(lineno) + ": expected " +
          std::to_string(table.labels.size() + 1) + " fields, got " +
          std::to_string(fields.size()));
    if (fields.front().empty())
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": empty date cell");
    std::vector<std::optional<double>> row;
    row.reserve(table.labels.size());
    for (std::size_t j = 1; j < fields.size(); ++j) {
      const std::string& cell = fields[j];
      if (cell.empty()) {
        row.emplace_back();  // missing value; the date gets dropped later
        continue;
      }
      double value = 0.0;
      const auto [end, ec] =
          std::from_chars(cell.data(), cell.data() + cell.size(), value);
      if (ec != std::errc{} || end != cell.data() + cell.size())
        throw std::runtime_error(path + ":" + std::to_string(lineno) +
                                 ": column " + std::to_string(j + 1) + " ('" +
                                 table.labels[j - 1] + "'): not a number: '" +
                                 cell + "'");
      row.emplace_back(value);
    }
    if (!table.rows.emplace(fields.front(), std::move(row)).second)
      throw std::runtime_error(path + ":" + std::to_string(lineno) +
                               ": duplicate date '" + fields.front() + "'");
  }
  if (table.rows.empty())
    throw std::runtime_error(path + ": no data rows after the header");
  return table;
}

bool row_complete(const std::vector<std::optional<double>>& row) {
  return std::all_of(row.begin(), row.end(),
                     [](const auto& v) { return v.has_value(); });
}

Eigen::VectorXd row_means(const Eigen::MatrixXd& m) {
  return m.rowwise().mean();
}

}  // namespace

std::pair<Eigen::MatrixXd, Eigen::MatrixXd> apply_preprocessing(
    const Eigen::MatrixXd& raw_y, const Eigen::MatrixXd& raw_z,
    const PreprocessRecord& record) {
  Eigen::MatrixXd y = raw_y;
  Eigen::MatrixXd z = raw_z;
  if (record.center_returns) y.colwise() -= record.return_means;
  if (record.whiten_drivers) {
    z.colwise() -= record.driver_means;
    z = record.whitening * z;
  } else if (record.standardize_drivers) {
    z.colwise() -= record.driver_means;
    z.array().colwise() /= record.driver_scales.array();
  }
  return {std::move(y), std::move(z)};
}

AlignedPanel load_panel(const std::string& returns_path,
                        const std::string& drivers_path,
                        const PreprocessOptions& options) {
  const RawTable returns = read_table(returns_path);
  const RawTable drivers = read_table(drivers_path);

  AlignedPanel panel;
  panel.entity_labels = returns.labels;
  panel.driver_labels = drivers.labels;

  int dropped = 0;
  for (const auto& [date, row] : returns.rows) {
    const auto it = drivers.rows.find(date);
    if (it == drivers.rows.end()) continue;
    if (row_complete(row) && row_complete(it->second))
      panel.dates.push_back(date);  // std::map iteration is already sorted
    else
      ++dropped;
  }
  if (panel.dates.empty())
    throw std::runtime_error(
        "alignment error: no complete common dates between '" + returns_path +
        "' and '" + drivers_path + "'");

  const int n = static_cast<int>(returns.labels.size());
  const int k = static_cast<int>(drivers.labels.size());
  const int m = static_cast<int>(panel.dates.size());
  Eigen::MatrixXd raw_y(n, m);
  Eigen::MatrixXd raw_z(k, m);
  for (int t = 0; t < m; ++t) {
    const auto& yrow = returns.rows.at(panel.dates[static_cast<std::size_t>(t)]);
    const auto& zrow = drivers.rows.at(panel.dates[static_cast<std::size_t>(t)]);
    for (int i = 0; i < n; ++i)
      raw_y(i, t) = *yrow[static_cast<std::size_t>(i)];
    for (int j = 0; j < k; ++j)
      raw_z(j, t) = *zrow[static_cast<std::size_t>(j)];
  }

  PreprocessRecord rec;
  rec.dropped_dates = dropped;
  rec.center_returns = options.center_returns;
  rec.whiten_drivers = options.whiten_drivers;
  rec.standardize_drivers = options.standardize_drivers && !options.whiten_drivers;

  if (rec.center_returns) {
    rec.return_means = row_means(raw_y);
    rec.steps.push_back("centered each entity row of Y by its sample mean");
  }
  if (rec.standardize_drivers || rec.whiten_drivers) {
    if (m < 2)
      throw std::runtime_error(
          "degenerate driver: sample variance undefined with fewer than 2 "
          "dates; disable standardization/whitening for m = 1 panels");
    rec.driver_means = row_means(raw_z);
  }
  if (rec.standardize_drivers) {
    rec.driver_scales = Eigen::VectorXd(k);
    for (int j = 0; j < k; ++j) {
      const double mean = rec.driver_means(j);
      const double var =
          (raw_z.row(j).array() - mean).square().sum() / (m - 1);
      const double scale = std::sqrt(var);
      if (scale <= 1e-12 * std::max(1.0, std::abs(mean)))
        throw std::runtime_error("degenerate driver '" +
                                 drivers.labels[static_cast<std::size_t>(j)] +
                                 "': (near-)constant column, zero variance");
      rec.driver_scales(j) = scale;
    }
    rec.steps.push_back(
        "standardized each driver row of Z to zero mean, unit sample "
        "variance");
  } else if (rec.whiten_drivers) {
    const Eigen::MatrixXd centered = raw_z.colwise() - rec.driver_means;
    const Eigen::MatrixXd cov =
        centered * centered.transpose() / static_cast<double>(m - 1);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success)
      throw std::runtime_error("whitening: eigendecomposition failed");
    const Eigen::VectorXd& ev = solver.eigenvalues();
    if (ev(0) <= 1e-12 * std::max(1.0, ev(k - 1)))
      throw std::runtime_error(
          "degenerate driver set: driver covariance is (near-)singular, "
          "cannot whiten");
    rec.whitening = solver.eigenvectors() *
                    ev.cwiseSqrt().cwiseInverse().asDiagonal() *
                    solver.eigenvectors().transpose();
    rec.steps.push_back(
        "whitened driver rows of Z to zero mean, identity sample "
        "covariance");
  }

  std::tie(panel.Y, panel.Z) = apply_preprocessing(raw_y, raw_z, rec);
  panel.preprocessing = std::move(rec);
  return panel;
}

RealReport run_real_pipeline(const AlignedPanel& panel,
                             const SolverConfig& cfg, int top_count) {
  if (top_count < 1)
    throw std::invalid_argument("run_real_pipeline: top_count must be >= 1");
  if (panel.m() < panel.k())
    throw std::invalid_argument(
        "run_real_pipeline: need at least as many dates as drivers");

  SignalDataset ds{panel.Y, panel.Z};
  RealReport report;
  report.pca = pca_centrality(sample_covariance(ds));
  RobustPair pair = robust_centrality_both(ds, cfg);
  report.robust = std::move(pair.plain);
  report.robust_quantized = std::move(pair.quantized);
  report.decomposition = std::move(pair.decomposition);
  report.hb = std::move(pair.hb);
  report.beta_used = cfg.beta;

  const Eigen::MatrixXd scaled =
      threshold_sparse(report.decomposition.S_hat, cfg.beta) / cfg.beta;
  const int n = panel.n();
  const int k = panel.k();
  const int take = std::min(top_count, n);
  report.influence.reserve(static_cast<std::size_t>(k));
  for (int j = 0; j < k; ++j) {
    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
      return scaled(a, j) > scaled(b, j);
    });
    std::vector<InfluenceEntry> list;
    list.reserve(static_cast<std::size_t>(take));
    for (int t = 0; t < take; ++t) {
      InfluenceEntry e;
      e.entity_index = order[static_cast<std::size_t>(t)];
      e.entity = panel.entity_labels[static_cast<std::size_t>(e.entity_index)];
      e.weight = scaled(e.entity_index, j);
      list.push_back(std::move(e));
    }
    report.influence.push_back(std::move(list));
  }
  return report;
}

}  // namespace blindcen
