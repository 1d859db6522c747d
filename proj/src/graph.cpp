#include "blindcen/graph.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "blindcen/rng.hpp"

namespace blindcen {

const char* method_name(Method m) {
  switch (m) {
    case Method::groundtruth: return "groundtruth";
    case Method::pca: return "pca";
    case Method::robust: return "robust";
    case Method::robust_quantized: return "robust-quantized";
  }
  return "unknown";
}

Method method_from_name(const std::string& name) {
  if (name == "groundtruth") return Method::groundtruth;
  if (name == "pca") return Method::pca;
  if (name == "robust") return Method::robust;
  if (name == "robust-quantized" || name == "robust-q")
    return Method::robust_quantized;
  throw std::invalid_argument("unknown method name: " + name);
}

void canonicalize_sign(Eigen::VectorXd& v) {
  Eigen::Index idx = 0;
  double best = -1.0;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    const double a = std::abs(v[i]);
    if (a > best) {
      best = a;
      idx = i;
    }
  }
  if (v[idx] < 0) v = -v;
}

Graph generate_sbm_core_periphery(int n, int core_size, double p,
                                  std::uint64_t seed) {
  if (n < 2) throw std::invalid_argument("SBM: n must be at least 2");
  if (core_size <= 0 || core_size >= n)
    throw std::invalid_argument("SBM: core_size must satisfy 0 < core_size < n");
  if (!(p >= 0.0 && p <= 0.25))
    throw std::invalid_argument(
        "SBM: p must lie in [0, 0.25] so the core-periphery probability 4p "
        "stays within [0, 1]");

  SplitMix64 rng(seed);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    const bool i_core = i < core_size;
    for (int j = i + 1; j < n; ++j) {
      const bool j_core = j < core_size;
      double prob;
      if (i_core && j_core)
        prob = 1.0;
      else if (i_core || j_core)
        prob = 4.0 * p;
      else
        prob = p;
      if (rng.uniform01() < prob) {
        a(i, j) = 1.0;
        a(j, i) = 1.0;
      }
    }
  }
  return Graph{std::move(a)};
}

SpectralDecomposition spectral_decompose(const Graph& g) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(g.adjacency);
  if (solver.info() != Eigen::Success)
    throw std::runtime_error("spectral_decompose: eigensolver did not converge");
  // Eigen returns ascending order; flip to descending.
  SpectralDecomposition sd;
  sd.eigenvalues = solver.eigenvalues().reverse();
  sd.eigenvectors = solver.eigenvectors().rowwise().reverse();
  return sd;
}

CentralityEstimate eigen_centrality(const SpectralDecomposition& sd,
                                    const Graph& g) {
  if (!is_connected(g))
    throw std::domain_error(
        "eigen_centrality: graph is disconnected; the top eigenvector is not "
        "unique and need not be positive");
  const double l1 = sd.eigenvalues[0];
  const double l2 = sd.eigenvalues[1];
  if (l1 - l2 <= 1e-10 * std::max(1.0, std::abs(l1)))
    throw std::domain_error(
        "eigen_centrality: top eigenvalue is degenerate (lambda_1 ~ lambda_2)");
  CentralityEstimate est;
  est.scores = sd.eigenvectors.col(0);
  canonicalize_sign(est.scores);
  est.scores.normalize();
  est.method = Method::groundtruth;
  return est;
}

bool is_connected(const Graph& g) {
  const int n = g.n();
  if (n == 0) return false;
  std::vector<char> seen(n, 0);
  std::vector<int> stack{0};
  seen[0] = 1;
  int visited = 1;
  while (!stack.empty()) {
    const int u = stack.back();
    stack.pop_back();
    for (int v = 0; v < n; ++v) {
      if (g.adjacency(u, v) != 0.0 && !seen[v]) {
        seen[v] = 1;
        ++visited;
        stack.push_back(v);
      }
    }
  }
  return visited == n;
}

void save_edge_list(const Graph& g, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  const int n = g.n();
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (g.adjacency(i, j) != 0.0) out << i << ' ' << j << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

Graph load_edge_list(const std::string& path, int n) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::vector<std::pair<int, int>> edges;
  int max_index = -1;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int i, j;
    if (!(ss >> i >> j) || i < 0 || j < 0)
      throw std::runtime_error("bad edge at " + path + ":" +
                               std::to_string(line_no));
    edges.emplace_back(i, j);
    max_index = std::max(max_index, std::max(i, j));
  }
  if (n == 0) n = max_index + 1;
  if (max_index >= n)
    throw std::runtime_error("edge index exceeds node count in " + path);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (auto [i, j] : edges) {
    a(i, j) = 1.0;
    a(j, i) = 1.0;
  }
  return Graph{std::move(a)};
}

}  // namespace blindcen
