// Undirected graphs, their spectral decompositions and eigen-centrality.

#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <string>

namespace blindcen {

// Simple undirected graph held as a dense symmetric 0/1 adjacency matrix
// with a zero diagonal.
struct Graph {
  Eigen::MatrixXd adjacency;

  int n() const { return static_cast<int>(adjacency.rows()); }
};

// Full eigendecomposition of an adjacency matrix. Eigenvalues are sorted
// descending; column j of `eigenvectors` pairs with eigenvalue j.
struct SpectralDecomposition {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd eigenvectors;

  int n() const { return static_cast<int>(eigenvalues.size()); }
};

enum class Method { groundtruth, pca, robust, robust_quantized };

const char* method_name(Method m);
Method method_from_name(const std::string& name);

// Unit-norm score vector, sign-fixed so the entry of largest magnitude is
// positive (first such index wins on ties).
struct CentralityEstimate {
  Eigen::VectorXd scores;
  Method method = Method::groundtruth;
  std::optional<std::string> warning;
};

// Flips the sign of v, if needed, so its largest-magnitude entry is positive.
void canonicalize_sign(Eigen::VectorXd& v);

// Two-block stochastic block model: nodes {0, ..., core_size-1} form the
// core. Edge probabilities: 1 within the core, 4p core-periphery, p within
// the periphery. One uniform is drawn per unordered pair (i, j), i < j,
// iterating i ascending and j ascending within i.
Graph generate_sbm_core_periphery(int n, int core_size, double p,
                                  std::uint64_t seed);

SpectralDecomposition spectral_decompose(const Graph& g);

// Top adjacency eigenvector of a connected graph with a simple top
// eigenvalue. Throws std::domain_error on a disconnected graph or when
// lambda_1 - lambda_2 <= 1e-10 * max(1, |lambda_1|).
CentralityEstimate eigen_centrality(const SpectralDecomposition& sd,
                                    const Graph& g);

bool is_connected(const Graph& g);

// Edge-list text format: one "i j" pair per line, 0-indexed, i < j, each
// undirected edge listed once.
void save_edge_list(const Graph& g, const std::string& path);

// Reads an edge list. n = 0 infers the node count as max index + 1.
Graph load_edge_list(const std::string& path, int n = 0);

}  // namespace blindcen
