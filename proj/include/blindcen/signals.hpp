// Sparse influence matrices and filtered-signal synthesis.

#pragma once

#include <Eigen/Dense>
#include <cstdint>

#include "blindcen/filters.hpp"
#include "blindcen/graph.hpp"

namespace blindcen {

enum class InfluenceTag { dense_fraction, per_row_range, identity, external };

// Which generator produced the matrix:
//   uniform_fraction : every entry independently nonzero w.p. 0.1
//   per_row_3_6      : per row, U{3..6} nonzero positions (requires k >= 6)
//   per_row_tenth    : per row, U{0..ceil(0.1 k)} nonzero positions
enum class SparsityPattern { uniform_fraction, per_row_3_6, per_row_tenth };

SparsityPattern pattern_from_name(const std::string& name);  // "a"|"b"|"c"
const char* pattern_name(SparsityPattern p);

// n x k influence matrix. Generated nonzeros are drawn i.i.d. from
// Uniform[0.1, 1]; all generated entries are nonnegative.
struct InfluenceMatrix {
  Eigen::MatrixXd entries;
  InfluenceTag tag = InfluenceTag::external;

  int n() const { return static_cast<int>(entries.rows()); }
  int k() const { return static_cast<int>(entries.cols()); }
};

// Draw order (one SplitMix64 stream per call, see rng.hpp):
//  - uniform_fraction: entries visited row-major; one bernoulli gate per
//    entry, then one value draw when the gate fires.
//  - per-row patterns: per row, one integer count draw, then a partial
//    Fisher-Yates selection of `count` column indices (swap target drawn
//    as uniform_int(t, k-1) for t = 0..count-1), then the selected columns
//    are sorted ascending and one value is drawn per column in that order.
InfluenceMatrix generate_influence(SparsityPattern pattern, int n, int k,
                                   std::uint64_t seed);

InfluenceMatrix identity_influence(int n);
InfluenceMatrix external_influence(Eigen::MatrixXd entries);

// k x m matrix of i.i.d. standard normals, filled column by column
// (column j is sample j; entries within a column drawn top to bottom).
Eigen::MatrixXd sample_latents(int k, int m, std::uint64_t seed);

// Paired observations Y (n x m) and latent factors Z (k x m).
struct SignalDataset {
  Eigen::MatrixXd Y;
  Eigen::MatrixXd Z;
};

// Y = H(A) B Z for the given filter and spectrum.
SignalDataset synthesize(const FilterSpec& f, const SpectralDecomposition& sd,
                         const InfluenceMatrix& b, const Eigen::MatrixXd& z);

}  // namespace blindcen
