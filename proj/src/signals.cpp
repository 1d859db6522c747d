#include "blindcen/signals.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>
#include <vector>

#include "blindcen/rng.hpp"

namespace blindcen {

SparsityPattern pattern_from_name(const std::string& name) {
  if (name == "a") return SparsityPattern::uniform_fraction;
  if (name == "b") return SparsityPattern::per_row_3_6;
  if (name == "c") return SparsityPattern::per_row_tenth;
  throw std::invalid_argument("unknown sparsity pattern: " + name);
}

const char* pattern_name(SparsityPattern p) {
  switch (p) {
    case SparsityPattern::uniform_fraction: return "a";
    case SparsityPattern::per_row_3_6: return "b";
    case SparsityPattern::per_row_tenth: return "c";
  }
  return "?";
}

namespace {

void fill_row(Eigen::MatrixXd& b, int row, int count, int k, SplitMix64& rng) {
  // Partial Fisher-Yates: first `count` slots end up holding a uniform
  // random subset of {0..k-1}.
  std::vector<int> cols(static_cast<std::size_t>(k));
  std::iota(cols.begin(), cols.end(), 0);
  for (int t = 0; t < count; ++t) {
    const auto j = rng.uniform_int(static_cast<std::uint64_t>(t),
                                   static_cast<std::uint64_t>(k - 1));
    std::swap(cols[static_cast<std::size_t>(t)], cols[j]);
  }
  std::sort(cols.begin(), cols.begin() + count);
  for (int t = 0; t < count; ++t)
    b(row, cols[static_cast<std::size_t>(t)]) = rng.uniform(0.1, 1.0);
}

}  // namespace

InfluenceMatrix generate_influence(SparsityPattern pattern, int n, int k,
                                   std::uint64_t seed) {
  if (n < 1 || k < 1)
    throw std::invalid_argument("generate_influence: n and k must be >= 1");
  InfluenceMatrix out;
  out.entries = Eigen::MatrixXd::Zero(n, k);
  SplitMix64 rng(seed);
  switch (pattern) {
    case SparsityPattern::uniform_fraction:
      out.tag = InfluenceTag::dense_fraction;
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < k; ++j)
          if (rng.bernoulli(0.1)) out.entries(i, j) = rng.uniform(0.1, 1.0);
      break;
    case SparsityPattern::per_row_3_6: {
      if (k < 6)
        throw std::invalid_argument(
            "per_row_3_6 pattern needs at least 6 columns");
      out.tag = InfluenceTag::per_row_range;
      for (int i = 0; i < n; ++i) {
        const int count = static_cast<int>(rng.uniform_int(3, 6));
        fill_row(out.entries, i, count, k, rng);
      }
      break;
    }
    case SparsityPattern::per_row_tenth: {
      out.tag = InfluenceTag::per_row_range;
      const int hi = static_cast<int>((k + 9) / 10);  // ceil(0.1 k)
      for (int i = 0; i < n; ++i) {
        const int count = static_cast<int>(rng.uniform_int(0, hi));
        fill_row(out.entries, i, count, k, rng);
      }
      break;
    }
  }
  return out;
}

InfluenceMatrix identity_influence(int n) {
  if (n < 1) throw std::invalid_argument("identity_influence: n must be >= 1");
  InfluenceMatrix out;
  out.entries = Eigen::MatrixXd::Identity(n, n);
  out.tag = InfluenceTag::identity;
  return out;
}

InfluenceMatrix external_influence(Eigen::MatrixXd entries) {
  if (entries.size() == 0)
    throw std::invalid_argument("external_influence: empty matrix");
  InfluenceMatrix out;
  out.entries = std::move(entries);
  out.tag = InfluenceTag::external;
  return out;
}

Eigen::MatrixXd sample_latents(int k, int m, std::uint64_t seed) {
  if (k < 1 || m < 1)
    throw std::invalid_argument("sample_latents: k and m must be >= 1");
  Eigen::MatrixXd z(k, m);
  SplitMix64 rng(seed);
  for (int j = 0; j < m; ++j)
    for (int i = 0; i < k; ++i) z(i, j) = rng.normal();
  return z;
}

SignalDataset synthesize(const FilterSpec& f, const SpectralDecomposition& sd,
                         const InfluenceMatrix& b, const Eigen::MatrixXd& z) {
  if (b.n() != sd.n())
    throw std::invalid_argument("synthesize: influence rows != graph size");
  if (b.k() != z.rows())
    throw std::invalid_argument("synthesize: influence cols != latent rows");
  SignalDataset ds;
  ds.Y = apply_filter(f, sd, b.entries * z);
  ds.Z = z;
  return ds;
}

}  // namespace blindcen
