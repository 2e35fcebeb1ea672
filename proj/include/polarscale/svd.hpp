#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/embedding.hpp"

namespace polarscale {

enum class TermWeighting { Count, LogCount };

// Compressed sparse rows: sentences by vocabulary terms.
struct SentenceTermMatrix {
  std::size_t n_cols = 0;
  std::vector<std::size_t> row_start{0};
  std::vector<TermId> col;
  std::vector<double> value;

  std::size_t rows() const { return row_start.size() - 1; }
  std::size_t cols() const { return n_cols; }
  std::size_t nonzeros() const { return value.size(); }

  // Appends a row; entries must have distinct columns < n_cols and positive values.
  void add_row(std::vector<std::pair<TermId, double>> entries);
};

// One row per sentence with at least one vocabulary term. Entries are raw
// counts or 1 + ln(count). Throws DataError when no row survives.
SentenceTermMatrix build_sentence_term_matrix(const Corpus& corpus,
                                              TermWeighting weighting = TermWeighting::Count);

// Column-major dense matrix used for SVD factors.
struct DenseMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  DenseMatrix() = default;
  DenseMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t i, std::size_t j) { return data[j * rows + i]; }
  double operator()(std::size_t i, std::size_t j) const { return data[j * rows + i]; }
};

struct SvdResult {
  std::vector<double> singular_values;  // non-increasing, length K
  DenseMatrix left;                     // rows x K, orthonormal columns
  DenseMatrix right;                    // cols x K, orthonormal columns

  // Term vectors: right * diag(singular_values), cols x K.
  DenseMatrix term_vectors() const;
};

struct SvdOptions {
  std::size_t power_iterations = 8;
  std::size_t oversampling = 10;
};

/// Rank-K truncated SVD by randomized subspace iteration.
///
/// Deterministic given `seed`. Each component's sign is fixed so that its
/// largest-magnitude term loading is positive. Throws ConfigError when
/// K < 1 or K > min(rows, cols).
SvdResult truncated_svd(const SentenceTermMatrix& matrix, std::size_t k, std::uint64_t seed,
                        const SvdOptions& options = {});

// Spatial-only model whose V rows are the term vectors; no output layer.
EmbeddingModel train_svd(const Corpus& corpus, std::size_t k, std::uint64_t seed,
                         TermWeighting weighting = TermWeighting::Count);

}  // namespace polarscale
