#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/date.hpp"
#include "polarscale/embedding.hpp"
#include "polarscale/scaling.hpp"
#include "polarscale/svd.hpp"

namespace polarscale {

struct SeedSample {
  std::size_t sample_id = 0;  // 1-based
  PatternSet patterns;
  std::uint64_t seed = 0;
};

// n_sets samples of set_size patterns, without replacement within a sample.
SeedSample draw_seed_sample(const PatternSet& dictionary, std::size_t set_size, std::uint64_t seed);
std::vector<SeedSample> sample_seed_sets(const PatternSet& dictionary, std::size_t n_sets,
                                         std::size_t set_size, std::uint64_t master_seed);

// Product-moment correlation. Throws ConfigError("undefined correlation") for
// constant input and on length mismatch or fewer than two points.
double pearson(std::span<const double> x, std::span<const double> y);

// Correlation over documents scored in both tables, matched by id.
double pearson(const ScoreTable& a, const ScoreTable& b);

struct KeywordGroup {
  std::string name;
  std::vector<std::string> keywords;  // literal tokens, case-insensitive
};

inline constexpr std::string_view kDefaultGroup = "other";

// First configured group with a keyword among the document's tokens, else
// "other".
std::vector<std::string> classify_documents(std::span<const TokenizedDocument> docs,
                                            std::span<const KeywordGroup> groups);
// Parses `name=kw1,kw2,...`.
KeywordGroup parse_keyword_group(std::string_view spec);

struct TimeSeriesPoint {
  Date date;
  double value = 0.0;
  std::string group;
};

struct SmoothedPoint {
  Date date;
  std::string group;
  double value = 0.0;
  double lower = 0.0;
  double upper = 0.0;
};

struct SmoothingOptions {
  double bandwidth_days = 14.0;
  std::size_t n_boot = 500;
  std::uint64_t seed = kDefaultSeed;
};

/// Gaussian-kernel local mean at each distinct date (kernel sd = bandwidth)
/// with 2.5/97.5 percentile bands over bootstrap resamples of the points.
///
/// A simplified stand-in for LOESS bands. Points are one series; use
/// smooth_by_group for several. Throws ConfigError with fewer than two
/// distinct dates or a non-positive bandwidth.
std::vector<SmoothedPoint> smooth_series(std::span<const TimeSeriesPoint> points,
                                         const SmoothingOptions& options = {});
// Smooths each group separately; output ordered by group name, then date.
std::vector<SmoothedPoint> smooth_by_group(std::span<const TimeSeriesPoint> points,
                                           const SmoothingOptions& options = {});

// Mean score per (group, date).
std::vector<TimeSeriesPoint> daily_means(std::span<const TimeSeriesPoint> points);

// Points from dated rows of a score table; group from `groups` by id when
// given, else the row's first tag, else "all".
std::vector<TimeSeriesPoint> score_points(
    const ScoreTable& table,
    const std::vector<std::pair<std::string, std::string>>& groups = {});

// Tab-separated `date group value lower upper`.
void write_smoothed_series(std::ostream& out, std::span<const SmoothedPoint> series);

struct BenchmarkGrid {
  std::vector<W2VConfig> word2vec;
  std::vector<std::size_t> svd_ranks;
};

// Word2vec configs become w2v rows; SVD entries become svd ranks. Without
// SVD entries, the distinct K of the word2vec configs are used.
BenchmarkGrid make_benchmark_grid(const std::vector<W2VConfig>& configs);

struct BenchmarkOptions {
  std::uint64_t seed = kDefaultSeed;
  TermWeighting svd_weighting = TermWeighting::Count;
  std::size_t threads = 1;
};

struct BenchmarkRow {
  std::size_t sample_id = 0;
  std::string family;     // mini-dictionary, svd-spatial, w2v-spatial, w2v-probabilistic
  std::string algorithm;  // dictionary, SVD, SG, CBOW
  std::optional<std::size_t> k;
  double correlation = 0.0;  // NaN when undefined (constant scores)
  std::optional<double> perplexity;
};

/// Correlates every model family's document scores with the full
/// dictionary's, per seed sample and grid config.
///
/// Each config's model is trained once (seed from grid_config_seed) and
/// reused across samples. Rows come out ordered by sample, then
/// mini-dictionary, SVD ranks, and word2vec configs (spatial before
/// probabilistic). `on_row` sees each row as soon as it is computed.
/// Errors are rethrown with the sample and config identified.
std::vector<BenchmarkRow> run_benchmark(const Corpus& corpus, const PatternSet& full_dictionary,
                                        std::span<const SeedSample> samples,
                                        const BenchmarkGrid& grid,
                                        const BenchmarkOptions& options = {},
                                        const std::function<void(const BenchmarkRow&)>& on_row = {});

// Tab-separated `sample_id family algorithm k correlation perplexity`; NA for
// missing values.
void write_benchmark_header(std::ostream& out);
void write_benchmark_row(std::ostream& out, const BenchmarkRow& row);

}  // namespace polarscale
