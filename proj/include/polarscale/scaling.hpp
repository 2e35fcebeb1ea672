#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/embedding.hpp"

namespace polarscale {

enum class SeedMode { Unipolar, Bipolar };

struct SeedTerm {
  TermId term;
  double weight;  // p_m
};

/// Seed patterns expanded against a vocabulary.
///
/// Each pattern's polarity (1 when omitted) is split evenly among its
/// matches, then all weights are rescaled so that sum |p_m| = 1. A term hit by
/// several patterns appears once with the summed weight.
struct SeedSet {
  PatternSet patterns;
  SeedMode mode = SeedMode::Unipolar;
  std::vector<SeedTerm> expanded;
  std::vector<std::string> unmatched;  // patterns with no vocabulary match
  std::uint64_t vocab_fingerprint = 0;

  std::size_t size() const { return expanded.size(); }  // M
  double total_abs_weight() const;
};

// Throws DataError listing the patterns when nothing matches, ConfigError when
// polarities disagree with the mode.
SeedSet make_seed_set(const PatternSet& patterns, const Vocabulary& vocab,
                      SeedMode mode = SeedMode::Unipolar);

enum class PolarityKind { Spatial, Probabilistic, Dictionary };

std::string_view to_string(PolarityKind kind);
PolarityKind parse_polarity_kind(std::string_view text);

// Word polarity over a full vocabulary.
struct WordPolarity {
  std::string concept_label;
  PolarityKind kind = PolarityKind::Spatial;
  std::vector<double> scores;  // indexed by TermId
  std::uint64_t vocab_fingerprint = 0;

  double min() const;
  double max() const;
};

// g_i = (1/M) sum_m cosine(V_i, V_m) p_m; zero-norm rows score 0.
WordPolarity spatial_word_scores(const EmbeddingModel& model, const SeedSet& seeds);
// g_i = (1/M) sum_m sigmoid(V_i . W_m) p_m; needs an output layer.
WordPolarity probabilistic_word_scores(const EmbeddingModel& model, const SeedSet& seeds);
// g_i = 1 for dictionary words, 0 otherwise.
WordPolarity dictionary_word_scores(const PatternSet& dictionary, const Vocabulary& vocab);

struct ScoreRow {
  std::string id;
  std::optional<Date> date;
  std::vector<std::string> tags;
  std::size_t n_tokens = 0;
  double score = 0.0;
};

struct ScoreTable {
  std::vector<ScoreRow> rows;
  std::vector<std::string> skipped;  // documents below the token minimum, or dropped by a join
};

struct ScoringOptions {
  std::size_t min_tokens = 1;
  std::size_t threads = 1;
};

// y = (1/N) sum_i g_i f_i with N the in-vocabulary token count. Rows keep
// corpus order. Throws DataError on a vocabulary mismatch.
ScoreTable score_documents(const Corpus& corpus, const WordPolarity& polarity,
                           const ScoringOptions& options = {});

// sqrt(a * b) per document, joined on id in the order of `a`. Ids present in
// only one table go to `skipped`. Throws ConfigError on negative scores.
ScoreTable combine_scores(const ScoreTable& a, const ScoreTable& b);

// Tab-separated `term  frequency  score`, highest score first.
void write_word_polarity(std::ostream& out, const WordPolarity& polarity, const Vocabulary& vocab);
// Tab-separated with header `id  date  tags  n_tokens  score`; tags joined by ','.
void write_score_table(std::ostream& out, const ScoreTable& table);
ScoreTable read_score_table(std::istream& in);
void save_score_table(const std::filesystem::path& path, const ScoreTable& table);
ScoreTable load_score_table(const std::filesystem::path& path);

}  // namespace polarscale
