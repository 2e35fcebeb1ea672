#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <utility>
#include <vector>

#include "polarscale/date.hpp"

namespace polarscale {

using TermId = std::uint32_t;
using Sentence = std::vector<std::string>;

inline constexpr std::size_t kDefaultMinCount = 5;

struct Document {
  std::string id;
  std::optional<Date> date;
  std::string text;
  std::vector<std::string> tags;
};

struct TokenizerConfig {
  bool keep_numbers = false;
  std::unordered_set<std::string> stopwords;
};

// Lowercased tokens grouped into sentences.
//
// Sentences end at '.', '!' or '?' followed by whitespace (or end of input).
// Tokens split on whitespace and punctuation; a hyphen or apostrophe between
// two word characters stays inside the token. Non-ASCII code points other
// than whitespace, quotes and dashes are word characters.
std::vector<Sentence> tokenize(std::string_view text, const TokenizerConfig& config = {});

// Tokenized text before vocabulary filtering.
struct TokenizedDocument {
  std::string id;
  std::optional<Date> date;
  std::vector<std::string> tags;
  std::vector<Sentence> sentences;
};

TokenizedDocument tokenize_document(const Document& doc, const TokenizerConfig& config = {});
std::vector<TokenizedDocument> tokenize_documents(std::span<const Document> docs,
                                                  const TokenizerConfig& config = {});

class Vocabulary {
 public:
  Vocabulary() = default;
  // Terms must be unique; they are reordered by descending frequency, ties
  // broken lexicographically.
  Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts, std::uint64_t min_count);

  std::size_t size() const { return terms_.size(); }
  bool empty() const { return terms_.empty(); }
  const std::string& term(TermId id) const { return terms_[id]; }
  std::uint64_t frequency(TermId id) const { return frequencies_[id]; }
  const std::vector<std::string>& terms() const { return terms_; }
  const std::vector<std::uint64_t>& frequencies() const { return frequencies_; }
  std::uint64_t min_count() const { return min_count_; }
  std::uint64_t total_count() const;

  std::optional<TermId> find(std::string_view term) const;
  // Throws DataError naming the term when it is out of vocabulary.
  TermId at(std::string_view term) const;

  // FNV-1a over the ordered term list; equal iff term indices agree (modulo
  // hash collisions).
  std::uint64_t fingerprint() const { return fingerprint_; }

  // Terms in lexicographic order, for prefix lookups.
  std::span<const TermId> sorted_ids() const { return sorted_; }

  friend bool operator==(const Vocabulary& a, const Vocabulary& b) {
    return a.terms_ == b.terms_ && a.frequencies_ == b.frequencies_;
  }

 private:
  std::vector<std::string> terms_;
  std::vector<std::uint64_t> frequencies_;
  std::uint64_t min_count_ = 1;
  std::unordered_map<std::string, TermId> index_;
  std::vector<TermId> sorted_;
  std::uint64_t fingerprint_ = 0;
};

// Throws DataError("empty corpus") when there are no documents, and when no
// term reaches min_count.
Vocabulary build_vocabulary(std::span<const TokenizedDocument> corpus,
                            std::uint64_t min_count = kDefaultMinCount);

// Vocabulary-aligned document: out-of-vocabulary tokens removed.
struct IndexedDocument {
  std::string id;
  std::optional<Date> date;
  std::vector<std::string> tags;
  std::vector<std::vector<TermId>> sentences;
  // Sorted by term id, counts > 0.
  std::vector<std::pair<TermId, std::uint32_t>> term_counts;
  std::size_t total_tokens = 0;
};

IndexedDocument index_document(const TokenizedDocument& doc, const Vocabulary& vocab);

struct Corpus {
  Vocabulary vocab;
  std::vector<IndexedDocument> documents;

  std::size_t total_tokens() const;
};

Corpus index_corpus(std::span<const TokenizedDocument> docs, Vocabulary vocab);
Corpus build_corpus(std::span<const TokenizedDocument> docs,
                    std::uint64_t min_count = kDefaultMinCount);

// Literal terms and prefix globs (`abc*`). Optional per-pattern polarities
// are used by seed sets; when present, polarities.size() == patterns.size().
struct PatternSet {
  std::vector<std::string> patterns;
  std::vector<double> polarities;

  bool empty() const { return patterns.empty(); }
  std::size_t size() const { return patterns.size(); }
  bool has_polarities() const { return !polarities.empty(); }
  // Throws ConfigError on empty patterns, '*' not in final position, or a
  // polarity list of the wrong length.
  void validate() const;
};

struct PatternMatch {
  std::string pattern;
  std::vector<TermId> terms;  // vocabulary order
};

bool is_glob(std::string_view pattern);
std::string fold_case(std::string_view text);

std::vector<PatternMatch> expand_patterns(const PatternSet& patterns, const Vocabulary& vocab);

// Corpus file: one JSON object per line with `id`, `text`, optional `date`
// (YYYY-MM-DD) and `tags` (array of strings).
std::vector<Document> read_corpus(std::istream& in);
std::vector<Document> load_corpus(const std::filesystem::path& path);
void write_corpus(std::ostream& out, std::span<const Document> docs);

// One pattern per line, optionally followed by whitespace and a polarity.
// '#' starts a comment line; blank lines are skipped.
PatternSet read_patterns(std::istream& in);
PatternSet load_patterns(const std::filesystem::path& path);
// Directory of pattern files; category = file stem.
std::map<std::string, PatternSet> load_dictionary_dir(const std::filesystem::path& dir);

}  // namespace polarscale
