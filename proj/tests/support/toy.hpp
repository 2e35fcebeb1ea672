#pragma once

// Small random models and corpora shared by unit and acceptance tests.

#include <algorithm>
#include <cstddef>
#include <string>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/embedding.hpp"
#include "polarscale/random.hpp"

namespace polarscale::testing {

inline std::vector<std::string> toy_words(std::size_t n) {
  static const char* stems[] = {"goal", "skill", "win", "try", "beat", "calm", "rain", "road", "tree", "salt"};
  std::vector<std::string> words;
  for (std::size_t i = 0; i < n; ++i) words.push_back(std::string(stems[i % 10]) + std::to_string(i / 10));
  return words;
}

// Random V and W with entries in [-scale, scale].
inline EmbeddingModel random_model(Rng& rng, std::size_t n_terms, std::size_t dim, double scale = 1.0) {
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (const auto& w : toy_words(n_terms)) counts.emplace_back(w, 1 + rng.below(50));
  EmbeddingModel m;
  m.vocab = Vocabulary(counts, 1);
  m.config.dim = dim;
  m.input = Matrix(n_terms, dim);
  m.output = Matrix(n_terms, dim);
  for (float& x : m.input.values()) x = static_cast<float>(scale * (2.0 * rng.uniform() - 1.0));
  for (float& x : m.output->values()) x = static_cast<float>(scale * (2.0 * rng.uniform() - 1.0));
  return m;
}

// Documents drawn uniformly from `words` plus some out-of-vocabulary noise.
inline std::vector<Document> random_documents(Rng& rng, const std::vector<std::string>& words,
                                              std::size_t n_docs, std::size_t max_len) {
  std::vector<Document> docs;
  for (std::size_t d = 0; d < n_docs; ++d) {
    std::string text;
    const std::size_t len = rng.below(max_len + 1);
    for (std::size_t i = 0; i < len; ++i) {
      text += rng.below(10) == 0 ? "zz" + std::to_string(rng.below(1000)) : words[rng.below(words.size())];
      text += rng.below(8) == 0 ? ". " : " ";
    }
    docs.push_back({"doc" + std::to_string(d), {}, text, {}});
  }
  return docs;
}

// Corpus over exactly `vocab`: tokenized documents indexed against it.
inline Corpus corpus_over(const Vocabulary& vocab, const std::vector<Document>& docs) {
  return index_corpus(tokenize_documents(docs), vocab);
}

// count(dictionary tokens) / count(vocabulary tokens) straight from the text,
// without term indices. Documents with no vocabulary token are omitted.
struct OracleScore {
  std::string id;
  double score;
};

inline std::vector<OracleScore> brute_force_dictionary(const std::vector<Document>& docs,
                                                       const std::vector<std::string>& vocabulary,
                                                       const std::vector<std::string>& patterns) {
  auto matches = [&](const std::string& token) {
    for (const auto& p : patterns) {
      if (p.back() == '*' ? token.rfind(p.substr(0, p.size() - 1), 0) == 0 : token == p) return true;
    }
    return false;
  };
  std::vector<OracleScore> out;
  for (const auto& doc : docs) {
    std::size_t n = 0, hits = 0;
    for (const auto& sentence : tokenize(doc.text)) {
      for (const auto& token : sentence) {
        if (std::find(vocabulary.begin(), vocabulary.end(), token) == vocabulary.end()) continue;
        ++n;
        hits += matches(token);
      }
    }
    if (n > 0) out.push_back({doc.id, static_cast<double>(hits) / static_cast<double>(n)});
  }
  return out;
}

}  // namespace polarscale::testing
