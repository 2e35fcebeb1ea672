#pragma once

// Planted-topic corpora: a Zipfian background vocabulary plus a topic
// vocabulary whose words cluster in short topical runs. The full dictionary
// is the set of topic stems (globs where a stem has several forms).

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "polarscale/corpus.hpp"

namespace polarscale::testing {

struct SyntheticOptions {
  std::size_t n_docs = 2000;
  std::size_t min_length = 50;
  std::size_t max_length = 100;
  std::size_t background_size = 3000;
  std::size_t n_stems = 60;
  std::size_t n_associates = 100;        // non-dictionary words that travel with the topic
  double untopical_share = 0.4;          // documents with no topical runs
  double max_intensity = 0.5;            // share of topical runs, upper bound
  double topic_token_share = 0.15;       // within a topical run
  double associate_token_share = 0.15;
  std::size_t background_topics = 20;   // 0: one shared background
  double background_topic_share = 0.5;  // tokens from the document's background topic
  double mean_sentence_length = 6.0;    // breaks fall independently of topical runs
  std::uint64_t seed = 1;
  bool dated = false;                   // spread documents over 2020
};

struct SyntheticCorpus {
  std::vector<Document> documents;
  PatternSet dictionary;
  std::vector<std::string> topic_terms;
  std::vector<double> intensity;  // per document
};

SyntheticCorpus make_planted_corpus(const SyntheticOptions& options = {});

}  // namespace polarscale::testing
