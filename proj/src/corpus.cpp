#include "polarscale/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <sstream>

#include <json.hpp>

#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

struct CodePoint {
  char32_t value;
  std::size_t length;
};

// Malformed sequences decode as U+FFFD one byte at a time.
CodePoint decode_utf8(std::string_view s, std::size_t pos) {
  const auto b0 = static_cast<unsigned char>(s[pos]);
  if (b0 < 0x80) return {b0, 1};
  std::size_t len = 0;
  char32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    return {0xFFFD, 1};
  }
  if (pos + len > s.size()) return {0xFFFD, 1};
  for (std::size_t i = 1; i < len; ++i) {
    const auto b = static_cast<unsigned char>(s[pos + i]);
    if ((b & 0xC0) != 0x80) return {0xFFFD, 1};
    cp = (cp << 6) | (b & 0x3F);
  }
  return {cp, len};
}

void append_utf8(std::string& out, char32_t cp) {
  if (cp < 0x80) {
    out += static_cast<char>(cp);
  } else if (cp < 0x800) {
    out += static_cast<char>(0xC0 | (cp >> 6));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else if (cp < 0x10000) {
    out += static_cast<char>(0xE0 | (cp >> 12));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  } else {
    out += static_cast<char>(0xF0 | (cp >> 18));
    out += static_cast<char>(0x80 | ((cp >> 12) & 0x3F));
    out += static_cast<char>(0x80 | ((cp >> 6) & 0x3F));
    out += static_cast<char>(0x80 | (cp & 0x3F));
  }
}

// ASCII, Latin-1, Greek and basic Cyrillic upper case.
char32_t lower(char32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0xC0 && cp <= 0xDE && cp != 0xD7) return cp + 32;
  if (cp >= 0x391 && cp <= 0x3A9 && cp != 0x3A2) return cp + 32;
  if (cp >= 0x410 && cp <= 0x42F) return cp + 32;
  if (cp >= 0x400 && cp <= 0x40F) return cp + 80;
  return cp;
}

bool is_space(char32_t cp) {
  switch (cp) {
    case ' ': case '\t': case '\n': case '\r': case '\f': case '\v':
    case 0x85: case 0xA0: case 0x1680: case 0x2028: case 0x2029:
    case 0x202F: case 0x205F: case 0x3000:
      return true;
    default:
      return cp >= 0x2000 && cp <= 0x200A;
  }
}

bool is_joiner(char32_t cp) { return cp == '-' || cp == '\'' || cp == 0x2019; }

bool is_unicode_punct(char32_t cp) {
  return (cp >= 0x2010 && cp <= 0x2027) || (cp >= 0x2030 && cp <= 0x205E) || cp == 0xAB ||
         cp == 0xBB || cp == 0xBF || cp == 0xA1 || cp == 0xFFFD;
}

bool is_word_char(char32_t cp) {
  if (cp < 0x80) {
    return (cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z') || (cp >= '0' && cp <= '9');
  }
  return !is_space(cp) && !is_unicode_punct(cp);
}

bool all_digits(std::string_view token) {
  return std::all_of(token.begin(), token.end(), [](char c) { return c >= '0' && c <= '9'; });
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::uint64_t fnv1a(const std::vector<std::string>& terms) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const auto& t : terms) {
    for (unsigned char c : t) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    h ^= 0xFF;  // separator outside valid UTF-8
    h *= 0x100000001b3ULL;
  }
  return h;
}

}  // namespace

std::string fold_case(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = decode_utf8(text, pos);
    if (cp == 0xFFFD && len == 1) {
      out += text[pos];
    } else {
      append_utf8(out, lower(cp));
    }
    pos += len;
  }
  return out;
}

std::vector<Sentence> tokenize(std::string_view text, const TokenizerConfig& config) {
  std::vector<Sentence> sentences;
  Sentence current;
  std::string token;

  auto flush_token = [&] {
    if (token.empty()) return;
    const bool drop = (!config.keep_numbers && all_digits(token)) || config.stopwords.contains(token);
    if (!drop) current.push_back(std::move(token));
    token.clear();
  };
  auto flush_sentence = [&] {
    flush_token();
    if (!current.empty()) sentences.push_back(std::move(current));
    current.clear();
  };

  char32_t prev = ' ';
  for (std::size_t pos = 0; pos < text.size();) {
    const auto [cp, len] = decode_utf8(text, pos);
    const std::size_t next_pos = pos + len;
    const char32_t next = next_pos < text.size() ? decode_utf8(text, next_pos).value : U' ';
    if (is_word_char(cp)) {
      append_utf8(token, lower(cp));
    } else if (is_joiner(cp) && !token.empty() && is_word_char(prev) && is_word_char(next)) {
      token += cp == 0x2019 ? '\'' : static_cast<char>(cp);
    } else if ((cp == '.' || cp == '!' || cp == '?') && is_space(next)) {
      flush_sentence();
    } else {
      flush_token();
    }
    prev = cp;
    pos = next_pos;
  }
  flush_sentence();
  return sentences;
}

TokenizedDocument tokenize_document(const Document& doc, const TokenizerConfig& config) {
  return TokenizedDocument{doc.id, doc.date, doc.tags, tokenize(doc.text, config)};
}

std::vector<TokenizedDocument> tokenize_documents(std::span<const Document> docs,
                                                  const TokenizerConfig& config) {
  std::vector<TokenizedDocument> out;
  out.reserve(docs.size());
  for (const auto& d : docs) out.push_back(tokenize_document(d, config));
  return out;
}

Vocabulary::Vocabulary(std::vector<std::pair<std::string, std::uint64_t>> counts,
                       std::uint64_t min_count)
    : min_count_(min_count) {
  std::sort(counts.begin(), counts.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  terms_.reserve(counts.size());
  frequencies_.reserve(counts.size());
  for (auto& [term, freq] : counts) {
    if (!index_.emplace(term, static_cast<TermId>(terms_.size())).second) {
      throw DataError("duplicate vocabulary term '" + term + "'");
    }
    terms_.push_back(std::move(term));
    frequencies_.push_back(freq);
  }
  sorted_.resize(terms_.size());
  for (TermId i = 0; i < sorted_.size(); ++i) sorted_[i] = i;
  std::sort(sorted_.begin(), sorted_.end(),
            [this](TermId a, TermId b) { return terms_[a] < terms_[b]; });
  fingerprint_ = fnv1a(terms_);
}

std::uint64_t Vocabulary::total_count() const {
  std::uint64_t total = 0;
  for (auto f : frequencies_) total += f;
  return total;
}

std::optional<TermId> Vocabulary::find(std::string_view term) const {
  auto it = index_.find(std::string(term));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

TermId Vocabulary::at(std::string_view term) const {
  auto id = find(term);
  if (!id) throw DataError("term '" + std::string(term) + "' is not in the vocabulary");
  return *id;
}

Vocabulary build_vocabulary(std::span<const TokenizedDocument> corpus, std::uint64_t min_count) {
  if (min_count < 1) throw ConfigError("min_count must be at least 1");
  if (corpus.empty()) throw DataError("empty corpus");
  std::unordered_map<std::string, std::uint64_t> counts;
  for (const auto& doc : corpus) {
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence) ++counts[token];
    }
  }
  std::vector<std::pair<std::string, std::uint64_t>> kept;
  for (auto& [term, n] : counts) {
    if (n >= min_count) kept.emplace_back(term, n);
  }
  if (kept.empty()) {
    throw DataError("empty vocabulary: no term occurs at least " + std::to_string(min_count) +
                    " times");
  }
  return Vocabulary(std::move(kept), min_count);
}

IndexedDocument index_document(const TokenizedDocument& doc, const Vocabulary& vocab) {
  IndexedDocument out{doc.id, doc.date, doc.tags, {}, {}, 0};
  std::map<TermId, std::uint32_t> counts;
  for (const auto& sentence : doc.sentences) {
    std::vector<TermId> ids;
    ids.reserve(sentence.size());
    for (const auto& token : sentence) {
      if (auto id = vocab.find(token)) {
        ids.push_back(*id);
        ++counts[*id];
      }
    }
    out.total_tokens += ids.size();
    if (!ids.empty()) out.sentences.push_back(std::move(ids));
  }
  out.term_counts.assign(counts.begin(), counts.end());
  return out;
}

std::size_t Corpus::total_tokens() const {
  std::size_t total = 0;
  for (const auto& d : documents) total += d.total_tokens;
  return total;
}

Corpus index_corpus(std::span<const TokenizedDocument> docs, Vocabulary vocab) {
  Corpus corpus{std::move(vocab), {}};
  corpus.documents.reserve(docs.size());
  for (const auto& d : docs) corpus.documents.push_back(index_document(d, corpus.vocab));
  return corpus;
}

Corpus build_corpus(std::span<const TokenizedDocument> docs, std::uint64_t min_count) {
  return index_corpus(docs, build_vocabulary(docs, min_count));
}

bool is_glob(std::string_view pattern) { return !pattern.empty() && pattern.back() == '*'; }

void PatternSet::validate() const {
  for (const auto& p : patterns) {
    if (p.empty() || p == "*") throw ConfigError("empty pattern");
    if (p.find('*') != p.size() - 1 && p.find('*') != std::string::npos) {
      throw ConfigError("pattern '" + p + "': '*' is only allowed as the final character");
    }
  }
  if (!polarities.empty() && polarities.size() != patterns.size()) {
    throw ConfigError("pattern set has " + std::to_string(patterns.size()) + " patterns but " +
                      std::to_string(polarities.size()) + " polarities");
  }
}

std::vector<PatternMatch> expand_patterns(const PatternSet& patterns, const Vocabulary& vocab) {
  patterns.validate();
  std::vector<PatternMatch> out;
  out.reserve(patterns.size());
  const auto sorted = vocab.sorted_ids();
  for (const auto& raw : patterns.patterns) {
    PatternMatch match{raw, {}};
    const std::string folded = fold_case(raw);
    if (is_glob(folded)) {
      const std::string_view prefix(folded.data(), folded.size() - 1);
      auto it = std::lower_bound(sorted.begin(), sorted.end(), prefix,
                                 [&](TermId id, std::string_view p) { return vocab.term(id) < p; });
      for (; it != sorted.end() && vocab.term(*it).starts_with(prefix); ++it) {
        match.terms.push_back(*it);
      }
      std::sort(match.terms.begin(), match.terms.end());
    } else if (auto id = vocab.find(folded)) {
      match.terms.push_back(*id);
    }
    out.push_back(std::move(match));
  }
  return out;
}

std::vector<Document> read_corpus(std::istream& in) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (trim(line).empty()) continue;
    const std::string where = "corpus line " + std::to_string(line_no) + ": ";
    nlohmann::json record;
    try {
      record = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw DataError(where + "invalid JSON (" + e.what() + ")");
    }
    if (!record.is_object()) throw DataError(where + "expected a JSON object");
    Document doc;
    try {
      doc.id = record.at("id").is_string() ? record.at("id").get<std::string>()
                                           : record.at("id").dump();
      doc.text = record.at("text").get<std::string>();
      if (auto it = record.find("date"); it != record.end() && !it->is_null()) {
        doc.date = parse_date(it->get<std::string>());
      }
      if (auto it = record.find("tags"); it != record.end() && !it->is_null()) {
        doc.tags = it->get<std::vector<std::string>>();
      }
    } catch (const nlohmann::json::exception& e) {
      throw DataError(where + e.what());
    } catch (const DataError& e) {
      throw DataError(where + e.what());
    }
    if (doc.id.empty()) throw DataError(where + "empty document id");
    if (!seen.insert(doc.id).second) throw DataError(where + "duplicate document id '" + doc.id + "'");
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<Document> load_corpus(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open corpus file '" + path.string() + "'");
  return read_corpus(in);
}

void write_corpus(std::ostream& out, std::span<const Document> docs) {
  for (const auto& d : docs) {
    nlohmann::json record{{"id", d.id}, {"text", d.text}};
    if (d.date) record["date"] = format_date(*d.date);
    if (!d.tags.empty()) record["tags"] = d.tags;
    out << record.dump() << '\n';
  }
}

PatternSet read_patterns(std::istream& in) {
  PatternSet set;
  std::vector<std::optional<double>> weights;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    std::istringstream fields(content);
    std::string pattern;
    fields >> pattern;
    std::string weight_text;
    std::optional<double> weight;
    if (fields >> weight_text) {
      try {
        std::size_t used = 0;
        weight = std::stod(weight_text, &used);
        if (used != weight_text.size()) throw std::invalid_argument(weight_text);
      } catch (const std::logic_error&) {
        throw DataError("pattern line " + std::to_string(line_no) + ": invalid polarity '" +
                        weight_text + "'");
      }
    }
    set.patterns.push_back(pattern);
    weights.push_back(weight);
  }
  const auto weighted = std::count_if(weights.begin(), weights.end(),
                                      [](const auto& w) { return w.has_value(); });
  if (weighted > 0 && static_cast<std::size_t>(weighted) != weights.size()) {
    throw DataError("pattern file mixes weighted and unweighted lines");
  }
  if (weighted > 0) {
    for (const auto& w : weights) set.polarities.push_back(*w);
  }
  try {
    set.validate();
  } catch (const ConfigError& e) {
    throw DataError(e.what());
  }
  return set;
}

PatternSet load_patterns(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open pattern file '" + path.string() + "'");
  try {
    return read_patterns(in);
  } catch (const DataError& e) {
    throw DataError(path.string() + ": " + e.what());
  }
}

std::map<std::string, PatternSet> load_dictionary_dir(const std::filesystem::path& dir) {
  if (!std::filesystem::is_directory(dir)) {
    throw DataError("dictionary directory '" + dir.string() + "' does not exist");
  }
  std::map<std::string, PatternSet> out;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    out.emplace(entry.path().stem().string(), load_patterns(entry.path()));
  }
  return out;
}

}  // namespace polarscale
