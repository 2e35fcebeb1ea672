#include "polarscale/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"
#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos - start));
    if (pos == std::string::npos) break;
    start = pos + 1;
  }
  return out;
}

std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void require_same_vocab(std::uint64_t a, std::uint64_t b, std::string_view what) {
  if (a != b) throw DataError(std::string(what) + ": vocabulary mismatch (term indices disagree)");
}

std::vector<double> row_norms(const Matrix& m) {
  std::vector<double> norms(m.rows());
  for (std::size_t i = 0; i < m.rows(); ++i) {
    double s = 0.0;
    for (float v : m.row(i)) s += static_cast<double>(v) * v;
    norms[i] = std::sqrt(s);
  }
  return norms;
}

double dot_double(std::span<const float> a, std::span<const float> b) {
  double s = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) s += static_cast<double>(a[k]) * b[k];
  return s;
}

}  // namespace

double SeedSet::total_abs_weight() const {
  double s = 0.0;
  for (const auto& e : expanded) s += std::abs(e.weight);
  return s;
}

SeedSet make_seed_set(const PatternSet& patterns, const Vocabulary& vocab, SeedMode mode) {
  patterns.validate();
  if (vocab.empty()) throw DataError("empty vocabulary");
  if (mode == SeedMode::Unipolar && patterns.has_polarities()) {
    for (double p : patterns.polarities) {
      if (!(p > 0.0)) throw ConfigError("unipolar seed polarities must be positive");
    }
  }
  if (mode == SeedMode::Bipolar) {
    const auto& ps = patterns.polarities;
    const bool pos = std::any_of(ps.begin(), ps.end(), [](double p) { return p > 0; });
    const bool neg = std::any_of(ps.begin(), ps.end(), [](double p) { return p < 0; });
    if (!pos || !neg) throw ConfigError("bipolar seeds need both positive and negative polarities");
  }

  SeedSet seeds{patterns, mode, {}, {}, vocab.fingerprint()};
  std::unordered_map<TermId, std::size_t> slot;
  const auto matches = expand_patterns(patterns, vocab);
  for (std::size_t i = 0; i < matches.size(); ++i) {
    const auto& match = matches[i];
    if (match.terms.empty()) {
      seeds.unmatched.push_back(match.pattern);
      continue;
    }
    const double polarity = patterns.has_polarities() ? patterns.polarities[i] : 1.0;
    const double share = polarity / static_cast<double>(match.terms.size());
    for (TermId t : match.terms) {
      auto [it, inserted] = slot.emplace(t, seeds.expanded.size());
      if (inserted) {
        seeds.expanded.push_back({t, share});
      } else {
        seeds.expanded[it->second].weight += share;
      }
    }
  }
  std::erase_if(seeds.expanded, [](const SeedTerm& s) { return s.weight == 0.0; });
  if (seeds.expanded.empty()) {
    throw DataError("no seed pattern matches the vocabulary: " + join(patterns.patterns, ", "));
  }
  const double total = seeds.total_abs_weight();
  for (auto& s : seeds.expanded) s.weight /= total;
  return seeds;
}

std::string_view to_string(PolarityKind kind) {
  switch (kind) {
    case PolarityKind::Spatial: return "spatial";
    case PolarityKind::Probabilistic: return "probabilistic";
    case PolarityKind::Dictionary: return "dictionary";
  }
  return "?";
}

PolarityKind parse_polarity_kind(std::string_view text) {
  if (text == "spatial") return PolarityKind::Spatial;
  if (text == "probabilistic") return PolarityKind::Probabilistic;
  if (text == "dictionary") return PolarityKind::Dictionary;
  throw ConfigError("unknown scoring mode '" + std::string(text) +
                    "' (expected spatial, probabilistic or dictionary)");
}

double WordPolarity::min() const { return *std::min_element(scores.begin(), scores.end()); }
double WordPolarity::max() const { return *std::max_element(scores.begin(), scores.end()); }

WordPolarity spatial_word_scores(const EmbeddingModel& model, const SeedSet& seeds) {
  require_same_vocab(seeds.vocab_fingerprint, model.vocab.fingerprint(), "spatial scoring");
  const auto norms = row_norms(model.input);
  for (const auto& s : seeds.expanded) {
    if (norms[s.term] == 0.0) {
      throw DataError("seed term '" + model.vocab.term(s.term) + "' has a zero-norm vector");
    }
  }
  const double m = static_cast<double>(seeds.size());
  WordPolarity out{"", PolarityKind::Spatial, std::vector<double>(model.vocab.size(), 0.0),
                   model.vocab.fingerprint()};
  for (TermId i = 0; i < model.vocab.size(); ++i) {
    if (norms[i] == 0.0) continue;
    double sum = 0.0;
    for (const auto& s : seeds.expanded) {
      const double cosine =
          dot_double(model.input.row(i), model.input.row(s.term)) / (norms[i] * norms[s.term]);
      sum += cosine * s.weight;
    }
    out.scores[i] = sum / m;
  }
  return out;
}

WordPolarity probabilistic_word_scores(const EmbeddingModel& model, const SeedSet& seeds) {
  if (!model.has_output_layer()) {
    throw ConfigError("probabilistic scoring requires output-layer weights");
  }
  require_same_vocab(seeds.vocab_fingerprint, model.vocab.fingerprint(), "probabilistic scoring");
  const double m = static_cast<double>(seeds.size());
  WordPolarity out{"", PolarityKind::Probabilistic, std::vector<double>(model.vocab.size(), 0.0),
                   model.vocab.fingerprint()};
  for (TermId i = 0; i < model.vocab.size(); ++i) {
    double sum = 0.0;
    for (const auto& s : seeds.expanded) {
      sum += sigmoid(dot_double(model.input.row(i), model.output->row(s.term))) * s.weight;
    }
    out.scores[i] = sum / m;
  }
  return out;
}

WordPolarity dictionary_word_scores(const PatternSet& dictionary, const Vocabulary& vocab) {
  if (vocab.empty()) throw DataError("empty vocabulary");
  WordPolarity out{"", PolarityKind::Dictionary, std::vector<double>(vocab.size(), 0.0),
                   vocab.fingerprint()};
  for (const auto& match : expand_patterns(dictionary, vocab)) {
    for (TermId t : match.terms) out.scores[t] = 1.0;
  }
  return out;
}

ScoreTable score_documents(const Corpus& corpus, const WordPolarity& polarity,
                           const ScoringOptions& options) {
  require_same_vocab(polarity.vocab_fingerprint, corpus.vocab.fingerprint(), "document scoring");
  if (polarity.scores.size() != corpus.vocab.size()) {
    throw DataError("document scoring: vocabulary mismatch (term indices disagree)");
  }
  const std::size_t min_tokens = std::max<std::size_t>(1, options.min_tokens);
  const auto& docs = corpus.documents;
  std::vector<std::optional<double>> scores(docs.size());
  detail::parallel_for(docs.size(), options.threads, [&](std::size_t d) {
    const auto& doc = docs[d];
    if (doc.total_tokens < min_tokens) return;
    double sum = 0.0;
    for (const auto& [term, count] : doc.term_counts) sum += polarity.scores[term] * count;
    scores[d] = sum / static_cast<double>(doc.total_tokens);
  });
  ScoreTable table;
  for (std::size_t d = 0; d < docs.size(); ++d) {
    if (!scores[d]) {
      table.skipped.push_back(docs[d].id);
      continue;
    }
    table.rows.push_back({docs[d].id, docs[d].date, docs[d].tags, docs[d].total_tokens, *scores[d]});
  }
  return table;
}

ScoreTable combine_scores(const ScoreTable& a, const ScoreTable& b) {
  auto check = [](const ScoreTable& t) {
    for (const auto& r : t.rows) {
      if (r.score < 0.0 || std::isnan(r.score)) {
        throw ConfigError("combination requires probabilistic (nonnegative) scores; document '" +
                          r.id + "' has score " + format_real(r.score));
      }
    }
  };
  check(a);
  check(b);
  std::unordered_map<std::string, double> b_scores;
  for (const auto& r : b.rows) b_scores.emplace(r.id, r.score);
  ScoreTable out;
  std::unordered_set<std::string> joined;
  for (const auto& r : a.rows) {
    auto it = b_scores.find(r.id);
    if (it == b_scores.end()) {
      out.skipped.push_back(r.id);
      continue;
    }
    ScoreRow row = r;
    row.score = r.score == it->second ? r.score : std::sqrt(r.score * it->second);
    out.rows.push_back(std::move(row));
    joined.insert(r.id);
  }
  for (const auto& r : b.rows) {
    if (!joined.contains(r.id)) out.skipped.push_back(r.id);
  }
  return out;
}

void write_word_polarity(std::ostream& out, const WordPolarity& polarity, const Vocabulary& vocab) {
  require_same_vocab(polarity.vocab_fingerprint, vocab.fingerprint(), "word polarity export");
  std::vector<TermId> order(vocab.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](TermId a, TermId b) { return polarity.scores[a] > polarity.scores[b]; });
  out << "term\tfrequency\tscore\n";
  for (TermId i : order) {
    out << vocab.term(i) << '\t' << vocab.frequency(i) << '\t' << format_real(polarity.scores[i])
        << '\n';
  }
}

void write_score_table(std::ostream& out, const ScoreTable& table) {
  out << "id\tdate\ttags\tn_tokens\tscore\n";
  for (const auto& r : table.rows) {
    out << r.id << '\t' << (r.date ? format_date(*r.date) : "") << '\t' << join(r.tags, ",") << '\t'
        << r.n_tokens << '\t' << format_real(r.score) << '\n';
  }
}

ScoreTable read_score_table(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "id\tdate\ttags\tn_tokens\tscore") {
    throw DataError("score table: missing header 'id\\tdate\\ttags\\tn_tokens\\tscore'");
  }
  ScoreTable table;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = split(line, '\t');
    const std::string where = "score table line " + std::to_string(line_no) + ": ";
    if (fields.size() != 5) throw DataError(where + "expected 5 tab-separated fields");
    ScoreRow row;
    row.id = fields[0];
    if (!fields[1].empty()) row.date = parse_date(fields[1]);
    if (!fields[2].empty()) row.tags = split(fields[2], ',');
    try {
      row.n_tokens = std::stoull(fields[3]);
      row.score = std::stod(fields[4]);
    } catch (const std::logic_error&) {
      throw DataError(where + "invalid number");
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

void save_score_table(const std::filesystem::path& path, const ScoreTable& table) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot write '" + path.string() + "'");
  write_score_table(out, table);
}

ScoreTable load_score_table(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open score table '" + path.string() + "'");
  return read_score_table(in);
}

}  // namespace polarscale
