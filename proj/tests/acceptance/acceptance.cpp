// Acceptance suite. One PASS/FAIL line per criterion; exit status is the
// number of failed criteria. `acceptance 3 5` runs a subset.

#include <Eigen/Dense>
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "polarscale/evalkit.hpp"
#include "polarscale/modelfit.hpp"
#include "polarscale/scaling.hpp"
#include "polarscale/svd.hpp"
#include "support/cli_runner.hpp"
#include "support/gradient_oracle.hpp"
#include "support/perplexity_oracle.hpp"
#include "support/synthetic.hpp"
#include "support/toy.hpp"

using namespace polarscale;
namespace pt = polarscale::testing;

namespace {

// Tolerances and budgets.
constexpr double kGradientTolerance = 1e-4;
constexpr double kGradientStep = 1e-5;
constexpr std::size_t kGradientTriples = 200;
constexpr double kGradientBudget = 10.0;
constexpr double kDictionaryBudget = 5.0;
constexpr double kPerplexityTolerance = 1e-9;
constexpr double kSeedScoreTolerance = 1e-9;
constexpr double kCombineTolerance = 1e-12;
constexpr double kSingularValueTolerance = 1e-6;
constexpr double kRankOneTolerance = 1e-9;
constexpr double kSeparationFloor = 0.5;
constexpr double kSyntheticBudget = 300.0;
constexpr std::size_t kTopHalfRequired = 8;
constexpr double kTutorialBudget = 120.0;

const std::string kCli = POLARSCALE_CLI;
const std::string kData = POLARSCALE_DATA_DIR;

// Collects failure messages; the first few are printed.
class Check {
 public:
  void operator()(bool ok, const std::string& what) {
    ++total_;
    if (ok) return;
    if (failures_.size() < 5) failures_.push_back(what);
    ++failed_;
  }
  bool ok() const { return failed_ == 0; }
  std::string summary() const {
    std::string s = std::to_string(total_ - failed_) + "/" + std::to_string(total_) + " checks";
    for (const auto& f : failures_) s += "\n    " + f;
    return s;
  }
  void note(const std::string& text) { notes_ += (notes_.empty() ? "" : "; ") + text; }
  const std::string& notes() const { return notes_; }

 private:
  std::size_t total_ = 0, failed_ = 0;
  std::vector<std::string> failures_;
  std::string notes_;
};

std::string fmt(double x, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

// --- 1 ---------------------------------------------------------------------

void gradient_oracle(Check& check) {
  Rng rng(101);
  double worst = 0.0;
  for (std::size_t i = 0; i < kGradientTriples; ++i) {
    // Alternate skip-gram (one context row) and CBOW-style averaged contexts.
    const std::size_t contexts = i % 2 == 0 ? 1 : 2 + rng.below(4);
    const auto c = pt::random_case(rng, 8, contexts, 1 + rng.below(8));
    const auto r = pt::compare_gradients(c, kGradientStep);
    worst = std::max({worst, r.input_error, r.output_error});
    check(r.input_error < kGradientTolerance && r.output_error < kGradientTolerance,
          "triple " + std::to_string(i) + ": V err " + fmt(r.input_error) + ", W err " + fmt(r.output_error));
  }
  check.note(std::to_string(kGradientTriples) + " triples, K=8, worst relative error " + fmt(worst, 3));
}

// --- 2 ---------------------------------------------------------------------

void dictionary_equivalence(Check& check) {
  Rng rng(202);
  const auto words = pt::toy_words(60);
  std::vector<std::pair<std::string, std::uint64_t>> counts;
  for (const auto& w : words) counts.emplace_back(w, 1);
  const Vocabulary vocab(counts, 1);
  const auto docs = pt::random_documents(rng, words, 1000, 60);
  const std::vector<std::string> patterns = {"goal*", "skill1", "win*", "calm2", "tree1*", "absent*"};
  const auto table = score_documents(pt::corpus_over(vocab, docs), dictionary_word_scores(PatternSet{patterns, {}}, vocab));
  const auto oracle = pt::brute_force_dictionary(docs, words, patterns);
  check(table.rows.size() == oracle.size(),
        "row count " + std::to_string(table.rows.size()) + " vs oracle " + std::to_string(oracle.size()));
  for (std::size_t i = 0; i < std::min(table.rows.size(), oracle.size()); ++i) {
    check(table.rows[i].id == oracle[i].id && table.rows[i].score == oracle[i].score,
          oracle[i].id + ": " + fmt(table.rows[i].score, 17) + " vs " + fmt(oracle[i].score, 17));
  }
  check.note("1000 documents (" + std::to_string(oracle.size()) + " with in-vocabulary tokens), exact equality");
}

// --- 3 ---------------------------------------------------------------------

void perplexity_closed_forms(Check& check) {
  Rng rng(303);
  for (std::size_t m_seeds = 1; m_seeds <= 10; ++m_seeds) {
    auto model = pt::random_model(rng, 12, 4);
    std::fill(model.output->values().begin(), model.output->values().end(), 0.0f);
    std::vector<std::string> patterns;
    for (std::size_t m = 0; m < m_seeds; ++m) patterns.push_back(model.vocab.term(static_cast<TermId>(m)));
    const auto seeds = make_seed_set(PatternSet{patterns, {}}, model.vocab);
    const auto corpus = pt::corpus_over(model.vocab, {Document{"d", {}, patterns.back(), {}}});
    const double p = seed_perplexity(model, corpus, seeds).perplexity;
    check(std::abs(p - static_cast<double>(m_seeds)) < kPerplexityTolerance,
          "uniform M=" + std::to_string(m_seeds) + ": " + fmt(p, 17));
  }

  // A single seed with arbitrary weights and documents.
  for (int trial = 0; trial < 20; ++trial) {
    const auto model = pt::random_model(rng, 15, 5, 2.0);
    const auto corpus = pt::corpus_over(model.vocab, pt::random_documents(rng, model.vocab.terms(), 20, 30));
    const auto seeds = make_seed_set(PatternSet{{model.vocab.term(0)}, {}}, model.vocab);
    const double p = seed_perplexity(model, corpus, seeds).perplexity;
    check(std::abs(p - 1.0) < kPerplexityTolerance, "M=1 trial " + std::to_string(trial) + ": " + fmt(p, 17));
  }

  const std::vector<DocumentPerplexityDetail> details{{"d1", 4, {1, 2}, {0.3, 0.7}}, {"d2", 5, {0, 1}, {0.6, 0.4}}};
  const double by_hand = std::exp(-(std::log(0.3) / 4 + std::log(0.7) / 2 + std::log(0.4) / 5) / 4);
  const double spreadsheet = pt::spreadsheet_perplexity({{4, {1, 2}, {0.3, 0.7}}, {5, {0, 1}, {0.6, 0.4}}});
  const double p = perplexity_from_details(details);
  check(std::abs(spreadsheet - by_hand) < kPerplexityTolerance, "oracles disagree");
  check(std::abs(p - by_hand) < kPerplexityTolerance, "hand case " + fmt(p, 17) + " vs " + fmt(by_hand, 17));
  check.note("uniform M=1..10, 20 single-seed corpora, hand case " + fmt(p, 10));
}

// --- 4 ---------------------------------------------------------------------

void scaling_invariants(Check& check) {
  Rng rng(404);
  for (int trial = 0; trial < 50; ++trial) {
    const std::string at = "model " + std::to_string(trial) + ": ";
    const auto model = pt::random_model(rng, 30, 2 + rng.below(15), 0.5 + 2 * rng.uniform());
    const auto corpus = pt::corpus_over(model.vocab, pt::random_documents(rng, model.vocab.terms(), 40, 25));

    // Unipolar seeds with unequal weights.
    auto seeds = make_seed_set(PatternSet{{"goal*", "win0", "salt1", "calm*"}, {}}, model.vocab);
    for (auto& e : seeds.expanded) e.weight *= 0.2 + rng.uniform();
    const auto prob = probabilistic_word_scores(model, seeds);
    const double bound = seeds.total_abs_weight() / static_cast<double>(seeds.size());
    for (double g : prob.scores) check(g > 0.0 && g < bound, at + "probabilistic " + fmt(g, 17) + " vs " + fmt(bound));

    const TermId single = static_cast<TermId>(rng.below(model.vocab.size()));
    const auto spatial =
        spatial_word_scores(model, make_seed_set(PatternSet{{model.vocab.term(single)}, {}}, model.vocab));
    const double top = *std::max_element(spatial.scores.begin(), spatial.scores.end());
    // Another word can tie the seed only by pointing the same way.
    check(spatial.scores[single] >= top - kSeedScoreTolerance, at + "seed is not the argmax");
    check(std::abs(spatial.scores[single] - 1.0) <= kSeedScoreTolerance, at + "seed score " + fmt(spatial.scores[single], 17));

    for (const auto* g : {&prob, &spatial}) {
      const auto table = score_documents(corpus, *g);
      for (const auto& row : table.rows) {
        check(row.score >= g->min() && row.score <= g->max(), at + row.id + " outside word score range");
      }
      if (g == &prob) {
        const auto same = combine_scores(table, table);
        for (std::size_t d = 0; d < table.rows.size(); ++d) {
          check(std::abs(same.rows[d].score - table.rows[d].score) <= kCombineTolerance * table.rows[d].score,
                at + "combine(x, x) != x");
        }
      }
    }
  }
  check.note("50 models, K 2..16");
}

// --- 5 ---------------------------------------------------------------------

SentenceTermMatrix random_sparse(std::size_t rows, std::size_t cols, double density, Rng& rng) {
  SentenceTermMatrix m;
  m.n_cols = cols;
  for (std::size_t i = 0; i < rows; ++i) {
    std::vector<std::pair<TermId, double>> entries;
    for (std::size_t j = 0; j < cols; ++j) {
      if (rng.uniform() < density) entries.emplace_back(static_cast<TermId>(j), 1.0 + rng.below(5));
    }
    if (entries.empty()) entries.emplace_back(static_cast<TermId>(rng.below(cols)), 1.0);
    m.add_row(std::move(entries));
  }
  return m;
}

Eigen::MatrixXd dense_of(const SentenceTermMatrix& m) {
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(m.rows()), static_cast<Eigen::Index>(m.cols()));
  for (std::size_t i = 0; i < m.rows(); ++i) {
    for (std::size_t p = m.row_start[i]; p < m.row_start[i + 1]; ++p) a(i, m.col[p]) = m.value[p];
  }
  return a;
}

Eigen::MatrixXd reconstruct(const SvdResult& r) {
  Eigen::MatrixXd u(r.left.rows, r.left.cols), v(r.right.rows, r.right.cols);
  for (std::size_t i = 0; i < r.left.rows; ++i)
    for (std::size_t j = 0; j < r.left.cols; ++j) u(i, j) = r.left(i, j);
  for (std::size_t i = 0; i < r.right.rows; ++i)
    for (std::size_t j = 0; j < r.right.cols; ++j) v(i, j) = r.right(i, j);
  Eigen::VectorXd s(r.singular_values.size());
  for (std::size_t i = 0; i < r.singular_values.size(); ++i) s(i) = r.singular_values[i];
  return u * s.asDiagonal() * v.transpose();
}

void svd_oracle(Check& check) {
  Rng rng(505);
  double worst = 0.0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = random_sparse(50, 30, 0.08 + 0.02 * trial, rng);
    const Eigen::JacobiSVD<Eigen::MatrixXd> oracle(dense_of(m));
    const auto& s = oracle.singularValues();
    for (std::size_t k : {1u, 5u, 15u, 30u}) {
      const auto r = truncated_svd(m, k, 900 + trial);
      for (std::size_t i = 0; i < k; ++i) {
        const double rel = std::abs(r.singular_values[i] - s(i)) / s(i);
        worst = std::max(worst, rel);
        check(rel <= kSingularValueTolerance,
              "matrix " + std::to_string(trial) + " K=" + std::to_string(k) + " sigma" + std::to_string(i) + " rel " + fmt(rel));
      }
    }
  }

  double worst_rank_one = 0.0;
  for (int trial = 0; trial < 5; ++trial) {
    std::vector<double> u(50), v(30);
    for (auto& x : u) x = rng.below(3) == 0 ? 0.0 : 0.5 + rng.uniform();
    for (auto& x : v) x = rng.below(3) == 0 ? 0.0 : 0.5 + rng.uniform();
    u[0] = v[0] = 1.0;
    SentenceTermMatrix m;
    m.n_cols = v.size();
    for (double ui : u) {
      std::vector<std::pair<TermId, double>> row;
      for (std::size_t j = 0; j < v.size(); ++j) {
        if (ui * v[j] > 0) row.emplace_back(static_cast<TermId>(j), ui * v[j]);
      }
      if (!row.empty()) m.add_row(row);
    }
    const auto a = dense_of(m);
    const double err = (reconstruct(truncated_svd(m, 1, 7 + trial)) - a).norm() / a.norm();
    worst_rank_one = std::max(worst_rank_one, err);
    check(err < kRankOneTolerance, "rank-1 trial " + std::to_string(trial) + " error " + fmt(err));
  }
  check.note("10 matrices 50x30, worst sigma rel error " + fmt(worst, 3) + ", rank-1 error " + fmt(worst_rank_one, 3));
}

// --- 6 and 7 ---------------------------------------------------------------

struct SyntheticRun {
  std::vector<BenchmarkRow> rows;
  std::vector<std::size_t> ranks;
  bool done = false;
};

SyntheticRun& synthetic_benchmark() {
  static SyntheticRun run;
  if (run.done) return run;
  const auto syn = pt::make_planted_corpus();
  const auto corpus = build_corpus(tokenize_documents(syn.documents), 5);
  BenchmarkGrid grid;
  run.ranks = {25, 50};
  for (auto algo : {Algorithm::SG, Algorithm::CBOW}) {
    for (std::size_t k : run.ranks) {
      W2VConfig c;
      c.algorithm = algo;
      c.dim = k;
      c.window = algo == Algorithm::SG ? 10 : 5;
      c.epochs = 10;
      grid.word2vec.push_back(c);
    }
  }
  grid.svd_ranks = run.ranks;
  const auto samples = sample_seed_sets(syn.dictionary, 10, 5, 11);
  run.rows = run_benchmark(corpus, syn.dictionary, samples, grid);
  run.done = true;
  return run;
}

std::vector<double> correlations(const SyntheticRun& run, const std::string& family, const std::string& algorithm,
                                 std::size_t k) {
  std::vector<double> out;
  for (const auto& r : run.rows) {
    if (r.family == family && r.algorithm == algorithm && r.k == k) out.push_back(r.correlation);
  }
  return out;
}

void synthetic_separation(Check& check) {
  const auto& run = synthetic_benchmark();
  for (std::size_t k : run.ranks) {
    const auto prob = correlations(run, "w2v-probabilistic", "SG", k);
    const auto spatial = correlations(run, "w2v-spatial", "SG", k);
    const auto svd = correlations(run, "svd-spatial", "SVD", k);
    check(prob.size() == 10 && spatial.size() == 10 && svd.size() == 10, "missing benchmark rows");
    const double p = median(prob), s = median(spatial), v = median(svd);
    const std::string at = "K=" + std::to_string(k) + ": ";
    check(p > kSeparationFloor, at + "probabilistic median " + fmt(p) + " <= " + fmt(kSeparationFloor));
    check(p > s, at + "probabilistic " + fmt(p) + " <= spatial " + fmt(s));
    check(p > v, at + "probabilistic " + fmt(p) + " <= SVD " + fmt(v));
    check.note(at + "median r prob " + fmt(p, 3) + ", spatial " + fmt(s, 3) + ", SVD " + fmt(v, 3));
  }
}

void perplexity_association(Check& check) {
  const auto& run = synthetic_benchmark();
  std::map<std::size_t, std::vector<const BenchmarkRow*>> by_sample;
  for (const auto& r : run.rows) {
    if (r.family == "w2v-probabilistic") by_sample[r.sample_id].push_back(&r);
  }
  std::size_t top_half = 0;
  std::string picks;
  for (const auto& [sample, rows] : by_sample) {
    const auto* chosen = *std::min_element(rows.begin(), rows.end(),
                                           [](auto* a, auto* b) { return *a->perplexity < *b->perplexity; });
    const auto better = std::count_if(rows.begin(), rows.end(),
                                      [&](auto* r) { return r->correlation > chosen->correlation; });
    const bool ok = static_cast<std::size_t>(better + 1) * 2 <= rows.size();
    top_half += ok;
    picks += chosen->algorithm + std::to_string(*chosen->k) + "#" + std::to_string(better + 1) + " ";
  }
  check(by_sample.size() == 10, "expected 10 samples");
  check(top_half >= kTopHalfRequired, std::to_string(top_half) + "/10 samples in the top half");
  check.note(std::to_string(top_half) + "/10 chosen configs in the top half (" + picks.substr(0, picks.size() - 1) + ")");
}

// --- 8 ---------------------------------------------------------------------

std::string q(const std::string& path) { return "'" + path + "'"; }

void determinism(Check& check) {
  pt::TempDir dir("determinism");
  const std::string corpus = q(kData + "/tutorial/corpus.jsonl");
  const std::string seeds = q(kData + "/tutorial/health_seeds.txt");
  pt::spit(dir / "grid.txt", "algorithm=SG k=16 epochs=3\nalgorithm=CBOW k=16 epochs=3\n");
  const std::vector<std::pair<std::string, std::string>> commands = {
      {"train", "--seed 7 train --corpus " + corpus + " --k 24 --epochs 3 --out "},
      {"train-cbow", "--seed 7 train --corpus " + corpus + " --algo cbow --k 24 --epochs 3 --out "},
      {"optimize", "--seed 7 optimize --corpus " + corpus + " --grid " + q(dir / "grid.txt") + " --seeds " + seeds +
                       " --out "},
      {"evaluate", "--seed 7 evaluate --corpus " + corpus + " --dictionary " +
                       q(kData + "/tutorial/health_dictionary.txt") + " --grid " + q(dir / "grid.txt") +
                       " --samples 3 --sample-size 5 --out "},
  };
  for (const auto& [name, args] : commands) {
    std::string outputs[2];
    for (int run = 0; run < 2; ++run) {
      const std::string path = dir / (name + std::to_string(run));
      const auto r = pt::run_cli(kCli, "-q --threads 1 " + args + q(path), dir);
      check(r.exit_code == 0, name + " exited " + std::to_string(r.exit_code) + ": " + r.err);
      outputs[run] = pt::slurp(path);
    }
    check(!outputs[0].empty() && outputs[0] == outputs[1], name + " outputs differ between runs");
  }
  check.note("train (SG, CBOW), optimize, evaluate byte-identical");
}

// --- 9 ---------------------------------------------------------------------

std::vector<std::vector<std::string>> read_tsv(const std::string& text) {
  std::vector<std::vector<std::string>> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (;;) {
      const auto tab = line.find('\t', start);
      fields.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
      if (tab == std::string::npos) break;
      start = tab + 1;
    }
    rows.push_back(std::move(fields));
  }
  return rows;
}

bool is_number(const std::string& s, double& x) {
  if (s.empty()) return false;
  char* end = nullptr;
  x = std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size() && std::isfinite(x);
}

bool is_date(const std::string& s) {
  try {
    return format_date(parse_date(s)) == s;
  } catch (const std::exception&) {
    return false;
  }
}

// Checks `id date tags n_tokens score`; returns the number of data rows.
std::size_t check_score_table(Check& check, const std::string& name, const std::string& text, double lo, double hi) {
  const auto rows = read_tsv(text);
  check(!rows.empty() && rows[0] == std::vector<std::string>{"id", "date", "tags", "n_tokens", "score"},
        name + ": bad header");
  std::set<std::string> ids;
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const auto& r = rows[i];
    double n = 0, score = 0;
    const bool ok = r.size() == 5 && ids.insert(r[0]).second && is_date(r[1]) && is_number(r[3], n) && n >= 1 &&
                    n == std::floor(n) && is_number(r[4], score) && score >= lo && score <= hi;
    check(ok, name + " row " + std::to_string(i) + " malformed");
  }
  return rows.empty() ? 0 : rows.size() - 1;
}

void tutorial(Check& check) {
  pt::TempDir dir("tutorial");
  const std::string corpus = q(kData + "/tutorial/corpus.jsonl");
  const auto step = [&](const std::string& name, const std::string& args) {
    const auto r = pt::run_cli(kCli, "-q " + args, dir, "POLARSCALE_THREADS=1");
    check(r.exit_code == 0, name + " exited " + std::to_string(r.exit_code) + ": " + r.err);
  };
  step("train", "train --corpus " + corpus + " --out " + q(dir / "model.bin") + " --text-out " + q(dir / "model.txt"));
  for (const std::string name : {"health", "achievement"}) {
    step("score " + name, "score --corpus " + corpus + " --model " + q(dir / "model.bin") + " --seeds " +
                                 q(kData + "/tutorial/" + name + "_seeds.txt") + " --concept " + name +
                                 " --word-scores " + q(dir / (name + "_words.tsv")) + " --out " +
                                 q(dir / (name + ".tsv")));
  }
  step("combine", "score --combine " + q(dir / "achievement.tsv") + " " + q(dir / "health.tsv") + " --out " +
                      q(dir / "combined.tsv"));
  step("smooth", "evaluate --corpus " + corpus + " --scores " + q(dir / "health.tsv") +
                     " --groups china=china,chinese,beijing --groups us=us,american,washington --series-out " +
                     q(dir / "series.tsv"));

  // The text export: one `term v1 ... vK` line per vocabulary term.
  std::istringstream text(pt::slurp(dir / "model.txt"));
  std::string line;
  std::size_t n_terms = 0, bad = 0;
  while (std::getline(text, line)) {
    ++n_terms;
    std::istringstream fields(line);
    std::string term;
    fields >> term;
    std::size_t values = 0;
    for (double x; fields >> x; ++values) bad += !std::isfinite(x);
    bad += values != 100 || !fields.eof();
  }
  check(n_terms > 0 && bad == 0, "model text export malformed");

  const auto health = check_score_table(check, "health", pt::slurp(dir / "health.tsv"), 0.0, 1.0);
  const auto achievement = check_score_table(check, "achievement", pt::slurp(dir / "achievement.tsv"), 0.0, 1.0);
  const auto combined = check_score_table(check, "combined", pt::slurp(dir / "combined.tsv"), 0.0, 1.0);
  check(health >= 500 && achievement == health && combined == health,
        "row counts " + std::to_string(health) + "/" + std::to_string(achievement) + "/" + std::to_string(combined));

  const auto words = read_tsv(pt::slurp(dir / "health_words.tsv"));
  check(!words.empty() && words[0] == std::vector<std::string>{"term", "frequency", "score"}, "word scores header");
  check(words.size() == n_terms + 1, "word scores cover the vocabulary");

  const auto series = read_tsv(pt::slurp(dir / "series.tsv"));
  check(!series.empty() && series[0] == std::vector<std::string>{"date", "group", "value", "lower", "upper"},
        "series header");
  std::set<std::string> groups;
  for (std::size_t i = 1; i < series.size(); ++i) {
    const auto& r = series[i];
    double v = 0, lo = 0, hi = 0;
    const bool ok = r.size() == 5 && is_date(r[0]) && is_number(r[2], v) && is_number(r[3], lo) &&
                    is_number(r[4], hi) && lo <= hi;
    check(ok, "series row " + std::to_string(i) + " malformed");
    if (r.size() > 1) groups.insert(r[1]);
  }
  check(groups == std::set<std::string>{"china", "other", "us"}, "series groups");
  check.note(std::to_string(health) + " documents, " + std::to_string(series.size() - !series.empty()) +
             " smoothed points");
}

struct Criterion {
  int number;
  std::string name;
  std::function<void(Check&)> run;
  double budget_seconds;  // 0: none
};

}  // namespace

int main(int argc, char** argv) {
  const std::vector<Criterion> criteria = {
      {1, "gradient oracle", gradient_oracle, kGradientBudget},
      {2, "dictionary equivalence", dictionary_equivalence, kDictionaryBudget},
      {3, "perplexity closed forms", perplexity_closed_forms, 0},
      {4, "scaling invariants", scaling_invariants, 0},
      {5, "SVD oracle", svd_oracle, 0},
      {6, "synthetic separation", synthetic_separation, kSyntheticBudget},
      {7, "perplexity-quality association", perplexity_association, 0},
      {8, "determinism", determinism, 0},
      {9, "tutorial end-to-end", tutorial, kTutorialBudget},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));

  int failed = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.contains(c.number)) continue;
    Check check;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.run(check);
    } catch (const std::exception& e) {
      check(false, std::string("exception: ") + e.what());
    }
    const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (c.budget_seconds > 0) {
      check(seconds < c.budget_seconds, "took " + fmt(seconds, 3) + " s, budget " + fmt(c.budget_seconds) + " s");
    }
    failed += !check.ok();
    std::printf("criterion %d %-32s %s  (%.2f s)  %s\n", c.number, c.name.c_str(), check.ok() ? "PASS" : "FAIL", seconds,
                check.notes().c_str());
    if (!check.ok()) std::printf("    %s\n", check.summary().c_str());
    std::fflush(stdout);
  }
  return failed;
}
