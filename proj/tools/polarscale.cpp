// polarscale: train word2vec/SVD models, expand seed words into word and
// document polarity scores, select hyperparameters by seed perplexity, and
// run the dictionary-correlation benchmark.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "polarscale/corpus.hpp"
#include "polarscale/embedding.hpp"
#include "polarscale/errors.hpp"
#include "polarscale/evalkit.hpp"
#include "polarscale/modelfit.hpp"
#include "polarscale/scaling.hpp"
#include "polarscale/svd.hpp"

namespace ps = polarscale;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitData = 3;
constexpr int kExitTraining = 4;

struct Common {
  std::uint64_t seed = ps::kDefaultSeed;
  std::optional<std::size_t> threads;
  bool quiet = false;

  std::size_t thread_count() const {
    if (threads) return std::max<std::size_t>(1, *threads);
    if (const char* env = std::getenv("POLARSCALE_THREADS")) {
      try {
        return std::max<std::size_t>(1, std::stoul(env));
      } catch (const std::logic_error&) {
        throw ps::ConfigError(std::string("POLARSCALE_THREADS is not a number: '") + env + "'");
      }
    }
    return 1;
  }
};

struct CorpusOptions {
  std::string corpus;
  std::uint64_t min_count = ps::kDefaultMinCount;
  bool keep_numbers = false;
  std::string stopwords;

  ps::TokenizerConfig tokenizer() const {
    ps::TokenizerConfig config;
    config.keep_numbers = keep_numbers;
    if (!stopwords.empty()) {
      for (const auto& w : ps::load_patterns(stopwords).patterns) config.stopwords.insert(ps::fold_case(w));
    }
    return config;
  }

  std::vector<ps::TokenizedDocument> tokenized() const {
    const auto docs = ps::load_corpus(corpus);
    if (docs.empty()) throw ps::DataError("empty corpus: '" + corpus + "' has no documents");
    return ps::tokenize_documents(docs, tokenizer());
  }

  void add_to(CLI::App* cmd, bool required = true) {
    auto* opt = cmd->add_option("--corpus", corpus, "Corpus file (JSON lines: id, text, date, tags)");
    if (required) opt->required();
    cmd->add_option("--min-count", min_count, "Minimum corpus frequency for vocabulary terms")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
    cmd->add_flag("--keep-numbers", keep_numbers, "Keep digit-only tokens");
    cmd->add_option("--stopwords", stopwords, "File of stopwords to drop, one per line");
  }
};

std::ofstream open_output(const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ps::DataError("cannot write '" + path + "'");
  return out;
}

void finish_output(std::ofstream& out, const std::string& path) {
  out.flush();
  if (!out) throw ps::DataError("failed writing '" + path + "'");
}

// ---- train ---------------------------------------------------------------

struct TrainArgs {
  CorpusOptions corpus;
  std::string algorithm = "sg";
  std::size_t k = 100;
  std::optional<std::size_t> window;
  double lr = 0.05;
  std::size_t epochs = 10;
  std::size_t negatives = 5;
  std::optional<double> subsample;
  std::string weighting = "count";
  std::string out;
  std::string text_out;
  bool hogwild = false;
};

ps::TermWeighting parse_weighting(const std::string& text) {
  if (text == "count") return ps::TermWeighting::Count;
  if (text == "log" || text == "log-count") return ps::TermWeighting::LogCount;
  throw ps::ConfigError("unknown weighting '" + text + "' (expected count or log)");
}

int cmd_train(const TrainArgs& args, const Common& common) {
  ps::W2VConfig config;
  config.algorithm = ps::parse_algorithm(args.algorithm);
  config.dim = args.k;
  config.window = args.window.value_or(config.algorithm == ps::Algorithm::SG ? 10 : 5);
  config.learning_rate = args.lr;
  config.epochs = args.epochs;
  config.negatives = args.negatives;
  config.subsample = args.subsample;
  config.seed = ps::derive_seed(common.seed, "train");
  if (config.algorithm != ps::Algorithm::SVD) config.validate();
  const auto weighting = parse_weighting(args.weighting);

  const auto corpus = ps::build_corpus(args.corpus.tokenized(), args.corpus.min_count);
  if (!common.quiet) {
    std::cout << "documents: " << corpus.documents.size() << "\ntokens: " << corpus.total_tokens()
              << "\nvocabulary: " << corpus.vocab.size() << "\n";
  }

  ps::EmbeddingModel model;
  if (config.algorithm == ps::Algorithm::SVD) {
    model = ps::train_svd(corpus, config.dim, config.seed, weighting);
  } else {
    ps::TrainOptions options;
    options.threads = common.thread_count();
    options.hogwild = args.hogwild;
    if (args.hogwild && options.threads > 1) {
      std::cerr << "warning: --hogwild trains with unsynchronized threads; the model will NOT be "
                   "reproducible across runs\n";
    }
    if (!common.quiet) {
      options.on_epoch = [](std::size_t epoch, double loss) {
        std::cout << "epoch " << epoch + 1 << " loss " << loss << "\n";
      };
    }
    model = ps::train_word2vec(corpus, config, options);
  }

  auto out = open_output(args.out);
  ps::write_model(out, model);
  finish_output(out, args.out);
  if (!args.text_out.empty()) {
    auto text = open_output(args.text_out);
    ps::write_text_vectors(text, model);
    finish_output(text, args.text_out);
  }
  if (!common.quiet) std::cout << "model: " << config.describe() << " -> " << args.out << "\n";
  return 0;
}

// ---- score ---------------------------------------------------------------

struct ScoreArgs {
  CorpusOptions corpus;
  std::string model;
  std::string seeds;
  std::string dictionary;
  std::string mode = "probabilistic";
  bool bipolar = false;
  std::size_t min_tokens = 1;
  std::string concept_label;
  std::string out;
  std::string word_scores;
  std::vector<std::string> combine;
};

void warn_unmatched(const ps::SeedSet& seeds) {
  for (const auto& p : seeds.unmatched) std::cerr << "warning: seed pattern '" << p << "' matches no vocabulary term\n";
}

int cmd_score(const ScoreArgs& args, const Common& common) {
  if (!args.combine.empty()) {
    if (args.combine.size() != 2) throw ps::ConfigError("--combine takes exactly two score tables");
    const auto combined =
        ps::combine_scores(ps::load_score_table(args.combine[0]), ps::load_score_table(args.combine[1]));
    for (const auto& id : combined.skipped) std::cerr << "warning: document '" << id << "' is not in both tables\n";
    auto out = open_output(args.out);
    ps::write_score_table(out, combined);
    finish_output(out, args.out);
    if (!common.quiet) std::cout << "combined " << combined.rows.size() << " documents -> " << args.out << "\n";
    return 0;
  }
  if (args.corpus.corpus.empty()) throw ps::ConfigError("score requires --corpus (or --combine)");

  const auto mode = ps::parse_polarity_kind(args.mode);
  const auto tokenized = args.corpus.tokenized();
  std::optional<ps::EmbeddingModel> model;
  if (!args.model.empty()) model = ps::load_model(args.model);
  if (mode != ps::PolarityKind::Dictionary && !model) {
    throw ps::ConfigError("--mode " + args.mode + " requires --model");
  }
  if (mode == ps::PolarityKind::Probabilistic && !model->has_output_layer()) {
    throw ps::ConfigError("probabilistic scoring requires output-layer weights");
  }
  const ps::Corpus corpus = model ? ps::index_corpus(tokenized, model->vocab)
                                  : ps::build_corpus(tokenized, args.corpus.min_count);

  ps::WordPolarity polarity;
  if (mode == ps::PolarityKind::Dictionary) {
    const std::string& path = args.dictionary.empty() ? args.seeds : args.dictionary;
    if (path.empty()) throw ps::ConfigError("dictionary mode requires --dictionary");
    polarity = ps::dictionary_word_scores(ps::load_patterns(path), corpus.vocab);
  } else {
    if (args.seeds.empty()) throw ps::ConfigError("--mode " + args.mode + " requires --seeds");
    const auto seeds = ps::make_seed_set(ps::load_patterns(args.seeds), corpus.vocab,
                                         args.bipolar ? ps::SeedMode::Bipolar : ps::SeedMode::Unipolar);
    warn_unmatched(seeds);
    polarity = mode == ps::PolarityKind::Spatial ? ps::spatial_word_scores(*model, seeds)
                                                 : ps::probabilistic_word_scores(*model, seeds);
  }
  polarity.concept_label = args.concept_label;

  ps::ScoringOptions options;
  options.min_tokens = args.min_tokens;
  options.threads = common.thread_count();
  const auto table = ps::score_documents(corpus, polarity, options);
  auto out = open_output(args.out);
  ps::write_score_table(out, table);
  finish_output(out, args.out);
  if (!args.word_scores.empty()) {
    auto words = open_output(args.word_scores);
    ps::write_word_polarity(words, polarity, corpus.vocab);
    finish_output(words, args.word_scores);
  }
  if (!common.quiet) {
    std::cout << "scored " << table.rows.size() << " documents (" << table.skipped.size()
              << " skipped) -> " << args.out << "\n";
  }
  return 0;
}

// ---- optimize ------------------------------------------------------------

struct OptimizeArgs {
  CorpusOptions corpus;
  std::string grid;
  std::string seeds;
  std::string out;
};

int cmd_optimize(const OptimizeArgs& args, const Common& common) {
  const auto grid = ps::load_grid(args.grid);
  const auto corpus = ps::build_corpus(args.corpus.tokenized(), args.corpus.min_count);
  const auto seeds = ps::make_seed_set(ps::load_patterns(args.seeds), corpus.vocab);
  warn_unmatched(seeds);

  ps::GridOptions options;
  options.threads = common.thread_count();
  const auto result = ps::grid_search(corpus, seeds, grid, common.seed, options);
  for (const auto& f : result.failures) {
    std::cerr << "error: config " << f.index + 1 << " (" << f.config.describe() << "): " << f.message << "\n";
  }
  if (result.reports.empty()) std::rethrow_exception(result.failures.front().error);

  auto out = open_output(args.out);
  ps::write_grid_report(out, result);
  finish_output(out, args.out);
  if (!common.quiet) {
    std::cout << "best: " << result.reports.front().config.describe()
              << " perplexity=" << result.reports.front().perplexity << "\n";
  }
  return result.failures.empty() ? 0 : kExitTraining;
}

// ---- evaluate ------------------------------------------------------------

struct EvaluateArgs {
  CorpusOptions corpus;
  std::string dictionary;
  std::string grid;
  std::size_t samples = 10;
  std::size_t sample_size = 10;
  std::string weighting = "count";
  std::string out;
  std::string scores;
  std::vector<std::string> groups;
  double bandwidth = 14.0;
  std::size_t n_boot = 500;
  bool daily = false;
  std::string series_out;
};

int cmd_evaluate(const EvaluateArgs& args, const Common& common) {
  const bool benchmark = !args.dictionary.empty();
  const bool smoothing = !args.scores.empty();
  if (!benchmark && !smoothing) {
    throw ps::ConfigError("evaluate needs --dictionary (benchmark) and/or --scores (smoothing)");
  }
  if (benchmark && args.out.empty()) throw ps::ConfigError("benchmark requires --out");
  if (smoothing && args.series_out.empty()) throw ps::ConfigError("smoothing requires --series-out");
  std::vector<ps::KeywordGroup> groups;
  for (const auto& g : args.groups) groups.push_back(ps::parse_keyword_group(g));

  std::optional<std::vector<ps::TokenizedDocument>> tokenized;
  if (benchmark || !groups.empty()) {
    if (args.corpus.corpus.empty()) throw ps::ConfigError("evaluate requires --corpus");
    tokenized = args.corpus.tokenized();
  }

  if (benchmark) {
    const auto corpus = ps::build_corpus(*tokenized, args.corpus.min_count);
    const auto dictionary = ps::load_patterns(args.dictionary);
    const auto configs = args.grid.empty() ? ps::reference_grid() : ps::load_grid(args.grid);
    const auto grid = ps::make_benchmark_grid(configs);
    const auto samples = ps::sample_seed_sets(dictionary, args.samples, args.sample_size, common.seed);
    ps::BenchmarkOptions options;
    options.seed = common.seed;
    options.svd_weighting = parse_weighting(args.weighting);
    options.threads = common.thread_count();

    auto out = open_output(args.out);
    ps::write_benchmark_header(out);
    std::size_t n_rows = 0;
    ps::run_benchmark(corpus, dictionary, samples, grid, options, [&](const ps::BenchmarkRow& row) {
      ps::write_benchmark_row(out, row);
      out.flush();
      ++n_rows;
    });
    finish_output(out, args.out);
    if (!common.quiet) std::cout << "benchmark: " << n_rows << " rows -> " << args.out << "\n";
  }

  if (smoothing) {
    const auto table = ps::load_score_table(args.scores);
    std::vector<std::pair<std::string, std::string>> group_of;
    if (!groups.empty()) {
      const auto labels = ps::classify_documents(*tokenized, groups);
      for (std::size_t i = 0; i < tokenized->size(); ++i) group_of.emplace_back((*tokenized)[i].id, labels[i]);
    }
    auto points = ps::score_points(table, group_of);
    if (points.empty()) throw ps::DataError("no dated documents in '" + args.scores + "'");
    if (args.daily) points = ps::daily_means(points);
    ps::SmoothingOptions options;
    options.bandwidth_days = args.bandwidth;
    options.n_boot = args.n_boot;
    options.seed = ps::derive_seed(common.seed, "smooth");
    const auto series = ps::smooth_by_group(points, options);
    auto out = open_output(args.series_out);
    ps::write_smoothed_series(out, series);
    finish_output(out, args.series_out);
    if (!common.quiet) {
      std::cout << "series: " << series.size() << " points, Gaussian kernel mean (sd " << args.bandwidth
                << " days) with " << args.n_boot << "-resample bootstrap bands, not LOESS -> " << args.series_out
                << "\n";
    }
  }
  return 0;
}

// ---- inspect -------------------------------------------------------------

struct InspectArgs {
  std::string model;
  std::vector<std::string> targets;
  std::size_t top = 20;
};

int cmd_inspect(const InspectArgs& args, const Common&) {
  const auto model = ps::load_model(args.model);
  std::cout << "target\trank\tcontext\tprobability\n";
  for (const auto& target : args.targets) {
    const auto ranked = ps::context_probabilities(model, ps::fold_case(target), args.top);
    for (std::size_t r = 0; r < ranked.size(); ++r) {
      std::cout << target << '\t' << r + 1 << '\t' << ranked[r].term << '\t' << ranked[r].probability << '\n';
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Latent Semantic Scaling with word2vec language models"};
  app.require_subcommand(1);
  Common common;
  app.add_option("--seed", common.seed, "Master random seed")->capture_default_str();
  app.add_option("--threads", common.threads, "Worker threads (default: $POLARSCALE_THREADS or 1)");
  app.add_flag("-q,--quiet", common.quiet, "No summary on standard output");

  TrainArgs train;
  auto* train_cmd = app.add_subcommand("train", "Train a word2vec (SG/CBOW) or SVD model");
  train.corpus.add_to(train_cmd);
  train_cmd->add_option("--algo", train.algorithm, "sg, cbow or svd")->capture_default_str();
  train_cmd->add_option("--k", train.k, "Dimensions")->capture_default_str();
  train_cmd->add_option("--window", train.window, "Window radius (default 10 for sg, 5 for cbow)");
  train_cmd->add_option("--lr", train.lr, "Initial learning rate")->capture_default_str();
  train_cmd->add_option("--epochs", train.epochs, "Passes over the corpus")->capture_default_str();
  train_cmd->add_option("--negatives", train.negatives, "Negative samples per target")->capture_default_str();
  train_cmd->add_option("--subsample", train.subsample, "Frequent-word subsampling threshold");
  train_cmd->add_option("--weighting", train.weighting, "SVD weighting: count or log")->capture_default_str();
  train_cmd->add_option("--out", train.out, "Model file")->required();
  train_cmd->add_option("--text-out", train.text_out, "Also write input vectors as text");
  train_cmd->add_flag("--hogwild", train.hogwild, "Lock-free multithreaded training (non-deterministic)");

  ScoreArgs score;
  auto* score_cmd = app.add_subcommand("score", "Score documents, or combine two score tables");
  score.corpus.add_to(score_cmd, false);
  score_cmd->add_option("--model", score.model, "Model file");
  score_cmd->add_option("--seeds", score.seeds, "Seed pattern file");
  score_cmd->add_option("--dictionary", score.dictionary, "Dictionary pattern file");
  score_cmd->add_option("--mode", score.mode, "spatial, probabilistic or dictionary")->capture_default_str();
  score_cmd->add_flag("--bipolar", score.bipolar, "Seeds carry signed polarities");
  score_cmd->add_option("--min-tokens", score.min_tokens, "Skip documents with fewer in-vocabulary tokens")
      ->capture_default_str();
  score_cmd->add_option("--concept", score.concept_label, "Label for the word scores");
  score_cmd->add_option("--word-scores", score.word_scores, "Also write word polarity scores");
  score_cmd->add_option("--combine", score.combine, "Combine two score tables: a.tsv b.tsv")->expected(2);
  score_cmd->add_option("--out", score.out, "Score table")->required();

  OptimizeArgs optimize;
  auto* optimize_cmd = app.add_subcommand("optimize", "Rank hyperparameter configs by seed perplexity");
  optimize.corpus.add_to(optimize_cmd);
  optimize_cmd->add_option("--grid", optimize.grid, "Grid file, one config per line")->required();
  optimize_cmd->add_option("--seeds", optimize.seeds, "Seed pattern file")->required();
  optimize_cmd->add_option("--out", optimize.out, "Report file")->required();

  EvaluateArgs evaluate;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "Dictionary benchmark and time-series smoothing");
  evaluate.corpus.add_to(evaluate_cmd, false);
  evaluate_cmd->add_option("--dictionary", evaluate.dictionary, "Full dictionary pattern file");
  evaluate_cmd->add_option("--grid", evaluate.grid, "Grid file (default: SG/CBOW x K=50..300)");
  evaluate_cmd->add_option("--samples", evaluate.samples, "Number of seed samples")->capture_default_str();
  evaluate_cmd->add_option("--sample-size", evaluate.sample_size, "Patterns per seed sample")->capture_default_str();
  evaluate_cmd->add_option("--weighting", evaluate.weighting, "SVD weighting: count or log")->capture_default_str();
  evaluate_cmd->add_option("--out", evaluate.out, "Benchmark result table");
  evaluate_cmd->add_option("--scores", evaluate.scores, "Score table to smooth");
  evaluate_cmd->add_option("--groups", evaluate.groups, "Keyword group name=kw1,kw2 (repeatable)");
  evaluate_cmd->add_option("--bandwidth", evaluate.bandwidth, "Kernel sd in days")->capture_default_str();
  evaluate_cmd->add_option("--n-boot", evaluate.n_boot, "Bootstrap resamples")->capture_default_str();
  evaluate_cmd->add_flag("--daily", evaluate.daily, "Smooth daily means instead of documents");
  evaluate_cmd->add_option("--series-out", evaluate.series_out, "Smoothed series table");

  InspectArgs inspect;
  auto* inspect_cmd = app.add_subcommand("inspect", "List context words most likely around a target");
  inspect_cmd->add_option("--model", inspect.model, "Model file")->required();
  inspect_cmd->add_option("--target", inspect.targets, "Target word (repeatable)")->required();
  inspect_cmd->add_option("--top", inspect.top, "Number of context words")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  try {
    if (*train_cmd) return cmd_train(train, common);
    if (*score_cmd) return cmd_score(score, common);
    if (*optimize_cmd) return cmd_optimize(optimize, common);
    if (*evaluate_cmd) return cmd_evaluate(evaluate, common);
    if (*inspect_cmd) return cmd_inspect(inspect, common);
  } catch (const ps::ConfigError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ps::DataError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitData;
  } catch (const ps::TrainingError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitTraining;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
