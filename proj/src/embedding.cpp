#include "polarscale/embedding.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <numeric>
#include <thread>

#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

constexpr double kLearningRateFloor = 1e-4;

std::string lowercase_ascii(std::string_view text) {
  std::string out(text);
  for (auto& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::vector<std::vector<TermId>> token_streams(const Corpus& corpus) {
  std::vector<std::vector<TermId>> streams;
  streams.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    std::vector<TermId> stream;
    stream.reserve(doc.total_tokens);
    for (const auto& sentence : doc.sentences) stream.insert(stream.end(), sentence.begin(), sentence.end());
    if (stream.size() >= 2) streams.push_back(std::move(stream));
  }
  return streams;
}

// Shared state for one training run. Workers read and write `model`
// directly; under hogwild this is deliberately unsynchronized.
class Trainer {
 public:
  Trainer(const W2VConfig& config, const Vocabulary& vocab, EmbeddingModel& model,
          std::uint64_t total_updates)
      : config_(config),
        model_(model),
        sampler_(vocab),
        total_updates_(static_cast<double>(total_updates)) {
    if (config.subsample) {
      const double threshold = *config.subsample * static_cast<double>(vocab.total_count());
      keep_probability_.resize(vocab.size());
      for (TermId i = 0; i < vocab.size(); ++i) {
        const double f = static_cast<double>(vocab.frequency(i));
        keep_probability_[i] = std::min(1.0, (std::sqrt(f / threshold) + 1.0) * threshold / f);
      }
    }
  }

  struct Tally {
    double loss = 0.0;
    std::uint64_t predictions = 0;
  };

  Tally run(std::span<const std::vector<TermId>> streams, Rng& rng) {
    Tally tally;
    const std::size_t dim = config_.dim;
    std::vector<float> hidden(dim);
    std::vector<float> update(dim);
    std::vector<TermId> negatives;
    negatives.reserve(config_.negatives);
    std::vector<TermId> tokens;
    const auto weights = model_.output->values();

    for (const auto& stream : streams) {
      const std::span<const TermId> kept = subsample(stream, rng, tokens);
      const auto n = static_cast<std::ptrdiff_t>(kept.size());
      const auto d = static_cast<std::ptrdiff_t>(config_.window);
      for (std::ptrdiff_t j = 0; j < n; ++j) {
        const auto done = processed_.fetch_add(1, std::memory_order_relaxed);
        const auto lr = static_cast<float>(
            config_.learning_rate *
            std::max(kLearningRateFloor, 1.0 - static_cast<double>(done) / total_updates_));
        const TermId target = kept[j];
        const std::ptrdiff_t lo = std::max<std::ptrdiff_t>(0, j - d);
        const std::ptrdiff_t hi = std::min<std::ptrdiff_t>(n - 1, j + d);

        if (config_.algorithm == Algorithm::SG) {
          for (std::ptrdiff_t c = lo; c <= hi; ++c) {
            if (c == j) continue;
            draw_negatives(target, rng, negatives);
            auto context = model_.input.row(kept[c]);
            tally.loss += negative_sampling_step<float>(context, weights, target, negatives, lr, update);
            for (std::size_t k = 0; k < dim; ++k) context[k] += update[k];
            ++tally.predictions;
          }
        } else {
          const auto count = static_cast<float>(hi - lo);
          if (count == 0) continue;
          std::fill(hidden.begin(), hidden.end(), 0.0f);
          for (std::ptrdiff_t c = lo; c <= hi; ++c) {
            if (c == j) continue;
            const auto v = model_.input.row(kept[c]);
            for (std::size_t k = 0; k < dim; ++k) hidden[k] += v[k];
          }
          for (auto& h : hidden) h /= count;
          draw_negatives(target, rng, negatives);
          tally.loss += negative_sampling_step<float>(hidden, weights, target, negatives, lr, update);
          // d(mean)/dV_c = 1/count for every context position.
          for (std::ptrdiff_t c = lo; c <= hi; ++c) {
            if (c == j) continue;
            auto v = model_.input.row(kept[c]);
            for (std::size_t k = 0; k < dim; ++k) v[k] += update[k] / count;
          }
          ++tally.predictions;
        }
      }
    }
    return tally;
  }

  void count_skipped(std::uint64_t n) { processed_.fetch_add(n, std::memory_order_relaxed); }

 private:
  std::span<const TermId> subsample(const std::vector<TermId>& stream, Rng& rng,
                                    std::vector<TermId>& buffer) {
    if (keep_probability_.empty()) return stream;
    buffer.clear();
    for (TermId id : stream) {
      if (keep_probability_[id] >= 1.0 || rng.uniform() < keep_probability_[id]) buffer.push_back(id);
    }
    count_skipped(stream.size() - buffer.size());
    return buffer;
  }

  void draw_negatives(TermId target, Rng& rng, std::vector<TermId>& out) const {
    out.clear();
    for (std::size_t i = 0; i < config_.negatives; ++i) {
      const TermId id = sampler_.sample(rng);
      if (id != target) out.push_back(id);
    }
  }

  const W2VConfig& config_;
  EmbeddingModel& model_;
  NegativeSampler sampler_;
  std::vector<double> keep_probability_;
  double total_updates_;
  std::atomic<std::uint64_t> processed_{0};
};

}  // namespace

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::SG: return "SG";
    case Algorithm::CBOW: return "CBOW";
    case Algorithm::SVD: return "SVD";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  const std::string lower = lowercase_ascii(text);
  if (lower == "sg" || lower == "skipgram" || lower == "skip-gram") return Algorithm::SG;
  if (lower == "cbow") return Algorithm::CBOW;
  if (lower == "svd") return Algorithm::SVD;
  throw ConfigError("unknown algorithm '" + std::string(text) + "' (expected sg, cbow or svd)");
}

void W2VConfig::validate() const {
  if (dim < 1) throw ConfigError("K (dimensions) must be at least 1");
  if (window < 1) throw ConfigError("window must be at least 1");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) {
    throw ConfigError("learning rate must be positive");
  }
  if (epochs < 1) throw ConfigError("epochs must be at least 1");
  if (negatives < 1) throw ConfigError("negatives must be at least 1");
  if (subsample && !(*subsample > 0.0)) throw ConfigError("subsample threshold must be positive");
}

std::string W2VConfig::describe() const {
  char buf[160];
  std::snprintf(buf, sizeof buf, "algorithm=%s k=%zu window=%zu lr=%g epochs=%zu negatives=%zu",
                std::string(to_string(algorithm)).c_str(), dim, window, learning_rate, epochs,
                negatives);
  std::string out = buf;
  if (subsample) {
    std::snprintf(buf, sizeof buf, " subsample=%g", *subsample);
    out += buf;
  }
  return out;
}

std::vector<W2VConfig> reference_grid() {
  std::vector<W2VConfig> grid;
  for (Algorithm algorithm : {Algorithm::SG, Algorithm::CBOW}) {
    for (std::size_t k = 50; k <= 300; k += 50) {
      W2VConfig c;
      c.algorithm = algorithm;
      c.dim = k;
      c.window = algorithm == Algorithm::SG ? 10 : 5;
      c.learning_rate = 0.05;
      c.epochs = 10;
      grid.push_back(c);
    }
  }
  return grid;
}

bool Matrix::all_finite() const {
  return std::all_of(data_.begin(), data_.end(), [](float x) { return std::isfinite(x); });
}

NegativeSampler::NegativeSampler(const Vocabulary& vocab, double power) {
  if (vocab.empty()) throw DataError("negative sampling needs a nonempty vocabulary");
  const std::size_t size =
      std::clamp<std::size_t>(vocab.size() * 100, std::size_t{1'000'000}, std::size_t{100'000'000});
  std::vector<double> weights(vocab.size());
  for (TermId i = 0; i < vocab.size(); ++i) {
    weights[i] = std::pow(static_cast<double>(vocab.frequency(i)), power);
  }
  const double total = std::accumulate(weights.begin(), weights.end(), 0.0);
  table_.resize(size);
  TermId id = 0;
  double cumulative = weights[0] / total;
  for (std::size_t a = 0; a < size; ++a) {
    table_[a] = id;
    if (static_cast<double>(a + 1) / static_cast<double>(size) > cumulative && id + 1 < vocab.size()) {
      ++id;
      cumulative += weights[id] / total;
    }
  }
}

EmbeddingModel train_word2vec(const Corpus& corpus, const W2VConfig& config,
                              const TrainOptions& options) {
  config.validate();
  if (config.algorithm == Algorithm::SVD) {
    throw ConfigError("train_word2vec requires algorithm SG or CBOW");
  }
  if (corpus.vocab.size() < 2) {
    throw DataError("word2vec needs at least two distinct vocabulary terms");
  }
  const auto streams = token_streams(corpus);
  std::uint64_t stream_tokens = 0;
  for (const auto& s : streams) stream_tokens += s.size();
  if (stream_tokens < 2) throw DataError("corpus too short for word2vec training");

  const std::size_t dim = config.dim;
  EmbeddingModel model{corpus.vocab, config, Matrix(corpus.vocab.size(), dim),
                       Matrix(corpus.vocab.size(), dim, 0.0f)};
  {
    Rng rng(derive_seed(config.seed, "init"));
    const double scale = 1.0 / static_cast<double>(dim);
    for (float& v : model.input.values()) v = static_cast<float>((rng.uniform() - 0.5) * scale);
  }

  Trainer trainer(config, corpus.vocab, model, stream_tokens * config.epochs);
  const bool parallel = options.hogwild && options.threads > 1 && streams.size() > 1;
  Rng rng(derive_seed(config.seed, "train"));
  std::vector<Rng> thread_rngs;
  if (parallel) {
    for (std::size_t t = 0; t < options.threads; ++t) {
      thread_rngs.emplace_back(derive_seed(config.seed, "train", t + 1));
    }
  }

  for (std::size_t epoch = 0; epoch < config.epochs; ++epoch) {
    Trainer::Tally tally;
    if (!parallel) {
      tally = trainer.run(streams, rng);
    } else {
      const std::size_t shards = std::min(options.threads, streams.size());
      std::vector<Trainer::Tally> tallies(shards);
      std::vector<std::thread> workers;
      const std::span<const std::vector<TermId>> all(streams);
      for (std::size_t t = 0; t < shards; ++t) {
        const std::size_t begin = streams.size() * t / shards;
        const std::size_t end = streams.size() * (t + 1) / shards;
        workers.emplace_back([&, t, begin, end] {
          tallies[t] = trainer.run(all.subspan(begin, end - begin), thread_rngs[t]);
        });
      }
      for (auto& w : workers) w.join();
      for (const auto& t : tallies) {
        tally.loss += t.loss;
        tally.predictions += t.predictions;
      }
    }
    const double mean_loss =
        tally.predictions ? tally.loss / static_cast<double>(tally.predictions) : 0.0;
    if (!std::isfinite(mean_loss) || !model.input.all_finite() || !model.output->all_finite()) {
      throw TrainingError("training diverged");
    }
    if (options.on_epoch) options.on_epoch(epoch, mean_loss);
  }
  return model;
}

double predict_probability(const EmbeddingModel& model, TermId context, TermId target) {
  if (!model.has_output_layer()) {
    throw ConfigError("probabilistic scoring requires output-layer weights");
  }
  return sigmoid(dot<float>(model.input.row(context), model.output->row(target)));
}

double predict_probability(const EmbeddingModel& model, std::string_view context,
                           std::string_view target) {
  return predict_probability(model, model.vocab.at(context), model.vocab.at(target));
}

std::vector<ContextProbability> context_probabilities(const EmbeddingModel& model,
                                                      std::string_view target, std::size_t top_n) {
  if (top_n < 1) throw ConfigError("top_n must be at least 1");
  const TermId t = model.vocab.at(target);
  std::vector<std::pair<double, TermId>> scored;
  scored.reserve(model.vocab.size());
  for (TermId i = 0; i < model.vocab.size(); ++i) scored.emplace_back(predict_probability(model, i, t), i);
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first > b.first; });
  scored.resize(std::min(top_n, scored.size()));
  std::vector<ContextProbability> out;
  out.reserve(scored.size());
  for (const auto& [p, i] : scored) out.push_back({model.vocab.term(i), p});
  return out;
}

}  // namespace polarscale
