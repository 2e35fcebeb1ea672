#pragma once

#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/random.hpp"

namespace polarscale {

enum class Algorithm : std::uint32_t { SG = 0, CBOW = 1, SVD = 2 };

std::string_view to_string(Algorithm algorithm);
// Case-insensitive: "sg", "cbow", "svd".
Algorithm parse_algorithm(std::string_view text);

struct W2VConfig {
  Algorithm algorithm = Algorithm::SG;
  std::size_t dim = 100;      // K
  std::size_t window = 5;     // d
  double learning_rate = 0.05;
  std::size_t epochs = 10;
  std::size_t negatives = 5;
  std::uint64_t seed = kDefaultSeed;
  std::optional<double> subsample;  // off unless set

  // Throws ConfigError when an invariant is violated.
  void validate() const;
  // `algorithm=SG k=100 window=10 lr=0.05 epochs=10 negatives=5`
  std::string describe() const;

  friend bool operator==(const W2VConfig&, const W2VConfig&) = default;
};

// Settings used for the evaluation grid: SG with d=10 and CBOW with d=5,
// K in {50, ..., 300}, learning rate 0.05, 10 epochs.
std::vector<W2VConfig> reference_grid();

// Dense row-major float matrix.
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, float fill = 0.0f)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::span<float> row(std::size_t i) { return {data_.data() + i * cols_, cols_}; }
  std::span<const float> row(std::size_t i) const { return {data_.data() + i * cols_, cols_}; }
  float& operator()(std::size_t i, std::size_t k) { return data_[i * cols_ + k]; }
  float operator()(std::size_t i, std::size_t k) const { return data_[i * cols_ + k]; }
  std::span<float> values() { return data_; }
  std::span<const float> values() const { return data_; }
  bool all_finite() const;

  friend bool operator==(const Matrix&, const Matrix&) = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<float> data_;
};

// Input layer V and output layer W over a vocabulary. SVD models carry no W.
struct EmbeddingModel {
  Vocabulary vocab;
  W2VConfig config;
  Matrix input;
  std::optional<Matrix> output;

  std::size_t dim() const { return input.cols(); }
  bool has_output_layer() const { return output.has_value(); }
};

// Logistic function in a branch form that never overflows. The result is
// clamped into the open interval (0, 1).
inline double sigmoid(double x) {
  double p;
  if (x >= 0) {
    p = 1.0 / (1.0 + std::exp(-x));
  } else {
    const double e = std::exp(x);
    p = e / (1.0 + e);
  }
  constexpr double lo = std::numeric_limits<double>::denorm_min();
  constexpr double hi = 1.0 - 0x1.0p-53;
  return p < lo ? lo : (p > hi ? hi : p);
}

template <std::floating_point T>
T dot(std::span<const T> a, std::span<const T> b) {
  T sum = 0;
  for (std::size_t k = 0; k < a.size(); ++k) sum += a[k] * b[k];
  return sum;
}

/// One negative-sampling step for a hidden vector against rows of W.
///
/// `weights` is the row-major output layer (rows of length hidden.size()).
/// The loss is -log sigmoid(h.W_target) - sum_n log sigmoid(-h.W_n). All
/// scores are taken with W as it is on entry; then every involved W row moves
/// by -step * dL/dW_row, and `hidden_update` receives -step * dL/dh for the
/// caller to back-propagate into V. Repeated rows accumulate. Returns the loss.
template <std::floating_point T>
T negative_sampling_step(std::span<const T> hidden, std::span<T> weights, TermId target,
                         std::span<const TermId> negatives, T step, std::span<T> hidden_update) {
  const std::size_t dim = hidden.size();
  auto row = [&](TermId id) { return std::span<T>(weights.data() + std::size_t{id} * dim, dim); };

  constexpr std::size_t kInline = 32;
  T coeff_inline[kInline];
  std::vector<T> coeff_heap;
  const std::size_t n_rows = negatives.size() + 1;
  T* coeff = coeff_inline;
  if (n_rows > kInline) {
    coeff_heap.resize(n_rows);
    coeff = coeff_heap.data();
  }

  T loss = 0;
  for (std::size_t r = 0; r < n_rows; ++r) {
    const TermId id = r == 0 ? target : negatives[r - 1];
    const T label = r == 0 ? T(1) : T(0);
    const T score = dot<T>(hidden, row(id));
    const T p = static_cast<T>(sigmoid(static_cast<double>(score)));
    loss -= r == 0 ? std::log(p) : std::log1p(-p);
    coeff[r] = step * (label - p);
  }
  std::fill(hidden_update.begin(), hidden_update.end(), T(0));
  for (std::size_t r = 0; r < n_rows; ++r) {
    const auto w = row(r == 0 ? target : negatives[r - 1]);
    for (std::size_t k = 0; k < dim; ++k) hidden_update[k] += coeff[r] * w[k];
  }
  for (std::size_t r = 0; r < n_rows; ++r) {
    auto w = row(r == 0 ? target : negatives[r - 1]);
    for (std::size_t k = 0; k < dim; ++k) w[k] += coeff[r] * hidden[k];
  }
  return loss;
}

struct TrainOptions {
  // Threads > 1 only take effect together with hogwild; the default
  // single-threaded path is bit-for-bit reproducible.
  std::size_t threads = 1;
  bool hogwild = false;
  // Called after each epoch with (epoch index, mean loss per prediction).
  std::function<void(std::size_t, double)> on_epoch;
};

// Samples negatives from unigram^0.75 via a precomputed table.
class NegativeSampler {
 public:
  NegativeSampler(const Vocabulary& vocab, double power = 0.75);
  TermId sample(Rng& rng) const { return table_[rng.below(table_.size())]; }
  std::size_t table_size() const { return table_.size(); }

 private:
  std::vector<TermId> table_;
};

/// Trains SG or CBOW with negative sampling over the documents of `corpus`.
///
/// Windows are a fixed radius `config.window` over each document's
/// in-vocabulary token stream and never cross documents. The learning rate
/// decays linearly to 1e-4 of its initial value over all scheduled updates.
/// Throws DataError for corpora with fewer than two distinct terms and
/// TrainingError("training diverged") on non-finite parameters.
EmbeddingModel train_word2vec(const Corpus& corpus, const W2VConfig& config,
                              const TrainOptions& options = {});

// sigmoid(V_context . W_target). Requires an output layer.
double predict_probability(const EmbeddingModel& model, std::string_view context,
                           std::string_view target);
double predict_probability(const EmbeddingModel& model, TermId context, TermId target);

struct ContextProbability {
  std::string term;
  double probability;
};

// Every vocabulary term scored as the context of `target`, best first,
// truncated to top_n. Ties keep vocabulary order.
std::vector<ContextProbability> context_probabilities(const EmbeddingModel& model,
                                                      std::string_view target, std::size_t top_n);

// Binary container: magic "LSSW2V1\0", u64 vocab size, u32 K, u32 algorithm,
// u32 window, u64 seed; per term u32 byte length, bytes, u64 frequency; then
// V and (unless SVD) W as little-endian float32, row-major.
void write_model(std::ostream& out, const EmbeddingModel& model);
EmbeddingModel read_model(std::istream& in);
void save_model(const std::filesystem::path& path, const EmbeddingModel& model);
EmbeddingModel load_model(const std::filesystem::path& path);
// One line per term: the term followed by its K input-layer values.
void write_text_vectors(std::ostream& out, const EmbeddingModel& model);

}  // namespace polarscale
