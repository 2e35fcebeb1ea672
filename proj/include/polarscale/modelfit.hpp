#pragma once

#include <cstddef>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "polarscale/corpus.hpp"
#include "polarscale/embedding.hpp"
#include "polarscale/scaling.hpp"

namespace polarscale {

struct DocumentPerplexityDetail {
  std::string id;
  std::size_t n_tokens = 0;
  std::vector<std::uint32_t> seed_counts;   // f_dm, seed order
  std::vector<double> seed_probabilities;   // normalized q_dm, sums to 1
};

struct PerplexityReport {
  W2VConfig config;
  std::string seed_set_id;
  double perplexity = 0.0;
  std::vector<DocumentPerplexityDetail> details;  // filled on request
};

inline constexpr double kProbabilityFloor = 1e-12;

/// Seed perplexity of a model on a corpus.
///
/// For each document with N_d > 0, q_dm is the mean over its tokens i of
/// sigmoid(V_i . W_m), normalized over the M seeds to sum to one, and
///   perplexity = exp(-sum_d sum_m (f_dm / N_d) log q_dm / sum_d sum_m f_dm).
/// q_dm is floored at 1e-12 before the log. Throws DataError when no seed
/// occurs in the corpus and ConfigError for models without an output layer.
PerplexityReport seed_perplexity(const EmbeddingModel& model, const Corpus& corpus,
                                 const SeedSet& seeds, bool keep_details = false);

// The perplexity formula applied to per-document counts and normalized
// probabilities. Shared by seed_perplexity; exposed for checking.
double perplexity_from_details(const std::vector<DocumentPerplexityDetail>& details);

struct GridFailure {
  std::size_t index;
  W2VConfig config;
  std::string message;
  std::exception_ptr error;
};

struct GridResult {
  std::vector<PerplexityReport> reports;  // ascending perplexity, ties in grid order
  std::vector<std::size_t> order;         // grid index of each report
  std::vector<GridFailure> failures;
};

struct GridOptions {
  std::size_t threads = 1;  // configs trained concurrently, each single-threaded
};

// Seed used to train `config` in a grid run. Depends on the config fields,
// not its position, so duplicated configs train identical models.
std::uint64_t grid_config_seed(std::uint64_t master, const W2VConfig& config);

GridResult grid_search(const Corpus& corpus, const SeedSet& seeds,
                       const std::vector<W2VConfig>& grid, std::uint64_t master_seed,
                       const GridOptions& options = {});

// Lines like `algorithm=SG k=150 window=10 lr=0.05 epochs=10 negatives=5`;
// omitted keys keep their defaults. '#' comments and blank lines are skipped.
std::vector<W2VConfig> read_grid(std::istream& in);
std::vector<W2VConfig> load_grid(const std::filesystem::path& path);
W2VConfig parse_config_line(std::string_view line);

// Tab-separated `algorithm k window lr epochs negatives perplexity`, ascending.
void write_grid_report(std::ostream& out, const GridResult& result);

}  // namespace polarscale
