#include "polarscale/modelfit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <sstream>

#include "parallel.hpp"
#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

std::size_t parse_count(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long n = std::stoll(value, &used);
    if (used != value.size() || n < 0) throw std::invalid_argument(value);
    return static_cast<std::size_t>(n);
  } catch (const std::logic_error&) {
    throw ConfigError("grid: invalid value '" + value + "' for " + key);
  }
}

double parse_real(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double x = std::stod(value, &used);
    if (used != value.size()) throw std::invalid_argument(value);
    return x;
  } catch (const std::logic_error&) {
    throw ConfigError("grid: invalid value '" + value + "' for " + key);
  }
}

}  // namespace

double perplexity_from_details(const std::vector<DocumentPerplexityDetail>& details) {
  double weighted_log = 0.0;
  double total_seed_count = 0.0;
  for (const auto& d : details) {
    if (d.n_tokens == 0) continue;
    const double n = static_cast<double>(d.n_tokens);
    for (std::size_t m = 0; m < d.seed_counts.size(); ++m) {
      if (d.seed_counts[m] == 0) continue;
      const double q = std::max(d.seed_probabilities[m], kProbabilityFloor);
      weighted_log += d.seed_counts[m] / n * std::log(q);
      total_seed_count += d.seed_counts[m];
    }
  }
  if (total_seed_count == 0.0) {
    throw DataError("perplexity undefined: seeds absent from corpus");
  }
  return std::exp(-weighted_log / total_seed_count);
}

PerplexityReport seed_perplexity(const EmbeddingModel& model, const Corpus& corpus,
                                 const SeedSet& seeds, bool keep_details) {
  if (!model.has_output_layer()) {
    throw ConfigError("perplexity requires output-layer weights (word2vec model)");
  }
  if (model.vocab.fingerprint() != corpus.vocab.fingerprint() ||
      seeds.vocab_fingerprint != model.vocab.fingerprint()) {
    throw DataError("perplexity: vocabulary mismatch between model, corpus and seeds");
  }
  const std::size_t m_seeds = seeds.size();
  const std::size_t n_terms = model.vocab.size();

  // probability[i * M + m] = sigmoid(V_i . W_{s_m})
  std::vector<double> probability(n_terms * m_seeds);
  for (TermId i = 0; i < n_terms; ++i) {
    const auto v = model.input.row(i);
    for (std::size_t m = 0; m < m_seeds; ++m) {
      const auto w = model.output->row(seeds.expanded[m].term);
      double r = 0.0;
      for (std::size_t k = 0; k < v.size(); ++k) r += static_cast<double>(v[k]) * w[k];
      probability[i * m_seeds + m] = sigmoid(r);
    }
  }
  std::vector<std::ptrdiff_t> seed_slot(n_terms, -1);
  for (std::size_t m = 0; m < m_seeds; ++m) seed_slot[seeds.expanded[m].term] = static_cast<std::ptrdiff_t>(m);

  std::vector<DocumentPerplexityDetail> details;
  details.reserve(corpus.documents.size());
  for (const auto& doc : corpus.documents) {
    if (doc.total_tokens == 0) continue;
    DocumentPerplexityDetail d{doc.id, doc.total_tokens, std::vector<std::uint32_t>(m_seeds, 0),
                               std::vector<double>(m_seeds, 0.0)};
    for (const auto& [term, count] : doc.term_counts) {
      for (std::size_t m = 0; m < m_seeds; ++m) d.seed_probabilities[m] += count * probability[term * m_seeds + m];
      if (seed_slot[term] >= 0) d.seed_counts[static_cast<std::size_t>(seed_slot[term])] = count;
    }
    // The token mean's 1/N_d cancels in the normalization.
    const double total = std::accumulate(d.seed_probabilities.begin(), d.seed_probabilities.end(), 0.0);
    for (auto& q : d.seed_probabilities) q /= total;
    details.push_back(std::move(d));
  }

  PerplexityReport report{model.config, "", perplexity_from_details(details), {}};
  if (keep_details) report.details = std::move(details);
  return report;
}

std::uint64_t grid_config_seed(std::uint64_t master, const W2VConfig& config) {
  W2VConfig key = config;
  key.seed = 0;
  return derive_seed(master, "grid:" + key.describe());
}

GridResult grid_search(const Corpus& corpus, const SeedSet& seeds,
                       const std::vector<W2VConfig>& grid, std::uint64_t master_seed,
                       const GridOptions& options) {
  if (grid.empty()) throw ConfigError("empty hyperparameter grid");
  std::vector<std::optional<PerplexityReport>> reports(grid.size());
  std::vector<std::string> errors(grid.size());
  std::vector<std::exception_ptr> exceptions(grid.size());
  detail::parallel_for(grid.size(), options.threads, [&](std::size_t i) {
    W2VConfig config = grid[i];
    config.seed = grid_config_seed(master_seed, config);
    try {
      const EmbeddingModel model = train_word2vec(corpus, config);
      reports[i] = seed_perplexity(model, corpus, seeds);
    } catch (const std::exception& e) {
      errors[i] = config.describe() + ": " + e.what();
      exceptions[i] = std::current_exception();
    }
  });

  GridResult result;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (reports[i]) {
      result.order.push_back(i);
    } else {
      result.failures.push_back({i, grid[i], errors[i], exceptions[i]});
    }
  }
  std::stable_sort(result.order.begin(), result.order.end(), [&](std::size_t a, std::size_t b) {
    return reports[a]->perplexity < reports[b]->perplexity;
  });
  for (std::size_t i : result.order) result.reports.push_back(std::move(*reports[i]));
  return result;
}

W2VConfig parse_config_line(std::string_view line) {
  W2VConfig config;
  bool have_window = false;
  std::istringstream fields{std::string(line)};
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos || eq == 0 || eq + 1 == field.size()) {
      throw ConfigError("grid: expected key=value, got '" + field + "'");
    }
    const std::string key = field.substr(0, eq);
    const std::string value = field.substr(eq + 1);
    if (key == "algorithm" || key == "algo") {
      config.algorithm = parse_algorithm(value);
    } else if (key == "k" || key == "dim") {
      config.dim = parse_count(key, value);
    } else if (key == "window") {
      config.window = parse_count(key, value);
      have_window = true;
    } else if (key == "lr") {
      config.learning_rate = parse_real(key, value);
    } else if (key == "epochs") {
      config.epochs = parse_count(key, value);
    } else if (key == "negatives") {
      config.negatives = parse_count(key, value);
    } else if (key == "subsample") {
      config.subsample = parse_real(key, value);
    } else {
      throw ConfigError("grid: unknown key '" + key + "'");
    }
  }
  if (!have_window && config.algorithm == Algorithm::SG) config.window = 10;
  if (config.algorithm != Algorithm::SVD) config.validate();
  return config;
}

std::vector<W2VConfig> read_grid(std::istream& in) {
  std::vector<W2VConfig> grid;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string content = trim(line);
    if (content.empty() || content.front() == '#') continue;
    try {
      grid.push_back(parse_config_line(content));
    } catch (const ConfigError& e) {
      throw ConfigError("grid line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  if (grid.empty()) throw ConfigError("empty hyperparameter grid");
  return grid;
}

std::vector<W2VConfig> load_grid(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open grid file '" + path.string() + "'");
  return read_grid(in);
}

void write_grid_report(std::ostream& out, const GridResult& result) {
  out << "algorithm\tk\twindow\tlr\tepochs\tnegatives\tperplexity\n";
  char buf[256];
  for (const auto& r : result.reports) {
    const auto& c = r.config;
    std::snprintf(buf, sizeof buf, "%s\t%zu\t%zu\t%g\t%zu\t%zu\t%.12g\n",
                  std::string(to_string(c.algorithm)).c_str(), c.dim, c.window, c.learning_rate,
                  c.epochs, c.negatives, r.perplexity);
    out << buf;
  }
}

}  // namespace polarscale
