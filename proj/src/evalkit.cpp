#include "polarscale/evalkit.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <numeric>
#include <ostream>
#include <unordered_map>
#include <unordered_set>

#include "parallel.hpp"
#include "polarscale/errors.hpp"
#include "polarscale/modelfit.hpp"

namespace polarscale {

namespace {

// Linear interpolation between order statistics (R type 7).
double percentile(std::vector<double>& values, double p) {
  std::sort(values.begin(), values.end());
  const double h = (static_cast<double>(values.size()) - 1.0) * p;
  const auto lo = static_cast<std::size_t>(std::floor(h));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (h - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

[[noreturn]] void rethrow_with_context(const std::string& context) {
  try {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(context + ": " + e.what());
  } catch (const DataError& e) {
    throw DataError(context + ": " + e.what());
  } catch (const TrainingError& e) {
    throw TrainingError(context + ": " + e.what());
  }
}

double correlation_or_nan(const ScoreTable& a, const ScoreTable& b) {
  try {
    return pearson(a, b);
  } catch (const ConfigError&) {
    return std::numeric_limits<double>::quiet_NaN();
  }
}

}  // namespace

SeedSample draw_seed_sample(const PatternSet& dictionary, std::size_t set_size, std::uint64_t seed) {
  if (set_size > dictionary.size()) {
    throw ConfigError("seed sample size " + std::to_string(set_size) + " exceeds dictionary size " +
                      std::to_string(dictionary.size()));
  }
  if (set_size == 0) throw ConfigError("seed sample size must be positive");
  std::vector<std::size_t> index(dictionary.size());
  std::iota(index.begin(), index.end(), 0);
  Rng rng(seed);
  SeedSample sample{0, {}, seed};
  for (std::size_t i = 0; i < set_size; ++i) {
    const std::size_t j = i + rng.below(index.size() - i);
    std::swap(index[i], index[j]);
    sample.patterns.patterns.push_back(dictionary.patterns[index[i]]);
    if (dictionary.has_polarities()) sample.patterns.polarities.push_back(dictionary.polarities[index[i]]);
  }
  return sample;
}

std::vector<SeedSample> sample_seed_sets(const PatternSet& dictionary, std::size_t n_sets,
                                         std::size_t set_size, std::uint64_t master_seed) {
  std::vector<SeedSample> out;
  out.reserve(n_sets);
  for (std::size_t i = 1; i <= n_sets; ++i) {
    SeedSample s = draw_seed_sample(dictionary, set_size, derive_seed(master_seed, "seed-sample", i));
    s.sample_id = i;
    out.push_back(std::move(s));
  }
  return out;
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("pearson: vectors differ in length");
  if (x.size() < 2) throw ConfigError("pearson: need at least two observations");
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) throw ConfigError("undefined correlation");
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

double pearson(const ScoreTable& a, const ScoreTable& b) {
  std::unordered_map<std::string_view, double> b_scores;
  for (const auto& r : b.rows) b_scores.emplace(r.id, r.score);
  std::vector<double> x, y;
  for (const auto& r : a.rows) {
    if (auto it = b_scores.find(r.id); it != b_scores.end()) {
      x.push_back(r.score);
      y.push_back(it->second);
    }
  }
  return pearson(x, y);
}

std::vector<std::string> classify_documents(std::span<const TokenizedDocument> docs,
                                            std::span<const KeywordGroup> groups) {
  std::vector<std::unordered_set<std::string>> keyword_sets;
  for (const auto& g : groups) {
    std::unordered_set<std::string> set;
    for (const auto& k : g.keywords) set.insert(fold_case(k));
    keyword_sets.push_back(std::move(set));
  }
  std::vector<std::string> out;
  out.reserve(docs.size());
  for (const auto& doc : docs) {
    std::size_t best = groups.size();
    for (const auto& sentence : doc.sentences) {
      for (const auto& token : sentence) {
        for (std::size_t g = 0; g < best; ++g) {
          if (keyword_sets[g].contains(token)) {
            best = g;
            break;
          }
        }
      }
    }
    out.emplace_back(best < groups.size() ? groups[best].name : std::string(kDefaultGroup));
  }
  return out;
}

KeywordGroup parse_keyword_group(std::string_view spec) {
  const auto eq = spec.find('=');
  if (eq == std::string_view::npos || eq == 0) {
    throw ConfigError("group '" + std::string(spec) + "': expected name=keyword,keyword,...");
  }
  KeywordGroup group{std::string(spec.substr(0, eq)), {}};
  std::string_view rest = spec.substr(eq + 1);
  while (!rest.empty()) {
    const auto comma = rest.find(',');
    const auto word = rest.substr(0, comma);
    if (!word.empty()) group.keywords.emplace_back(word);
    if (comma == std::string_view::npos) break;
    rest.remove_prefix(comma + 1);
  }
  if (group.keywords.empty()) throw ConfigError("group '" + group.name + "' has no keywords");
  return group;
}

std::vector<SmoothedPoint> smooth_series(std::span<const TimeSeriesPoint> points,
                                         const SmoothingOptions& options) {
  if (!(options.bandwidth_days > 0.0)) throw ConfigError("bandwidth must be positive");
  for (const auto& p : points) {
    if (!std::isfinite(p.value)) throw DataError("time series contains a non-finite value");
  }
  // Collapse to distinct dates: the kernel only sees (date, count, sum).
  std::map<Date, std::size_t> date_slot;
  for (const auto& p : points) date_slot.emplace(p.date, 0);
  if (date_slot.size() < 2) throw ConfigError("smoothing needs at least two distinct dates");
  std::vector<Date> dates;
  for (auto& [date, slot] : date_slot) {
    slot = dates.size();
    dates.push_back(date);
  }
  const std::size_t n_dates = dates.size();
  std::vector<std::size_t> point_slot(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) point_slot[i] = date_slot[points[i].date];

  const double bw = options.bandwidth_days;
  auto kernel = [&](std::size_t a, std::size_t b) {
    const double z = static_cast<double>(dates[a].days - dates[b].days) / bw;
    return std::exp(-0.5 * z * z);
  };
  std::vector<double> kernel_cache;
  if (n_dates <= 2048) {
    kernel_cache.resize(n_dates * n_dates);
    for (std::size_t a = 0; a < n_dates; ++a) {
      for (std::size_t b = 0; b < n_dates; ++b) kernel_cache[a * n_dates + b] = kernel(a, b);
    }
  }
  auto weight = [&](std::size_t a, std::size_t b) {
    return kernel_cache.empty() ? kernel(a, b) : kernel_cache[a * n_dates + b];
  };
  // Smoothed value at each date from per-date counts and sums; NaN where all
  // weight vanished.
  auto evaluate = [&](const std::vector<double>& count, const std::vector<double>& sum,
                      std::vector<double>& out) {
    out.assign(n_dates, std::numeric_limits<double>::quiet_NaN());
    for (std::size_t a = 0; a < n_dates; ++a) {
      double num = 0.0, den = 0.0;
      for (std::size_t b = 0; b < n_dates; ++b) {
        if (count[b] == 0.0) continue;
        const double w = weight(a, b);
        num += w * sum[b];
        den += w * count[b];
      }
      if (den > 0.0) out[a] = num / den;
    }
  };

  std::vector<double> count(n_dates, 0.0), sum(n_dates, 0.0);
  for (std::size_t i = 0; i < points.size(); ++i) {
    count[point_slot[i]] += 1.0;
    sum[point_slot[i]] += points[i].value;
  }
  std::vector<double> estimate;
  evaluate(count, sum, estimate);

  std::vector<std::vector<double>> replicates(n_dates);
  Rng rng(options.seed);
  std::vector<double> boot;
  for (std::size_t b = 0; b < options.n_boot; ++b) {
    std::fill(count.begin(), count.end(), 0.0);
    std::fill(sum.begin(), sum.end(), 0.0);
    for (std::size_t i = 0; i < points.size(); ++i) {
      const std::size_t pick = rng.below(points.size());
      count[point_slot[pick]] += 1.0;
      sum[point_slot[pick]] += points[pick].value;
    }
    evaluate(count, sum, boot);
    for (std::size_t a = 0; a < n_dates; ++a) {
      if (!std::isnan(boot[a])) replicates[a].push_back(boot[a]);
    }
  }

  const std::string group = points.empty() ? std::string() : points.front().group;
  std::vector<SmoothedPoint> out;
  out.reserve(n_dates);
  for (std::size_t a = 0; a < n_dates; ++a) {
    SmoothedPoint p{dates[a], group, estimate[a], estimate[a], estimate[a]};
    if (!replicates[a].empty()) {
      p.lower = percentile(replicates[a], 0.025);
      p.upper = percentile(replicates[a], 0.975);
    }
    out.push_back(p);
  }
  return out;
}

std::vector<SmoothedPoint> smooth_by_group(std::span<const TimeSeriesPoint> points,
                                           const SmoothingOptions& options) {
  std::map<std::string, std::vector<TimeSeriesPoint>> groups;
  for (const auto& p : points) groups[p.group].push_back(p);
  std::vector<SmoothedPoint> out;
  for (const auto& [name, series] : groups) {
    SmoothingOptions per_group = options;
    per_group.seed = derive_seed(options.seed, "smooth:" + name);
    try {
      auto smoothed = smooth_series(series, per_group);
      out.insert(out.end(), smoothed.begin(), smoothed.end());
    } catch (const ConfigError& e) {
      throw ConfigError("group '" + name + "': " + e.what());
    }
  }
  return out;
}

std::vector<TimeSeriesPoint> daily_means(std::span<const TimeSeriesPoint> points) {
  std::map<std::pair<std::string, Date>, std::pair<double, std::size_t>> acc;
  for (const auto& p : points) {
    auto& [sum, n] = acc[{p.group, p.date}];
    sum += p.value;
    ++n;
  }
  std::vector<TimeSeriesPoint> out;
  out.reserve(acc.size());
  for (const auto& [key, value] : acc) {
    out.push_back({key.second, value.first / static_cast<double>(value.second), key.first});
  }
  return out;
}

std::vector<TimeSeriesPoint> score_points(
    const ScoreTable& table, const std::vector<std::pair<std::string, std::string>>& groups) {
  std::unordered_map<std::string, std::string> group_of(groups.begin(), groups.end());
  std::vector<TimeSeriesPoint> out;
  for (const auto& r : table.rows) {
    if (!r.date) continue;
    std::string group = "all";
    if (!group_of.empty()) {
      auto it = group_of.find(r.id);
      group = it != group_of.end() ? it->second : std::string(kDefaultGroup);
    } else if (!r.tags.empty()) {
      group = r.tags.front();
    }
    out.push_back({*r.date, r.score, std::move(group)});
  }
  return out;
}

void write_smoothed_series(std::ostream& out, std::span<const SmoothedPoint> series) {
  out << "date\tgroup\tvalue\tlower\tupper\n";
  char buf[128];
  for (const auto& p : series) {
    std::snprintf(buf, sizeof buf, "\t%.10g\t%.10g\t%.10g\n", p.value, p.lower, p.upper);
    out << format_date(p.date) << '\t' << p.group << buf;
  }
}

BenchmarkGrid make_benchmark_grid(const std::vector<W2VConfig>& configs) {
  BenchmarkGrid grid;
  for (const auto& c : configs) {
    if (c.algorithm == Algorithm::SVD) {
      grid.svd_ranks.push_back(c.dim);
    } else {
      grid.word2vec.push_back(c);
    }
  }
  if (grid.svd_ranks.empty()) {
    for (const auto& c : grid.word2vec) {
      if (std::find(grid.svd_ranks.begin(), grid.svd_ranks.end(), c.dim) == grid.svd_ranks.end()) {
        grid.svd_ranks.push_back(c.dim);
      }
    }
  }
  return grid;
}

std::vector<BenchmarkRow> run_benchmark(const Corpus& corpus, const PatternSet& full_dictionary,
                                        std::span<const SeedSample> samples,
                                        const BenchmarkGrid& grid, const BenchmarkOptions& options,
                                        const std::function<void(const BenchmarkRow&)>& on_row) {
  const ScoreTable reference =
      score_documents(corpus, dictionary_word_scores(full_dictionary, corpus.vocab));

  std::vector<std::optional<EmbeddingModel>> svd_models(grid.svd_ranks.size());
  std::vector<std::optional<EmbeddingModel>> w2v_models(grid.word2vec.size());
  const std::size_t n_models = svd_models.size() + w2v_models.size();
  detail::parallel_for(n_models, options.threads, [&](std::size_t i) {
    if (i < svd_models.size()) {
      const std::size_t k = grid.svd_ranks[i];
      try {
        svd_models[i] = train_svd(corpus, k, derive_seed(options.seed, "svd", k), options.svd_weighting);
      } catch (...) {
        rethrow_with_context("SVD k=" + std::to_string(k));
      }
    } else {
      const std::size_t j = i - svd_models.size();
      W2VConfig config = grid.word2vec[j];
      config.seed = grid_config_seed(options.seed, config);
      try {
        w2v_models[j] = train_word2vec(corpus, config);
      } catch (...) {
        rethrow_with_context(config.describe());
      }
    }
  });

  std::vector<BenchmarkRow> rows;
  auto emit = [&](BenchmarkRow row) {
    if (on_row) on_row(row);
    rows.push_back(std::move(row));
  };

  for (const auto& sample : samples) {
    const std::string where = "sample " + std::to_string(sample.sample_id);
    try {
      const SeedSet seeds = make_seed_set(sample.patterns, corpus.vocab);
      const ScoreTable mini =
          score_documents(corpus, dictionary_word_scores(sample.patterns, corpus.vocab));
      emit({sample.sample_id, "mini-dictionary", "dictionary", std::nullopt,
            correlation_or_nan(mini, reference), std::nullopt});

      for (std::size_t i = 0; i < svd_models.size(); ++i) {
        const auto& model = *svd_models[i];
        const ScoreTable scores = score_documents(corpus, spatial_word_scores(model, seeds));
        emit({sample.sample_id, "svd-spatial", "SVD", model.dim(),
              correlation_or_nan(scores, reference), std::nullopt});
      }
      for (std::size_t i = 0; i < w2v_models.size(); ++i) {
        const auto& model = *w2v_models[i];
        const std::string algorithm(to_string(model.config.algorithm));
        const ScoreTable spatial = score_documents(corpus, spatial_word_scores(model, seeds));
        emit({sample.sample_id, "w2v-spatial", algorithm, model.dim(),
              correlation_or_nan(spatial, reference), std::nullopt});
        const ScoreTable prob = score_documents(corpus, probabilistic_word_scores(model, seeds));
        emit({sample.sample_id, "w2v-probabilistic", algorithm, model.dim(),
              correlation_or_nan(prob, reference), seed_perplexity(model, corpus, seeds).perplexity});
      }
    } catch (...) {
      rethrow_with_context(where);
    }
  }
  return rows;
}

void write_benchmark_header(std::ostream& out) {
  out << "sample_id\tfamily\talgorithm\tk\tcorrelation\tperplexity\n";
}

void write_benchmark_row(std::ostream& out, const BenchmarkRow& row) {
  char buf[64];
  out << row.sample_id << '\t' << row.family << '\t' << row.algorithm << '\t';
  if (row.k) {
    out << *row.k;
  } else {
    out << "NA";
  }
  out << '\t';
  if (std::isnan(row.correlation)) {
    out << "NA";
  } else {
    std::snprintf(buf, sizeof buf, "%.10g", row.correlation);
    out << buf;
  }
  out << '\t';
  if (row.perplexity) {
    std::snprintf(buf, sizeof buf, "%.12g", *row.perplexity);
    out << buf;
  } else {
    out << "NA";
  }
  out << '\n';
}

}  // namespace polarscale
