#include "polarscale/svd.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

// y = A x for a dense block x (cols x l).
DenseMatrix multiply(const SentenceTermMatrix& a, const DenseMatrix& x) {
  DenseMatrix y(a.rows(), x.cols);
  for (std::size_t j = 0; j < x.cols; ++j) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      double sum = 0.0;
      for (std::size_t p = a.row_start[r]; p < a.row_start[r + 1]; ++p) sum += a.value[p] * x(a.col[p], j);
      y(r, j) = sum;
    }
  }
  return y;
}

// z = A^T q for a dense block q (rows x l).
DenseMatrix multiply_transposed(const SentenceTermMatrix& a, const DenseMatrix& q) {
  DenseMatrix z(a.cols(), q.cols);
  for (std::size_t j = 0; j < q.cols; ++j) {
    for (std::size_t r = 0; r < a.rows(); ++r) {
      const double qr = q(r, j);
      if (qr == 0.0) continue;
      for (std::size_t p = a.row_start[r]; p < a.row_start[r + 1]; ++p) z(a.col[p], j) += a.value[p] * qr;
    }
  }
  return z;
}

// Thin Q of a Householder QR; rows >= cols. Always orthonormal, including
// for rank-deficient input.
DenseMatrix orthonormal_basis(DenseMatrix a) {
  const std::size_t m = a.rows;
  const std::size_t l = a.cols;
  std::vector<std::vector<double>> reflectors(l);
  for (std::size_t j = 0; j < l; ++j) {
    std::vector<double> v(m - j);
    double norm2 = 0.0;
    for (std::size_t i = j; i < m; ++i) {
      v[i - j] = a(i, j);
      norm2 += v[i - j] * v[i - j];
    }
    const double alpha = v[0] >= 0 ? -std::sqrt(norm2) : std::sqrt(norm2);
    v[0] -= alpha;
    double vnorm = 0.0;
    for (double x : v) vnorm += x * x;
    vnorm = std::sqrt(vnorm);
    if (vnorm == 0.0) {
      std::fill(v.begin(), v.end(), 0.0);
      v[0] = 1.0;
    } else {
      for (double& x : v) x /= vnorm;
    }
    for (std::size_t c = j; c < l; ++c) {
      double proj = 0.0;
      for (std::size_t i = j; i < m; ++i) proj += v[i - j] * a(i, c);
      for (std::size_t i = j; i < m; ++i) a(i, c) -= 2.0 * proj * v[i - j];
    }
    reflectors[j] = std::move(v);
  }
  DenseMatrix q(m, l);
  for (std::size_t j = 0; j < l; ++j) q(j, j) = 1.0;
  for (std::size_t jj = l; jj-- > 0;) {
    const auto& v = reflectors[jj];
    for (std::size_t c = 0; c < l; ++c) {
      double proj = 0.0;
      for (std::size_t i = jj; i < m; ++i) proj += v[i - jj] * q(i, c);
      if (proj == 0.0) continue;
      for (std::size_t i = jj; i < m; ++i) q(i, c) -= 2.0 * proj * v[i - jj];
    }
  }
  return q;
}

// One-sided Jacobi: rotates the columns of g until they are mutually
// orthogonal, accumulating the rotations in `rotations` (l x l).
void one_sided_jacobi(DenseMatrix& g, DenseMatrix& rotations) {
  const std::size_t n = g.rows;
  const std::size_t l = g.cols;
  rotations = DenseMatrix(l, l);
  for (std::size_t j = 0; j < l; ++j) rotations(j, j) = 1.0;
  constexpr double kTolerance = 1e-15;
  for (int sweep = 0; sweep < 80; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < l; ++p) {
      for (std::size_t q = p + 1; q < l; ++q) {
        double alpha = 0.0, beta = 0.0, gamma = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
          alpha += g(i, p) * g(i, p);
          beta += g(i, q) * g(i, q);
          gamma += g(i, p) * g(i, q);
        }
        if (gamma == 0.0 || std::abs(gamma) <= kTolerance * std::sqrt(alpha * beta)) continue;
        rotated = true;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = std::copysign(1.0, zeta) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        auto rotate = [&](DenseMatrix& m, std::size_t rows) {
          for (std::size_t i = 0; i < rows; ++i) {
            const double x = m(i, p);
            const double y = m(i, q);
            m(i, p) = c * x - s * y;
            m(i, q) = s * x + c * y;
          }
        };
        rotate(g, n);
        rotate(rotations, l);
      }
    }
    if (!rotated) break;
  }
}

}  // namespace

void SentenceTermMatrix::add_row(std::vector<std::pair<TermId, double>> entries) {
  std::sort(entries.begin(), entries.end());
  for (std::size_t i = 0; i < entries.size(); ++i) {
    const auto [c, v] = entries[i];
    if (c >= n_cols) throw DataError("sentence-term entry outside the vocabulary");
    if (!(v > 0.0)) throw DataError("sentence-term entries must be positive");
    if (i > 0 && entries[i - 1].first == c) throw DataError("duplicate column in sentence-term row");
    col.push_back(c);
    value.push_back(v);
  }
  row_start.push_back(col.size());
}

SentenceTermMatrix build_sentence_term_matrix(const Corpus& corpus, TermWeighting weighting) {
  if (corpus.vocab.empty()) throw DataError("empty vocabulary");
  SentenceTermMatrix m;
  m.n_cols = corpus.vocab.size();
  std::vector<std::uint32_t> counts(corpus.vocab.size(), 0);
  std::vector<TermId> touched;
  for (const auto& doc : corpus.documents) {
    for (const auto& sentence : doc.sentences) {
      touched.clear();
      for (TermId id : sentence) {
        if (counts[id]++ == 0) touched.push_back(id);
      }
      if (touched.empty()) continue;
      std::vector<std::pair<TermId, double>> row;
      row.reserve(touched.size());
      for (TermId id : touched) {
        const double n = counts[id];
        row.emplace_back(id, weighting == TermWeighting::Count ? n : 1.0 + std::log(n));
        counts[id] = 0;
      }
      m.add_row(std::move(row));
    }
  }
  if (m.rows() == 0) throw DataError("no sentences contain vocabulary terms");
  return m;
}

DenseMatrix SvdResult::term_vectors() const {
  DenseMatrix out = right;
  for (std::size_t j = 0; j < out.cols; ++j) {
    for (std::size_t i = 0; i < out.rows; ++i) out(i, j) *= singular_values[j];
  }
  return out;
}

SvdResult truncated_svd(const SentenceTermMatrix& matrix, std::size_t k, std::uint64_t seed,
                        const SvdOptions& options) {
  const std::size_t m = matrix.rows();
  const std::size_t n = matrix.cols();
  const std::size_t bound = std::min(m, n);
  if (k < 1 || k > bound) {
    throw ConfigError("SVD rank K=" + std::to_string(k) + " must lie in [1, " +
                      std::to_string(bound) + "] for a " + std::to_string(m) + "x" +
                      std::to_string(n) + " matrix");
  }
  const std::size_t l = std::min(k + options.oversampling, bound);

  Rng rng(seed);
  DenseMatrix omega(n, l);
  for (double& x : omega.data) x = rng.normal();

  DenseMatrix q = orthonormal_basis(multiply(matrix, omega));
  for (std::size_t it = 0; it < options.power_iterations; ++it) {
    const DenseMatrix z = orthonormal_basis(multiply_transposed(matrix, q));
    q = orthonormal_basis(multiply(matrix, z));
  }

  // g = B^T with B = Q^T A; after rotation g = V_b * Sigma and B = J Sigma V_b^T.
  DenseMatrix g = multiply_transposed(matrix, q);
  DenseMatrix rotations;
  one_sided_jacobi(g, rotations);

  std::vector<double> sigma(l);
  for (std::size_t j = 0; j < l; ++j) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += g(i, j) * g(i, j);
    sigma[j] = std::sqrt(s);
  }
  std::vector<std::size_t> order(l);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sigma[a] > sigma[b]; });

  SvdResult result{std::vector<double>(k), DenseMatrix(m, k), DenseMatrix(n, k)};
  for (std::size_t out = 0; out < k; ++out) {
    const std::size_t j = order[out];
    const double s = sigma[j];
    result.singular_values[out] = s;
    std::size_t argmax = 0;
    for (std::size_t i = 0; i < n; ++i) {
      result.right(i, out) = s > 0.0 ? g(i, j) / s : 0.0;
      if (std::abs(result.right(i, out)) > std::abs(result.right(argmax, out))) argmax = i;
    }
    for (std::size_t i = 0; i < m; ++i) {
      double u = 0.0;
      for (std::size_t r = 0; r < l; ++r) u += q(i, r) * rotations(r, j);
      result.left(i, out) = u;
    }
    if (result.right(argmax, out) < 0.0) {
      for (std::size_t i = 0; i < n; ++i) result.right(i, out) = -result.right(i, out);
      for (std::size_t i = 0; i < m; ++i) result.left(i, out) = -result.left(i, out);
    }
  }
  return result;
}

EmbeddingModel train_svd(const Corpus& corpus, std::size_t k, std::uint64_t seed,
                         TermWeighting weighting) {
  const SvdResult svd = truncated_svd(build_sentence_term_matrix(corpus, weighting), k, seed);
  const DenseMatrix vectors = svd.term_vectors();
  W2VConfig config;
  config.algorithm = Algorithm::SVD;
  config.dim = k;
  config.window = 0;
  config.seed = seed;
  EmbeddingModel model{corpus.vocab, config, Matrix(corpus.vocab.size(), k), std::nullopt};
  for (std::size_t i = 0; i < vectors.rows; ++i) {
    for (std::size_t j = 0; j < k; ++j) model.input(i, j) = static_cast<float>(vectors(i, j));
  }
  return model;
}

}  // namespace polarscale
