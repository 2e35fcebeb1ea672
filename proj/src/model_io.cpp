#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include "polarscale/embedding.hpp"
#include "polarscale/errors.hpp"

namespace polarscale {

namespace {

constexpr std::array<char, 8> kMagic = {'L', 'S', 'S', 'W', '2', 'V', '1', '\0'};
constexpr std::uint64_t kMaxTermBytes = 1 << 20;

template <typename U>
void put(std::ostream& out, U value) {
  unsigned char bytes[sizeof(U)];
  for (std::size_t i = 0; i < sizeof(U); ++i) bytes[i] = static_cast<unsigned char>(value >> (8 * i));
  out.write(reinterpret_cast<const char*>(bytes), sizeof bytes);
}

template <typename U>
U get(std::istream& in) {
  unsigned char bytes[sizeof(U)];
  if (!in.read(reinterpret_cast<char*>(bytes), sizeof bytes)) {
    throw DataError("model file truncated");
  }
  U value = 0;
  for (std::size_t i = 0; i < sizeof(U); ++i) value |= static_cast<U>(bytes[i]) << (8 * i);
  return value;
}

void put_matrix(std::ostream& out, const Matrix& m) {
  for (float v : m.values()) put<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
}

Matrix get_matrix(std::istream& in, std::size_t rows, std::size_t cols) {
  Matrix m(rows, cols);
  for (float& v : m.values()) v = std::bit_cast<float>(get<std::uint32_t>(in));
  if (!m.all_finite()) throw DataError("model file contains non-finite values");
  return m;
}

}  // namespace

void write_model(std::ostream& out, const EmbeddingModel& model) {
  out.write(kMagic.data(), kMagic.size());
  put<std::uint64_t>(out, model.vocab.size());
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.dim()));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.algorithm));
  put<std::uint32_t>(out, static_cast<std::uint32_t>(model.config.window));
  put<std::uint64_t>(out, model.config.seed);
  for (TermId i = 0; i < model.vocab.size(); ++i) {
    const auto& term = model.vocab.term(i);
    put<std::uint32_t>(out, static_cast<std::uint32_t>(term.size()));
    out.write(term.data(), static_cast<std::streamsize>(term.size()));
    put<std::uint64_t>(out, model.vocab.frequency(i));
  }
  put_matrix(out, model.input);
  if (model.config.algorithm != Algorithm::SVD) put_matrix(out, *model.output);
  if (!out) throw DataError("failed writing model");
}

EmbeddingModel read_model(std::istream& in) {
  std::array<char, 8> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic) {
    throw DataError("not a model file (bad magic bytes)");
  }
  const auto n_terms = get<std::uint64_t>(in);
  const auto dim = get<std::uint32_t>(in);
  const auto tag = get<std::uint32_t>(in);
  if (tag > static_cast<std::uint32_t>(Algorithm::SVD)) {
    throw DataError("model file has unknown algorithm tag " + std::to_string(tag));
  }
  W2VConfig config;
  config.algorithm = static_cast<Algorithm>(tag);
  config.dim = dim;
  config.window = get<std::uint32_t>(in);
  config.seed = get<std::uint64_t>(in);
  if (dim == 0 || n_terms == 0) throw DataError("model file has an empty shape");

  std::vector<std::pair<std::string, std::uint64_t>> counts;
  std::uint64_t min_freq = UINT64_MAX;
  for (std::uint64_t i = 0; i < n_terms; ++i) {
    const auto len = get<std::uint32_t>(in);
    if (len > kMaxTermBytes) throw DataError("model file has an implausible term length");
    std::string term(len, '\0');
    if (!in.read(term.data(), len)) throw DataError("model file truncated");
    const auto freq = get<std::uint64_t>(in);
    min_freq = std::min(min_freq, freq);
    counts.emplace_back(std::move(term), freq);
  }
  Vocabulary vocab(counts, std::max<std::uint64_t>(1, min_freq));
  for (TermId i = 0; i < vocab.size(); ++i) {
    if (vocab.term(i) != counts[i].first) {
      throw DataError("model vocabulary is not in canonical order");
    }
  }
  EmbeddingModel model{std::move(vocab), config, get_matrix(in, n_terms, dim), std::nullopt};
  if (config.algorithm != Algorithm::SVD) model.output = get_matrix(in, n_terms, dim);
  return model;
}

void save_model(const std::filesystem::path& path, const EmbeddingModel& model) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file '" + path.string() + "'");
  write_model(out, model);
}

EmbeddingModel load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot open model file '" + path.string() + "'");
  return read_model(in);
}

void write_text_vectors(std::ostream& out, const EmbeddingModel& model) {
  char buf[32];
  for (TermId i = 0; i < model.vocab.size(); ++i) {
    out << model.vocab.term(i);
    for (float v : model.input.row(i)) {
      std::snprintf(buf, sizeof buf, " %.6g", v);
      out << buf;
    }
    out << '\n';
  }
}

}  // namespace polarscale
