#include "densigraph/model.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <sstream>

namespace densigraph {

bool ModelParams::admissible() const {
  return n >= 1 && 0.0 < mu && mu < lambda && lambda < 1.0 && 0.0 < p && p < 1.0 &&
         0.0 < r_plus && r_plus < 1.0;
}

bool ModelParams::valid_relaxed() const {
  return n >= 1 && 0.0 <= mu && mu <= lambda && lambda <= 1.0 && 0.0 <= p && p <= 1.0 &&
         0.0 < r_plus && r_plus < 1.0;
}

namespace {
std::string describe(const ModelParams& params) {
  std::ostringstream os;
  os << "(mu=" << params.mu << ", lambda=" << params.lambda << ", p=" << params.p
     << ", r_plus=" << params.r_plus << ", n=" << params.n << ")";
  return os.str();
}
}  // namespace

void ModelParams::require_admissible() const {
  if (!admissible()) throw InvalidArgument("parameters not admissible: " + describe(*this));
}

void ModelParams::require_relaxed() const {
  if (!valid_relaxed()) throw InvalidArgument("parameters invalid: " + describe(*this));
}

Partition::Partition(std::size_t n, std::size_t size_plus) : n_(n), size_plus_(size_plus) {
  if (n == 0) throw InvalidArgument("partition needs n >= 1");
  if (size_plus > n) throw InvalidArgument("size_plus exceeds n");
}

Partition build_partition(std::size_t n, double r_plus) {
  if (n == 0) throw InvalidArgument("partition needs n >= 1");
  if (!(r_plus > 0.0 && r_plus < 1.0)) throw InvalidArgument("r_plus must lie in (0, 1)");
  // Slack absorbs representation error so that e.g. (2/3) * 3 maps to 2.
  const double scaled = r_plus * static_cast<double>(n);
  const auto size_plus = static_cast<std::size_t>(std::ceil(scaled - 1e-9 * std::max(1.0, scaled)));
  return Partition(n, std::min(size_plus, n));
}

BitVector::BitVector(std::size_t size, bool value) : size_(size), words_(words_for(size), 0) {
  if (value) {
    for (auto& w : words_) w = ~std::uint64_t{0};
    if (size % 64 != 0) words_.back() = (std::uint64_t{1} << (size % 64)) - 1;
  }
}

void BitVector::set(std::size_t i, bool value) {
  const std::uint64_t mask = std::uint64_t{1} << (i & 63);
  if (value)
    words_[i >> 6] |= mask;
  else
    words_[i >> 6] &= ~mask;
}

std::size_t BitVector::count() const {
  std::size_t total = 0;
  for (auto w : words_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

BitVector BitVector::from_bools(const std::vector<int>& values) {
  BitVector out(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) out.set(i, values[i] != 0);
  return out;
}

Environment::Environment(Partition partition, double p, Seed seed)
    : partition_(partition),
      p_(p),
      seed_(seed),
      stride_(words_for(partition.n())),
      bits_(partition.n() * stride_, 0),
      plus_mask_(stride_, 0),
      minus_mask_(stride_, 0) {
  for (std::size_t j = 0; j < partition_.n(); ++j) {
    auto& mask = partition_.excitatory(j) ? plus_mask_ : minus_mask_;
    mask[j >> 6] |= std::uint64_t{1} << (j & 63);
  }
}

void Environment::set_edge(std::size_t i, std::size_t j, bool value) {
  auto& word = bits_[i * stride_ + (j >> 6)];
  const std::uint64_t mask = std::uint64_t{1} << (j & 63);
  word = value ? (word | mask) : (word & ~mask);
}

std::size_t Environment::edge_count() const {
  std::size_t total = 0;
  for (auto w : bits_) total += static_cast<std::size_t>(std::popcount(w));
  return total;
}

Environment sample_environment(const ModelParams& params, Seed seed) {
  params.require_relaxed();
  Environment env(build_partition(params.n, params.r_plus), params.p, seed);
  Stream stream(seed, streams::environment);
  for (std::size_t i = 0; i < params.n; ++i)
    for (std::size_t j = 0; j < params.n; ++j)
      if (stream.bernoulli(params.p)) env.set_edge(i, j, true);
  return env;
}

double transition_probability(const Environment& env, const ModelParams& params,
                              const BitVector& x, std::size_t i) {
  if (x.size() != env.n()) throw InvalidArgument("configuration length differs from N");
  if (i >= env.n()) throw std::out_of_range("site index out of range");
  const auto row = env.row(i);
  const auto xw = x.words();
  const auto plus = env.plus_mask();
  const auto minus = env.minus_mask();
  std::uint64_t active = 0;
  for (std::size_t w = 0; w < row.size(); ++w) {
    active += static_cast<std::uint64_t>(std::popcount(row[w] & xw[w] & plus[w]));
    active += static_cast<std::uint64_t>(std::popcount(row[w] & ~xw[w] & minus[w]));
  }
  return params.mu +
         (1.0 - params.lambda) * (static_cast<double>(active) / static_cast<double>(env.n()));
}

void Trajectory::push_back(BitVector column) {
  if (column.size() != n_) throw InvalidArgument("column length differs from N");
  columns_.push_back(std::move(column));
}

Trajectory Trajectory::prefix(std::size_t t_len) const {
  if (t_len > columns_.size()) throw InvalidArgument("prefix longer than trajectory");
  Trajectory out(n_);
  out.columns_.assign(columns_.begin(), columns_.begin() + static_cast<std::ptrdiff_t>(t_len));
  return out;
}

Trajectory Trajectory::from_rows(const std::vector<std::vector<int>>& rows) {
  if (rows.empty()) throw InvalidArgument("trajectory needs at least one site");
  const std::size_t t_len = rows.front().size();
  Trajectory out(rows.size());
  for (std::size_t t = 0; t < t_len; ++t) {
    BitVector col(rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
      if (rows[i].size() != t_len) throw InvalidArgument("ragged trajectory rows");
      col.set(i, rows[i][t] != 0);
    }
    out.push_back(std::move(col));
  }
  return out;
}

}  // namespace densigraph
