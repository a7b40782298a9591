#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "densigraph/random.hpp"

namespace densigraph {

/// Raised when parameters or arguments violate an operation's precondition.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Parameters of the interacting-chain model on an Erdos-Renyi environment.
///
/// Admissible parameters satisfy 0 < mu < lambda < 1 and 0 < p < 1. The
/// relaxed mode admits the closed corners 0 <= mu <= lambda <= 1 and
/// 0 <= p <= 1, which are useful as degenerate test fixtures.
struct ModelParams {
  double mu = 0.25;
  double lambda = 0.5;
  double p = 0.5;
  double r_plus = 0.5;
  std::size_t n = 500;

  double beta() const { return lambda > 0.0 ? mu / lambda : 0.0; }
  double r_minus() const { return 1.0 - r_plus; }

  bool admissible() const;
  bool valid_relaxed() const;
  void require_admissible() const;
  void require_relaxed() const;
};

/// Canonical prefix partition: sites [0, size_plus) are excitatory.
class Partition {
 public:
  Partition(std::size_t n, std::size_t size_plus);

  std::size_t n() const { return n_; }
  std::size_t size_plus() const { return size_plus_; }
  std::size_t size_minus() const { return n_ - size_plus_; }
  bool excitatory(std::size_t j) const { return j < size_plus_; }
  double r_plus_n() const { return static_cast<double>(size_plus_) / static_cast<double>(n_); }
  double r_minus_n() const { return 1.0 - r_plus_n(); }

 private:
  std::size_t n_;
  std::size_t size_plus_;
};

/// |P+| = ceil(r_plus * n).
Partition build_partition(std::size_t n, double r_plus);

/// Fixed-length packed bit vector; padding bits of the last word stay zero.
class BitVector {
 public:
  BitVector() = default;
  explicit BitVector(std::size_t size, bool value = false);

  std::size_t size() const { return size_; }
  bool operator[](std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1U; }
  void set(std::size_t i, bool value);
  std::size_t count() const;

  std::span<const std::uint64_t> words() const { return words_; }
  std::span<std::uint64_t> words() { return words_; }

  static BitVector from_bools(const std::vector<int>& values);
  friend bool operator==(const BitVector&, const BitVector&) = default;

 private:
  std::size_t size_ = 0;
  std::vector<std::uint64_t> words_;
};

inline std::size_t words_for(std::size_t bits) { return (bits + 63) / 64; }

/// Realized directed graph: edge(i, j) means j -> i is active.
/// Rows are packed bit vectors; the signed rescaled matrix is never stored.
class Environment {
 public:
  Environment(Partition partition, double p = 0.0, Seed seed = 0);

  std::size_t n() const { return partition_.n(); }
  const Partition& partition() const { return partition_; }
  double p() const { return p_; }
  Seed seed() const { return seed_; }

  bool edge(std::size_t i, std::size_t j) const {
    return (bits_[i * stride_ + (j >> 6)] >> (j & 63)) & 1U;
  }
  void set_edge(std::size_t i, std::size_t j, bool value);

  std::span<const std::uint64_t> row(std::size_t i) const {
    return {bits_.data() + i * stride_, stride_};
  }
  std::span<const std::uint64_t> plus_mask() const { return plus_mask_; }
  std::span<const std::uint64_t> minus_mask() const { return minus_mask_; }
  std::size_t edge_count() const;

  friend bool operator==(const Environment& a, const Environment& b) {
    return a.partition_.n() == b.partition_.n() &&
           a.partition_.size_plus() == b.partition_.size_plus() && a.bits_ == b.bits_;
  }

 private:
  Partition partition_;
  double p_;
  Seed seed_;
  std::size_t stride_;
  std::vector<std::uint64_t> bits_;
  std::vector<std::uint64_t> plus_mask_;
  std::vector<std::uint64_t> minus_mask_;
};

/// theta(i, j) ~ Bernoulli(p) i.i.d., drawn in row-major order from the
/// environment stream of `seed`.
Environment sample_environment(const ModelParams& params, Seed seed);

/// Probability that site i fires given the previous configuration x.
double transition_probability(const Environment& env, const ModelParams& params,
                              const BitVector& x, std::size_t i);

/// N x T binary observation matrix, stored as T packed columns.
/// Times are 0-based here (column t holds time t + 1).
class Trajectory {
 public:
  Trajectory() = default;
  explicit Trajectory(std::size_t n) : n_(n) {}

  std::size_t n() const { return n_; }
  std::size_t t_len() const { return columns_.size(); }
  bool at(std::size_t i, std::size_t t) const { return columns_[t][i]; }
  const BitVector& column(std::size_t t) const { return columns_[t]; }

  void push_back(BitVector column);
  Trajectory prefix(std::size_t t_len) const;

  /// Builds from rows (one vector per site, each of length T).
  static Trajectory from_rows(const std::vector<std::vector<int>>& rows);

  friend bool operator==(const Trajectory&, const Trajectory&) = default;

 private:
  std::size_t n_ = 0;
  std::vector<BitVector> columns_;
};

}  // namespace densigraph
