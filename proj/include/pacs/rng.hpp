#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

#include "pacs/numerics.hpp"

namespace pacs {

class Generator;

/// Splittable seed descriptor. A stream is identified by a master seed and a
/// path of integers; substreams extend the path. Identical (seed, path) pairs
/// always reproduce the same draws, so experiment cells can be evaluated in
/// any order or on any worker.
class RngStream {
 public:
  explicit RngStream(std::uint64_t master_seed) : master_seed_(master_seed) {}
  RngStream(std::uint64_t master_seed, std::vector<std::uint64_t> path)
      : master_seed_(master_seed), path_(std::move(path)) {}

  RngStream substream(std::initializer_list<std::uint64_t> indices) const;
  RngStream substream(std::uint64_t index) const { return substream({index}); }

  /// A fresh generator positioned at the start of this stream.
  Generator generator() const;

  std::uint64_t master_seed() const { return master_seed_; }
  const std::vector<std::uint64_t>& path() const { return path_; }

  /// 64-bit key obtained by hashing the seed and path.
  std::uint64_t key() const;

 private:
  std::uint64_t master_seed_;
  std::vector<std::uint64_t> path_;
};

/// Draw state for one stream. Built on mt19937_64, whose output sequence is
/// fixed by the standard; all derived distributions are implemented here so
/// results do not depend on the standard library vendor.
class Generator {
 public:
  explicit Generator(std::uint64_t key) : engine_(key) {}

  std::uint64_t next_u64() { return engine_(); }
  /// Uniform on [0, 1) with 53 random bits.
  Real uniform();
  /// Uniform integer in [0, n).
  std::uint64_t uniform_index(std::uint64_t n);
  /// Standard normal (Box-Muller).
  Real normal();

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  Real spare_ = 0.0;
};

/// m x n matrix of i.i.d. real N(0, 1) entries.
RMat gaussian(Generator& gen, Index rows, Index cols);

/// k values uniformly distributed on the complex unit circle.
CVec unit_circle(Generator& gen, Index k);

/// k distinct indices drawn uniformly without replacement from {0, ..., n-1},
/// in draw order. Throws DomainError when k > n.
std::vector<Index> subset_without_replacement(Generator& gen, Index n, Index k);

/// SplitMix64 finaliser; exposed for seed derivation in tests and tools.
std::uint64_t mix64(std::uint64_t x);

}  // namespace pacs
