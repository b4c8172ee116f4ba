#pragma once

#include <variant>
#include <vector>

#include "pacs/numerics.hpp"
#include "pacs/rng.hpp"

namespace pacs {

/// Partition {I_1, ..., I_C} of {0, ..., N-1} into nonempty levels.
/// Indices are zero-based throughout the library.
class Partition {
 public:
  Partition(Index n, std::vector<std::vector<Index>> levels);

  Index size() const { return n_; }
  Index num_levels() const { return static_cast<Index>(levels_.size()); }
  const std::vector<Index>& level(Index c) const { return levels_[static_cast<std::size_t>(c)]; }
  const std::vector<std::vector<Index>>& levels() const { return levels_; }
  /// Level containing coordinate j.
  Index level_of(Index j) const { return owner_[static_cast<std::size_t>(j)]; }

  bool operator==(const Partition& other) const { return n_ == other.n_ && levels_ == other.levels_; }

 private:
  Index n_;
  std::vector<std::vector<Index>> levels_;
  std::vector<Index> owner_;
};

/// I_c = (c + C Z) cap {0, ..., N-1}. Requires C | N.
Partition interleaved_partition(Index n, Index num_levels);

/// Consecutive blocks; when C does not divide N the first N mod C blocks get
/// one extra index.
Partition contiguous_partition(Index n, Index num_levels);

/// Single level covering everything.
Partition trivial_partition(Index n);

struct LevelScheme {
  Partition partition;
  std::vector<Index> local_sparsities;

  LevelScheme(Partition p, std::vector<Index> s);
  Index total_sparsity() const;
  Index max_local_sparsity() const;
};

struct SparseModel {
  Index s;
};
struct LevelsModel {
  LevelScheme scheme;
};
/// Support confined to the band {start, ..., start + width - 1} with
/// width = round(lambda * s).
struct ClusteredModel {
  Index s;
  Real lambda;
  Index start;
  Index band_width() const;
};

struct SignalSpec {
  std::variant<SparseModel, LevelsModel, ClusteredModel> model;
  Index n;

  /// Throws DomainError if the model cannot be realised at length n.
  void validate() const;
};

/// Random signal: support drawn uniformly without replacement in a manner
/// consistent with the model, nonzeros uniform on the unit circle.
CVec gen_signal(const SignalSpec& spec, Generator& gen);

/// Indices of nonzero entries, ascending.
std::vector<Index> support(const CVec& x);

/// Indices of the s largest-magnitude entries of x (ties to the lowest index),
/// returned in ascending order.
std::vector<Index> largest_entries(const CVec& x, Index s);

/// sigma_s(x)_1: l1 error of the best s-term approximation.
Real best_approx_error(const CVec& x, Index s);

/// sigma_{S,I}(x)_1: l1 error of the best approximation that is sparse in
/// levels.
Real best_approx_error(const CVec& x, const LevelScheme& levels);

/// True iff every per-level support count of x is at most lambda * s / C.
bool equidistribution_check(const CVec& x, const Partition& partition, Index s, Real lambda);

/// Per-level support counts of x.
std::vector<Index> level_counts(const CVec& x, const Partition& partition);

}  // namespace pacs
