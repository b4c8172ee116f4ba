#include "pacs/signals.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "pacs/errors.hpp"

namespace pacs {

Partition::Partition(Index n, std::vector<std::vector<Index>> levels)
    : n_(n), levels_(std::move(levels)), owner_(static_cast<std::size_t>(std::max<Index>(n, 0)), -1) {
  if (n < 1) throw DomainError("partition: N must be positive");
  if (levels_.empty()) throw DomainError("partition: at least one level required");
  for (std::size_t c = 0; c < levels_.size(); ++c) {
    if (levels_[c].empty()) throw DomainError("partition: level " + std::to_string(c) + " is empty");
    for (Index j : levels_[c]) {
      if (j < 0 || j >= n) throw DomainError("partition: index out of range");
      auto& slot = owner_[static_cast<std::size_t>(j)];
      if (slot != -1) throw DomainError("partition: levels overlap at index " + std::to_string(j));
      slot = static_cast<Index>(c);
    }
  }
  for (Index j = 0; j < n; ++j) {
    if (owner_[static_cast<std::size_t>(j)] == -1) {
      throw DomainError("partition: index " + std::to_string(j) + " not covered");
    }
  }
}

Partition interleaved_partition(Index n, Index num_levels) {
  if (num_levels < 1 || n % num_levels != 0) {
    throw DomainError("interleaved partition requires C to divide N");
  }
  std::vector<std::vector<Index>> levels(static_cast<std::size_t>(num_levels));
  for (Index j = 0; j < n; ++j) levels[static_cast<std::size_t>(j % num_levels)].push_back(j);
  return Partition(n, std::move(levels));
}

Partition contiguous_partition(Index n, Index num_levels) {
  if (num_levels < 1 || num_levels > n) throw DomainError("contiguous partition requires 1 <= C <= N");
  std::vector<std::vector<Index>> levels(static_cast<std::size_t>(num_levels));
  const Index base = n / num_levels;
  const Index extra = n % num_levels;
  Index j = 0;
  for (Index c = 0; c < num_levels; ++c) {
    const Index len = base + (c < extra ? 1 : 0);
    for (Index k = 0; k < len; ++k) levels[static_cast<std::size_t>(c)].push_back(j++);
  }
  return Partition(n, std::move(levels));
}

Partition trivial_partition(Index n) { return contiguous_partition(n, 1); }

LevelScheme::LevelScheme(Partition p, std::vector<Index> s)
    : partition(std::move(p)), local_sparsities(std::move(s)) {
  if (static_cast<Index>(local_sparsities.size()) != partition.num_levels()) {
    throw DomainError("level scheme: one local sparsity per level required");
  }
  for (Index c = 0; c < partition.num_levels(); ++c) {
    const Index sc = local_sparsities[static_cast<std::size_t>(c)];
    if (sc < 0 || sc > static_cast<Index>(partition.level(c).size())) {
      throw DomainError("level scheme: s_c must lie in [0, |I_c|]");
    }
  }
}

Index LevelScheme::total_sparsity() const {
  return std::accumulate(local_sparsities.begin(), local_sparsities.end(), Index{0});
}

Index LevelScheme::max_local_sparsity() const {
  return *std::max_element(local_sparsities.begin(), local_sparsities.end());
}

Index ClusteredModel::band_width() const {
  return static_cast<Index>(std::llround(lambda * static_cast<Real>(s)));
}

void SignalSpec::validate() const {
  if (n < 1) throw DomainError("signal: N must be positive");
  std::visit(
      [this](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SparseModel>) {
          if (m.s < 1 || m.s > n) throw DomainError("sparse model requires 1 <= s <= N");
        } else if constexpr (std::is_same_v<T, LevelsModel>) {
          if (m.scheme.partition.size() != n) throw DomainError("levels model: partition length differs from N");
        } else {
          if (m.s < 1 || m.lambda < 1.0) throw DomainError("clustered model requires s >= 1, lambda >= 1");
          const Index width = m.band_width();
          if (width < m.s) throw DomainError("clustered model: band narrower than s");
          // The band is contiguous; it never wraps around the end.
          if (m.start < 0 || m.start + width > n) throw DomainError("clustered model: band exceeds signal length");
        }
      },
      model);
}

CVec gen_signal(const SignalSpec& spec, Generator& gen) {
  spec.validate();
  CVec x = CVec::Zero(spec.n);
  std::vector<Index> supp;
  std::visit(
      [&](const auto& m) {
        using T = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<T, SparseModel>) {
          supp = subset_without_replacement(gen, spec.n, m.s);
        } else if constexpr (std::is_same_v<T, LevelsModel>) {
          const auto& part = m.scheme.partition;
          for (Index c = 0; c < part.num_levels(); ++c) {
            const auto& level = part.level(c);
            const auto picks = subset_without_replacement(
                gen, static_cast<Index>(level.size()), m.scheme.local_sparsities[static_cast<std::size_t>(c)]);
            for (Index k : picks) supp.push_back(level[static_cast<std::size_t>(k)]);
          }
        } else {
          for (Index k : subset_without_replacement(gen, m.band_width(), m.s)) supp.push_back(m.start + k);
        }
      },
      spec.model);
  const CVec values = unit_circle(gen, static_cast<Index>(supp.size()));
  for (std::size_t k = 0; k < supp.size(); ++k) x(supp[k]) = values(static_cast<Index>(k));
  return x;
}

std::vector<Index> support(const CVec& x) {
  std::vector<Index> out;
  for (Index j = 0; j < x.size(); ++j)
    if (x(j) != Complex(0.0, 0.0)) out.push_back(j);
  return out;
}

namespace {

// Sum of magnitudes outside the `keep` largest entries among `indices`.
Real tail_mass(const CVec& x, std::vector<Index> indices, Index keep) {
  std::stable_sort(indices.begin(), indices.end(),
                   [&x](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  Real tail = 0.0;
  for (std::size_t k = static_cast<std::size_t>(std::max<Index>(keep, 0)); k < indices.size(); ++k) {
    tail += std::abs(x(indices[k]));
  }
  return tail;
}

}  // namespace

std::vector<Index> largest_entries(const CVec& x, Index s) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  std::stable_sort(idx.begin(), idx.end(), [&x](Index a, Index b) { return std::abs(x(a)) > std::abs(x(b)); });
  idx.resize(static_cast<std::size_t>(std::clamp<Index>(s, 0, x.size())));
  std::sort(idx.begin(), idx.end());
  return idx;
}

Real best_approx_error(const CVec& x, Index s) {
  std::vector<Index> idx(static_cast<std::size_t>(x.size()));
  std::iota(idx.begin(), idx.end(), Index{0});
  return tail_mass(x, std::move(idx), s);
}

Real best_approx_error(const CVec& x, const LevelScheme& levels) {
  if (levels.partition.size() != x.size()) throw DomainError("best_approx_error: partition length differs");
  Real total = 0.0;
  for (Index c = 0; c < levels.partition.num_levels(); ++c) {
    total += tail_mass(x, levels.partition.level(c), levels.local_sparsities[static_cast<std::size_t>(c)]);
  }
  return total;
}

std::vector<Index> level_counts(const CVec& x, const Partition& partition) {
  if (partition.size() != x.size()) throw DomainError("level_counts: partition length differs");
  std::vector<Index> counts(static_cast<std::size_t>(partition.num_levels()), 0);
  for (Index j : support(x)) ++counts[static_cast<std::size_t>(partition.level_of(j))];
  return counts;
}

bool equidistribution_check(const CVec& x, const Partition& partition, Index s, Real lambda) {
  const Real budget = lambda * static_cast<Real>(s) / static_cast<Real>(partition.num_levels());
  for (Index count : level_counts(x, partition)) {
    if (static_cast<Real>(count) > budget) return false;
  }
  return true;
}

}  // namespace pacs
