#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "pacs/errors.hpp"
#include "pacs/signals.hpp"

using namespace pacs;

namespace {

// Minimum l1 residual over every support of size s.
Real brute_sigma(const CVec& x, Index s) {
  const Index n = x.size();
  Real best = std::numeric_limits<Real>::infinity();
  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) != s) continue;
    Real r = 0;
    for (Index j = 0; j < n; ++j)
      if (!(mask & (1u << j))) r += std::abs(x(j));
    best = std::min(best, r);
  }
  return best;
}

CVec with_support(Index n, const std::vector<Index>& supp) {
  CVec x = CVec::Zero(n);
  for (Index j : supp) x(j) = 1.0;
  return x;
}

}  // namespace

TEST(Partition, InterleavedEightTwo) {
  const Partition p = interleaved_partition(8, 2);
  EXPECT_EQ(p.level(0), (std::vector<Index>{0, 2, 4, 6}));
  EXPECT_EQ(p.level(1), (std::vector<Index>{1, 3, 5, 7}));
  EXPECT_EQ(p.level_of(5), 1);
}

TEST(Partition, InterleavedRequiresDivisibility) {
  EXPECT_THROW(interleaved_partition(10, 3), DomainError);
}

TEST(Partition, ConstructorRejectsBadCovers) {
  EXPECT_THROW(Partition(4, {{0, 1}, {1, 2, 3}}), DomainError);
  EXPECT_THROW(Partition(4, {{0, 1}, {2}}), DomainError);
  EXPECT_THROW(Partition(4, {{0, 1, 2, 3}, {}}), DomainError);
  EXPECT_THROW(Partition(3, {{0, 1, 3}}), DomainError);
}

TEST(Partition, ContiguousCoversEverything) {
  for (Index n : {7, 10, 16})
    for (Index c : {1, 2, 3}) {
      const Partition p = contiguous_partition(n, c);
      std::vector<Index> all;
      for (const auto& l : p.levels()) all.insert(all.end(), l.begin(), l.end());
      std::vector<Index> expect(static_cast<std::size_t>(n));
      std::iota(expect.begin(), expect.end(), 0);
      EXPECT_EQ(all, expect);
    }
}

TEST(Signals, FullSupportSparse) {
  Generator g(RngStream(1).key());
  const CVec x = gen_signal({SparseModel{12}, 12}, g);
  for (Index j = 0; j < 12; ++j) EXPECT_NEAR(std::abs(x(j)), 1.0, 1e-15);
}

TEST(Signals, ZeroLevelSparsities) {
  Generator g(RngStream(2).key());
  const LevelScheme scheme(interleaved_partition(8, 2), {0, 0});
  EXPECT_EQ(gen_signal({LevelsModel{scheme}, 8}, g).norm(), 0.0);
}

TEST(Signals, LevelsRespectLocalSparsity) {
  Generator g(RngStream(3).key());
  const LevelScheme scheme(contiguous_partition(12, 3), {1, 3, 0});
  for (int t = 0; t < 50; ++t) {
    const CVec x = gen_signal({LevelsModel{scheme}, 12}, g);
    EXPECT_EQ(level_counts(x, scheme.partition), (std::vector<Index>{1, 3, 0}));
  }
}

TEST(Signals, InfeasibleSpecsThrow) {
  Generator g(RngStream(4).key());
  EXPECT_THROW(LevelScheme(contiguous_partition(4, 2), {3, 0}), DomainError);
  EXPECT_THROW(gen_signal({SparseModel{5}, 4}, g), DomainError);
  EXPECT_THROW(gen_signal({SparseModel{0}, 4}, g), DomainError);
  EXPECT_THROW(gen_signal({ClusteredModel{4, 2.0, 10}, 16}, g), DomainError);
}

TEST(Signals, ClusteredStaysInBandAndEquidistributed) {
  const Partition p = interleaved_partition(16, 2);
  Generator g(RngStream(5).key());
  for (int t = 0; t < 100; ++t) {
    const CVec x = gen_signal({ClusteredModel{4, 2.0, 0}, 16}, g);
    const auto supp = support(x);
    ASSERT_EQ(supp.size(), 4u);
    for (Index j : supp) EXPECT_LT(j, 8);
    for (Index count : level_counts(x, p)) EXPECT_LE(count, 4);
    EXPECT_TRUE(equidistribution_check(x, p, 4, 2.0));
  }
}

TEST(Signals, SupportUniformOverPositions) {
  const Index n = 20, s = 5, draws = 1000;
  Generator g(RngStream(6).key());
  std::vector<int> hits(n, 0);
  for (Index t = 0; t < draws; ++t)
    for (Index j : support(gen_signal({SparseModel{s}, n}, g))) ++hits[static_cast<std::size_t>(j)];
  const Real p = Real(s) / Real(n);
  const Real mean = draws * p;
  const Real sd = std::sqrt(draws * p * (1 - p));
  for (int h : hits) EXPECT_LE(std::abs(h - mean), 3.0 * sd + 1e-9);
}

TEST(BestApprox, SparseVectorHasZeroError) {
  CVec x = CVec::Zero(6);
  x(1) = 2.0;
  x(4) = Complex(0, -1);
  EXPECT_EQ(best_approx_error(x, 2), 0.0);
}

TEST(BestApprox, SmallExample) {
  CVec x(4);
  x << 3.0, 0.0, -1.0, 2.0;
  EXPECT_DOUBLE_EQ(best_approx_error(x, 2), 1.0);
  EXPECT_DOUBLE_EQ(brute_sigma(x, 2), 1.0);
}

TEST(BestApprox, LevelsExample) {
  CVec x(4);
  x << 3.0, 1.0, 2.0, 5.0;
  const LevelScheme scheme(Partition(4, {{0, 1}, {2, 3}}), {1, 1});
  EXPECT_DOUBLE_EQ(best_approx_error(x, scheme), 3.0);
  // Per-level enumeration.
  const Real oracle = std::min(std::abs(x(0)), std::abs(x(1))) + std::min(std::abs(x(2)), std::abs(x(3)));
  EXPECT_DOUBLE_EQ(oracle, 3.0);
}

TEST(BestApprox, MatchesEnumerationAndIsMonotone) {
  Generator g(RngStream(7).key());
  for (int rep = 0; rep < 20; ++rep) {
    const Index n = 9;
    CVec x(n);
    for (Index j = 0; j < n; ++j) x(j) = g.uniform() < 0.3 ? Complex(0) : Complex(g.normal(), g.normal());
    Real prev = std::numeric_limits<Real>::infinity();
    for (Index s = 0; s <= n; ++s) {
      const Real e = best_approx_error(x, s);
      EXPECT_NEAR(e, brute_sigma(x, s), 1e-12);
      EXPECT_LE(e, prev);
      prev = e;
    }
    EXPECT_EQ(best_approx_error(x, static_cast<Index>(support(x).size())), 0.0);
  }
}

TEST(BestApprox, TiesBrokenByLowestIndex) {
  CVec x = CVec::Ones(5);
  EXPECT_EQ(largest_entries(x, 2), (std::vector<Index>{0, 1}));
}

TEST(Equidistribution, Examples) {
  const Partition p = interleaved_partition(16, 4);
  EXPECT_TRUE(equidistribution_check(with_support(16, {0, 1, 2, 3}), p, 4, 1.0));
  EXPECT_FALSE(equidistribution_check(with_support(16, {0, 4, 8, 12}), p, 4, 1.0));
}
