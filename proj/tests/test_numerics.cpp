#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "pacs/errors.hpp"
#include "pacs/numerics.hpp"
#include "pacs/rng.hpp"

using namespace pacs;

namespace {

CMat dense_dft(Index n) {
  CMat f(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k)
      f(j, k) = std::polar(1.0 / std::sqrt(Real(n)), -2.0 * kPi * Real(j * k) / Real(n));
  return f;
}

CMat dense_circulant(const CVec& h) {
  const Index n = h.size();
  CMat m(n, n);
  for (Index j = 0; j < n; ++j)
    for (Index k = 0; k < n; ++k) m(j, k) = h((j - k + n) % n);
  return m;
}

CVec random_cvec(Generator& g, Index n) {
  CVec v(n);
  for (Index i = 0; i < n; ++i) v(i) = Complex(g.normal(), g.normal());
  return v;
}

}  // namespace

TEST(Dft, LengthOneIsIdentity) {
  CVec v(1);
  v << 5.0;
  EXPECT_NEAR(std::abs(unitary_dft(v)(0) - Complex(5.0)), 0.0, 1e-15);
}

TEST(Dft, ConstantLengthTwo) {
  CVec v(2);
  v << 1.0, 1.0;
  const CVec out = unitary_dft(v);
  EXPECT_NEAR(std::abs(out(0) - std::sqrt(2.0)), 0.0, 1e-14);
  EXPECT_NEAR(std::abs(out(1)), 0.0, 1e-14);
}

TEST(Dft, FirstUnitVectorLengthFour) {
  CVec v = CVec::Zero(4);
  v(0) = 1.0;
  const CVec out = unitary_dft(v);
  const CVec ref = dense_dft(4) * v;
  for (Index k = 0; k < 4; ++k) {
    EXPECT_NEAR(std::abs(out(k)), 0.5, 1e-14);
    EXPECT_NEAR(std::abs(out(k) - ref(k)), 0.0, 1e-14);
  }
  EXPECT_NEAR(out.norm(), 1.0, 1e-14);
}

TEST(Dft, MatchesDenseMatrixForAllSmallLengths) {
  Generator g(RngStream(11).key());
  for (Index n = 1; n <= 20; ++n) {
    const CVec v = random_cvec(g, n);
    const CVec ref = dense_dft(n) * v;
    EXPECT_LT((unitary_dft(v) - ref).norm(), 1e-12) << "n=" << n;
    EXPECT_LT((dft_matrix(n) - dense_dft(n)).norm(), 1e-12) << "n=" << n;
  }
}

TEST(Dft, UnitaryAndInvertible) {
  Generator g(RngStream(12).key());
  for (Index n : {3, 8, 12, 64, 128, 100}) {
    const CVec v = random_cvec(g, n);
    const CVec f = unitary_dft(v);
    EXPECT_NEAR(f.norm(), v.norm(), 1e-10);
    EXPECT_LT((inverse_unitary_dft(f) - v).norm(), 1e-12 * std::max(1.0, v.norm()));
  }
}

TEST(Circulant, DeltaFilterIsIdentity) {
  Generator g(RngStream(13).key());
  const CVec v = random_cvec(g, 7);
  CVec h = CVec::Zero(7);
  h(0) = 1.0;
  EXPECT_LT((circulant_apply(h, v) - v).norm(), 1e-12);
}

TEST(Circulant, ShiftByOne) {
  CVec h = CVec::Zero(3);
  h(1) = 1.0;
  CVec v(3);
  v << 1.0, 2.0, 3.0;
  CVec expected(3);
  expected << 3.0, 1.0, 2.0;
  EXPECT_LT((circulant_apply(h, v) - expected).norm(), 1e-12);
  EXPECT_LT((dense_circulant(h) * v - expected).norm(), 1e-12);
}

TEST(Circulant, ZeroInput) {
  Generator g(RngStream(14).key());
  const CVec h = random_cvec(g, 5);
  EXPECT_EQ(circulant_apply(h, CVec::Zero(5)).norm(), 0.0);
}

TEST(Circulant, MatchesDenseMultiplyUpToSixteen) {
  Generator g(RngStream(15).key());
  for (Index n = 1; n <= 16; ++n) {
    for (int rep = 0; rep < 5; ++rep) {
      const CVec h = random_cvec(g, n);
      const CVec v = random_cvec(g, n);
      const CMat dense = dense_circulant(h);
      EXPECT_LT((circulant_apply(h, v) - dense * v).norm(), 1e-10);
      EXPECT_LT((circulant_matrix(h) - dense).norm(), 1e-12);
    }
  }
}

TEST(Circulant, EigenvaluesDiagonalise) {
  Generator g(RngStream(16).key());
  const Index n = 9;
  const CVec h = random_cvec(g, n);
  const CMat f = dense_dft(n);
  const CMat d = f * dense_circulant(h) * f.adjoint();
  const CVec lam = circulant_eigenvalues(h);
  for (Index k = 0; k < n; ++k) EXPECT_NEAR(std::abs(d(k, k) - lam(k)), 0.0, 1e-10);
}

TEST(Circulant, LengthMismatchThrows) {
  EXPECT_THROW(circulant_apply(CVec::Zero(3), CVec::Zero(4)), DomainError);
}

TEST(Norms, Basics) {
  CVec v(3);
  v << Complex(3, 4), Complex(0, 0), Complex(-1, 0);
  EXPECT_DOUBLE_EQ(norm1(v), 6.0);
  EXPECT_DOUBLE_EQ(norm_inf(v), 5.0);
  EXPECT_NEAR(norm2(v), std::sqrt(26.0), 1e-14);
  EXPECT_EQ(norm1(CVec::Zero(4)), 0.0);
  const CVec s = complex_sign(v);
  EXPECT_NEAR(std::abs(s(0)), 1.0, 1e-15);
  EXPECT_EQ(s(1), Complex(0.0));
}

TEST(Rng, SubsetExhaustiveIsPermutation) {
  Generator g(RngStream(1, {2, 3}).key());
  auto idx = subset_without_replacement(g, 4, 4);
  std::sort(idx.begin(), idx.end());
  EXPECT_EQ(idx, (std::vector<Index>{0, 1, 2, 3}));
}

TEST(Rng, SubsetDistinctAndInRange) {
  Generator g(RngStream(3).key());
  for (int rep = 0; rep < 100; ++rep) {
    const auto idx = subset_without_replacement(g, 50, 17);
    std::set<Index> seen(idx.begin(), idx.end());
    EXPECT_EQ(seen.size(), 17u);
    EXPECT_GE(*seen.begin(), 0);
    EXPECT_LT(*seen.rbegin(), 50);
  }
}

TEST(Rng, SubsetTooLargeThrows) {
  Generator g(RngStream(3).key());
  EXPECT_THROW(subset_without_replacement(g, 3, 4), DomainError);
}

TEST(Rng, UnitCircleModulus) {
  Generator g(RngStream(4).key());
  const CVec z = unit_circle(g, 1000);
  for (Index i = 0; i < z.size(); ++i) EXPECT_NEAR(std::abs(z(i)), 1.0, 1e-15);
}

TEST(Rng, SameSeedAndPathReproduce) {
  const RngStream a(99, {1, 2, 3});
  const RngStream b = RngStream(99).substream({1, 2}).substream(3);
  EXPECT_EQ(a.key(), b.key());
  Generator ga = a.generator();
  Generator gb = b.generator();
  for (int i = 0; i < 100; ++i) EXPECT_EQ(ga.next_u64(), gb.next_u64());
  Generator g1 = a.generator();
  Generator g2 = a.generator();
  const RMat m1 = gaussian(g1, 5, 4);
  const RMat m2 = gaussian(g2, 5, 4);
  EXPECT_EQ(m1, m2);
}

TEST(Rng, PathsAreDistinguished) {
  const RngStream root(5);
  EXPECT_NE(root.substream({1, 2}).key(), root.substream({2, 1}).key());
  EXPECT_NE(root.substream({1}).key(), root.substream({1, 0}).key());
  EXPECT_NE(RngStream(5).key(), RngStream(6).key());
}

TEST(Rng, DisjointSubstreamsUncorrelated) {
  const RngStream root(2024);
  for (std::uint64_t p = 0; p < 5; ++p) {
    Generator a = root.substream({p, 0}).generator();
    Generator b = root.substream({p, 1}).generator();
    const int n = 10000;
    Real sab = 0, saa = 0, sbb = 0, ma = 0, mb = 0;
    std::vector<Real> xa(n), xb(n);
    for (int i = 0; i < n; ++i) {
      xa[i] = a.normal();
      xb[i] = b.normal();
      ma += xa[i];
      mb += xb[i];
    }
    ma /= n;
    mb /= n;
    for (int i = 0; i < n; ++i) {
      sab += (xa[i] - ma) * (xb[i] - mb);
      saa += (xa[i] - ma) * (xa[i] - ma);
      sbb += (xb[i] - mb) * (xb[i] - mb);
    }
    EXPECT_LT(std::abs(sab / std::sqrt(saa * sbb)), 0.1);
  }
}

TEST(Rng, UniformMomentsAndIndexRange) {
  Generator g(RngStream(8).key());
  Real sum = 0;
  std::vector<int> counts(7, 0);
  const int n = 70000;
  for (int i = 0; i < n; ++i) {
    const Real u = g.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
    const auto k = g.uniform_index(7);
    ASSERT_LT(k, 7u);
    ++counts[k];
  }
  EXPECT_NEAR(sum / n, 0.5, 0.01);
  for (int c : counts) EXPECT_NEAR(c, n / 7.0, 4.0 * std::sqrt(n / 7.0));
}
