#include "pacs/rng.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "pacs/errors.hpp"

namespace pacs {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

RngStream RngStream::substream(std::initializer_list<std::uint64_t> indices) const {
  std::vector<std::uint64_t> path = path_;
  path.insert(path.end(), indices.begin(), indices.end());
  return RngStream(master_seed_, std::move(path));
}

std::uint64_t RngStream::key() const {
  std::uint64_t h = mix64(master_seed_);
  // Path length is folded in so that {1} and {1, 0} stay distinct.
  for (std::uint64_t p : path_) h = mix64(h ^ mix64(p + 0x632BE59BD9B4E019ULL));
  return mix64(h + path_.size());
}

Generator RngStream::generator() const { return Generator(key()); }

Real Generator::uniform() {
  return static_cast<Real>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Generator::uniform_index(std::uint64_t n) {
  if (n == 0) throw DomainError("uniform_index: empty range");
  // Rejection sampling removes modulo bias.
  const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                              std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t r;
  do {
    r = engine_();
  } while (r >= limit);
  return r % n;
}

Real Generator::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  Real u1;
  do {
    u1 = uniform();
  } while (u1 <= 0.0);
  const Real u2 = uniform();
  const Real radius = std::sqrt(-2.0 * std::log(u1));
  spare_ = radius * std::sin(2.0 * kPi * u2);
  has_spare_ = true;
  return radius * std::cos(2.0 * kPi * u2);
}

RMat gaussian(Generator& gen, Index rows, Index cols) {
  RMat out(rows, cols);
  // Row-major fill so that the first k rows do not depend on `rows`.
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) out(i, j) = gen.normal();
  return out;
}

CVec unit_circle(Generator& gen, Index k) {
  CVec out(k);
  for (Index i = 0; i < k; ++i) {
    const Real theta = 2.0 * kPi * gen.uniform();
    out(i) = Complex(std::cos(theta), std::sin(theta));
  }
  return out;
}

std::vector<Index> subset_without_replacement(Generator& gen, Index n, Index k) {
  if (k < 0 || n < 0 || k > n) {
    throw DomainError("subset_without_replacement: need 0 <= k <= n");
  }
  std::vector<Index> pool(static_cast<std::size_t>(n));
  std::iota(pool.begin(), pool.end(), Index{0});
  for (Index i = 0; i < k; ++i) {
    const auto j = i + static_cast<Index>(gen.uniform_index(static_cast<std::uint64_t>(n - i)));
    std::swap(pool[static_cast<std::size_t>(i)], pool[static_cast<std::size_t>(j)]);
  }
  pool.resize(static_cast<std::size_t>(k));
  return pool;
}

}  // namespace pacs
