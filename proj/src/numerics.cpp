#include "pacs/numerics.hpp"

#include <stdexcept>

#include "pacs/errors.hpp"

namespace pacs {

namespace {

// In-place iterative radix-2 FFT, unnormalised. sign = -1 forward, +1 inverse.
void fft_radix2(CVec& a, int sign) {
  const Index n = a.size();
  for (Index i = 1, j = 0; i < n; ++i) {
    Index bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a(i), a(j));
  }
  for (Index len = 2; len <= n; len <<= 1) {
    const Real angle = sign * 2.0 * kPi / static_cast<Real>(len);
    for (Index i = 0; i < n; i += len) {
      // Twiddles recomputed from the angle for each k keeps the error at
      // O(eps log N) instead of accumulating through repeated products.
      for (Index k = 0; k < len / 2; ++k) {
        const Real theta = angle * static_cast<Real>(k);
        const Complex w(std::cos(theta), std::sin(theta));
        const Complex u = a(i + k);
        const Complex t = w * a(i + k + len / 2);
        a(i + k) = u + t;
        a(i + k + len / 2) = u - t;
      }
    }
  }
}

CVec dense_dft(const CVec& v, int sign) {
  const Index n = v.size();
  CVec out = CVec::Zero(n);
  for (Index j = 0; j < n; ++j) {
    Complex acc(0.0, 0.0);
    for (Index k = 0; k < n; ++k) {
      // Reduce jk mod n before forming the angle to keep it small.
      const Real theta = sign * 2.0 * kPi * static_cast<Real>((j * k) % n) / static_cast<Real>(n);
      acc += Complex(std::cos(theta), std::sin(theta)) * v(k);
    }
    out(j) = acc;
  }
  return out;
}

CVec transform(const CVec& v, int sign) {
  if (v.size() < 1) throw DomainError("DFT requires length >= 1");
  CVec out;
  if (is_power_of_two(v.size())) {
    out = v;
    fft_radix2(out, sign);
  } else {
    out = dense_dft(v, sign);
  }
  out /= std::sqrt(static_cast<Real>(v.size()));
  return out;
}

}  // namespace

bool is_power_of_two(Index n) { return n > 0 && (n & (n - 1)) == 0; }

Real spectral_norm(const CMat& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<CMat> svd(m);
  return svd.singularValues()(0);
}

CVec unitary_dft(const CVec& v) { return transform(v, -1); }

CVec inverse_unitary_dft(const CVec& v) { return transform(v, +1); }

CMat dft_matrix(Index n) {
  if (n < 1) throw DomainError("DFT matrix requires n >= 1");
  CMat phi(n, n);
  const Real scale = 1.0 / std::sqrt(static_cast<Real>(n));
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) {
      const Real theta = -2.0 * kPi * static_cast<Real>((j * k) % n) / static_cast<Real>(n);
      phi(j, k) = scale * Complex(std::cos(theta), std::sin(theta));
    }
  }
  return phi;
}

CVec circulant_eigenvalues(const CVec& filter) {
  return std::sqrt(static_cast<Real>(filter.size())) * unitary_dft(filter);
}

CVec circulant_apply(const CVec& filter, const CVec& v) {
  if (filter.size() != v.size()) {
    throw DomainError("circulant_apply: filter and vector lengths differ");
  }
  const CVec spectrum = circulant_eigenvalues(filter);
  const CVec vhat = unitary_dft(v);
  return inverse_unitary_dft(spectrum.cwiseProduct(vhat));
}

CMat circulant_matrix(const CVec& filter) {
  const Index n = filter.size();
  CMat h(n, n);
  for (Index j = 0; j < n; ++j) {
    for (Index k = 0; k < n; ++k) h(j, k) = filter(((j - k) % n + n) % n);
  }
  return h;
}

}  // namespace pacs
