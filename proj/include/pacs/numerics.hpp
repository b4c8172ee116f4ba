#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>

namespace pacs {

using Real = double;
using Complex = std::complex<double>;
using Index = Eigen::Index;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using CVec = Vector<Complex>;
using CMat = Matrix<Complex>;
using RVec = Vector<Real>;
using RMat = Matrix<Real>;

inline constexpr Real kPi = 3.14159265358979323846;

// Vector norms. Eigen's lpNorm covers these, the named helpers keep call
// sites close to the notation used throughout the library.
template <typename Derived>
Real norm1(const Eigen::MatrixBase<Derived>& v) {
  return v.cwiseAbs().sum();
}

template <typename Derived>
Real norm2(const Eigen::MatrixBase<Derived>& v) {
  return v.norm();
}

template <typename Derived>
Real norm_inf(const Eigen::MatrixBase<Derived>& v) {
  return v.size() == 0 ? 0.0 : v.cwiseAbs().maxCoeff();
}

/// Complex sign: z/|z|, with sgn(0) = 0.
template <typename Derived>
Vector<typename Derived::Scalar> complex_sign(const Eigen::MatrixBase<Derived>& v) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const Real mag = std::abs(v(i));
    out(i) = mag > 0.0 ? Scalar(v(i) / mag) : Scalar(0);
  }
  return out;
}

/// Induced infinity norm (maximum absolute row sum).
template <typename Derived>
Real induced_inf_norm(const Eigen::MatrixBase<Derived>& m) {
  if (m.rows() == 0 || m.cols() == 0) return 0.0;
  return m.cwiseAbs().rowwise().sum().maxCoeff();
}

/// Largest singular value, computed densely.
Real spectral_norm(const CMat& m);

/// Unitary DFT Phi v with (Phi)_{jk} = exp(-2 pi i jk / N) / sqrt(N).
/// Radix-2 FFT for power-of-two lengths, dense evaluation otherwise.
CVec unitary_dft(const CVec& v);

/// Phi^* v, the inverse of unitary_dft.
CVec inverse_unitary_dft(const CVec& v);

/// The N x N unitary DFT matrix Phi.
CMat dft_matrix(Index n);

/// H v where H is circulant with first column `filter`, computed through the
/// DFT diagonalisation H = Phi^* diag(sqrt(N) Phi h) Phi.
CVec circulant_apply(const CVec& filter, const CVec& v);

/// Dense circulant matrix with first column `filter` (validation paths only).
CMat circulant_matrix(const CVec& filter);

/// Eigenvalues of the circulant matrix with first column `filter`, in the
/// order matching the rows of Phi: sqrt(N) Phi h.
CVec circulant_eigenvalues(const CVec& filter);

bool is_power_of_two(Index n);

}  // namespace pacs
