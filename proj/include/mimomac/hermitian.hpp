// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <vector>

#include "mimomac/matrix.hpp"

namespace mimomac {

/// Square complex matrix equal to its conjugate transpose.
///
/// Construction validates the Hermitian property to 1e-12 (scaled by the largest entry
/// magnitude when that exceeds one). Use `hermitian_part` for matrices that are Hermitian
/// only up to rounding, such as products assembled at run time.
class HermitianMatrix {
 public:
  HermitianMatrix() = default;
  explicit HermitianMatrix(CMatrix m);

  static HermitianMatrix identity(std::size_t n);
  static HermitianMatrix zero(std::size_t n);
  /// diag(values) as a Hermitian matrix.
  static HermitianMatrix diagonal(const std::vector<double>& values);
  /// (M + M^H) / 2; throws only if M is not square.
  static HermitianMatrix hermitian_part(const CMatrix& m);

  std::size_t dim() const noexcept { return m_.rows(); }
  const CMatrix& matrix() const noexcept { return m_; }
  double trace() const { return m_.trace().real(); }
  cplx operator()(std::size_t i, std::size_t j) const { return m_(i, j); }

  friend bool operator==(const HermitianMatrix&, const HermitianMatrix&) = default;

 private:
  CMatrix m_;
};

bool is_hermitian(const CMatrix& m, double tol = 1e-12);

struct EigenDecomposition {
  std::vector<double> values;  ///< descending
  CMatrix vectors;             ///< unitary; column i pairs with values[i]
};

/// Eigendecomposition by cyclic Jacobi rotations on the real-symmetric embedding
/// [[Re M, -Im M], [Im M, Re M]], whose spectrum is that of M with every eigenvalue doubled.
EigenDecomposition hermitian_eig(const HermitianMatrix& m);
/// Throws DomainError when `m` is not Hermitian.
EigenDecomposition hermitian_eig(const CMatrix& m);

/// Eigenvalues only, descending.
std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m);

/// Positive semidefinite square root. Eigenvalues in [-1e-9, 0) are clamped to zero, anything
/// more negative throws DomainError.
HermitianMatrix psd_sqrt(const HermitianMatrix& m);

/// log2 det(I + M) for positive semidefinite M, computed by Cholesky factorisation.
double logdet_ipm(const HermitianMatrix& m);

/// log2 det(I + M) on a raw matrix assumed Hermitian PSD (no validation). Hot-path variant.
double log2det_identity_plus(const CMatrix& m);

/// Exponential correlation profile: entry (i, j) = t^|i-j|.
HermitianMatrix exp_correlation(std::size_t n, double t);

/// True when all eigenvalues are >= -tol.
bool is_psd(const HermitianMatrix& m, double tol = 1e-9);

}  // namespace mimomac
