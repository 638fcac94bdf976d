// SPDX-License-Identifier: Apache-2.0
#include "mimomac/hermitian.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>
#include <utility>

#include "mimomac/errors.hpp"

namespace mimomac {

namespace {

double hermitian_tolerance(const CMatrix& m, double tol) { return tol * std::max(1.0, max_abs(m)); }

/// Symmetric real matrix stored row-major.
struct RealSym {
  std::size_t n;
  std::vector<double> a;
  double& operator()(std::size_t i, std::size_t j) { return a[i * n + j]; }
  double operator()(std::size_t i, std::size_t j) const { return a[i * n + j]; }
};

// Cyclic Jacobi sweeps. On return `s` is (numerically) diagonal and `v` holds the rotations.
void jacobi_diagonalize(RealSym& s, std::vector<double>& v) {
  const std::size_t n = s.n;
  v.assign(n * n, 0.0);
  for (std::size_t i = 0; i < n; ++i) v[i * n + i] = 1.0;

  double total = 0.0;
  for (double x : s.a) total += x * x;
  if (total == 0.0) return;

  constexpr int kMaxSweeps = 100;
  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    double off = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = i + 1; j < n; ++j) off += s(i, j) * s(i, j);
    if (off <= 1e-32 * total) return;

    for (std::size_t p = 0; p < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = s(p, q);
        if (std::abs(apq) <= 1e-300) continue;
        const double app = s(p, p);
        const double aqq = s(q, q);
        const double theta = (aqq - app) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double sn = t * c;

        for (std::size_t k = 0; k < n; ++k) {
          const double akp = s(k, p);
          const double akq = s(k, q);
          s(k, p) = c * akp - sn * akq;
          s(k, q) = sn * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double apk = s(p, k);
          const double aqk = s(q, k);
          s(p, k) = c * apk - sn * aqk;
          s(q, k) = sn * apk + c * aqk;
        }
        s(p, q) = 0.0;
        s(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v[k * n + p];
          const double vkq = v[k * n + q];
          v[k * n + p] = c * vkp - sn * vkq;
          v[k * n + q] = sn * vkp + c * vkq;
        }
      }
    }
  }
}

RealSym embed(const CMatrix& m) {
  const std::size_t n = m.rows();
  RealSym s{2 * n, std::vector<double>(4 * n * n)};
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double re = 0.5 * (m(i, j).real() + m(j, i).real());
      const double im = 0.5 * (m(i, j).imag() - m(j, i).imag());
      s(i, j) = re;
      s(i + n, j + n) = re;
      s(i, j + n) = -im;
      s(i + n, j) = im;
    }
  }
  return s;
}

}  // namespace

bool is_hermitian(const CMatrix& m, double tol) {
  if (!m.square()) return false;
  const double bound = hermitian_tolerance(m, tol);
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = i; j < m.cols(); ++j)
      if (std::abs(m(i, j) - std::conj(m(j, i))) > bound) return false;
  return true;
}

HermitianMatrix::HermitianMatrix(CMatrix m) : m_(std::move(m)) {
  if (!m_.square()) throw DomainError("HermitianMatrix: matrix is not square");
  if (!is_hermitian(m_)) throw DomainError("HermitianMatrix: matrix is not Hermitian");
  for (std::size_t i = 0; i < m_.rows(); ++i) m_(i, i) = m_(i, i).real();
}

HermitianMatrix HermitianMatrix::identity(std::size_t n) { return HermitianMatrix(CMatrix::identity(n)); }

HermitianMatrix HermitianMatrix::zero(std::size_t n) { return HermitianMatrix(CMatrix(n, n)); }

HermitianMatrix HermitianMatrix::diagonal(const std::vector<double>& values) {
  return HermitianMatrix(CMatrix::diagonal(values));
}

HermitianMatrix HermitianMatrix::hermitian_part(const CMatrix& m) {
  if (!m.square()) throw DomainError("hermitian_part: matrix is not square");
  CMatrix h = m;
  for (std::size_t i = 0; i < m.rows(); ++i)
    for (std::size_t j = 0; j < m.cols(); ++j) h(i, j) = 0.5 * (m(i, j) + std::conj(m(j, i)));
  return HermitianMatrix(std::move(h));
}

EigenDecomposition hermitian_eig(const CMatrix& m) {
  if (!is_hermitian(m)) throw DomainError("hermitian_eig: matrix is not Hermitian");
  const std::size_t n = m.rows();
  RealSym s = embed(m);
  std::vector<double> v;
  jacobi_diagonalize(s, v);

  const std::size_t n2 = 2 * n;
  std::vector<std::size_t> order(n2);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return s(a, a) > s(b, b); });

  // Each complex eigenpair shows up twice in the embedding, as (x; y) and (-y; x). Walk the
  // spectrum in descending order and, within each cluster of equal eigenvalues, pick the real
  // eigenvector whose complex image x + iy is least explained by the vectors already accepted.
  const double scale = std::max(1.0, std::abs(s(order.front(), order.front())) +
                                         std::abs(s(order.back(), order.back())));
  const double cluster_tol = 1e-9 * scale;

  EigenDecomposition out;
  out.values.reserve(n);
  out.vectors = CMatrix(n, n);
  std::vector<bool> used(n2, false);
  std::vector<cplx> cand(n);

  for (std::size_t k = 0; k < n; ++k) {
    const double lambda = s(order[2 * k], order[2 * k]);
    double best_norm = -1.0;
    std::vector<cplx> best;
    std::size_t best_idx = n2;
    for (std::size_t r = 0; r < n2; ++r) {
      const std::size_t idx = order[r];
      if (used[idx] || std::abs(s(idx, idx) - lambda) > cluster_tol) continue;
      for (std::size_t i = 0; i < n; ++i) cand[i] = {v[i * n2 + idx], v[(i + n) * n2 + idx]};
      for (std::size_t c = 0; c < k; ++c) {
        cplx dot = 0.0;
        for (std::size_t i = 0; i < n; ++i) dot += std::conj(out.vectors(i, c)) * cand[i];
        for (std::size_t i = 0; i < n; ++i) cand[i] -= dot * out.vectors(i, c);
      }
      double norm = 0.0;
      for (const auto& z : cand) norm += std::norm(z);
      if (norm > best_norm) {
        best_norm = norm;
        best = cand;
        best_idx = idx;
      }
    }
    if (best_idx == n2 || best_norm <= 1e-20) {
      throw DomainError("hermitian_eig: failed to extract an orthonormal eigenbasis");
    }
    used[best_idx] = true;
    const double inv = 1.0 / std::sqrt(best_norm);
    for (std::size_t i = 0; i < n; ++i) out.vectors(i, k) = best[i] * inv;
    out.values.push_back(lambda);
  }
  return out;
}

EigenDecomposition hermitian_eig(const HermitianMatrix& m) { return hermitian_eig(m.matrix()); }

std::vector<double> hermitian_eigenvalues(const HermitianMatrix& m) {
  RealSym s = embed(m.matrix());
  std::vector<double> v;
  jacobi_diagonalize(s, v);
  std::vector<double> diag(s.n);
  for (std::size_t i = 0; i < s.n; ++i) diag[i] = s(i, i);
  std::sort(diag.begin(), diag.end(), std::greater<>());
  std::vector<double> out(m.dim());
  for (std::size_t k = 0; k < m.dim(); ++k) out[k] = 0.5 * (diag[2 * k] + diag[2 * k + 1]);
  return out;
}

bool is_psd(const HermitianMatrix& m, double tol) {
  const auto ev = hermitian_eigenvalues(m);
  return ev.empty() || ev.back() >= -tol;
}

HermitianMatrix psd_sqrt(const HermitianMatrix& m) {
  const auto eig = hermitian_eig(m);
  const std::size_t n = m.dim();
  std::vector<double> roots(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double lambda = eig.values[i];
    if (lambda < -1e-9) {
      throw DomainError("psd_sqrt: negative eigenvalue " + std::to_string(lambda));
    }
    roots[i] = std::sqrt(std::max(lambda, 0.0));
  }
  CMatrix out(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      cplx acc = 0.0;
      for (std::size_t k = 0; k < n; ++k)
        acc += eig.vectors(i, k) * roots[k] * std::conj(eig.vectors(j, k));
      out(i, j) = acc;
    }
  }
  return HermitianMatrix::hermitian_part(out);
}

double log2det_identity_plus(const CMatrix& m) {
  // Cholesky of I + M in place on a local copy of the lower triangle.
  const std::size_t n = m.rows();
  cplx buf[16 * 16];
  std::vector<cplx> heap;
  cplx* a = buf;
  if (n > 16) {
    heap.resize(n * n);
    a = heap.data();
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j <= i; ++j) a[i * n + j] = m(i, j) + (i == j ? 1.0 : 0.0);

  double log_det = 0.0;
  for (std::size_t j = 0; j < n; ++j) {
    double d = a[j * n + j].real();
    for (std::size_t k = 0; k < j; ++k) d -= std::norm(a[j * n + k]);
    if (d <= 0.0) throw DomainError("log2det_identity_plus: I + M is not positive definite");
    const double l = std::sqrt(d);
    a[j * n + j] = l;
    log_det += std::log2(d);
    const double inv = 1.0 / l;
    for (std::size_t i = j + 1; i < n; ++i) {
      cplx acc = a[i * n + j];
      for (std::size_t k = 0; k < j; ++k) acc -= a[i * n + k] * std::conj(a[j * n + k]);
      a[i * n + j] = acc * inv;
    }
  }
  return std::max(log_det, 0.0);
}

double logdet_ipm(const HermitianMatrix& m) { return log2det_identity_plus(m.matrix()); }

HermitianMatrix exp_correlation(std::size_t n, double t) {
  if (!(t >= 0.0 && t <= 1.0)) throw DomainError("exp_correlation: t must lie in [0, 1]");
  if (n == 0) throw DomainError("exp_correlation: dimension must be positive");
  CMatrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      const auto gap = static_cast<double>(i > j ? i - j : j - i);
      m(i, j) = gap == 0.0 ? 1.0 : std::pow(t, gap);
    }
  return HermitianMatrix(std::move(m));
}

}  // namespace mimomac
