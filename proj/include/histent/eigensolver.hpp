#pragma once

// Dense real symmetric eigensolvers.
//
// Two routes are provided. Cyclic Jacobi keeps tiny eigenvalues of
// positive semidefinite matrices accurate relative to the diagonal and is
// used up to kJacobiMaxSize. Householder tridiagonalization followed by
// implicit-shift QL is O(N^3) with a small constant and handles the large
// prefix matrices. Both return eigenvalues in descending order with the
// matching eigenvectors as columns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

#include "histent/error.hpp"
#include "histent/matrix.hpp"

namespace histent {

inline constexpr std::size_t kJacobiMaxSize = 32;

enum class EigenMethod { Auto, Jacobi, HouseholderQL };

struct SymmetricEigen {
  std::vector<double> values;  // descending
  Matrix vectors;              // column j pairs with values[j]; empty if not requested
};

/// Signature shared by the solvers; lets callers substitute a solver (used by selfcheck).
using EigenSolverFn = std::function<SymmetricEigen(const Matrix&, bool want_vectors)>;

namespace detail {

inline void check_square(const Matrix& a) {
  if (!a.square()) throw Error(ErrorCode::InvalidMatrix, "eigensolver requires a square matrix");
  for (std::size_t i = 0; i < a.rows() * a.cols(); ++i)
    if (!std::isfinite(a.data()[i]))
      throw Error(ErrorCode::NonFiniteInput, "matrix has non-finite entries");
}

// Sorts eigenpairs descending. `rows_are_vectors` selects the layout of `vecs`.
inline SymmetricEigen sort_descending(std::vector<double> values, const Matrix& vecs,
                                      bool rows_are_vectors, bool want_vectors) {
  const std::size_t n = values.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t x, std::size_t y) { return values[x] > values[y]; });
  SymmetricEigen out;
  out.values.resize(n);
  for (std::size_t k = 0; k < n; ++k) out.values[k] = values[order[k]];
  if (want_vectors) {
    out.vectors = Matrix(n, n);
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        out.vectors(i, k) = rows_are_vectors ? vecs(order[k], i) : vecs(i, order[k]);
  }
  return out;
}

}  // namespace detail

/// Cyclic Jacobi with the relative off-diagonal test |a_pq| <= eps*sqrt(|a_pp*a_qq|).
inline SymmetricEigen jacobi_eigen(Matrix a, bool want_vectors = true) {
  detail::check_square(a);
  const std::size_t n = a.rows();
  Matrix v = want_vectors ? Matrix::identity(n) : Matrix();
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxSweeps = 100;

  for (int sweep = 0; sweep < kMaxSweeps; ++sweep) {
    bool rotated = false;
    for (std::size_t p = 0; p + 1 < n; ++p) {
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (apq == 0.0) continue;
        if (std::abs(apq) <= eps * std::sqrt(std::abs(a(p, p) * a(q, q)))) {
          a(p, q) = a(q, p) = 0.0;
          continue;
        }
        rotated = true;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        double t;
        if (std::abs(theta) > 1e150) {
          t = 0.5 / theta;
        } else {
          t = 1.0 / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
          if (theta < 0.0) t = -t;
        }
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        const double tau = s / (1.0 + c);

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
          if (r == p || r == q) continue;
          const double g = a(r, p);
          const double h = a(r, q);
          const double rp = g - s * (h + g * tau);
          const double rq = h + s * (g - h * tau);
          a(r, p) = a(p, r) = rp;
          a(r, q) = a(q, r) = rq;
        }
        if (want_vectors) {
          for (std::size_t r = 0; r < n; ++r) {
            const double g = v(r, p);
            const double h = v(r, q);
            v(r, p) = g - s * (h + g * tau);
            v(r, q) = h + s * (g - h * tau);
          }
        }
      }
    }
    if (!rotated) {
      std::vector<double> diag(n);
      for (std::size_t i = 0; i < n; ++i) diag[i] = a(i, i);
      return detail::sort_descending(std::move(diag), v, false, want_vectors);
    }
  }
  throw Error(ErrorCode::NumericalMismatch, "Jacobi iteration did not converge");
}

/// Householder reduction to tridiagonal form followed by implicit-shift QL.
inline SymmetricEigen householder_ql_eigen(Matrix a, bool want_vectors = true) {
  detail::check_square(a);
  const std::size_t n = a.rows();
  if (n == 0) return {};
  std::vector<double> d(n, 0.0), e(n, 0.0), p(n, 0.0);

  // Rows are reduced bottom-up so every inner loop runs along a contiguous row
  // of the lower triangle. Row i keeps the (scaled) Householder vector u and,
  // when vectors are wanted, column i above the diagonal keeps u / h.
  for (std::size_t i = n - 1; i >= 1; --i) {
    const std::size_t l = i - 1;
    double h = 0.0;
    double* ri = a.row(i).data();
    if (l > 0) {
      double scale = 0.0;
      for (std::size_t k = 0; k <= l; ++k) scale += std::abs(ri[k]);
      if (scale == 0.0) {
        e[i] = ri[l];
      } else {
        for (std::size_t k = 0; k <= l; ++k) {
          ri[k] /= scale;
          h += ri[k] * ri[k];
        }
        const double f = ri[l];
        const double g = f >= 0.0 ? -std::sqrt(h) : std::sqrt(h);
        e[i] = scale * g;
        h -= f * g;
        ri[l] = f - g;

        // p = A u / h over the leading (l+1) block, read from its lower triangle.
        std::fill(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(l + 1), 0.0);
        for (std::size_t j = 0; j <= l; ++j) {
          const double* rj = a.row(j).data();
          const double uj = ri[j];
          double s0 = 0.0, s1 = 0.0;
          std::size_t k = 0;
          for (; k + 1 < j; k += 2) {
            s0 += rj[k] * ri[k];
            s1 += rj[k + 1] * ri[k + 1];
            p[k] += rj[k] * uj;
            p[k + 1] += rj[k + 1] * uj;
          }
          for (; k < j; ++k) {
            s0 += rj[k] * ri[k];
            p[k] += rj[k] * uj;
          }
          p[j] += s0 + s1 + rj[j] * uj;
        }
        double kdot = 0.0;
        for (std::size_t j = 0; j <= l; ++j) {
          p[j] /= h;
          kdot += p[j] * ri[j];
        }
        const double hh = kdot / (h + h);
        for (std::size_t j = 0; j <= l; ++j) p[j] -= hh * ri[j];

        // A -= u q^T + q u^T on the lower triangle.
        for (std::size_t j = 0; j <= l; ++j) {
          double* rj = a.row(j).data();
          const double fj = ri[j];
          const double gj = p[j];
          for (std::size_t k = 0; k <= j; ++k) rj[k] -= fj * p[k] + gj * ri[k];
        }
        if (want_vectors)
          for (std::size_t j = 0; j <= l; ++j) a(j, i) = ri[j] / h;
      }
    } else {
      e[i] = ri[l];
    }
    d[i] = h;
  }
  d[0] = 0.0;
  e[0] = 0.0;

  Matrix zt;  // eigenvector rows
  if (want_vectors) {
    // Accumulate Q = P_1 ... P_{n-1} in place.
    for (std::size_t i = 0; i < n; ++i) {
      if (i > 0 && d[i] != 0.0) {
        const std::size_t l = i - 1;
        for (std::size_t j = 0; j <= l; ++j) {
          double g = 0.0;
          for (std::size_t k = 0; k <= l; ++k) g += a(i, k) * a(k, j);
          for (std::size_t k = 0; k <= l; ++k) a(k, j) -= g * a(k, i);
        }
      }
      d[i] = a(i, i);
      a(i, i) = 1.0;
      for (std::size_t j = 0; j < i; ++j) a(j, i) = a(i, j) = 0.0;
    }
    zt = a.transposed();
  } else {
    for (std::size_t i = 0; i < n; ++i) d[i] = a(i, i);
  }

  // Implicit QL on the tridiagonal (d, e); e[i] couples i and i+1.
  for (std::size_t i = 1; i < n; ++i) e[i - 1] = e[i];
  e[n - 1] = 0.0;
  constexpr double eps = std::numeric_limits<double>::epsilon();
  constexpr int kMaxIter = 60;
  // Deflation also accepts couplings below eps*||T||; a purely relative test
  // stalls on the long runs of near-zero diagonals that Gram matrices produce.
  double tnorm = 0.0;
  for (std::size_t i = 0; i < n; ++i) tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i]));
  const double abs_floor = eps * tnorm;
  for (std::size_t l = 0; l < n; ++l) {
    int iter = 0;
    std::size_t m;
    do {
      for (m = l; m + 1 < n; ++m) {
        const double dd = std::abs(d[m]) + std::abs(d[m + 1]);
        if (std::abs(e[m]) <= eps * dd || std::abs(e[m]) <= abs_floor) break;
      }
      if (m != l) {
        if (iter++ == kMaxIter)
          throw Error(ErrorCode::NumericalMismatch, "QL iteration did not converge");
        double g = (d[l + 1] - d[l]) / (2.0 * e[l]);
        double r = std::hypot(g, 1.0);
        g = d[m] - d[l] + e[l] / (g + std::copysign(r, g));
        double s = 1.0, c = 1.0, pshift = 0.0;
        bool underflow = false;
        for (std::size_t ii = m; ii-- > l;) {
          double f = s * e[ii];
          const double b = c * e[ii];
          r = std::hypot(f, g);
          e[ii + 1] = r;
          if (r == 0.0) {
            d[ii + 1] -= pshift;
            e[m] = 0.0;
            underflow = true;
            break;
          }
          s = f / r;
          c = g / r;
          g = d[ii + 1] - pshift;
          r = (d[ii] - g) * s + 2.0 * c * b;
          pshift = s * r;
          d[ii + 1] = g + pshift;
          g = c * r - b;
          if (want_vectors) {
            double* z0 = zt.row(ii).data();
            double* z1 = zt.row(ii + 1).data();
            for (std::size_t k = 0; k < n; ++k) {
              f = z1[k];
              z1[k] = s * z0[k] + c * f;
              z0[k] = c * z0[k] - s * f;
            }
          }
        }
        if (underflow) continue;
        d[l] -= pshift;
        e[l] = g;
        e[m] = 0.0;
      }
    } while (m != l);
  }
  return detail::sort_descending(std::move(d), zt, true, want_vectors);
}

/// Dispatches on size: Jacobi up to kJacobiMaxSize, Householder + QL above.
inline SymmetricEigen eigh(const Matrix& a, bool want_vectors = true,
                           EigenMethod method = EigenMethod::Auto) {
  if (method == EigenMethod::Auto)
    method = a.rows() <= kJacobiMaxSize ? EigenMethod::Jacobi : EigenMethod::HouseholderQL;
  return method == EigenMethod::Jacobi ? jacobi_eigen(a, want_vectors)
                                       : householder_ql_eigen(a, want_vectors);
}

}  // namespace histent
