#pragma once

// Normalized overlap (Gram) matrix of the embedded states and its spectrum.
//
// (O_N)_{nm} = <alpha_n|alpha_m> / N. Its eigenvalues are the entanglement
// spectrum of the history state; its eigenvectors are the Schmidt clock
// states.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "histent/coherent.hpp"
#include "histent/eigensolver.hpp"
#include "histent/error.hpp"
#include "histent/matrix.hpp"

namespace histent {

class OverlapMatrix;
inline OverlapMatrix build_overlap_matrix(std::span<const double> alphas);

class OverlapMatrix {
 public:
  /// Wraps an existing matrix after checking the unit-trace Gram layout
  /// (diagonal 1/N, symmetric). Positivity is checked later by spectrum().
  static OverlapMatrix from_entries(Matrix entries) {
    if (entries.empty() || !entries.square())
      throw Error(ErrorCode::InvalidMatrix, "overlap matrix must be square and non-empty");
    const std::size_t n = entries.rows();
    const double inv_n = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
      if (std::abs(entries(i, i) - inv_n) > 1e-12)
        throw Error(ErrorCode::InvalidMatrix, "diagonal entries must equal 1/N");
      for (std::size_t j = 0; j < i; ++j) {
        if (!std::isfinite(entries(i, j)) || std::abs(entries(i, j) - entries(j, i)) > 1e-14)
          throw Error(ErrorCode::InvalidMatrix, "overlap matrix must be symmetric");
      }
    }
    return OverlapMatrix(std::move(entries));
  }

  const Matrix& entries() const noexcept { return m_; }
  std::size_t size() const noexcept { return m_.rows(); }
  double operator()(std::size_t i, std::size_t j) const noexcept { return m_(i, j); }

 private:
  explicit OverlapMatrix(Matrix m) : m_(std::move(m)) {}
  friend OverlapMatrix build_overlap_matrix(std::span<const double> alphas);

  Matrix m_;
};

/// Descending eigenvalues summing to one; the first `rank` are numerically nonzero.
struct EntanglementSpectrum {
  std::vector<double> lambdas;
  std::size_t rank = 0;

  std::size_t size() const noexcept { return lambdas.size(); }
  std::span<const double> nonzero() const noexcept { return {lambdas.data(), rank}; }

  /// Builds a spectrum from an arbitrary probability vector (sorted here).
  static EntanglementSpectrum from_weights(std::vector<double> weights) {
    if (weights.empty()) throw Error(ErrorCode::EmptySeries, "spectrum needs at least one weight");
    double total = 0.0;
    for (double w : weights) {
      if (!std::isfinite(w) || w < 0.0)
        throw Error(ErrorCode::InvalidArgument, "spectrum weights must be finite and >= 0");
      total += w;
    }
    if (std::abs(total - 1.0) > 1e-10)
      throw Error(ErrorCode::InvalidArgument,
                  "spectrum weights must sum to 1 (got " + std::to_string(total) + ")");
    std::sort(weights.begin(), weights.end(), std::greater<>());
    EntanglementSpectrum s;
    s.rank = static_cast<std::size_t>(
        std::count_if(weights.begin(), weights.end(), [](double w) { return w > 0.0; }));
    s.lambdas = std::move(weights);
    return s;
  }
};

struct SchmidtClockBasis {
  EntanglementSpectrum weights;
  /// weights.rank orthonormal clock vectors of length N, paired with weights.lambdas.
  std::vector<std::vector<double>> vectors;
};

inline OverlapMatrix build_overlap_matrix(std::span<const double> alphas) {
  if (alphas.empty()) throw Error(ErrorCode::EmptySeries, "overlap matrix of an empty series");
  const std::size_t n = alphas.size();
  const double inv_n = 1.0 / static_cast<double>(n);
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    m(i, i) = inv_n;
    for (std::size_t j = 0; j < i; ++j) {
      const double v = overlap_real(alphas[i], alphas[j]) * inv_n;
      m(i, j) = v;
      m(j, i) = v;
    }
  }
  return OverlapMatrix(std::move(m));
}

inline OverlapMatrix build_overlap_matrix(const AlphaSeries& alphas) {
  return build_overlap_matrix(std::span<const double>(alphas.alphas));
}

/// Unnormalized exp(-|a-b|^p/2) kernel matrix; diagnostic for the p > 2 positivity failure.
inline Matrix kernel_matrix(std::span<const double> alphas, double p) {
  const std::size_t n = alphas.size();
  Matrix m(n, n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) m(i, j) = kernel_p(alphas[i], alphas[j], p);
  return m;
}

/// Clamps roundoff negatives, zeroes values at or below the rank floor and
/// counts the numerical rank of raw eigenvalues of O_N.
inline EntanglementSpectrum spectrum_from_eigenvalues(std::vector<double> values,
                                                      const ToleranceConfig& tol = {}) {
  if (values.empty()) throw Error(ErrorCode::EmptySeries, "no eigenvalues");
  std::sort(values.begin(), values.end(), std::greater<>());
  const double n = static_cast<double>(values.size());
  constexpr double eps = std::numeric_limits<double>::epsilon();
  const double lambda_max = std::max(values.front(), 0.0);
  const double rank_floor = n * eps * lambda_max;
  const double clamp_floor = tol.clamp_factor * rank_floor;
  EntanglementSpectrum s;
  for (double& v : values) {
    if (v < -clamp_floor)
      throw Error(ErrorCode::IndefiniteMatrix,
                  "eigenvalue " + std::to_string(v) + " below clamp floor " +
                      std::to_string(-clamp_floor));
    if (v > rank_floor)
      ++s.rank;
    else
      v = 0.0;
  }
  s.lambdas = std::move(values);
  return s;
}

inline EntanglementSpectrum spectrum(const OverlapMatrix& o, const ToleranceConfig& tol = {}) {
  return spectrum_from_eigenvalues(eigh(o.entries(), false).values, tol);
}

/// Tr O^2, computed directly from the entries.
inline double purity(const OverlapMatrix& o) {
  const Matrix& m = o.entries();
  const std::size_t n = m.rows();
  double off = 0.0;
  double diag = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    diag += m(i, i) * m(i, i);
    for (std::size_t j = 0; j < i; ++j) off += m(i, j) * m(i, j);
  }
  return diag + 2.0 * off;
}

/// Eigenvectors for the nonzero eigenvalues; each vector's first nonzero component is positive.
inline SchmidtClockBasis schmidt_clock_basis(const OverlapMatrix& o,
                                             const ToleranceConfig& tol = {}) {
  SymmetricEigen eig = eigh(o.entries(), true);
  SchmidtClockBasis out;
  out.weights = spectrum_from_eigenvalues(eig.values, tol);
  out.vectors.reserve(out.weights.rank);
  for (std::size_t k = 0; k < out.weights.rank; ++k) {
    std::vector<double> v = eig.vectors.column(k);
    for (double x : v) {
      if (std::abs(x) > 1e-12) {
        if (x < 0.0)
          for (double& y : v) y = -y;
        break;
      }
    }
    out.vectors.push_back(std::move(v));
  }
  return out;
}

}  // namespace histent
