#pragma once

// Coherent-state embedding of a real series and the Gaussian overlaps
// between the embedded states.

#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "histent/error.hpp"

namespace histent {

enum class EmbeddingMode { Raw, LogPrice };

enum class LogBase { Bits, Nats };

/// Numeric tolerances shared by the spectral and majorization layers.
struct ToleranceConfig {
  /// Negative eigenvalues down to -clamp_factor * N * eps * lambda_max are clamped to 0.
  double clamp_factor = 64.0;
  /// Partial-sum slack for exact majorization checks.
  double majorization = 1e-10;
  /// Slack used when labelling empirical steps ("approximately majorized").
  double regime = 1e-3;
};

struct EmbeddingConfig {
  double sigma = 1.0;  // price units, or log-price units in LogPrice mode
  EmbeddingMode mode = EmbeddingMode::Raw;
  LogBase base = LogBase::Bits;
  ToleranceConfig tol{};
};

struct AlphaSeries {
  std::vector<double> alphas;
  double sigma = 1.0;
  EmbeddingMode mode = EmbeddingMode::Raw;

  std::size_t size() const noexcept { return alphas.size(); }
};

/// Overlaps below this are treated as exactly orthogonal.
inline constexpr double kOverlapFlushFloor = 1e-300;

/// Maps prices to coherent amplitudes: p/sigma, or log(p/p0)/sigma in LogPrice mode.
/// p0 defaults to the first price; any positive p0 gives the same overlaps.
inline AlphaSeries embed(std::span<const double> prices, const EmbeddingConfig& config,
                         std::optional<double> reference_price = std::nullopt) {
  if (prices.empty()) throw Error(ErrorCode::EmptySeries, "cannot embed an empty series");
  if (!(config.sigma > 0.0) || !std::isfinite(config.sigma))
    throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive and finite");

  AlphaSeries out;
  out.sigma = config.sigma;
  out.mode = config.mode;
  out.alphas.reserve(prices.size());

  if (config.mode == EmbeddingMode::Raw) {
    for (double p : prices) {
      if (!std::isfinite(p)) throw Error(ErrorCode::NonFiniteInput, "non-finite price");
      out.alphas.push_back(p / config.sigma);
    }
    return out;
  }

  for (double p : prices) {
    if (!std::isfinite(p)) throw Error(ErrorCode::NonFiniteInput, "non-finite price");
    if (!(p > 0.0))
      throw Error(ErrorCode::NonPositivePrice,
                  "log-price embedding needs positive prices, got " + std::to_string(p));
  }
  const double p0 = reference_price.value_or(prices.front());
  if (!(p0 > 0.0) || !std::isfinite(p0))
    throw Error(ErrorCode::NonPositivePrice, "reference price must be positive");
  const double log_p0 = std::log(p0);
  for (double p : prices) out.alphas.push_back((std::log(p) - log_p0) / config.sigma);
  return out;
}

/// <a|b> = exp(-(a-b)^2 / 2) for real amplitudes.
inline double overlap_real(double a, double b) {
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::NonFiniteInput, "overlap_real needs finite amplitudes");
  const double d = a - b;
  const double v = std::exp(-0.5 * d * d);
  return v < kOverlapFlushFloor ? 0.0 : v;
}

/// <b|a> = exp(-(|a|^2 + |b|^2 - 2 a conj(b)) / 2), evaluated as
/// exp(-|a-b|^2/2) * exp(i Im(a conj(b))) so large amplitudes cannot overflow.
inline std::complex<double> overlap_complex(std::complex<double> a, std::complex<double> b) {
  if (!std::isfinite(a.real()) || !std::isfinite(a.imag()) || !std::isfinite(b.real()) ||
      !std::isfinite(b.imag()))
    throw Error(ErrorCode::NonFiniteInput, "overlap_complex needs finite amplitudes");
  const double magnitude = std::exp(-0.5 * std::norm(a - b));
  if (magnitude < kOverlapFlushFloor) return {0.0, 0.0};
  const double phase = (a * std::conj(b)).imag();
  return std::polar(magnitude, phase);
}

/// exp(-|a-b|^p / 2). Positive semidefinite as a kernel only for p <= 2.
inline double kernel_p(double a, double b, double p) {
  if (!(p > 0.0)) throw Error(ErrorCode::NonPositiveExponent, "kernel exponent must be positive");
  if (!std::isfinite(a) || !std::isfinite(b))
    throw Error(ErrorCode::NonFiniteInput, "kernel_p needs finite amplitudes");
  const double v = std::exp(-0.5 * std::pow(std::abs(a - b), p));
  return v < kOverlapFlushFloor ? 0.0 : v;
}

}  // namespace histent
