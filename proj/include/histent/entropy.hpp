#pragma once

// Entropy functionals over entanglement spectra, the purity shortcut for the
// quadratic Renyi entropy, and the analytic approximations in the small- and
// large-sigma limits.
//
// Reported entropies default to bits (N_E = 2^E). The approximation formulas
// expand the natural logarithm, so they return nats.

#include <cmath>
#include <numbers>
#include <span>
#include <vector>

#include "histent/coherent.hpp"
#include "histent/error.hpp"
#include "histent/gram.hpp"

namespace histent {

/// Order value that denotes the von Neumann (q -> 1) entropy.
inline constexpr double kVonNeumannOrder = 1.0;

/// Renyi/Tsallis orders this close to 1 are evaluated as von Neumann.
inline constexpr double kVonNeumannWindow = 1e-6;

struct EntropyValue {
  double value = 0.0;
  LogBase base = LogBase::Bits;
  double order = kVonNeumannOrder;

  bool is_von_neumann() const noexcept { return std::abs(order - 1.0) < kVonNeumannWindow; }

  friend bool operator==(const EntropyValue&, const EntropyValue&) = default;
};

inline double log_in(double x, LogBase base) {
  return base == LogBase::Bits ? std::log2(x) : std::log(x);
}

inline EntropyValue convert(EntropyValue e, LogBase to) {
  if (e.base == to) return e;
  e.value = to == LogBase::Nats ? e.value * std::numbers::ln2 : e.value / std::numbers::ln2;
  e.base = to;
  return e;
}

/// Maximum attainable entropy for N times, log N.
inline double max_entropy(std::size_t n, LogBase base = LogBase::Bits) {
  return log_in(static_cast<double>(n), base);
}

inline EntropyValue von_neumann(std::span<const double> probs, LogBase base = LogBase::Bits) {
  double h = 0.0;
  for (double p : probs)
    if (p > 0.0) h -= p * std::log(p);
  if (base == LogBase::Bits) h /= std::numbers::ln2;
  return {std::max(0.0, h), base, kVonNeumannOrder};
}

inline EntropyValue von_neumann(const EntanglementSpectrum& s, LogBase base = LogBase::Bits) {
  return von_neumann(s.nonzero(), base);
}

inline EntropyValue renyi(std::span<const double> probs, double q, LogBase base = LogBase::Bits) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw Error(ErrorCode::NonPositiveQ, "Renyi order must be positive");
  if (std::abs(q - 1.0) < kVonNeumannWindow) {
    EntropyValue e = von_neumann(probs, base);
    e.order = q;
    return e;
  }
  double sum = 0.0;
  for (double p : probs)
    if (p > 0.0) sum += std::pow(p, q);
  const double h = log_in(sum, base) / (1.0 - q);
  return {std::max(0.0, h), base, q};
}

inline EntropyValue renyi(const EntanglementSpectrum& s, double q, LogBase base = LogBase::Bits) {
  return renyi(s.nonzero(), q, base);
}

/// (1 - sum p^q) / (q - 1); dimensionless, with the q -> 1 limit in nats.
inline double tsallis(std::span<const double> probs, double q) {
  if (!(q > 0.0) || !std::isfinite(q))
    throw Error(ErrorCode::NonPositiveQ, "Tsallis order must be positive");
  if (std::abs(q - 1.0) < kVonNeumannWindow) return von_neumann(probs, LogBase::Nats).value;
  double sum = 0.0;
  for (double p : probs)
    if (p > 0.0) sum += std::pow(p, q);
  return std::max(0.0, (1.0 - sum) / (q - 1.0));
}

inline double tsallis(const EntanglementSpectrum& s, double q) { return tsallis(s.nonzero(), q); }

/// E_2 = -log Tr O^2, no eigendecomposition needed.
inline EntropyValue renyi2_from_purity(const OverlapMatrix& o, LogBase base = LogBase::Bits) {
  return {std::max(0.0, -log_in(purity(o), base)), base, 2.0};
}

/// N_E = 2^E for an entropy in bits.
inline double effective_states(const EntropyValue& e) {
  if (e.base != LogBase::Bits)
    throw Error(ErrorCode::WrongBase, "effective state count needs an entropy in bits");
  return std::exp2(e.value);
}

/// ln N - (2/N) sum_{n<m} exp(-(a_n - a_m)^2), valid when all states are nearly orthogonal.
/// The exponent is the squared overlap |<a_n|a_m>|^2 that enters Tr O^2.
inline double e2_small_sigma_approx(std::span<const double> alphas) {
  if (alphas.empty()) throw Error(ErrorCode::EmptySeries, "empty amplitude series");
  const std::size_t n = alphas.size();
  double pair_sum = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      const double d = alphas[i] - alphas[j];
      pair_sum += std::exp(-d * d);
    }
  const double nn = static_cast<double>(n);
  return std::log(nn) - 2.0 / nn * pair_sum;
}

inline double e2_small_sigma_approx(const AlphaSeries& a) { return e2_small_sigma_approx(a.alphas); }

namespace detail {
inline double population_variance(std::span<const double> xs) {
  double mean = 0.0;
  for (double x : xs) mean += x;
  mean /= static_cast<double>(xs.size());
  double var = 0.0;
  for (double x : xs) var += (x - mean) * (x - mean);
  return var / static_cast<double>(xs.size());
}
}  // namespace detail

/// (2/sigma^2) * Var(p): the large-sigma limit where overlaps are ~ 1 - dp^2/(2 sigma^2).
inline double e2_variance_approx(std::span<const double> prices, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (prices.empty()) throw Error(ErrorCode::EmptySeries, "empty price series");
  return 2.0 / (sigma * sigma) * detail::population_variance(prices);
}

/// (2/(N^2 sigma^2)) sum_{n<m} ln^2(p_n/p_m), evaluated through the variance of ln p.
inline double e2_log_fluctuation(std::span<const double> prices, double sigma) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (prices.empty()) throw Error(ErrorCode::EmptySeries, "empty price series");
  std::vector<double> logs;
  logs.reserve(prices.size());
  for (double p : prices) {
    if (!(p > 0.0)) throw Error(ErrorCode::NonPositivePrice, "log fluctuation needs prices > 0");
    logs.push_back(std::log(p));
  }
  return 2.0 / (sigma * sigma) * detail::population_variance(logs);
}

enum class ContinuousDistribution { Gaussian, Exponential };

/// Renyi entropy (nats) of a Gaussian with std-dev sigma, or an exponential with mean sigma.
inline double renyi_analytic_continuous(ContinuousDistribution dist, double sigma, double q) {
  if (!(sigma > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma must be positive");
  if (!(q > 0.0)) throw Error(ErrorCode::NonPositiveQ, "order must be positive");
  // log(q)/(q-1) -> 1 as q -> 1.
  const double log_q_term = std::abs(q - 1.0) < kVonNeumannWindow ? 1.0 : std::log(q) / (q - 1.0);
  const double c = dist == ContinuousDistribution::Gaussian
                       ? 0.5 * (std::log(2.0 * std::numbers::pi) + log_q_term)
                       : log_q_term;
  return c + std::log(sigma);
}

}  // namespace histent
