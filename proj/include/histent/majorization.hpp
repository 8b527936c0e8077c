#pragma once

// Majorization of entanglement spectra and the step regimes it induces.
//
// a is majorized by b (a < b) when every partial sum of the descending
// spectrum a is <= the corresponding partial sum of b, shorter spectra padded
// with zeros. Totals are both one, so only l = 1..n-1 are compared.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "histent/error.hpp"
#include "histent/gram.hpp"

namespace histent {

struct PartialSums {
  std::vector<double> sums;  // sums[l-1] = lambda_1 + ... + lambda_l

  /// Sigma_l with zero padding past the end (so Sigma_l = total for l > size).
  double at(std::size_t l) const noexcept {
    if (sums.empty() || l == 0) return 0.0;
    return l <= sums.size() ? sums[l - 1] : sums.back();
  }
};

inline PartialSums partial_sums(std::span<const double> lambdas) {
  PartialSums out;
  out.sums.reserve(lambdas.size());
  double acc = 0.0;
  for (double l : lambdas) {
    acc += l;
    out.sums.push_back(acc);
  }
  return out;
}

inline PartialSums partial_sums(const EntanglementSpectrum& s) { return partial_sums(s.lambdas); }

enum class MajorizationRelation {
  FirstMajorizedBySecond,
  SecondMajorizedByFirst,
  Equal,
  Incomparable,
};

struct MajorizationVerdict {
  MajorizationRelation relation = MajorizationRelation::Incomparable;
  /// min over l of (Sigma_l(b) - Sigma_l(a)); >= 0 iff a < b exactly.
  double slack = 0.0;
  /// min over l of (Sigma_l(a) - Sigma_l(b)); >= 0 iff b < a exactly.
  double reverse_slack = 0.0;
};

namespace detail {

// Smallest margin by which a's partial sums stay below b's. Each level is
// measured both on heads (Sigma_l) and on tails (1 - Sigma_l); with equal
// totals the two are the same quantity, and taking the larger keeps roundoff
// in a running total near 1 from flipping an exact equality.
inline double majorization_margin(std::span<const double> a, std::span<const double> b) {
  const std::size_t n = std::max(a.size(), b.size());
  if (n <= 1) return 0.0;
  auto get = [](std::span<const double> v, std::size_t i) { return i < v.size() ? v[i] : 0.0; };

  std::vector<double> tail_a(n + 1, 0.0), tail_b(n + 1, 0.0);
  for (std::size_t i = n; i-- > 0;) {
    tail_a[i] = tail_a[i + 1] + get(a, i);
    tail_b[i] = tail_b[i + 1] + get(b, i);
  }
  double head_a = 0.0, head_b = 0.0;
  double margin = std::numeric_limits<double>::infinity();
  for (std::size_t l = 1; l < n; ++l) {
    head_a += get(a, l - 1);
    head_b += get(b, l - 1);
    const double by_head = head_b - head_a;
    const double by_tail = tail_a[l] - tail_b[l];
    margin = std::min(margin, std::max(by_head, by_tail));
  }
  return margin;
}

inline bool holds(double margin, double tol) {
  // Exact (>= 0) always counts; a positive tolerance is applied strictly so a
  // tie at the boundary resolves to the weaker claim.
  return margin >= 0.0 || (tol > 0.0 && margin > -tol);
}

}  // namespace detail

inline MajorizationVerdict compare(std::span<const double> a, std::span<const double> b,
                                   double tol = 1e-10) {
  MajorizationVerdict v;
  v.slack = detail::majorization_margin(a, b);
  v.reverse_slack = detail::majorization_margin(b, a);
  const bool a_below = detail::holds(v.slack, tol);
  const bool b_below = detail::holds(v.reverse_slack, tol);
  if (a_below && b_below)
    v.relation = MajorizationRelation::Equal;
  else if (a_below)
    v.relation = MajorizationRelation::FirstMajorizedBySecond;
  else if (b_below)
    v.relation = MajorizationRelation::SecondMajorizedByFirst;
  else
    v.relation = MajorizationRelation::Incomparable;
  return v;
}

inline MajorizationVerdict compare(const EntanglementSpectrum& a, const EntanglementSpectrum& b,
                                   double tol = 1e-10) {
  return compare(a.lambdas, b.lambdas, tol);
}

/// True when a is majorized by b (Equal included).
inline bool majorized_by(const MajorizationVerdict& v) {
  return v.relation == MajorizationRelation::FirstMajorizedBySecond ||
         v.relation == MajorizationRelation::Equal;
}

/// Spectrum after appending a state orthogonal to all N previous ones:
/// {N/(N+1) * lambda_k} merged with {1/(N+1)}.
inline EntanglementSpectrum lemma1_extend(const EntanglementSpectrum& spec, std::size_t n) {
  if (n == 0) throw Error(ErrorCode::InvalidArgument, "prefix length must be >= 1");
  const double nd = static_cast<double>(n);
  const double scale = nd / (nd + 1.0);
  const double added = 1.0 / (nd + 1.0);

  EntanglementSpectrum out;
  out.lambdas.reserve(spec.size() + 1);
  bool inserted = false;
  for (double l : spec.lambdas) {
    const double scaled = scale * l;
    if (!inserted && added >= scaled) {
      out.lambdas.push_back(added);
      inserted = true;
    }
    out.lambdas.push_back(scaled);
  }
  if (!inserted) out.lambdas.push_back(added);
  out.rank = spec.rank + 1;

  if (!majorized_by(compare(out, spec, 0.0)))
    throw Error(ErrorCode::InternalMajorizationViolation,
                "extended spectrum is not majorized by its source");
  return out;
}

enum class Regime { I, II, III };

constexpr std::string_view to_string(Regime r) noexcept {
  switch (r) {
    case Regime::I: return "I";
    case Regime::II: return "II";
    case Regime::III: return "III";
  }
  return "";
}

struct RegimeLabel {
  Regime label = Regime::III;
  bool strict = false;  // the verdict also holds with zero tolerance

  friend bool operator==(const RegimeLabel&, const RegimeLabel&) = default;
};

/// Labels the step N -> N+1:
///   I   spectrum(N+1) < spectrum(N)   (every entropy increases)
///   II  spectrum(N)   < spectrum(N+1) (every entropy decreases)
///   III neither.
/// Spectra identical at zero tolerance count as I (entropies unchanged). If
/// both directions hold only within tolerance the step is ambiguous and is
/// labelled III.
inline RegimeLabel classify_step(const EntanglementSpectrum& spec_n,
                                 const EntanglementSpectrum& spec_n1, double tol) {
  const MajorizationVerdict v = compare(spec_n1, spec_n, tol);
  const bool increase_exact = v.slack >= 0.0;
  const bool decrease_exact = v.reverse_slack >= 0.0;
  switch (v.relation) {
    case MajorizationRelation::Equal:
      if (increase_exact) return {Regime::I, true};
      if (decrease_exact) return {Regime::II, true};
      return {Regime::III, false};
    case MajorizationRelation::FirstMajorizedBySecond:
      return {Regime::I, increase_exact};
    case MajorizationRelation::SecondMajorizedByFirst:
      return {Regime::II, decrease_exact};
    case MajorizationRelation::Incomparable:
      break;
  }
  return {Regime::III, false};
}

}  // namespace histent
