#pragma once

// Experiment drivers: cumulative-prefix histories, windowed (monthly/weekly)
// histories, extremal-window detection and comparison against a reference
// volatility index.

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <map>
#include <numeric>
#include <optional>
#include <span>
#include <string>
#include <thread>
#include <vector>

#include "histent/coherent.hpp"
#include "histent/entropy.hpp"
#include "histent/error.hpp"
#include "histent/gram.hpp"
#include "histent/majorization.hpp"
#include "histent/timeseries.hpp"

namespace histent {

/// Partial sums Sigma_l reported per record.
inline constexpr std::array<std::size_t, 4> kTrackedPartialSums = {1, 2, 5, 10};

/// Maximum |E2(spectrum) - E2(incremental purity)| in bits before a run is rejected.
inline constexpr double kPurityCrossCheckTol = 1e-8;

struct AnalysisOptions {
  EmbeddingConfig embedding{};
  double sigma_unit = 1.0;                // sigma_0; sigma_r = sigma / sigma_unit
  std::vector<double> qs = {1.0, 2.0};    // Renyi orders (1 = von Neumann)
  std::size_t stride = 1;                 // cumulative runs only
  std::size_t spectrum_head = 15;
  bool retain_full_spectrum = false;      // needed by find_extremal_windows
  bool log_fluctuation_approx = false;    // also report e2_log_fluctuation
  double saturation_tol = 1e-9;
  std::size_t threads = 0;                // 0 = hardware concurrency

  /// Only q = 2 requested: no eigendecomposition is needed.
  bool purity_only() const {
    return !retain_full_spectrum && !qs.empty() &&
           std::all_of(qs.begin(), qs.end(), [](double q) { return q == 2.0; });
  }
};

struct AnalysisRecord {
  std::string label;
  std::size_t n = 0;
  std::string first_date;
  std::string last_date;
  std::map<double, EntropyValue> entropies;  // keyed by q
  double n_effective = 1.0;
  double e_max = 0.0;  // log2 N
  std::size_t rank = 0;  // 0 when no spectrum was computed
  std::vector<double> spectrum_head;
  std::map<std::size_t, double> partial_sums_at;
  std::optional<RegimeLabel> regime;
  std::size_t regime_step = 0;  // prefix gap the regime was judged over; 1 = single step
  bool saturated = false;
  double sigma_r = 1.0;
  std::optional<double> e2_incremental;  // bits, from the running purity
  std::optional<double> e2_approx_nats;  // e2_log_fluctuation / e2_variance_approx
  std::vector<double> spectrum;          // full spectrum when retained

  const EntropyValue* entropy(double q) const {
    const auto it = entropies.find(q);
    return it == entropies.end() ? nullptr : &it->second;
  }

  friend bool operator==(const AnalysisRecord&, const AnalysisRecord&) = default;
};

struct ComparisonReport {
  double scale = 0.0;
  double pearson = 0.0;
  double spearman = 0.0;
  std::size_t paired_count = 0;
};

struct ExtremalWindow {
  std::size_t index = 0;
  std::string label;
  bool universal = false;  // majorization witness exists
  bool tied = false;       // another window has an identical spectrum
};

struct ExtremalWindows {
  ExtremalWindow max_entropy;
  ExtremalWindow min_entropy;
};

inline AlphaSeries embed(const PriceSeries& series, const EmbeddingConfig& config) {
  const auto v = series.values();
  return embed(std::span<const double>(v), config);
}

/// Running Tr O_N^2 via T_{N+1} = T_N + 1 + 2 sum_{n<=N} <a_n|a_{N+1}>^2, Tr O_N^2 = T_N / N^2.
class IncrementalPurity {
 public:
  void push(double alpha) {
    double cross = 0.0;
    for (double a : alphas_) {
      const double o = overlap_real(a, alpha);
      cross += o * o;
    }
    total_ += 1.0 + 2.0 * cross;
    alphas_.push_back(alpha);
  }

  std::size_t size() const noexcept { return alphas_.size(); }
  double purity() const noexcept {
    const double n = static_cast<double>(alphas_.size());
    return total_ / (n * n);
  }

 private:
  std::vector<double> alphas_;
  double total_ = 0.0;
};

inline std::vector<double> incremental_purities(std::span<const double> alphas) {
  IncrementalPurity running;
  std::vector<double> out;
  out.reserve(alphas.size());
  for (double a : alphas) {
    running.push(a);
    out.push_back(running.purity());
  }
  return out;
}

namespace detail {

inline std::size_t worker_count(std::size_t requested, std::size_t jobs) {
  std::size_t n = requested ? requested : std::max(1u, std::thread::hardware_concurrency());
  return std::max<std::size_t>(1, std::min(n, jobs));
}

// Runs body(i) for i in [0, count). Results must be written to per-index
// slots; the lowest-index exception is rethrown so failures are deterministic.
template <class Body>
void parallel_for(std::size_t count, std::size_t threads, Body&& body) {
  if (count == 0) return;
  const std::size_t workers = worker_count(threads, count);
  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
        break;
      }
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < count; i = next++) {
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

struct BlockResult {
  AnalysisRecord record;
  EntanglementSpectrum spectrum;  // empty in purity-only mode
};

inline BlockResult analyze_block(std::span<const double> alphas, std::span<const double> prices,
                                 const AnalysisOptions& opt, std::optional<double> purity_hint) {
  BlockResult out;
  AnalysisRecord& rec = out.record;
  const std::size_t n = alphas.size();
  rec.n = n;
  rec.e_max = max_entropy(n, LogBase::Bits);
  rec.sigma_r = opt.embedding.sigma / opt.sigma_unit;
  const LogBase base = opt.embedding.base;

  if (opt.purity_only()) {
    double pur;
    if (purity_hint) {
      pur = *purity_hint;
    } else {
      pur = purity(build_overlap_matrix(alphas));
    }
    const EntropyValue e2{std::max(0.0, -std::log2(pur)), LogBase::Bits, 2.0};
    rec.entropies[2.0] = convert(e2, base);
    rec.n_effective = effective_states(e2);
    if (purity_hint) rec.e2_incremental = e2.value;
  } else {
    const OverlapMatrix o = build_overlap_matrix(alphas);
    out.spectrum = spectrum(o, opt.embedding.tol);
    const EntanglementSpectrum& s = out.spectrum;
    for (double q : opt.qs) rec.entropies[q] = renyi(s, q, base);
    const EntropyValue vn = von_neumann(s, LogBase::Bits);
    rec.n_effective = effective_states(vn);
    rec.rank = s.rank;
    const std::size_t head = std::min(opt.spectrum_head, s.size());
    rec.spectrum_head.assign(s.lambdas.begin(), s.lambdas.begin() + static_cast<std::ptrdiff_t>(head));
    const PartialSums ps = partial_sums(s);
    for (std::size_t l : kTrackedPartialSums) rec.partial_sums_at[l] = ps.at(l);
    rec.saturated = vn.value >= rec.e_max - opt.saturation_tol;
    if (opt.retain_full_spectrum) rec.spectrum = s.lambdas;
    if (purity_hint) {
      const double e2_inc = std::max(0.0, -std::log2(*purity_hint));
      const double e2_spec = renyi(s, 2.0, LogBase::Bits).value;
      if (std::abs(e2_inc - e2_spec) > kPurityCrossCheckTol)
        throw Error(ErrorCode::NumericalMismatch,
                    "incremental purity disagrees with spectrum at N=" + std::to_string(n));
      rec.e2_incremental = e2_inc;
    }
  }
  if (opt.purity_only()) {
    const auto it = rec.entropies.find(2.0);
    rec.saturated = convert(it->second, LogBase::Bits).value >= rec.e_max - opt.saturation_tol;
  }
  if (opt.log_fluctuation_approx) {
    rec.e2_approx_nats = opt.embedding.mode == EmbeddingMode::LogPrice
                             ? e2_log_fluctuation(prices, opt.embedding.sigma)
                             : e2_variance_approx(prices, opt.embedding.sigma);
  }
  return out;
}

inline void validate(const AnalysisOptions& opt) {
  if (opt.qs.empty()) throw Error(ErrorCode::InvalidArgument, "at least one q is required");
  for (double q : opt.qs)
    if (!(q > 0.0)) throw Error(ErrorCode::NonPositiveQ, "q must be positive");
  if (opt.stride == 0) throw Error(ErrorCode::InvalidArgument, "stride must be >= 1");
  if (!(opt.sigma_unit > 0.0)) throw Error(ErrorCode::NonPositiveSigma, "sigma unit must be positive");
}

}  // namespace detail

/// Prefix lengths evaluated by a cumulative run: 1, 1+stride, ..., and always the total.
inline std::vector<std::size_t> cumulative_prefixes(std::size_t total, std::size_t stride) {
  std::vector<std::size_t> out;
  for (std::size_t n = 1; n <= total; n += stride) out.push_back(n);
  if (!out.empty() && out.back() != total) out.push_back(total);
  return out;
}

/// One record per evaluated prefix length. Regime labels compare each prefix
/// with the previous evaluated one, so they describe single steps only at stride 1.
inline std::vector<AnalysisRecord> cumulative_analysis(const PriceSeries& series,
                                                       const AnalysisOptions& opt) {
  detail::validate(opt);
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "cumulative analysis of an empty series");
  const std::vector<double> prices = series.values();
  const AlphaSeries alphas = embed(std::span<const double>(prices), opt.embedding);
  const std::vector<double> purities = incremental_purities(alphas.alphas);
  const std::vector<std::size_t> prefixes = cumulative_prefixes(prices.size(), opt.stride);

  std::vector<detail::BlockResult> results(prefixes.size());
  detail::parallel_for(prefixes.size(), opt.threads, [&](std::size_t i) {
    const std::size_t n = prefixes[i];
    results[i] = detail::analyze_block(std::span<const double>(alphas.alphas).first(n),
                                       std::span<const double>(prices).first(n), opt,
                                       purities[n - 1]);
  });

  std::vector<AnalysisRecord> out;
  out.reserve(results.size());
  for (std::size_t i = 0; i < results.size(); ++i) {
    AnalysisRecord rec = std::move(results[i].record);
    rec.label = std::to_string(rec.n);
    rec.first_date = format_date(series[0].date);
    rec.last_date = format_date(series[rec.n - 1].date);
    if (i > 0 && !opt.purity_only()) {
      rec.regime = classify_step(results[i - 1].spectrum, results[i].spectrum, opt.embedding.tol.regime);
      rec.regime_step = rec.n - prefixes[i - 1];
    }
    out.push_back(std::move(rec));
  }
  return out;
}

/// One record per window; sigma is shared by every window.
inline std::vector<AnalysisRecord> window_analysis(const std::vector<Window>& windows,
                                                   const AnalysisOptions& opt) {
  detail::validate(opt);
  std::vector<AnalysisRecord> out(windows.size());
  detail::parallel_for(windows.size(), opt.threads, [&](std::size_t i) {
    const Window& w = windows[i];
    const std::vector<double> prices = w.values();
    const AlphaSeries alphas = embed(std::span<const double>(prices), opt.embedding);
    AnalysisRecord rec =
        detail::analyze_block(alphas.alphas, prices, opt, std::nullopt).record;
    rec.label = w.label;
    rec.first_date = format_date(w.points.front().date);
    rec.last_date = format_date(w.points.back().date);
    out[i] = std::move(rec);
  });
  return out;
}

inline std::vector<AnalysisRecord> window_analysis(const PriceSeries& series, const WindowSpec& spec,
                                                   const AnalysisOptions& opt) {
  if (series.empty()) throw Error(ErrorCode::EmptySeries, "window analysis of an empty series");
  return window_analysis(partition(series, spec), opt);
}

/// Finds the window majorized by all others (maximum of every entropy) and the
/// one majorizing all others (minimum). Without such a witness the von Neumann
/// arg-max / arg-min is returned with universal = false. Ties go to the earliest window.
inline ExtremalWindows find_extremal_windows(const std::vector<AnalysisRecord>& records,
                                             double tol = 1e-10) {
  if (records.size() < 2)
    throw Error(ErrorCode::InsufficientRecords, "need at least two windows");
  for (const auto& r : records)
    if (r.spectrum.empty())
      throw Error(ErrorCode::InsufficientRecords,
                  "window '" + r.label + "' has no retained spectrum");

  const std::size_t w = records.size();
  auto relation = [&](std::size_t i, std::size_t j) {
    return compare(records[i].spectrum, records[j].spectrum, tol).relation;
  };
  auto find = [&](bool want_max) {
    ExtremalWindow best;
    for (std::size_t i = 0; i < w; ++i) {
      bool witness = true;
      for (std::size_t j = 0; j < w && witness; ++j) {
        if (i == j) continue;
        const auto r = relation(i, j);
        witness = r == MajorizationRelation::Equal ||
                  r == (want_max ? MajorizationRelation::FirstMajorizedBySecond
                                 : MajorizationRelation::SecondMajorizedByFirst);
      }
      if (witness) {
        best.index = i;
        best.universal = true;
        break;
      }
    }
    if (!best.universal) {
      std::vector<double> vn(w);
      for (std::size_t i = 0; i < w; ++i) vn[i] = von_neumann(records[i].spectrum).value;
      best.index = static_cast<std::size_t>(
          want_max ? std::max_element(vn.begin(), vn.end()) - vn.begin()
                   : std::min_element(vn.begin(), vn.end()) - vn.begin());
    }
    best.label = records[best.index].label;
    for (std::size_t j = 0; j < w; ++j)
      if (j != best.index && relation(best.index, j) == MajorizationRelation::Equal) best.tied = true;
    return best;
  };
  return {find(true), find(false)};
}

namespace detail {
inline std::vector<double> average_ranks(const std::vector<double>& x) {
  std::vector<std::size_t> order(x.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return x[a] < x[b]; });
  std::vector<double> ranks(x.size());
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j + 1 < order.size() && x[order[j + 1]] == x[order[i]]) ++j;
    const double r = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = r;
    i = j + 1;
  }
  return ranks;
}

inline double pearson(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) return std::numeric_limits<double>::quiet_NaN();
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}
}  // namespace detail

/// Joins on label, fits reference ~ scale * indicator by least squares and
/// reports Pearson and Spearman correlations of the joined pairs.
inline ComparisonReport compare_to_reference(const std::vector<LabeledValue>& indicator,
                                             const std::vector<LabeledValue>& reference) {
  std::map<std::string, double> ref;
  for (const auto& r : reference) ref[r.label] = r.value;
  std::vector<double> x, y;
  for (const auto& i : indicator) {
    const auto it = ref.find(i.label);
    if (it == ref.end()) continue;
    x.push_back(i.value);
    y.push_back(it->second);
  }
  if (x.size() < 2)
    throw Error(ErrorCode::InsufficientOverlap,
                "indicator and reference share " + std::to_string(x.size()) + " labels");
  ComparisonReport rep;
  rep.paired_count = x.size();
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += x[i] * y[i];
    sxx += x[i] * x[i];
  }
  rep.scale = sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
  rep.pearson = detail::pearson(x, y);
  rep.spearman = detail::pearson(detail::average_ranks(x), detail::average_ranks(y));
  return rep;
}

}  // namespace histent
