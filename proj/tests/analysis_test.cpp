#include <gtest/gtest.h>

#include <random>

#include "histent/analysis.hpp"

using namespace histent;

namespace {

PriceSeries series_from(const std::vector<double>& values, const char* start = "2020-01-06") {
  using namespace std::chrono;
  std::vector<PricePoint> pts;
  sys_days day{parse_iso_date(start)};
  for (double v : values) {
    while (weekday{day} == Saturday || weekday{day} == Sunday) day += days{1};
    pts.push_back({year_month_day{day}, v});
    day += days{1};
  }
  return PriceSeries(std::move(pts));
}

std::vector<double> random_walk(std::size_t n, unsigned seed, double step = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, step);
  std::vector<double> v(n);
  double x = 100.0;
  for (auto& y : v) y = (x += g(rng));
  return v;
}

AnalysisOptions options(std::vector<double> qs, std::size_t stride = 1) {
  AnalysisOptions o;
  o.qs = std::move(qs);
  o.stride = stride;
  o.threads = 2;
  return o;
}

}  // namespace

TEST(Cumulative, ConstantSeries) {
  const auto recs = cumulative_analysis(series_from(std::vector<double>(12, 50.0)), options({1, 2}));
  ASSERT_EQ(recs.size(), 12u);
  for (const auto& r : recs) {
    EXPECT_NEAR(r.entropy(1)->value, 0.0, 1e-12);
    EXPECT_NEAR(r.entropy(2)->value, 0.0, 1e-12);
    EXPECT_NEAR(r.n_effective, 1.0, 1e-12);
    EXPECT_EQ(r.rank, 1u);
    EXPECT_NEAR(r.spectrum_head[0], 1.0, 1e-13);
  }
  EXPECT_FALSE(recs[0].regime.has_value());
  EXPECT_EQ(recs[1].regime->label, Regime::I);  // unchanged spectrum
}

TEST(Cumulative, FarPricesSaturateWithRegimeI) {
  std::vector<double> p;
  for (int i = 0; i < 10; ++i) p.push_back(100.0 + 15.0 * i * (i % 2 ? -1 : 1));
  const auto recs = cumulative_analysis(series_from(p), options({1, 2, 0.5}));
  for (const auto& r : recs) {
    const double log_n = std::log2(static_cast<double>(r.n));
    for (const auto& [q, e] : r.entropies) EXPECT_NEAR(e.value, log_n, 1e-9) << "q=" << q;
    EXPECT_NEAR(r.n_effective, static_cast<double>(r.n), 1e-8);
    EXPECT_TRUE(r.saturated);
    if (r.n > 1) {
      ASSERT_TRUE(r.regime.has_value());
      EXPECT_EQ(r.regime->label, Regime::I);
      EXPECT_TRUE(r.regime->strict);
      EXPECT_EQ(r.regime_step, 1u);
    }
  }
}

TEST(Cumulative, RepeatingDominantPriceIsRegimeII) {
  const auto recs = cumulative_analysis(series_from({100.0, 130.0, 100.0, 160.0, 100.0}), options({1}));
  ASSERT_EQ(recs.size(), 5u);
  EXPECT_EQ(recs[4].regime->label, Regime::II);
  EXPECT_NEAR(recs[3].entropy(1)->value, 1.5, 1e-12);
  EXPECT_NEAR(recs[4].entropy(1)->value, 1.370950594455, 1e-12);
}

TEST(Cumulative, PrefixesAndRecordInvariants) {
  EXPECT_EQ(cumulative_prefixes(23, 10), (std::vector<std::size_t>{1, 11, 21, 23}));
  EXPECT_EQ(cumulative_prefixes(21, 10), (std::vector<std::size_t>{1, 11, 21}));
  const auto recs = cumulative_analysis(series_from(random_walk(60, 3)), options({0.5, 1, 2, 3}, 7));
  ASSERT_EQ(recs.back().n, 60u);
  for (const auto& r : recs) {
    for (const auto& [q, e] : r.entropies) EXPECT_LE(e.value, r.e_max + 1e-9);
    EXPECT_NEAR(r.n_effective, std::exp2(r.entropy(1)->value), 1e-9);
    double head_sum = 0.0;
    for (std::size_t l = 1; l <= std::min<std::size_t>(r.spectrum_head.size(), 10); ++l) {
      head_sum += r.spectrum_head[l - 1];
      if (r.partial_sums_at.count(l)) {
        EXPECT_NEAR(r.partial_sums_at.at(l), head_sum, 1e-12);
      }
    }
    ASSERT_TRUE(r.e2_incremental.has_value());
    EXPECT_NEAR(*r.e2_incremental, r.entropy(2)->value, 1e-9);
    EXPECT_EQ(r.label, std::to_string(r.n));
  }
  EXPECT_EQ(recs[1].regime_step, 7u);
}

TEST(Cumulative, StrideInvariance) {
  const auto s = series_from(random_walk(45, 4));
  const auto one = cumulative_analysis(s, options({1, 2}, 1));
  const auto five = cumulative_analysis(s, options({1, 2}, 5));
  for (auto r : five) {
    auto ref = one[r.n - 1];
    // Regime labels compare against a different predecessor by design.
    r.regime.reset();
    ref.regime.reset();
    r.regime_step = ref.regime_step = 0;
    EXPECT_EQ(r, ref) << "N=" << r.n;
  }
}

TEST(Cumulative, PurityOnlyPath) {
  const auto s = series_from(random_walk(200, 5));
  const auto fast = cumulative_analysis(s, options({2}));
  ASSERT_EQ(fast.size(), 200u);
  const auto prices = s.values();
  for (const auto& r : fast) {
    const auto o = build_overlap_matrix(embed(std::span<const double>(prices).first(r.n), {}));
    EXPECT_NEAR(r.entropy(2)->value, renyi2_from_purity(o).value, 1e-10);
    EXPECT_TRUE(r.spectrum_head.empty());
    EXPECT_FALSE(r.regime.has_value());
    EXPECT_NEAR(r.n_effective, std::exp2(r.entropy(2)->value), 1e-9);
  }
}

TEST(Cumulative, ThreadCountDoesNotChangeOutput) {
  const auto s = series_from(random_walk(40, 6));
  auto o1 = options({1, 2}, 3);
  o1.threads = 1;
  auto o4 = o1;
  o4.threads = 4;
  EXPECT_EQ(cumulative_analysis(s, o1), cumulative_analysis(s, o4));
}

TEST(Cumulative, InvalidOptions) {
  const auto s = series_from({1.0, 2.0});
  EXPECT_THROW(cumulative_analysis(s, options({1}, 0)), Error);
  EXPECT_THROW(cumulative_analysis(s, options({0.0})), Error);
  EXPECT_THROW(cumulative_analysis(PriceSeries{}, options({1})), Error);
}

TEST(Windows, SaturatedAndConstantWeeks) {
  const auto s = series_from({100, 130, 160, 190, 220, 50, 50, 50, 50, 50});
  const auto recs = window_analysis(s, WindowSpec::week(), options({1, 2}));
  ASSERT_EQ(recs.size(), 2u);
  EXPECT_EQ(recs[0].label, "2020-W02");
  EXPECT_NEAR(recs[0].entropy(1)->value, std::log2(5.0), 1e-9);
  EXPECT_NEAR(recs[0].n_effective, 5.0, 1e-9);
  EXPECT_TRUE(recs[0].saturated);
  EXPECT_NEAR(recs[1].entropy(1)->value, 0.0, 1e-12);
  EXPECT_FALSE(recs[1].saturated);
  EXPECT_FALSE(recs[0].regime.has_value());
}

TEST(Windows, TwoFarClusters) {
  const auto recs = window_analysis(series_from({10, 10, 10, 40, 40}), WindowSpec::fixed(5), options({1}));
  ASSERT_EQ(recs.size(), 1u);
  EXPECT_NEAR(recs[0].spectrum_head[0], 0.6, 1e-12);
  EXPECT_NEAR(recs[0].spectrum_head[1], 0.4, 1e-12);
  EXPECT_NEAR(recs[0].entropy(1)->value, 0.970950594455, 1e-9);
}

TEST(Windows, WholeSeriesWindowMatchesFinalCumulativeRecord) {
  const auto s = series_from(random_walk(37, 7));
  const auto cum = cumulative_analysis(s, options({1, 2}, 10));
  auto whole = window_analysis(s, WindowSpec::fixed(s.size()), options({1, 2}));
  ASSERT_EQ(whole.size(), 1u);
  auto last = cum.back();
  EXPECT_EQ(whole[0].spectrum_head, last.spectrum_head);
  EXPECT_EQ(whole[0].entropies, last.entropies);
  EXPECT_EQ(whole[0].n_effective, last.n_effective);
  EXPECT_EQ(whole[0].partial_sums_at, last.partial_sums_at);
  EXPECT_EQ(whole[0].first_date, last.first_date);
  EXPECT_EQ(whole[0].last_date, last.last_date);
}

TEST(Windows, SigmaIsGlobal) {
  auto o = options({1});
  o.embedding.sigma = 7.0;
  o.sigma_unit = 1.0;
  const auto recs = window_analysis(series_from(random_walk(30, 8)), WindowSpec::fixed(10), o);
  for (const auto& r : recs) EXPECT_EQ(r.sigma_r, 7.0);
}

namespace {
AnalysisRecord with_spectrum(std::string label, std::vector<double> s) {
  AnalysisRecord r;
  r.label = std::move(label);
  r.spectrum = std::move(s);
  return r;
}
}  // namespace

TEST(Extremal, ChainHasUniversalWitnesses) {
  const std::vector<AnalysisRecord> recs = {with_spectrum("a", {0.6, 0.4}),
                                            with_spectrum("b", std::vector<double>(5, 0.2)),
                                            with_spectrum("c", {1.0})};
  const auto x = find_extremal_windows(recs);
  EXPECT_EQ(x.max_entropy.label, "b");
  EXPECT_TRUE(x.max_entropy.universal);
  EXPECT_EQ(x.min_entropy.label, "c");
  EXPECT_TRUE(x.min_entropy.universal);
}

TEST(Extremal, UniformBeatsIncomparablePair) {
  const std::vector<AnalysisRecord> recs = {with_spectrum("p", {0.6, 0.15, 0.15, 0.1}),
                                            with_spectrum("q", {0.5, 0.4, 0.1}),
                                            with_spectrum("u", std::vector<double>(4, 0.25))};
  const auto x = find_extremal_windows(recs);
  EXPECT_EQ(x.max_entropy.label, "u");
  EXPECT_TRUE(x.max_entropy.universal);
  EXPECT_FALSE(x.min_entropy.universal);  // p and q are incomparable
  EXPECT_EQ(x.min_entropy.label, "q");    // lowest von Neumann entropy
}

TEST(Extremal, IdenticalWindowsTieToEarliest) {
  const std::vector<AnalysisRecord> recs = {with_spectrum("x", {0.7, 0.3}), with_spectrum("y", {0.7, 0.3}),
                                            with_spectrum("z", {0.7, 0.3})};
  const auto x = find_extremal_windows(recs);
  EXPECT_EQ(x.max_entropy.index, 0u);
  EXPECT_EQ(x.min_entropy.index, 0u);
  EXPECT_TRUE(x.max_entropy.tied);
  EXPECT_TRUE(x.min_entropy.tied);
}

TEST(Extremal, Errors) {
  EXPECT_THROW(find_extremal_windows({with_spectrum("a", {1.0})}), Error);
  EXPECT_THROW(find_extremal_windows({with_spectrum("a", {1.0}), AnalysisRecord{}}), Error);
}

TEST(Extremal, FromWindowAnalysis) {
  auto o = options({1});
  o.retain_full_spectrum = true;
  const auto recs = window_analysis(series_from({100, 130, 160, 190, 220, 50, 50, 50, 50, 50, 10, 10, 40, 40, 40}),
                                    WindowSpec::fixed(5), o);
  const auto x = find_extremal_windows(recs);
  EXPECT_EQ(x.max_entropy.index, 0u);
  EXPECT_EQ(x.min_entropy.index, 1u);
  EXPECT_TRUE(x.max_entropy.universal && x.min_entropy.universal);
}

namespace {
std::vector<LabeledValue> labeled(std::vector<double> v) {
  std::vector<LabeledValue> out;
  for (std::size_t i = 0; i < v.size(); ++i) out.push_back({"m" + std::to_string(i), v[i]});
  return out;
}
}  // namespace

TEST(Reference, IdentityAndScaling) {
  const auto x = labeled({1.0, 2.5, 2.0, 4.0});
  auto r = compare_to_reference(x, x);
  EXPECT_NEAR(r.scale, 1.0, 1e-15);
  EXPECT_NEAR(r.pearson, 1.0, 1e-15);
  EXPECT_NEAR(r.spearman, 1.0, 1e-15);
  EXPECT_EQ(r.paired_count, 4u);
  r = compare_to_reference(x, labeled({2.0, 5.0, 4.0, 8.0}));
  EXPECT_NEAR(r.scale, 2.0, 1e-15);
  EXPECT_NEAR(r.pearson, 1.0, 1e-15);
}

TEST(Reference, Reversed) {
  const auto r = compare_to_reference(labeled({1, 2, 3}), labeled({3, 2, 1}));
  EXPECT_NEAR(r.pearson, -1.0, 1e-15);
  EXPECT_NEAR(r.spearman, -1.0, 1e-15);
  EXPECT_NEAR(r.scale, 10.0 / 14.0, 1e-15);
}

TEST(Reference, JoinsOnLabelsAndRanksTies) {
  const std::vector<LabeledValue> ind = {{"a", 1}, {"b", 2}, {"c", 2}, {"d", 5}};
  const std::vector<LabeledValue> ref = {{"d", 4}, {"b", 3}, {"a", 1}, {"zz", 100}};
  const auto r = compare_to_reference(ind, ref);
  EXPECT_EQ(r.paired_count, 3u);
  EXPECT_NEAR(r.spearman, 1.0, 1e-15);
  try {
    compare_to_reference(ind, {{"a", 1}});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::InsufficientOverlap);
  }
}

TEST(IncrementalPurityTest, MatchesDirect) {
  const auto a = random_walk(150, 9, 0.7);
  const auto running = incremental_purities(a);
  for (std::size_t n = 1; n <= a.size(); n += 13)
    EXPECT_NEAR(running[n - 1], purity(build_overlap_matrix(std::span<const double>(a).first(n))), 1e-10);
  IncrementalPurity p;
  p.push(0.0);
  EXPECT_EQ(p.purity(), 1.0);
}
