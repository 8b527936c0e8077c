#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "histent/coherent.hpp"

using namespace histent;

TEST(Embed, RawDividesBySigma) {
  const std::vector<double> p = {10.0, 12.5, 9.0};
  const auto a = embed(p, {.sigma = 2.0});
  ASSERT_EQ(a.size(), 3u);
  EXPECT_DOUBLE_EQ(a.alphas[0], 5.0);
  EXPECT_DOUBLE_EQ(a.alphas[1], 6.25);
  EXPECT_DOUBLE_EQ(a.alphas[2], 4.5);
  EXPECT_EQ(a.mode, EmbeddingMode::Raw);
}

TEST(Embed, LogPriceRelativeToFirst) {
  const std::vector<double> p = {100.0, 110.0, 90.0};
  const auto a = embed(p, {.sigma = 0.5, .mode = EmbeddingMode::LogPrice});
  EXPECT_DOUBLE_EQ(a.alphas[0], 0.0);
  EXPECT_NEAR(a.alphas[1], std::log(1.1) / 0.5, 1e-15);
  EXPECT_NEAR(a.alphas[2], std::log(0.9) / 0.5, 1e-15);
}

TEST(Embed, LogPriceDifferencesIndependentOfReference) {
  const std::vector<double> p = {100.0, 110.0, 90.0};
  const EmbeddingConfig cfg{.sigma = 1.0, .mode = EmbeddingMode::LogPrice};
  const auto a = embed(p, cfg);
  const auto b = embed(p, cfg, 37.0);
  for (std::size_t i = 1; i < p.size(); ++i)
    EXPECT_NEAR(a.alphas[i] - a.alphas[0], b.alphas[i] - b.alphas[0], 1e-14);
}

TEST(Embed, Errors) {
  const std::vector<double> ok = {1.0, 2.0};
  const std::vector<double> empty;
  const std::vector<double> zero = {1.0, 0.0};
  const std::vector<double> nan = {1.0, std::nan("")};
  auto code_of = [](auto&& f) {
    try {
      f();
    } catch (const Error& e) {
      return e.code();
    }
    return ErrorCode::InvalidArgument;
  };
  EXPECT_EQ(code_of([&] { embed(empty, {}); }), ErrorCode::EmptySeries);
  EXPECT_EQ(code_of([&] { embed(ok, {.sigma = 0.0}); }), ErrorCode::NonPositiveSigma);
  EXPECT_EQ(code_of([&] { embed(ok, {.sigma = -1.0}); }), ErrorCode::NonPositiveSigma);
  EXPECT_EQ(code_of([&] { embed(nan, {}); }), ErrorCode::NonFiniteInput);
  EXPECT_EQ(code_of([&] { embed(zero, {.mode = EmbeddingMode::LogPrice}); }),
            ErrorCode::NonPositivePrice);
  EXPECT_NO_THROW(embed(zero, {}));  // raw mode accepts any finite value
}

TEST(Overlap, RealValues) {
  EXPECT_DOUBLE_EQ(overlap_real(1.5, 1.5), 1.0);
  EXPECT_NEAR(overlap_real(0.0, 1.0), 0.606530659712633, 1e-15);
  EXPECT_NEAR(overlap_real(0.0, 2.0), 0.135335283236613, 1e-15);
  EXPECT_DOUBLE_EQ(overlap_real(3.0, -1.0), overlap_real(-1.0, 3.0));
  EXPECT_EQ(overlap_real(0.0, 40.0), 0.0);  // below the flush floor
  EXPECT_THROW(overlap_real(0.0, INFINITY), Error);
}

TEST(Overlap, ComplexMatchesRealOnRealAxis) {
  for (double a : {-2.0, 0.0, 0.7})
    for (double b : {-1.0, 0.3, 4.0}) {
      const auto c = overlap_complex({a, 0.0}, {b, 0.0});
      EXPECT_NEAR(c.real(), overlap_real(a, b), 1e-15);
      EXPECT_NEAR(c.imag(), 0.0, 1e-15);
    }
}

TEST(Overlap, ComplexModulusAndPhase) {
  const std::complex<double> a{0.0, 1.0}, b{1.0, 0.0};
  const auto c = overlap_complex(a, b);
  EXPECT_NEAR(std::abs(c), std::exp(-1.0), 1e-15);  // |a - b|^2 = 2
  EXPECT_NEAR(std::arg(c), 1.0, 1e-15);             // Im(a conj b) = 1
  EXPECT_NEAR(std::abs(overlap_complex(a, a) - 1.0), 0.0, 1e-15);
  // Hermitian: <a|b> = conj <b|a>.
  const auto d = overlap_complex(b, a);
  EXPECT_NEAR(std::abs(c - std::conj(d)), 0.0, 1e-15);
}

TEST(Overlap, KernelP) {
  EXPECT_NEAR(kernel_p(0.0, 1.0, 2.0), overlap_real(0.0, 1.0), 1e-15);
  EXPECT_NEAR(kernel_p(0.0, 2.0, 1.0), std::exp(-1.0), 1e-15);
  EXPECT_NEAR(kernel_p(0.0, 2.0, 4.0), std::exp(-8.0), 1e-15);
  EXPECT_THROW(kernel_p(0.0, 1.0, 0.0), Error);
}
