#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "histent/entropy.hpp"

using namespace histent;

TEST(VonNeumann, KnownDistributions) {
  EXPECT_NEAR(von_neumann(std::vector<double>{0.75, 0.25}).value, 0.811278124459, 1e-12);
  EXPECT_NEAR(von_neumann(std::vector<double>{0.6, 0.4}).value, 0.970950594455, 1e-12);
  EXPECT_NEAR(von_neumann(std::vector<double>{0.6, 0.2, 0.2}).value, 1.370950594455, 1e-12);
  EXPECT_NEAR(von_neumann(std::vector<double>{0.5, 0.25, 0.25}).value, 1.5, 1e-15);
  EXPECT_EQ(von_neumann(std::vector<double>{1.0, 0.0}).value, 0.0);
  EXPECT_NEAR(von_neumann(std::vector<double>(5, 0.2)).value, std::log2(5.0), 1e-15);
}

TEST(VonNeumann, NatsAndConversion) {
  const std::vector<double> p = {0.5, 0.5};
  const auto nats = von_neumann(p, LogBase::Nats);
  EXPECT_NEAR(nats.value, std::numbers::ln2, 1e-15);
  EXPECT_NEAR(convert(nats, LogBase::Bits).value, 1.0, 1e-15);
  EXPECT_EQ(convert(nats, LogBase::Bits).base, LogBase::Bits);
}

TEST(EffectiveStates, PowerOfTwo) {
  const auto e = von_neumann(std::vector<double>{0.75, 0.25});
  EXPECT_NEAR(effective_states(e), 1.754765350603, 1e-12);
  EXPECT_THROW(effective_states(convert(e, LogBase::Nats)), Error);
}

TEST(Renyi, QuadraticAndLimits) {
  const std::vector<double> p = {0.75, 0.25};
  EXPECT_NEAR(renyi(p, 2.0).value, 0.678071905113, 1e-12);
  EXPECT_NEAR(renyi(p, 1.0).value, von_neumann(p).value, 1e-15);
  EXPECT_NEAR(renyi(p, 1.0 + 1e-7).value, von_neumann(p).value, 1e-15);
  // q -> 1 from outside the window converges to von Neumann.
  EXPECT_NEAR(renyi(p, 1.0 + 1e-4).value, von_neumann(p).value, 1e-4);
  // Non-increasing in q.
  double prev = INFINITY;
  for (double q : {0.25, 0.5, 1.0, 2.0, 3.0, 10.0}) {
    const double e = renyi(p, q).value;
    EXPECT_LE(e, prev + 1e-15);
    prev = e;
  }
  EXPECT_THROW(renyi(p, 0.0), Error);
  EXPECT_THROW(renyi(p, -1.0), Error);
}

TEST(Renyi, UniformIsLogN) {
  const std::vector<double> p(8, 0.125);
  for (double q : {0.5, 1.0, 2.0, 7.0}) EXPECT_NEAR(renyi(p, q).value, 3.0, 1e-14);
}

TEST(Tsallis, Identities) {
  const std::vector<double> p = {0.5, 0.3, 0.2};
  EXPECT_NEAR(tsallis(p, 2.0), 1.0 - (0.25 + 0.09 + 0.04), 1e-15);
  EXPECT_NEAR(tsallis(p, 1.0), von_neumann(p, LogBase::Nats).value, 1e-15);
  for (double q : {0.5, 3.0}) {
    const double r = renyi(p, q, LogBase::Nats).value;
    EXPECT_NEAR(tsallis(p, q), std::expm1((1.0 - q) * r) / (1.0 - q), 1e-14);
  }
  EXPECT_THROW(tsallis(p, 0.0), Error);
}

TEST(Renyi2FromPurity, ThreeAmplitudes) {
  const std::vector<double> a = {0.0, 1.0, 2.0};
  const auto o = build_overlap_matrix(a);
  EXPECT_NEAR(renyi2_from_purity(o).value, 0.997389789, 1e-9);
  EXPECT_NEAR(renyi2_from_purity(o).value, renyi(spectrum(o), 2.0).value, 1e-12);
  EXPECT_NEAR(renyi2_from_purity(o, LogBase::Nats).value, -std::log(0.500905449163), 1e-12);
}

TEST(Renyi2FromPurity, RandomInstancesMatchSpectrum) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int t = 0; t < 30; ++t) {
    std::vector<double> a(2 + t);
    for (double& x : a) x = u(rng);
    const auto o = build_overlap_matrix(a);
    EXPECT_NEAR(renyi2_from_purity(o).value, renyi(spectrum(o), 2.0).value, 1e-10);
  }
}

TEST(Approximations, SmallSigmaTwoStates) {
  const std::vector<double> a = {0.0, 3.0};
  const double approx = e2_small_sigma_approx(a);
  EXPECT_NEAR(approx, 0.693023770756, 1e-12);
  const double exact = renyi2_from_purity(build_overlap_matrix(a), LogBase::Nats).value;
  EXPECT_NEAR(exact, 0.693023778370, 1e-12);
  EXPECT_NEAR(approx, exact, 1e-8);
}

TEST(Approximations, LargeSigmaVariance) {
  const std::vector<double> p = {0.0, 1.0};
  EXPECT_NEAR(e2_variance_approx(p, 100.0), 5e-5, 1e-18);
  const auto alphas = embed(p, {.sigma = 100.0});
  const double exact = renyi2_from_purity(build_overlap_matrix(alphas), LogBase::Nats).value;
  EXPECT_NEAR(exact, 4.99987500e-5, 1e-13);
  EXPECT_THROW(e2_variance_approx(p, 0.0), Error);
}

TEST(Approximations, LogFluctuation) {
  const std::vector<double> p = {100.0, 101.0, 99.5, 100.7};
  const double approx = e2_log_fluctuation(p, 10.0);
  const auto alphas = embed(p, {.sigma = 10.0, .mode = EmbeddingMode::LogPrice});
  const double exact = renyi2_from_purity(build_overlap_matrix(alphas), LogBase::Nats).value;
  EXPECT_NEAR(approx / exact, 1.0, 1e-4);
  EXPECT_THROW(e2_log_fluctuation(std::vector<double>{1.0, -1.0}, 1.0), Error);
}

TEST(AnalyticContinuous, KnownValues) {
  EXPECT_NEAR(renyi_analytic_continuous(ContinuousDistribution::Gaussian, 1.0, 2.0),
              1.265512123484645, 1e-14);
  EXPECT_NEAR(renyi_analytic_continuous(ContinuousDistribution::Gaussian, 1.0, 1.0),
              0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e), 1e-14);
  EXPECT_NEAR(renyi_analytic_continuous(ContinuousDistribution::Exponential, 1.0, 2.0),
              std::numbers::ln2, 1e-15);
  EXPECT_NEAR(renyi_analytic_continuous(ContinuousDistribution::Exponential, 1.0, 1.0), 1.0, 1e-15);
  EXPECT_THROW(renyi_analytic_continuous(ContinuousDistribution::Gaussian, 0.0, 2.0), Error);
}

TEST(AnalyticContinuous, SigmaShift) {
  for (auto d : {ContinuousDistribution::Gaussian, ContinuousDistribution::Exponential})
    for (double q : {0.5, 1.0, 2.0, 5.0})
      EXPECT_NEAR(renyi_analytic_continuous(d, 2.0, q) - renyi_analytic_continuous(d, 1.0, q),
                  std::numbers::ln2, 1e-12);
}

TEST(MaxEntropy, LogN) {
  EXPECT_EQ(max_entropy(1), 0.0);
  EXPECT_NEAR(max_entropy(5), 2.321928094887362, 1e-15);
  EXPECT_NEAR(max_entropy(5, LogBase::Nats), std::log(5.0), 1e-15);
}
