#pragma once

// Embedded property fixtures run by `histent selfcheck`. Seeds are fixed and
// the printed table contains no timings, so two runs produce identical bytes.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <random>
#include <string>
#include <vector>

#include "histent/analysis.hpp"
#include "histent/eigensolver.hpp"
#include "histent/entropy.hpp"
#include "histent/gram.hpp"
#include "histent/majorization.hpp"

namespace histent {

struct FixtureResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct SelfcheckReport {
  std::vector<FixtureResult> results;

  bool all_passed() const {
    return std::all_of(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  }
};

/// Amplitudes far enough apart (>= 12) that their overlaps are below 1e-31.
inline constexpr double kFarSeparation = 12.0;

/// Eight points whose p = 4 kernel matrix has a clearly negative eigenvalue.
inline const std::vector<double>& p4_kernel_witness() {
  static const std::vector<double> w = {0.747, 1.493, 1.507, 2.35, 2.388, 3.032, 3.095, 3.822};
  return w;
}

namespace detail {

inline std::string sci(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", x);
  return buf;
}

inline EntanglementSpectrum spectrum_with(const EigenSolverFn& solver, const OverlapMatrix& o) {
  return spectrum_from_eigenvalues(solver(o.entries(), false).values);
}

inline std::vector<double> random_alphas(std::mt19937_64& rng, std::size_t n, double spread) {
  std::uniform_real_distribution<double> u(-spread, spread);
  std::vector<double> a(n);
  for (double& x : a) x = u(rng);
  return a;
}

inline FixtureResult fixture_psd_sample(const EigenSolverFn& solver) {
  std::mt19937_64 rng(1001);
  std::uniform_int_distribution<std::size_t> size(1, 32);
  std::uniform_real_distribution<double> spread(0.1, 20.0);
  double worst = 0.0;
  for (int t = 0; t < 200; ++t) {
    const auto a = random_alphas(rng, size(rng), spread(rng));
    const auto values = solver(build_overlap_matrix(a).entries(), false).values;
    worst = std::min(worst, *std::min_element(values.begin(), values.end()));
  }
  return {"psd-sample", worst >= -1e-10, "min eigenvalue " + sci(worst)};
}

inline FixtureResult fixture_spectral_reconstruction(const EigenSolverFn& solver) {
  std::mt19937_64 rng(1002);
  double worst = 0.0;
  for (std::size_t n : {3u, 8u, 20u, 40u, 64u}) {
    const OverlapMatrix o = build_overlap_matrix(random_alphas(rng, n, 3.0));
    const SymmetricEigen eig = solver(o.entries(), true);
    if (eig.vectors.rows() != n || eig.vectors.cols() != n)
      return {"spectral-reconstruction", false, "solver returned no eigenvectors"};
    Matrix rebuilt(n, n);
    Matrix gram(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        double r = 0.0, g = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          r += eig.vectors(i, k) * eig.values[k] * eig.vectors(j, k);
          g += eig.vectors(k, i) * eig.vectors(k, j);
        }
        rebuilt(i, j) = r;
        gram(i, j) = g;
      }
    worst = std::max({worst, max_abs_diff(rebuilt, o.entries()),
                      max_abs_diff(gram, Matrix::identity(n))});
  }
  return {"spectral-reconstruction", worst <= 1e-10, "max residual " + sci(worst)};
}

inline FixtureResult fixture_block_spectrum(const EigenSolverFn& solver) {
  std::mt19937_64 rng(1003);
  std::uniform_int_distribution<std::size_t> clusters(1, 6), mult(1, 5);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    std::vector<double> a;
    std::vector<double> expected;
    const std::size_t k = clusters(rng);
    for (std::size_t c = 0; c < k; ++c) {
      const std::size_t m = mult(rng);
      for (std::size_t i = 0; i < m; ++i) a.push_back(kFarSeparation * static_cast<double>(c));
      expected.push_back(static_cast<double>(m));
    }
    for (double& e : expected) e /= static_cast<double>(a.size());
    std::sort(expected.begin(), expected.end(), std::greater<>());
    const auto s = spectrum_with(solver, build_overlap_matrix(a));
    if (s.rank != expected.size())
      return {"block-spectrum", false, "rank " + std::to_string(s.rank) + " expected " +
                                           std::to_string(expected.size())};
    for (std::size_t i = 0; i < expected.size(); ++i)
      worst = std::max(worst, std::abs(s.lambdas[i] - expected[i]));
  }
  return {"block-spectrum", worst <= 1e-9, "max deviation " + sci(worst)};
}

inline FixtureResult fixture_lemma1_regression(const EigenSolverFn& solver) {
  std::mt19937_64 rng(1004);
  std::uniform_int_distribution<std::size_t> size(1, 24);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    auto a = random_alphas(rng, size(rng), 2.0);
    const auto before = spectrum_with(solver, build_overlap_matrix(a));
    const double far = *std::max_element(a.begin(), a.end()) + 2.0 * kFarSeparation;
    a.push_back(far);
    const auto after = spectrum_with(solver, build_overlap_matrix(a));
    const auto predicted = lemma1_extend(before, a.size() - 1);
    for (std::size_t i = 0; i < after.size(); ++i)
      worst = std::max(worst, std::abs(after.lambdas[i] - predicted.lambdas[i]));
    const RegimeLabel label = classify_step(before, after, 1e-3);
    if (label.label != Regime::I)
      return {"lemma1-regression", false, "far state labelled " + std::string(to_string(label.label))};
  }
  return {"lemma1-regression", worst <= 1e-8, "max deviation " + sci(worst)};
}

inline FixtureResult fixture_purity_identity(const EigenSolverFn& solver) {
  std::mt19937_64 rng(1005);
  std::uniform_int_distribution<std::size_t> size(2, 40);
  double worst = 0.0;
  for (int t = 0; t < 50; ++t) {
    const OverlapMatrix o = build_overlap_matrix(random_alphas(rng, size(rng), 4.0));
    const double direct = renyi2_from_purity(o).value;
    const double spectral = renyi(spectrum_with(solver, o), 2.0).value;
    worst = std::max(worst, std::abs(direct - spectral));
  }
  return {"purity-identity", worst <= 1e-9, "max |E2 difference| " + sci(worst)};
}

inline FixtureResult fixture_tsallis_renyi_identity(const EigenSolverFn& solver) {
  // S_q = (exp((1-q) R_q) - 1) / (1 - q) with R_q in nats.
  std::mt19937_64 rng(1006);
  double worst = 0.0;
  for (int t = 0; t < 20; ++t) {
    const auto s = spectrum_with(solver, build_overlap_matrix(random_alphas(rng, 16, 3.0)));
    for (double q : {0.5, 2.0, 3.0}) {
      const double r = renyi(s, q, LogBase::Nats).value;
      const double expected = std::expm1((1.0 - q) * r) / (1.0 - q);
      worst = std::max(worst, std::abs(tsallis(s, q) - expected));
    }
  }
  return {"tsallis-renyi-identity", worst <= 1e-10, "max deviation " + sci(worst)};
}

inline FixtureResult fixture_regime_ii(const EigenSolverFn& solver) {
  // Repeating the dominant state: (0.5, 0.25, 0.25) -> (0.6, 0.2, 0.2).
  const double d = 2.0 * kFarSeparation;
  const std::vector<double> before_a = {0.0, d, 0.0, 2.0 * d};
  std::vector<double> after_a = before_a;
  after_a.push_back(0.0);
  const auto before = spectrum_with(solver, build_overlap_matrix(before_a));
  const auto after = spectrum_with(solver, build_overlap_matrix(after_a));
  const RegimeLabel label = classify_step(before, after, 1e-3);
  const double e0 = von_neumann(before).value;
  const double e1 = von_neumann(after).value;
  const bool ok = label.label == Regime::II && std::abs(e0 - 1.5) <= 1e-6 &&
                  std::abs(e1 - 1.370950594455) <= 1e-6;
  char buf[96];
  std::snprintf(buf, sizeof buf, "regime %s, vN %.6f -> %.6f bits",
                std::string(to_string(label.label)).c_str(), e0, e1);
  return {"regime-ii-construction", ok, buf};
}

inline FixtureResult fixture_p4_witness(const EigenSolverFn& solver) {
  const auto values = solver(kernel_matrix(p4_kernel_witness(), 4.0), false).values;
  const double low = *std::min_element(values.begin(), values.end());
  return {"p4-kernel-witness", low < -0.1, "min eigenvalue " + sci(low)};
}

inline FixtureResult fixture_incremental_purity() {
  std::mt19937_64 rng(1007);
  const auto a = random_alphas(rng, 128, 6.0);
  const auto running = incremental_purities(a);
  double worst = 0.0;
  for (std::size_t n = 1; n <= a.size(); ++n) {
    const double direct = purity(build_overlap_matrix(std::span<const double>(a).first(n)));
    worst = std::max(worst, std::abs(running[n - 1] - direct));
  }
  return {"incremental-purity", worst <= 1e-10, "max deviation " + sci(worst)};
}

}  // namespace detail

inline SelfcheckReport run_selfcheck(const EigenSolverFn& solver = [](const Matrix& a, bool v) {
  return eigh(a, v);
}) {
  using Fixture = FixtureResult (*)(const EigenSolverFn&);
  struct Named {
    const char* name;
    Fixture run;
  };
  const Named fixtures[] = {
      {"psd-sample", detail::fixture_psd_sample},
      {"spectral-reconstruction", detail::fixture_spectral_reconstruction},
      {"block-spectrum", detail::fixture_block_spectrum},
      {"lemma1-regression", detail::fixture_lemma1_regression},
      {"purity-identity", detail::fixture_purity_identity},
      {"tsallis-renyi-identity", detail::fixture_tsallis_renyi_identity},
      {"regime-ii-construction", detail::fixture_regime_ii},
      {"p4-kernel-witness", detail::fixture_p4_witness},
      {"incremental-purity", [](const EigenSolverFn&) { return detail::fixture_incremental_purity(); }},
  };
  SelfcheckReport report;
  for (const auto& f : fixtures) {
    try {
      report.results.push_back(f.run(solver));
    } catch (const std::exception& e) {
      report.results.push_back({f.name, false, e.what()});
    }
  }
  return report;
}

inline void print_selfcheck(const SelfcheckReport& report, std::ostream& out) {
  char line[160];
  for (const auto& r : report.results) {
    std::snprintf(line, sizeof line, "%-26s %-4s  %s\n", r.name.c_str(), r.passed ? "PASS" : "FAIL",
                  r.detail.c_str());
    out << line;
  }
  std::size_t failed = 0;
  for (const auto& r : report.results) failed += r.passed ? 0 : 1;
  out << (failed == 0 ? "selfcheck: all fixtures passed\n"
                      : "selfcheck: " + std::to_string(failed) + " fixture(s) failed\n");
}

}  // namespace histent
