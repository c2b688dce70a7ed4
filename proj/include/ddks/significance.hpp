#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>

#include "ddks/core.hpp"
#include "ddks/exact.hpp"

namespace ddks {

// C(m, n) lambda^n (1 - lambda)^(m - n), evaluated in log space.
double binomial_pmf(std::size_t n, std::size_t m, double lambda);
double log_binomial_pmf(std::size_t n, std::size_t m, double lambda);

double poisson_pmf(std::size_t n, double mean);

// Probability that |n1/n_p - n2/n_t| <= delta for independent
// n1 ~ Bi(n_p, lambda), n2 ~ Bi(n_t, lambda). Direct double sum.
double delta_cdf(double delta, std::size_t n_p, std::size_t n_t, double lambda);

// Same quantity with Poisson(m * lambda) counts, truncated where the tail
// mass drops below 1e-12.
double delta_cdf_poisson(double delta, std::size_t n_p, std::size_t n_t, double lambda);

// Posterior mean of a binomial rate under a uniform prior.
struct RateEstimate {
  double lambda_hat = 0.5;
  std::size_t source_count = 0;
  std::size_t source_n = 0;
};

RateEstimate estimate_rate(std::size_t count, std::size_t n);

struct SignificanceInput {
  double statistic = 0.0;
  std::size_t n_p = 0;
  std::size_t n_t = 0;
  // T's orthant counts at all n_p + n_t concatenated test points.
  MembershipMatrix counts_t;
  // Only needed for pooled rate estimation.
  std::optional<MembershipMatrix> counts_p;
};

struct SignificanceOptions {
  bool memoize = true;
  // Estimate rates from P and T together instead of T alone.
  bool pooled_rates = false;
  std::size_t poisson_total_threshold = 2000;
  double poisson_rate_threshold = 1e-3;
};

// 1 - prod over all cells of P(|difference| <= D), the product taken over
// every orthant at every test point with independent cells.
double ddks_significance(const SignificanceInput& input, const SignificanceOptions& options = {});

// Exact ddKS followed by ddks_significance.
struct AnalyticalResult {
  double statistic = 0.0;
  double significance = 1.0;
};

AnalyticalResult ddks_analytical(const Sample& p, const Sample& t, const SignificanceOptions& options = {},
                                 const ExactOptions& exact = {});

// ---------------------------------------------------------------------------
// Permutation test

using StatisticFn = std::function<double(const Sample&, const Sample&)>;

struct PermutationResult {
  double observed = 0.0;
  double p_value = 1.0;
  std::size_t exceedances = 0;  // permuted statistics >= observed
  std::size_t evaluated = 0;    // permutations actually computed
  bool complete = true;         // false when stopped early
};

// Pools P and T and recomputes the statistic on n_perm random splits of the
// same sizes; p = (1 + exceedances) / (1 + n_perm). Permutation j draws from
// rng.derive(j), so the result does not depend on evaluation order.
//
// With stop_above set, evaluation stops as soon as the p-value is known to
// exceed it; p_value is then a lower bound and complete is false.
PermutationResult permutation_test_detailed(const StatisticFn& statistic, const Sample& p, const Sample& t,
                                            std::size_t n_perm, const RngSpec& rng,
                                            std::optional<double> stop_above = std::nullopt);

double permutation_test(const StatisticFn& statistic, const Sample& p, const Sample& t, std::size_t n_perm,
                        const RngSpec& rng);

}  // namespace ddks
