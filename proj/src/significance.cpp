#include "ddks/significance.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>
#include <vector>

#include "ddks/parallel.hpp"

namespace ddks {

namespace {

// Two normalized differences closer than this are treated as equal.
constexpr double kDeltaSlack = 1e-12;
constexpr double kPoissonTail = 1e-12;
// Permutations evaluated between early-stopping checks. Fixed so results do
// not depend on the worker count.
constexpr std::size_t kPermutationChunk = 8;

void check_rate(double lambda) {
  if (!(lambda > 0.0 && lambda < 1.0)) {
    std::ostringstream msg;
    msg << "rate " << lambda << " outside (0, 1)";
    fail(ErrorKind::DomainError, msg.str());
  }
}

void check_delta_args(double delta, std::size_t n_p, std::size_t n_t, double lambda) {
  if (!(delta >= 0.0 && delta <= 1.0)) fail(ErrorKind::DomainError, "delta outside [0, 1]");
  if (n_p == 0 || n_t == 0) fail(ErrorKind::DomainError, "sample sizes must be >= 1");
  check_rate(lambda);
}

std::vector<double> binomial_row(std::size_t m, double lambda) {
  std::vector<double> out(m + 1);
  for (std::size_t n = 0; n <= m; ++n) out[n] = std::exp(log_binomial_pmf(n, m, lambda));
  return out;
}

// Poisson(mean) pmf for n = 0..hi, where the mass above hi is < kPoissonTail.
std::vector<double> poisson_row(double mean) {
  std::vector<double> out;
  double cumulative = 0.0;
  for (std::size_t n = 0;; ++n) {
    const double v = poisson_pmf(n, mean);
    out.push_back(v);
    cumulative += v;
    const double x = static_cast<double>(n);
    if (x >= mean && 1.0 - cumulative < kPoissonTail) break;
    // rounding in the running sum can stall just short of the threshold
    if (x > mean + 50.0 * std::sqrt(mean) + 100.0) break;
  }
  return out;
}

bool within(std::size_t n1, std::size_t n_p, std::size_t n2, std::size_t n_t, double delta) {
  const double diff = static_cast<double>(n1) / static_cast<double>(n_p) -
                      static_cast<double>(n2) / static_cast<double>(n_t);
  return std::abs(diff) <= delta + kDeltaSlack;
}

}  // namespace

double log_binomial_pmf(std::size_t n, std::size_t m, double lambda) {
  if (n > m) fail(ErrorKind::DomainError, "successes exceed trials");
  check_rate(lambda);
  const double nn = static_cast<double>(n);
  const double mm = static_cast<double>(m);
  return std::lgamma(mm + 1.0) - std::lgamma(nn + 1.0) - std::lgamma(mm - nn + 1.0) +
         nn * std::log(lambda) + (mm - nn) * std::log1p(-lambda);
}

double binomial_pmf(std::size_t n, std::size_t m, double lambda) {
  return std::exp(log_binomial_pmf(n, m, lambda));
}

double poisson_pmf(std::size_t n, double mean) {
  const double nn = static_cast<double>(n);
  return std::exp(nn * std::log(mean) - mean - std::lgamma(nn + 1.0));
}

double delta_cdf(double delta, std::size_t n_p, std::size_t n_t, double lambda) {
  check_delta_args(delta, n_p, n_t, lambda);
  if (delta + kDeltaSlack >= 1.0) return 1.0;
  const auto pmf_p = binomial_row(n_p, lambda);
  const auto pmf_t = binomial_row(n_t, lambda);
  double total = 0.0;
  for (std::size_t n1 = 0; n1 <= n_p; ++n1) {
    double row = 0.0;
    for (std::size_t n2 = 0; n2 <= n_t; ++n2)
      if (within(n1, n_p, n2, n_t, delta)) row += pmf_t[n2];
    total += pmf_p[n1] * row;
  }
  return std::clamp(total, 0.0, 1.0);
}

double delta_cdf_poisson(double delta, std::size_t n_p, std::size_t n_t, double lambda) {
  check_delta_args(delta, n_p, n_t, lambda);
  const auto pmf_p = poisson_row(static_cast<double>(n_p) * lambda);
  const auto pmf_t = poisson_row(static_cast<double>(n_t) * lambda);

  // For fixed n1 the admissible n2 form a contiguous run; sum it from a
  // running prefix of pmf_t.
  std::vector<double> prefix(pmf_t.size() + 1, 0.0);
  for (std::size_t k = 0; k < pmf_t.size(); ++k) prefix[k + 1] = prefix[k] + pmf_t[k];

  // Every outcome pair counts at delta = 1, including Poisson counts beyond
  // the sample size.
  if (delta + kDeltaSlack >= 1.0) {
    const double mass_p = std::accumulate(pmf_p.begin(), pmf_p.end(), 0.0);
    return std::clamp(mass_p * prefix.back(), 0.0, 1.0);
  }

  const double np = static_cast<double>(n_p);
  const double nt = static_cast<double>(n_t);
  const std::size_t last = pmf_t.size() - 1;
  double total = 0.0;
  for (std::size_t n1 = 0; n1 < pmf_p.size(); ++n1) {
    const double centre = static_cast<double>(n1) / np * nt;
    const double span = (delta + kDeltaSlack) * nt;
    const double lo_guess = std::max(0.0, std::floor(centre - span) - 1.0);
    if (lo_guess > static_cast<double>(last)) continue;
    auto lo = static_cast<std::size_t>(lo_guess);
    auto hi = static_cast<std::size_t>(std::min(std::ceil(centre + span) + 1.0, static_cast<double>(last)));
    while (lo <= hi && !within(n1, n_p, lo, n_t, delta)) ++lo;
    if (lo > hi) continue;
    while (!within(n1, n_p, hi, n_t, delta)) --hi;  // stops at lo at the latest
    total += pmf_p[n1] * (prefix[hi + 1] - prefix[lo]);
  }
  return std::clamp(total, 0.0, 1.0);
}

RateEstimate estimate_rate(std::size_t count, std::size_t n) {
  if (count > n) fail(ErrorKind::DomainError, "count exceeds sample size");
  return {(static_cast<double>(count) + 1.0) / (static_cast<double>(n) + 2.0), count, n};
}

double ddks_significance(const SignificanceInput& in, const SignificanceOptions& options) {
  const auto& ct = in.counts_t;
  if (in.n_p == 0 || in.n_t == 0) fail(ErrorKind::DomainError, "sample sizes must be >= 1");
  if (!(in.statistic >= 0.0 && in.statistic <= 1.0)) fail(ErrorKind::DomainError, "statistic outside [0, 1]");
  if (ct.rows != in.n_p + in.n_t)
    fail(ErrorKind::DomainError, "T counts must cover all n_p + n_t test points");
  if (ct.counts.size() != ct.rows * ct.orthants) fail(ErrorKind::DomainError, "malformed T count matrix");
  if (options.pooled_rates) {
    if (!in.counts_p || in.counts_p->rows != ct.rows || in.counts_p->orthants != ct.orthants)
      fail(ErrorKind::DomainError, "pooled rates need P counts of the same shape");
  }

  const std::size_t rate_n = options.pooled_rates ? in.n_p + in.n_t : in.n_t;
  const bool poisson_by_size = in.n_p + in.n_t > options.poisson_total_threshold;
  const bool saturated = in.statistic + kDeltaSlack >= 1.0;

  auto log_factor = [&](std::size_t count) -> double {
    if (saturated) return 0.0;
    const double lambda = estimate_rate(count, rate_n).lambda_hat;
    const bool poisson = poisson_by_size || lambda < options.poisson_rate_threshold;
    const double prob = poisson ? delta_cdf_poisson(in.statistic, in.n_p, in.n_t, lambda)
                                : delta_cdf(in.statistic, in.n_p, in.n_t, lambda);
    return std::log(prob);
  };

  auto cell_count = [&](std::size_t idx) -> std::size_t {
    std::size_t c = ct.counts[idx];
    if (c > in.n_t) fail(ErrorKind::DomainError, "T count exceeds n_t");
    if (options.pooled_rates) {
      const std::size_t cp = in.counts_p->counts[idx];
      if (cp > in.n_p) fail(ErrorKind::DomainError, "P count exceeds n_p");
      c += cp;
    }
    return c;
  };

  std::vector<double> memo;
  std::vector<char> known;
  if (options.memoize) {
    memo.assign(rate_n + 1, 0.0);
    known.assign(rate_n + 1, 0);
    for (std::size_t idx = 0; idx < ct.counts.size(); ++idx) {
      const std::size_t c = cell_count(idx);
      if (!known[c]) {
        memo[c] = log_factor(c);
        known[c] = 1;
      }
    }
  }

  double log_product = 0.0;
  for (std::size_t idx = 0; idx < ct.counts.size(); ++idx) {
    const std::size_t c = cell_count(idx);
    log_product += options.memoize ? memo[c] : log_factor(c);
  }
  return std::clamp(0.0 - std::expm1(log_product), 0.0, 1.0);
}

AnalyticalResult ddks_analytical(const Sample& p, const Sample& t, const SignificanceOptions& options,
                                 const ExactOptions& exact) {
  DdksEvaluation eval = ddks_evaluate(p, t, exact);
  SignificanceInput in;
  in.statistic = eval.statistic;
  in.n_p = p.size();
  in.n_t = t.size();
  in.counts_t = std::move(eval.counts_t);
  if (options.pooled_rates) in.counts_p = std::move(eval.counts_p);
  return {in.statistic, ddks_significance(in, options)};
}

// ---------------------------------------------------------------------------

PermutationResult permutation_test_detailed(const StatisticFn& statistic, const Sample& p, const Sample& t,
                                            std::size_t n_perm, const RngSpec& rng,
                                            std::optional<double> stop_above) {
  if (n_perm == 0) fail(ErrorKind::DomainError, "permutation count must be >= 1");
  validate_pair(p, t);

  PermutationResult result;
  result.observed = statistic(p, t);
  const Sample pooled = concatenate(p, t);
  const std::size_t total = pooled.size();
  const std::size_t n_p = p.size();
  const double denom = static_cast<double>(n_perm + 1);

  std::vector<double> stats(kPermutationChunk);
  for (std::size_t start = 0; start < n_perm; start += kPermutationChunk) {
    const std::size_t count = std::min(kPermutationChunk, n_perm - start);
    parallel_for(count, total * total * p.dim(), [&](std::size_t offset) {
      Rng gen(rng.derive(start + offset));
      std::vector<std::size_t> order(total);
      std::iota(order.begin(), order.end(), std::size_t{0});
      for (std::size_t i = total - 1; i > 0; --i) std::swap(order[i], order[gen.below(i + 1)]);
      const std::span<const std::size_t> idx(order);
      stats[offset] = statistic(gather(pooled, idx.first(n_p)), gather(pooled, idx.subspan(n_p)));
    });
    for (std::size_t k = 0; k < count; ++k)
      if (stats[k] >= result.observed) ++result.exceedances;
    result.evaluated += count;

    if (stop_above && result.evaluated < n_perm &&
        static_cast<double>(result.exceedances + 1) / denom > *stop_above) {
      result.complete = false;
      break;
    }
  }
  result.p_value = static_cast<double>(result.exceedances + 1) / denom;
  return result;
}

double permutation_test(const StatisticFn& statistic, const Sample& p, const Sample& t, std::size_t n_perm,
                        const RngSpec& rng) {
  return permutation_test_detailed(statistic, p, t, n_perm, rng).p_value;
}

}  // namespace ddks
