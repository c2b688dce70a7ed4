#include "ddks/method.hpp"

#include <chrono>

#include "ddks/baselines.hpp"
#include "ddks/rdks.hpp"

namespace ddks {

double compute_statistic(Method method, const Sample& p, const Sample& t, const StatisticOptions& options) {
  switch (method) {
    case Method::ddks: return ddks_statistic(p, t, options.exact);
    case Method::ddks_naive: return ddks_statistic_naive(p, t);
    case Method::vdks: return vdks_statistic(p, t, options.vdks);
    case Method::rdks: return rdks_statistic(p, t);
    case Method::onedks: return onedks(p, t);
    case Method::hotelling_t2: return hotelling_t2(p, t);
    case Method::kl_div: return kl_divergence(p, t, options.memory_budget);
  }
  fail(ErrorKind::BadSpec, "unknown method");
}

StatisticFn statistic_fn(Method method, const StatisticOptions& options) {
  return [method, options](const Sample& p, const Sample& t) { return compute_statistic(method, p, t, options); };
}

TestOutcome run_test(Method method, const Sample& p, const Sample& t, const TestConfig& config) {
  validate_pair(p, t);
  const auto start = std::chrono::steady_clock::now();

  TestOutcome out;
  out.method = method;
  out.n_p = p.size();
  out.n_t = t.size();
  out.d = p.dim();
  out.seed = config.seed;

  if (config.analytical) {
    if (method != Method::ddks && method != Method::ddks_naive)
      fail(ErrorKind::BadSpec, "analytical significance is only defined for ddks");
    const auto result = ddks_analytical(p, t, config.significance, config.statistic.exact);
    out.statistic = result.statistic;
    out.p_value = result.significance;
  } else if (config.permutations > 0) {
    const auto result = permutation_test_detailed(statistic_fn(method, config.statistic), p, t,
                                                  config.permutations, RngSpec{config.seed, 0});
    out.statistic = result.observed;
    out.p_value = result.p_value;
  } else {
    out.statistic = compute_statistic(method, p, t, config.statistic);
  }

  out.runtime_ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
  out.check();
  return out;
}

}  // namespace ddks
