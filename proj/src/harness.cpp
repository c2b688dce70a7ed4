#include "ddks/harness.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cmath>
#include <numeric>

#include "ddks/parallel.hpp"

namespace ddks {

namespace {

// Trials are decided in fixed-size chunks so early stopping never depends on
// the worker count.
constexpr std::size_t kTrialChunk = 8;

std::size_t criterion_rank(const PowerConfig& c) {
  const auto k = static_cast<std::size_t>(std::ceil(c.power_target * static_cast<double>(c.trials) - 1e-9));
  return std::clamp<std::size_t>(k, 1, c.trials);
}

void check_config(const PowerConfig& c) {
  if (c.trials == 0) fail(ErrorKind::BadSpec, "trials must be >= 1");
  if (!(c.alpha > 0 && c.alpha < 1)) fail(ErrorKind::BadSpec, "alpha must lie in (0, 1)");
  if (!(c.power_target > 0 && c.power_target <= 1)) fail(ErrorKind::BadSpec, "power_target must lie in (0, 1]");
  if (!(c.tolerance >= 0)) fail(ErrorKind::BadSpec, "tolerance must be >= 0");
  if (c.repetitions == 0) fail(ErrorKind::BadSpec, "repetitions must be >= 1");
  if (c.n_min < 2 || c.n_max < c.n_min) fail(ErrorKind::BadSpec, "need 2 <= n_min <= n_max");
  if (c.analytical && c.method != Method::ddks && c.method != Method::ddks_naive)
    fail(ErrorKind::BadSpec, "analytical significance is only defined for ddks");
  if (!c.analytical && c.permutations == 0) fail(ErrorKind::BadSpec, "permutations must be >= 1");
}

double trial(const PowerConfig& config, const DatasetSpec& spec, std::size_t n, const RngSpec& rng,
             bool early_stop) {
  DatasetSpec drawn = spec;
  drawn.rng = rng.derive(0);
  const auto [p, t] = gen_pair(drawn, n);
  try {
    return trial_p_value(config, p, t, rng.derive(1), early_stop);
  } catch (const Error& e) {
    // Too few points for the method (Hotelling below d + 2, for one): the
    // test cannot be carried out, which counts as not rejecting.
    if (e.kind() == ErrorKind::InsufficientSamples || e.kind() == ErrorKind::SingularCovariance) return 1.0;
    throw;
  }
}

Spread spread_of(const std::vector<double>& values) {
  Spread s;
  if (values.empty()) return s;
  const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
  s.min = *lo;
  s.max = *hi;
  s.mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  s.mean = std::clamp(s.mean, s.min, s.max);
  return s;
}

std::uint64_t key_of(double value) { return std::bit_cast<std::uint64_t>(value); }

}  // namespace

double trial_p_value(const PowerConfig& config, const Sample& p, const Sample& t, const RngSpec& rng,
                     bool early_stop) {
  if (config.analytical) return ddks_analytical(p, t, config.significance, config.statistic.exact).significance;
  std::optional<double> stop;
  if (early_stop) stop = config.alpha;
  return permutation_test_detailed(statistic_fn(config.method, config.statistic), p, t, config.permutations, rng,
                                   stop)
      .p_value;
}

double rejection_rate(const PowerConfig& config, const DatasetSpec& spec, std::size_t n, std::size_t trials,
                      double alpha, const RngSpec& rng) {
  if (trials == 0) fail(ErrorKind::BadSpec, "trials must be >= 1");
  PowerConfig c = config;
  c.alpha = alpha;
  c.trials = trials;
  check_config(c);
  std::vector<double> pv(trials);
  parallel_for(trials, [&](std::size_t i) { pv[i] = trial(c, spec, n, rng.derive(i), false); });
  const auto hits = std::count_if(pv.begin(), pv.end(), [&](double v) { return v <= alpha; });
  return static_cast<double>(hits) / static_cast<double>(trials);
}

CandidateResult evaluate_candidate(const PowerConfig& config, const DatasetSpec& spec, std::size_t n,
                                   const RngSpec& rng) {
  check_config(config);
  const std::size_t k = criterion_rank(config);
  const std::size_t misses_allowed = config.trials - k;

  CandidateResult out;
  std::vector<double> pv;
  pv.reserve(config.trials);
  for (std::size_t start = 0; start < config.trials; start += kTrialChunk) {
    const std::size_t count = std::min(kTrialChunk, config.trials - start);
    std::vector<double> chunk(count);
    parallel_for(count, [&](std::size_t j) { chunk[j] = trial(config, spec, n, rng.derive(start + j), config.early_stop); });
    for (double v : chunk) {
      pv.push_back(v);
      if (v <= config.alpha) ++out.rejections;
    }
    out.trials_run = pv.size();
    if (!config.early_stop) continue;
    if (out.rejections >= k || out.trials_run - out.rejections > misses_allowed) break;
  }
  out.met = out.rejections >= k;
  if (out.met) {
    std::nth_element(pv.begin(), pv.begin() + static_cast<std::ptrdiff_t>(k - 1), pv.end());
    out.achieved = pv[k - 1];
  }
  return out;
}

PowerReport min_sample_size(const PowerConfig& config, const DatasetSpec& spec, const RngSpec& rng) {
  check_config(config);
  spec.check();
  PowerReport report;
  report.target = "sample_size";
  report.method = config.method;
  report.dataset = spec;
  report.config = config;

  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const RngSpec rep_rng = rng.derive(rep);
    auto met = [&](std::size_t n) { return evaluate_candidate(config, spec, n, rep_rng.derive(n)); };

    // Doubling bracket: lo fails (or is below n_min), hi meets the criterion.
    std::size_t lo = config.n_min - 1;
    std::size_t hi = config.n_min;
    CandidateResult at_hi = met(hi);
    while (!at_hi.met && hi < config.n_max) {
      lo = hi;
      hi = std::min(hi * 2, config.n_max);
      at_hi = met(hi);
    }
    if (!at_hi.met) {
      report.values.push_back(static_cast<double>(config.n_max));
      report.stop_reasons.emplace_back("not_reachable");
      ++report.unreachable_repetitions;
      continue;
    }

    std::string reason = "bracket";
    if (std::abs(at_hi.achieved - config.alpha) <= config.tolerance) reason = "tolerance";
    while (reason == "bracket" && hi - lo > 1) {
      const std::size_t mid = lo + (hi - lo) / 2;
      const CandidateResult r = met(mid);
      if (r.met) {
        hi = mid;
        if (std::abs(r.achieved - config.alpha) <= config.tolerance) reason = "tolerance";
      } else {
        lo = mid;
      }
    }
    report.values.push_back(static_cast<double>(hi));
    report.stop_reasons.push_back(reason);
  }

  report.spread = spread_of(report.values);
  report.not_reachable = report.unreachable_repetitions == config.repetitions;
  return report;
}

PowerReport min_parameter_difference(const PowerConfig& config, const DatasetSpec& spec, std::size_t n,
                                     const RngSpec& rng) {
  check_config(config);
  spec.check();
  if (n < 2) fail(ErrorKind::BadSpec, "sample size must be >= 2");
  const double upper = difference_upper_bound(spec.family);  // BadSpec for dvu and file
  const double resolution = upper * config.difference_resolution;

  PowerReport report;
  report.target = "parameter_difference";
  report.method = config.method;
  report.dataset = spec;
  report.config = config;
  report.sample_size = n;

  for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
    const RngSpec rep_rng = rng.derive(rep);
    auto met = [&](double value) {
      DatasetSpec s = spec;
      s.params = with_difference(spec.family, spec.params, value);
      return evaluate_candidate(config, s, n, rep_rng.derive(key_of(value)));
    };

    if (!met(upper).met) {
      report.values.push_back(upper);
      report.stop_reasons.emplace_back("not_reachable");
      ++report.unreachable_repetitions;
      continue;
    }
    // A zero difference is the null hypothesis and is taken as failing.
    double lo = 0.0;
    double hi = upper;
    std::string reason = "bracket";
    while (hi - lo > resolution) {
      const double mid = 0.5 * (lo + hi);
      const CandidateResult r = met(mid);
      if (r.met) {
        hi = mid;
        if (std::abs(r.achieved - config.alpha) <= config.tolerance) {
          reason = "tolerance";
          break;
        }
      } else {
        lo = mid;
      }
    }
    report.values.push_back(hi);
    report.stop_reasons.push_back(reason);
  }

  report.spread = spread_of(report.values);
  report.not_reachable = report.unreachable_repetitions == config.repetitions;
  return report;
}

std::vector<PowerReport> dimension_sweep(const PowerConfig& config, const DatasetSpec& spec,
                                         const std::vector<std::size_t>& dims, const RngSpec& rng) {
  if (dims.empty()) fail(ErrorKind::BadSpec, "dimension list is empty");
  std::vector<PowerReport> out;
  out.reserve(dims.size());
  for (std::size_t d : dims) {
    DatasetSpec s = spec;
    s.d = d;
    out.push_back(min_sample_size(config, s, rng.derive(d)));
  }
  return out;
}

std::vector<PowerReport> split_repetitions(const PowerReport& report) {
  std::vector<PowerReport> out;
  for (std::size_t i = 0; i < report.values.size(); ++i) {
    PowerReport r = report;
    r.values = {report.values[i]};
    r.stop_reasons = {report.stop_reasons[i]};
    r.repetition = i;
    r.unreachable_repetitions = report.stop_reasons[i] == "not_reachable" ? 1 : 0;
    r.not_reachable = r.unreachable_repetitions == 1;
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<TimingRow> timing_benchmark(Method method, const std::vector<std::size_t>& n_list, std::size_t d,
                                        std::size_t reps, const DatasetSpec& spec,
                                        const StatisticOptions& options) {
  if (reps < 3) fail(ErrorKind::BadSpec, "timing needs reps >= 3");
  if (n_list.empty()) fail(ErrorKind::BadSpec, "sample size list is empty");
  std::vector<TimingRow> rows;
  for (std::size_t n : n_list) {
    DatasetSpec s = spec;
    s.d = d;
    s.rng = spec.rng.derive(n);
    const auto [p, t] = gen_pair(s, n);

    volatile double sink = compute_statistic(method, p, t, options);  // warm-up
    std::vector<std::int64_t> times(reps);
    for (auto& ns : times) {
      const auto start = std::chrono::steady_clock::now();
      sink = compute_statistic(method, p, t, options);
      ns = std::chrono::duration_cast<std::chrono::nanoseconds>(std::chrono::steady_clock::now() - start).count();
    }
    (void)sink;
    std::sort(times.begin(), times.end());
    const std::size_t m = reps / 2;
    const std::int64_t median = reps % 2 ? times[m] : (times[m - 1] + times[m]) / 2;
    rows.push_back({n, d, median, reps});
  }
  return rows;
}

// ---------------------------------------------------------------------------

nlohmann::json to_json(const DatasetSpec& spec) {
  const auto& q = spec.params;
  nlohmann::json j = {
      {"family", std::string(to_string(spec.family))},
      {"d", spec.d},
      {"params",
       {{"centre", q.centre},
        {"shift", q.shift},
        {"sigma", q.sigma},
        {"sigma1", q.sigma1},
        {"sigma2", q.sigma2},
        {"lambda1", q.lambda1},
        {"lambda2", q.lambda2},
        {"noise_fraction", q.noise_fraction}}},
      {"seed", spec.rng.seed},
      {"stream", spec.rng.stream},
  };
  if (spec.family == Family::file) {
    j["path_p"] = spec.path_p;
    j["path_t"] = spec.path_t;
  }
  return j;
}

nlohmann::json to_json(const PowerConfig& c) {
  return {
      {"method", std::string(to_string(c.method))},
      {"significance", c.analytical ? "analytical" : "permutation"},
      {"permutations", c.permutations},
      {"trials", c.trials},
      {"alpha", c.alpha},
      {"power_target", c.power_target},
      {"criterion", "rejections >= ceil(power_target * trials)"},
      {"tolerance", c.tolerance},
      {"n_min", c.n_min},
      {"n_max", c.n_max},
      {"difference_resolution", c.difference_resolution},
      {"repetitions", c.repetitions},
      {"early_stop", c.early_stop},
  };
}

nlohmann::json to_json(const PowerReport& r) {
  nlohmann::json j = {
      {"target", r.target},
      {"method", std::string(to_string(r.method))},
      {"dataset", to_json(r.dataset)},
      {"alpha", r.config.alpha},
      {"found", r.repetition && !r.values.empty() ? r.values.front() : r.spread.mean},
      {"values", r.values},
      {"stop_reasons", r.stop_reasons},
      {"repetitions", r.values.size()},
      {"spread", {{"min", r.spread.min}, {"mean", r.spread.mean}, {"max", r.spread.max}}},
      {"trials", r.config.trials},
      {"not_reachable", r.not_reachable},
      {"unreachable_repetitions", r.unreachable_repetitions},
      {"config", to_json(r.config)},
  };
  if (r.repetition) j["repetition"] = *r.repetition;
  if (r.target == "parameter_difference") j["sample_size"] = r.sample_size;
  return j;
}

nlohmann::json to_json(const TimingRow& row) {
  return {{"n", row.n}, {"d", row.d}, {"median_runtime_ns", row.median_ns}, {"reps", row.reps}};
}

}  // namespace ddks
