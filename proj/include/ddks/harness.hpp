#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ddks/core.hpp"
#include "ddks/datasets.hpp"
#include "ddks/method.hpp"

namespace ddks {

// How one candidate (sample size or parameter value) is judged.
//
// A candidate meets the rejection criterion when at least
// ceil(power_target * trials) of `trials` independent draws reject H0 at
// `alpha`. The achieved significance of a passing candidate is the p-value
// at that rank; bisection stops early once it is within `tolerance` of
// alpha, otherwise when the bracket cannot be narrowed further.
struct PowerConfig {
  Method method = Method::ddks;
  bool analytical = false;  // ddks only
  std::size_t permutations = 100;
  std::size_t trials = 100;
  double alpha = 0.05;
  double power_target = 0.95;
  double tolerance = 1e-3;
  std::size_t n_min = 2;
  std::size_t n_max = 5000;
  std::size_t repetitions = 10;
  // Parameter bisection stops once the bracket is narrower than this
  // fraction of the family's upper bound.
  double difference_resolution = 1.0 / 256;
  // Skip trials/permutations once the decision for a candidate is fixed.
  bool early_stop = true;
  StatisticOptions statistic;
  SignificanceOptions significance;
};

struct CandidateResult {
  bool met = false;
  std::size_t rejections = 0;
  std::size_t trials_run = 0;
  double achieved = 1.0;  // p-value at the criterion rank, when met
};

struct Spread {
  double min = 0.0;
  double mean = 0.0;
  double max = 0.0;
};

struct PowerReport {
  std::string target;  // "sample_size" or "parameter_difference"
  Method method = Method::ddks;
  DatasetSpec dataset;
  PowerConfig config;
  std::vector<double> values;  // found value per repetition
  std::vector<std::string> stop_reasons;
  Spread spread;
  std::size_t unreachable_repetitions = 0;
  bool not_reachable = false;  // criterion unmet at the bracket limit in every repetition
  std::size_t sample_size = 0;  // parameter_difference only
  std::optional<std::size_t> repetition;  // set on per-repetition views
};

// One report per repetition, each carrying the aggregate spread.
std::vector<PowerReport> split_repetitions(const PowerReport& report);

// p-value of one (P, T) draw under the configured method.
double trial_p_value(const PowerConfig& config, const Sample& p, const Sample& t, const RngSpec& rng,
                     bool early_stop);

// Fraction of `trials` independent draws with p <= alpha. Trial i uses
// rng.derive(i); every trial is evaluated.
double rejection_rate(const PowerConfig& config, const DatasetSpec& spec, std::size_t n, std::size_t trials,
                      double alpha, const RngSpec& rng);

CandidateResult evaluate_candidate(const PowerConfig& config, const DatasetSpec& spec, std::size_t n,
                                   const RngSpec& rng);

PowerReport min_sample_size(const PowerConfig& config, const DatasetSpec& spec, const RngSpec& rng);

PowerReport min_parameter_difference(const PowerConfig& config, const DatasetSpec& spec, std::size_t n,
                                     const RngSpec& rng);

std::vector<PowerReport> dimension_sweep(const PowerConfig& config, const DatasetSpec& spec,
                                         const std::vector<std::size_t>& dims, const RngSpec& rng);

struct TimingRow {
  std::size_t n = 0;
  std::size_t d = 0;
  std::int64_t median_ns = 0;
  std::size_t reps = 0;
};

// Median wall-clock time of a single statistic evaluation on a generated
// pair, after one untimed warm-up call.
std::vector<TimingRow> timing_benchmark(Method method, const std::vector<std::size_t>& n_list, std::size_t d,
                                        std::size_t reps, const DatasetSpec& spec,
                                        const StatisticOptions& options = {});

nlohmann::json to_json(const DatasetSpec& spec);
nlohmann::json to_json(const PowerConfig& config);
nlohmann::json to_json(const PowerReport& report);
nlohmann::json to_json(const TimingRow& row);

}  // namespace ddks
