#pragma once

#include <cstddef>
#include <cstdint>

#include "ddks/core.hpp"
#include "ddks/exact.hpp"
#include "ddks/significance.hpp"
#include "ddks/vdks.hpp"

namespace ddks {

struct StatisticOptions {
  ExactOptions exact;
  VdksOptions vdks;
  std::size_t memory_budget = std::size_t{1} << 30;  // kl_div histogram grid
};

double compute_statistic(Method method, const Sample& p, const Sample& t, const StatisticOptions& options = {});

StatisticFn statistic_fn(Method method, const StatisticOptions& options = {});

struct TestConfig {
  std::size_t permutations = 100;  // 0: statistic only
  std::uint64_t seed = 0;
  // ddks only: analytical significance instead of permutations.
  bool analytical = false;
  SignificanceOptions significance;
  StatisticOptions statistic;
};

// Statistic plus p-value as configured. The permutation stream is
// RngSpec{seed, 0}; runtime_ns covers the whole call.
TestOutcome run_test(Method method, const Sample& p, const Sample& t, const TestConfig& config);

}  // namespace ddks
