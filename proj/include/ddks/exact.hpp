#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "ddks/core.hpp"

namespace ddks {

struct ExactOptions {
  // Upper bound on the working set of one evaluation, in bytes.
  std::size_t memory_budget = std::size_t{1} << 30;
  // Largest dimension accepted; 2^d orthant counters are kept per worker.
  std::size_t max_dim = 20;
};

// Per-test-point orthant occupation counts of one sample.
struct MembershipMatrix {
  std::size_t rows = 0;      // test points
  std::size_t orthants = 0;  // 2^d
  std::size_t source_n = 0;  // size of the counted sample
  std::vector<std::uint32_t> counts;

  std::uint32_t operator()(std::size_t i, std::size_t j) const noexcept {
    return counts[i * orthants + j];
  }
  std::span<const std::uint32_t> row(std::size_t i) const noexcept {
    return {counts.data() + i * orthants, orthants};
  }
};

// Bit m of the result is set iff point[m] >= test_point[m].
std::uint64_t orthant_index(std::span<const double> test_point, std::span<const double> point);

MembershipMatrix membership(const Sample& counted, const Sample& test_points,
                            const ExactOptions& options = {});

// Reference implementation: for every test point and every orthant, count
// both samples by brute force. O(2^d * N^2 * d).
double ddks_statistic_naive(const Sample& p, const Sample& t);

// Same value as ddks_statistic_naive, computed in parallel blocks of test
// points with O(N * d) work per test point.
double ddks_statistic(const Sample& p, const Sample& t, const ExactOptions& options = {});

// Statistic together with the membership matrices of P and T evaluated at the
// concatenated test points (rows of P first, then rows of T). Used by the
// analytical significance.
struct DdksEvaluation {
  double statistic = 0.0;
  MembershipMatrix counts_p;
  MembershipMatrix counts_t;
};

DdksEvaluation ddks_evaluate(const Sample& p, const Sample& t, const ExactOptions& options = {});

// |cp/np - ct/nt|, shared by every exact path so they agree bit-for-bit.
inline double orthant_gap(std::uint64_t cp, std::size_t np, std::uint64_t ct, std::size_t nt) noexcept {
  const double a = static_cast<double>(cp) / static_cast<double>(np);
  const double b = static_cast<double>(ct) / static_cast<double>(nt);
  return a > b ? a - b : b - a;
}

}  // namespace ddks
