#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ddks/error.hpp"

namespace ddks {

// N x d block of finite doubles, stored row-major. Immutable once built.
class Sample {
 public:
  Sample() = default;

  // Throws EmptySample when n == 0 or d == 0, NonFiniteValue on NaN/Inf and
  // DimensionMismatch when values.size() != n * d.
  Sample(std::size_t n, std::size_t d, std::vector<double> values);

  static Sample from_rows(const std::vector<std::vector<double>>& rows);

  std::size_t size() const noexcept { return n_; }
  std::size_t dim() const noexcept { return d_; }
  bool empty() const noexcept { return n_ == 0; }

  std::span<const double> row(std::size_t i) const noexcept {
    return {values_.data() + i * d_, d_};
  }
  double operator()(std::size_t i, std::size_t m) const noexcept {
    return values_[i * d_ + m];
  }
  std::span<const double> values() const noexcept { return values_; }

  // Column m copied out as a contiguous vector.
  std::vector<double> column(std::size_t m) const;

  // Column-major copy (d contiguous columns of length n).
  std::vector<double> columns() const;

  friend bool operator==(const Sample&, const Sample&) = default;

 private:
  std::size_t n_ = 0;
  std::size_t d_ = 0;
  std::vector<double> values_;
};

// Rows of a followed by rows of b.
Sample concatenate(const Sample& a, const Sample& b);

// Rows selected by index, in the given order.
Sample gather(const Sample& s, std::span<const std::size_t> rows);

void validate_pair(const Sample& p, const Sample& t);

// ---------------------------------------------------------------------------
// Random numbers

// Identifies one deterministic random stream. Child streams are derived by
// hashing, so a tree of (repetition, trial, permutation) streams can be
// addressed directly without consuming from a parent generator.
struct RngSpec {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;

  RngSpec derive(std::uint64_t index) const noexcept;

  friend bool operator==(const RngSpec&, const RngSpec&) = default;
};

// xoshiro256** seeded through splitmix64 from (seed, stream). Satisfies
// UniformRandomBitGenerator, but the distributions below are implemented
// here so results do not depend on the standard library vendor.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(const RngSpec& spec) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return ~result_type{0}; }

  result_type operator()() noexcept;

  // [0, 1) with 53 bits of resolution.
  double uniform() noexcept;
  // [0, bound), unbiased. bound must be > 0.
  std::uint64_t below(std::uint64_t bound) noexcept;
  double normal() noexcept;
  double exponential(double rate) noexcept;
  bool bernoulli(double prob) noexcept { return uniform() < prob; }

 private:
  std::uint64_t s_[4];
};

std::vector<double> rng_uniform(const RngSpec& spec, std::size_t count);

// ---------------------------------------------------------------------------
// Test results

enum class Method { ddks, ddks_naive, vdks, rdks, onedks, hotelling_t2, kl_div };

std::string_view to_string(Method m) noexcept;
Method parse_method(std::string_view name);

// KS-family statistics are bounded by one.
bool is_ks_family(Method m) noexcept;

struct TestOutcome {
  Method method = Method::ddks;
  double statistic = 0.0;
  std::optional<double> p_value;
  std::size_t n_p = 0;
  std::size_t n_t = 0;
  std::size_t d = 0;
  std::uint64_t seed = 0;
  std::int64_t runtime_ns = 0;

  // Throws DomainError when the invariants on statistic/p_value are broken.
  void check() const;

  friend bool operator==(const TestOutcome&, const TestOutcome&) = default;
};

}  // namespace ddks
