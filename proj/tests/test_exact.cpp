#include <doctest.h>

#include <algorithm>
#include <numeric>

#include "ddks/exact.hpp"
#include "support.hpp"

using namespace ddks;
using ddks::testing::orthant_oracle;
using ddks::testing::random_sample;

TEST_SUITE("exact") {
  TEST_CASE("orthant index uses >= in every dimension") {
    const std::vector<double> o{0, 0}, one{1, 1}, half{0.5, 0.5}, q{0.5, 0.2};
    CHECK(orthant_index(o, one) == 3);
    CHECK(orthant_index(one, o) == 0);
    CHECK(orthant_index(half, q) == 1);
  }

  TEST_CASE("membership hand enumerations") {
    const Sample origin = Sample::from_rows({{0, 0}});
    const Sample one = Sample::from_rows({{1, 1}});
    auto m = membership(origin, origin);
    CHECK(m.counts == std::vector<std::uint32_t>{0, 0, 0, 1});
    m = membership(one, origin);
    CHECK(m.counts == std::vector<std::uint32_t>{0, 0, 0, 1});
    m = membership(origin, one);
    CHECK(m.counts == std::vector<std::uint32_t>{1, 0, 0, 0});
  }

  TEST_CASE("membership rows sum to the sample size") {
    Rng rng({5, 0});
    const Sample s = random_sample(rng, 30, 3, true);
    const Sample x = random_sample(rng, 12, 3, true);
    const auto m = membership(s, x);
    CHECK(m.rows == 12);
    CHECK(m.orthants == 8);
    for (std::size_t i = 0; i < m.rows; ++i) {
      const auto r = m.row(i);
      CHECK(std::accumulate(r.begin(), r.end(), 0u) == 30u);
      for (std::size_t j = 0; j < m.orthants; ++j) {
        std::uint32_t c = 0;
        for (std::size_t k = 0; k < s.size(); ++k) c += orthant_index(x.row(i), s.row(k)) == j;
        CHECK(r[j] == c);
      }
    }
  }

  TEST_CASE("statistic hand examples") {
    const Sample a = Sample::from_rows({{0, 0}});
    const Sample b = Sample::from_rows({{1, 1}});
    CHECK(ddks_statistic(a, b) == 1.0);
    CHECK(ddks_statistic_naive(a, b) == 1.0);
    const Sample p = Sample::from_rows({{0, 0}, {1, 1}});
    const Sample t = Sample::from_rows({{0, 1}, {1, 0}});
    CHECK(ddks_statistic(p, t) == 0.5);
    CHECK(ddks_statistic(Sample::from_rows({{0.1}, {0.2}}), Sample::from_rows({{0.8}, {0.9}})) == 1.0);
    CHECK(ddks_statistic(p, p) == 0.0);
  }

  TEST_CASE("batched, naive and integer oracle agree") {
    Rng rng({17, 0});
    for (int rep = 0; rep < 60; ++rep) {
      const std::size_t d = 1 + rng.below(4);
      const std::size_t np = 1 + rng.below(30), nt = 1 + rng.below(30);
      const bool ties = rep % 2 == 0;
      const Sample p = random_sample(rng, np, d, ties);
      const Sample t = random_sample(rng, nt, d, ties);
      const double fast = ddks_statistic(p, t);
      CHECK(fast == ddks_statistic_naive(p, t));
      CHECK(fast == doctest::Approx(orthant_oracle(p, t)).epsilon(1e-12));
    }
  }

  TEST_CASE("evaluation exposes consistent membership matrices") {
    Rng rng({19, 0});
    const Sample p = random_sample(rng, 9, 2, true);
    const Sample t = random_sample(rng, 7, 2, true);
    const auto ev = ddks_evaluate(p, t);
    CHECK(ev.statistic == ddks_statistic(p, t));
    const Sample all = concatenate(p, t);
    CHECK(ev.counts_p.counts == membership(p, all).counts);
    CHECK(ev.counts_t.counts == membership(t, all).counts);
    double best = 0;
    for (std::size_t i = 0; i < all.size(); ++i)
      for (std::size_t j = 0; j < 4; ++j)
        best = std::max(best, orthant_gap(ev.counts_p(i, j), 9, ev.counts_t(i, j), 7));
    CHECK(best == ev.statistic);
  }

  TEST_CASE("metric properties") {
    Rng rng({23, 0});
    for (int rep = 0; rep < 50; ++rep) {
      const std::size_t d = 1 + rng.below(3);
      const Sample p = random_sample(rng, 15, d), t = random_sample(rng, 15, d), z = random_sample(rng, 15, d);
      const double pt = ddks_statistic(p, t);
      CHECK(ddks_statistic(p, p) == 0.0);
      CHECK(pt == ddks_statistic(t, p));
      CHECK(pt <= ddks_statistic(p, z) + ddks_statistic(z, t) + 1e-12);
      CHECK(pt >= 0.0);
      CHECK(pt <= 1.0);
    }
  }

  TEST_CASE("row order does not matter") {
    Rng rng({29, 0});
    const Sample p = random_sample(rng, 20, 3, true), t = random_sample(rng, 25, 3, true);
    std::vector<std::size_t> idx(20);
    std::iota(idx.begin(), idx.end(), 0);
    for (std::size_t i = idx.size() - 1; i > 0; --i) std::swap(idx[i], idx[rng.below(i + 1)]);
    CHECK(ddks_statistic(gather(p, idx), t) == ddks_statistic(p, t));
  }

  TEST_CASE("dimension limits") {
    Rng rng({31, 0});
    const Sample p = random_sample(rng, 4, 21), t = random_sample(rng, 4, 21);
    try {
      ddks_statistic(p, t);
      FAIL("expected DimensionTooLarge");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::DimensionTooLarge);
    }
    ExactOptions tiny;
    tiny.memory_budget = 64;
    const Sample q = random_sample(rng, 4, 8), r = random_sample(rng, 4, 8);
    CHECK_THROWS_AS(ddks_statistic(q, r, tiny), Error);
  }
}
