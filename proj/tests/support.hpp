#pragma once

#include <algorithm>
#include <cstdint>
#include <vector>

#include "ddks/core.hpp"

namespace ddks::testing {

// n x d sample with coordinates drawn from a small integer grid (so ties are
// common) or from [0, 1).
inline Sample random_sample(Rng& rng, std::size_t n, std::size_t d, bool ties = false) {
  std::vector<double> v(n * d);
  for (double& x : v) x = ties ? static_cast<double>(rng.below(5)) / 4.0 : rng.uniform();
  return Sample(n, d, std::move(v));
}

// Brute-force two-sample ECDF oracle in exact integer arithmetic:
// max over test points and orthants of |cp * nt - ct * np| / (np * nt).
inline double orthant_oracle(const Sample& p, const Sample& t) {
  const std::size_t d = p.dim();
  const auto np = static_cast<std::int64_t>(p.size());
  const auto nt = static_cast<std::int64_t>(t.size());
  std::int64_t best = 0;
  std::vector<std::vector<double>> tests;
  for (std::size_t i = 0; i < p.size(); ++i) tests.emplace_back(p.row(i).begin(), p.row(i).end());
  for (std::size_t i = 0; i < t.size(); ++i) tests.emplace_back(t.row(i).begin(), t.row(i).end());
  for (const auto& x : tests) {
    for (std::size_t orth = 0; orth < (std::size_t{1} << d); ++orth) {
      auto count = [&](const Sample& s) {
        std::int64_t c = 0;
        for (std::size_t i = 0; i < s.size(); ++i) {
          bool in = true;
          for (std::size_t m = 0; m < d && in; ++m) {
            const bool upper = (orth >> m) & 1;
            in = upper ? !(s(i, m) < x[m]) : (s(i, m) < x[m]);
          }
          c += in;
        }
        return c;
      };
      const std::int64_t gap = count(p) * nt - count(t) * np;
      best = std::max(best, gap < 0 ? -gap : gap);
    }
  }
  return static_cast<double>(best) / static_cast<double>(np * nt);
}

// Classical KS by brute force over all pooled points.
inline double ks_oracle(const std::vector<double>& x, const std::vector<double>& y) {
  double best = 0;
  auto ecdf = [](const std::vector<double>& s, double z) {
    return static_cast<double>(std::count_if(s.begin(), s.end(), [&](double v) { return v <= z; })) /
           static_cast<double>(s.size());
  };
  for (const auto* s : {&x, &y})
    for (double z : *s) best = std::max(best, std::abs(ecdf(x, z) - ecdf(y, z)));
  return best;
}

}  // namespace ddks::testing
