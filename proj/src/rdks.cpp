#include "ddks/rdks.hpp"

#include <algorithm>
#include <limits>

#include "ddks/parallel.hpp"
#include "ddks/vdks.hpp"

namespace ddks {

CornerSet identify_corners(std::size_t d) {
  if (d == 0) fail(ErrorKind::DomainError, "corner set needs d >= 1");
  CornerSet set;
  set.d = d;
  set.corners.assign((d + 1) * d, 0.0);
  for (std::size_t m = 0; m < d; ++m) set.corners[(m + 1) * d + m] = 1.0;
  return set;
}

double merged_max_diff(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) fail(ErrorKind::EmptyList, "both lists must be nonempty");
  constexpr double inf = std::numeric_limits<double>::infinity();
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double best = 0.0;
  while (i < a.size() || j < b.size()) {
    const double threshold = std::min(i < a.size() ? a[i] : inf, j < b.size() ? b[j] : inf);
    while (i < a.size() && a[i] <= threshold) ++i;
    while (j < b.size() && b[j] <= threshold) ++j;
    const double gap = static_cast<double>(i) / na - static_cast<double>(j) / nb;
    best = std::max(best, gap < 0 ? -gap : gap);
  }
  return best;
}

double rdks_statistic(const Sample& p, const Sample& t) {
  const NormalizedPair norm = normalize_pair(p, t);
  const std::size_t d = p.dim();

  // |x - e_m|^2 = |x|^2 - 2 x_m + 1, so every corner distance follows from
  // the squared norm in O(1).
  auto squared_norms = [d](const Sample& s) {
    std::vector<double> out(s.size(), 0.0);
    for (std::size_t i = 0; i < s.size(); ++i) {
      double acc = 0.0;
      for (double x : s.row(i)) acc += x * x;
      out[i] = acc;
    }
    return out;
  };
  const auto norm_p = squared_norms(norm.p);
  const auto norm_t = squared_norms(norm.t);
  const auto cols_p = norm.p.columns();
  const auto cols_t = norm.t.columns();
  const std::size_t np = norm.p.size();
  const std::size_t nt = norm.t.size();

  std::vector<double> corner_max(d + 1, 0.0);
  parallel_for(d + 1, (np + nt) * 16, [&](std::size_t c) {
    std::vector<double> dist_p(np);
    std::vector<double> dist_t(nt);
    if (c == 0) {
      dist_p = norm_p;
      dist_t = norm_t;
    } else {
      const double* xp = cols_p.data() + (c - 1) * np;
      const double* xt = cols_t.data() + (c - 1) * nt;
      for (std::size_t i = 0; i < np; ++i) dist_p[i] = norm_p[i] - 2.0 * xp[i] + 1.0;
      for (std::size_t i = 0; i < nt; ++i) dist_t[i] = norm_t[i] - 2.0 * xt[i] + 1.0;
    }
    std::sort(dist_p.begin(), dist_p.end());
    std::sort(dist_t.begin(), dist_t.end());
    corner_max[c] = merged_max_diff(dist_p, dist_t);
  });
  return *std::max_element(corner_max.begin(), corner_max.end());
}

}  // namespace ddks
