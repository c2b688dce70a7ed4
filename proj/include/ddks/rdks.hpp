#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ddks/core.hpp"

namespace ddks {

// Origin of the normalized unit cube followed by the d unit-axis corners.
struct CornerSet {
  std::size_t d = 0;
  std::vector<double> corners;  // (d + 1) x d, row-major

  std::size_t size() const noexcept { return d + 1; }
  std::span<const double> corner(std::size_t c) const noexcept { return {corners.data() + c * d, d}; }
};

CornerSet identify_corners(std::size_t d);

// Two-sample KS statistic of two ascending lists. Ties are resolved by
// consuming every value <= the current threshold from both lists before
// the gap is evaluated.
double merged_max_diff(std::span<const double> a, std::span<const double> b);

// Radial approximation: for each corner, the KS statistic between the
// sorted (squared) distances of the normalized P and T points to it.
double rdks_statistic(const Sample& p, const Sample& t);

}  // namespace ddks
