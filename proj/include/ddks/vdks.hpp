#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ddks/core.hpp"
#include "ddks/exact.hpp"

namespace ddks {

// Per-dimension map x -> (x - lo) / (hi - lo) onto [0, 1]; a dimension with
// hi == lo maps every value to 0.5.
struct AffineMap {
  std::vector<double> lo;
  std::vector<double> hi;

  double apply(std::size_t m, double x) const noexcept;
};

struct NormalizedPair {
  Sample p;
  Sample t;
  AffineMap map;
};

// Rescales both samples with the joint per-dimension range of P u T.
NormalizedPair normalize_pair(const Sample& p, const Sample& t);

// Flat index sum_m c_m * k^m with c_m = min(floor(x_m * k), k - 1).
std::size_t voxel_index(std::span<const double> point, std::size_t k);

// ceil(n_total^(1/(d+1))) clamped to [2, 32].
std::size_t default_voxels_per_dim(std::size_t n_total, std::size_t d);

struct VoxelGrid {
  std::size_t voxels_per_dim = 0;
  std::size_t d = 0;
  std::vector<double> occupancy_p;  // k^d, sums to 1
  std::vector<double> occupancy_t;  // k^d, sums to 1
  std::vector<std::size_t> filled;  // sorted, nonempty in at least one class
};

struct VdksOptions {
  // 0 selects default_voxels_per_dim.
  std::size_t voxels_per_dim = 0;
  // Exact ddKS inside voxels holding more than refine_fraction of either
  // sample; off by default.
  bool refine = false;
  double refine_fraction = 0.1;
  std::size_t memory_budget = std::size_t{1} << 30;
  ExactOptions exact;
};

// Inputs must already lie in [0, 1]^d.
VoxelGrid build_voxel_grid(const Sample& p, const Sample& t, std::size_t k,
                           std::size_t memory_budget = std::size_t{1} << 30);

double vdks_statistic(const Sample& p, const Sample& t, const VdksOptions& options = {});

}  // namespace ddks
