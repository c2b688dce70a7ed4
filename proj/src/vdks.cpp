#include "ddks/vdks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "ddks/parallel.hpp"

namespace ddks {

namespace {

constexpr double kRangeTolerance = 1e-12;

// k^d, or 0 if it overflows.
std::size_t grid_size(std::size_t k, std::size_t d) {
  std::size_t total = 1;
  for (std::size_t m = 0; m < d; ++m) {
    if (total > std::numeric_limits<std::size_t>::max() / k) return 0;
    total *= k;
  }
  return total;
}

// In-place inclusive prefix sum along every axis.
void prefix_sum(std::vector<double>& grid, std::size_t k, std::size_t d) {
  std::size_t stride = 1;
  for (std::size_t m = 0; m < d; ++m) {
    for (std::size_t idx = 0; idx < grid.size(); ++idx)
      if ((idx / stride) % k != 0) grid[idx] += grid[idx - stride];
    stride *= k;
  }
}

}  // namespace

double AffineMap::apply(std::size_t m, double x) const noexcept {
  if (hi[m] == lo[m]) return 0.5;
  return (x - lo[m]) / (hi[m] - lo[m]);
}

NormalizedPair normalize_pair(const Sample& p, const Sample& t) {
  validate_pair(p, t);
  const std::size_t d = p.dim();
  AffineMap map{std::vector<double>(d, std::numeric_limits<double>::infinity()),
                std::vector<double>(d, -std::numeric_limits<double>::infinity())};
  for (const Sample* s : {&p, &t}) {
    for (std::size_t i = 0; i < s->size(); ++i) {
      for (std::size_t m = 0; m < d; ++m) {
        map.lo[m] = std::min(map.lo[m], (*s)(i, m));
        map.hi[m] = std::max(map.hi[m], (*s)(i, m));
      }
    }
  }
  auto rescale = [&](const Sample& s) {
    std::vector<double> values(s.values().begin(), s.values().end());
    for (std::size_t i = 0; i < s.size(); ++i)
      for (std::size_t m = 0; m < d; ++m) values[i * d + m] = map.apply(m, values[i * d + m]);
    return Sample(s.size(), d, std::move(values));
  };
  Sample np = rescale(p);
  Sample nt = rescale(t);
  return {std::move(np), std::move(nt), std::move(map)};
}

std::size_t voxel_index(std::span<const double> point, std::size_t k) {
  if (k == 0) fail(ErrorKind::DomainError, "voxels per dimension must be >= 1");
  std::size_t index = 0;
  std::size_t stride = 1;
  for (double x : point) {
    if (!(x >= -kRangeTolerance && x <= 1.0 + kRangeTolerance)) {
      std::ostringstream msg;
      msg << "coordinate " << x << " outside [0, 1]";
      fail(ErrorKind::OutOfRange, msg.str());
    }
    const double scaled = std::floor(std::max(x, 0.0) * static_cast<double>(k));
    const std::size_t cell = std::min(static_cast<std::size_t>(scaled), k - 1);
    index += cell * stride;
    stride *= k;
  }
  return index;
}

std::size_t default_voxels_per_dim(std::size_t n_total, std::size_t d) {
  const double k = std::ceil(std::pow(static_cast<double>(n_total), 1.0 / static_cast<double>(d + 1)));
  return static_cast<std::size_t>(std::clamp(k, 2.0, 32.0));
}

VoxelGrid build_voxel_grid(const Sample& p, const Sample& t, std::size_t k, std::size_t memory_budget) {
  validate_pair(p, t);
  if (k == 0) fail(ErrorKind::DomainError, "voxels per dimension must be >= 1");
  const std::size_t d = p.dim();
  const std::size_t cells = grid_size(k, d);
  // occupancy of both classes plus the prefix-sum grid
  if (cells == 0 || cells > memory_budget / (3 * sizeof(double))) {
    std::ostringstream msg;
    msg << k << "^" << d << " voxels do not fit the memory budget";
    fail(ErrorKind::GridTooLarge, msg.str());
  }

  VoxelGrid grid;
  grid.voxels_per_dim = k;
  grid.d = d;
  grid.occupancy_p.assign(cells, 0.0);
  grid.occupancy_t.assign(cells, 0.0);
  for (std::size_t i = 0; i < p.size(); ++i) {
    const std::size_t v = voxel_index(p.row(i), k);
    grid.occupancy_p[v] += 1.0;
    grid.filled.push_back(v);
  }
  for (std::size_t i = 0; i < t.size(); ++i) {
    const std::size_t v = voxel_index(t.row(i), k);
    grid.occupancy_t[v] += 1.0;
    grid.filled.push_back(v);
  }
  std::sort(grid.filled.begin(), grid.filled.end());
  grid.filled.erase(std::unique(grid.filled.begin(), grid.filled.end()), grid.filled.end());

  const double np = static_cast<double>(p.size());
  const double nt = static_cast<double>(t.size());
  for (double& v : grid.occupancy_p) v /= np;
  for (double& v : grid.occupancy_t) v /= nt;
  return grid;
}

double vdks_statistic(const Sample& p, const Sample& t, const VdksOptions& options) {
  const NormalizedPair norm = normalize_pair(p, t);
  const std::size_t d = p.dim();
  const std::size_t k = options.voxels_per_dim ? options.voxels_per_dim
                                               : default_voxels_per_dim(p.size() + t.size(), d);
  if (d > 30) fail(ErrorKind::GridTooLarge, "2^d orthant sums per voxel need d <= 30");
  const VoxelGrid grid = build_voxel_grid(norm.p, norm.t, k, options.memory_budget);

  std::vector<double> prefix(grid.occupancy_t.size());
  for (std::size_t v = 0; v < prefix.size(); ++v) prefix[v] = grid.occupancy_t[v] - grid.occupancy_p[v];
  prefix_sum(prefix, k, d);

  const std::size_t corners = std::size_t{1} << d;
  const std::size_t tasks = grid.filled.size();
  std::vector<double> voxel_max(tasks, 0.0);
  parallel_for(tasks, corners * (d + 1), [&](std::size_t task) {
    std::size_t cell[64];
    std::size_t rest = grid.filled[task];
    for (std::size_t m = 0; m < d; ++m) {
      cell[m] = rest % k;
      rest /= k;
    }
    // sums[s]: prefix sum at the corner picking k-1 on axes where bit s_m is
    // set and cell_m - 1 elsewhere (zero when that is -1).
    std::vector<double> sums(corners);
    for (std::size_t s = 0; s < corners; ++s) {
      std::size_t flat = 0;
      std::size_t stride = 1;
      bool empty = false;
      for (std::size_t m = 0; m < d; ++m) {
        std::size_t coord;
        if (s >> m & 1u) {
          coord = k - 1;
        } else if (cell[m] == 0) {
          empty = true;
          break;
        } else {
          coord = cell[m] - 1;
        }
        flat += coord * stride;
        stride *= k;
      }
      sums[s] = empty ? 0.0 : prefix[flat];
    }
    // Differencing along each axis turns corner sums into orthant sums: bit
    // m set selects [cell_m, k), clear selects [0, cell_m).
    for (std::size_t m = 0; m < d; ++m) {
      const std::size_t bit = std::size_t{1} << m;
      for (std::size_t s = 0; s < corners; ++s)
        if (s & bit) sums[s] -= sums[s ^ bit];
    }
    double best = 0.0;
    for (double v : sums) best = std::max(best, std::abs(v));
    voxel_max[task] = best;
  });

  double stat = voxel_max.empty() ? 0.0 : *std::max_element(voxel_max.begin(), voxel_max.end());

  if (options.refine) {
    std::vector<std::size_t> index_p(norm.p.size());
    std::vector<std::size_t> index_t(norm.t.size());
    for (std::size_t i = 0; i < index_p.size(); ++i) index_p[i] = voxel_index(norm.p.row(i), k);
    for (std::size_t i = 0; i < index_t.size(); ++i) index_t[i] = voxel_index(norm.t.row(i), k);
    for (std::size_t v : grid.filled) {
      const double occ_p = grid.occupancy_p[v];
      const double occ_t = grid.occupancy_t[v];
      if (occ_p <= options.refine_fraction && occ_t <= options.refine_fraction) continue;
      std::vector<std::size_t> rows_p;
      std::vector<std::size_t> rows_t;
      for (std::size_t i = 0; i < index_p.size(); ++i)
        if (index_p[i] == v) rows_p.push_back(i);
      for (std::size_t i = 0; i < index_t.size(); ++i)
        if (index_t[i] == v) rows_t.push_back(i);
      // a one-sided voxel is already fully described by the coarse grid
      if (rows_p.empty() || rows_t.empty()) continue;
      const double local = ddks_statistic(gather(norm.p, rows_p), gather(norm.t, rows_t), options.exact);
      stat = std::max(stat, local * 0.5 * (occ_p + occ_t));
    }
  }
  return stat;
}

}  // namespace ddks
