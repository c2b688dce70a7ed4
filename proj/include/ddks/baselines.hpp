#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "ddks/core.hpp"

namespace ddks {

// Classical two-sample KS statistic; the inputs need not be sorted.
double ks_1d(std::span<const double> x, std::span<const double> y);

// Largest per-dimension ks_1d.
double onedks(const Sample& p, const Sample& t);

// Two-sample Hotelling T^2 with the unbiased pooled covariance.
double hotelling_t2(const Sample& p, const Sample& t);

// Equal-width bins along one axis: edges lo + i * width, i = 0..count.
struct AxisBins {
  double lo = 0.0;
  double width = 1.0;
  std::size_t count = 1;

  std::size_t locate(double x) const noexcept;
};

// Scott's multivariate rule: width 3.49 * sigma * n^(-1/(d+2)) per axis.
std::vector<AxisBins> scott_bins(const Sample& s);

struct Histogram {
  std::vector<std::vector<double>> bin_edges;
  std::vector<std::size_t> shape;
  std::vector<double> masses;  // row-major over shape, sums to 1
};

Histogram histogram(const Sample& s, const std::vector<AxisBins>& bins,
                    std::size_t memory_budget = std::size_t{1} << 30);

// KL(T-histogram || P-histogram) in nats on the Scott grid of the pooled
// sample, with 1/(bin count) pseudo-mass added to every bin of both.
double kl_divergence(const Sample& p, const Sample& t, std::size_t memory_budget = std::size_t{1} << 30);

}  // namespace ddks
