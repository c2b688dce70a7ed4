#include "ddks/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "ddks/rdks.hpp"

namespace ddks {

namespace {

constexpr double kScottConstant = 3.49;
constexpr double kRidge = 1e-10;

std::size_t total_bins(const std::vector<AxisBins>& bins) {
  std::size_t total = 1;
  for (const auto& b : bins) {
    if (total > std::numeric_limits<std::size_t>::max() / b.count) return 0;
    total *= b.count;
  }
  return total;
}

std::size_t flat_bin(std::span<const double> x, const std::vector<AxisBins>& bins) {
  std::size_t index = 0;
  std::size_t stride = 1;
  for (std::size_t m = 0; m < bins.size(); ++m) {
    index += bins[m].locate(x[m]) * stride;
    stride *= bins[m].count;
  }
  return index;
}

void check_grid(const std::vector<AxisBins>& bins, std::size_t memory_budget) {
  const std::size_t total = total_bins(bins);
  if (total == 0 || total > memory_budget / (2 * sizeof(double))) {
    std::ostringstream msg;
    msg << "histogram grid";
    for (const auto& b : bins) msg << (&b == &bins.front() ? " " : "x") << b.count;
    msg << " does not fit the memory budget";
    fail(ErrorKind::GridTooLarge, msg.str());
  }
}

}  // namespace

double ks_1d(std::span<const double> x, std::span<const double> y) {
  if (x.empty() || y.empty()) fail(ErrorKind::EmptyList, "both inputs must be nonempty");
  std::vector<double> a(x.begin(), x.end());
  std::vector<double> b(y.begin(), y.end());
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  return merged_max_diff(a, b);
}

double onedks(const Sample& p, const Sample& t) {
  validate_pair(p, t);
  double best = 0.0;
  for (std::size_t m = 0; m < p.dim(); ++m) best = std::max(best, ks_1d(p.column(m), t.column(m)));
  return best;
}

double hotelling_t2(const Sample& p, const Sample& t) {
  validate_pair(p, t);
  const std::size_t d = p.dim();
  const std::size_t np = p.size();
  const std::size_t nt = t.size();
  if (np + nt <= d + 1) {
    std::ostringstream msg;
    msg << "Hotelling T^2 needs n_p + n_t > d + 1 (got " << np + nt << " for d=" << d << ")";
    fail(ErrorKind::InsufficientSamples, msg.str());
  }

  using Matrix = Eigen::MatrixXd;
  using Vector = Eigen::VectorXd;
  auto as_matrix = [d](const Sample& s) {
    return Eigen::Map<const Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>(
        s.values().data(), static_cast<Eigen::Index>(s.size()), static_cast<Eigen::Index>(d));
  };
  const auto xp = as_matrix(p);
  const auto xt = as_matrix(t);
  const Vector mean_p = xp.colwise().mean();
  const Vector mean_t = xt.colwise().mean();
  const Matrix cp = xp.rowwise() - mean_p.transpose();
  const Matrix ct = xt.rowwise() - mean_t.transpose();
  const Matrix pooled = (cp.transpose() * cp + ct.transpose() * ct) / static_cast<double>(np + nt - 2);

  const double scale = pooled.trace() / static_cast<double>(d);
  if (!(scale > 0.0)) fail(ErrorKind::SingularCovariance, "pooled covariance is zero");

  // A pivot within a few ridges of zero means the covariance is rank
  // deficient; an exactly collinear pair ends up near 2 * ridge.
  const double ridge = kRidge * scale;
  const double floor = 10.0 * ridge;
  auto min_pivot = [](const Eigen::LDLT<Matrix>& f) { return f.vectorD().minCoeff(); };
  Eigen::LDLT<Matrix> factor(pooled);
  if (factor.info() != Eigen::Success || !(min_pivot(factor) > floor)) {
    factor.compute(pooled + ridge * Matrix::Identity(static_cast<Eigen::Index>(d), static_cast<Eigen::Index>(d)));
    if (factor.info() != Eigen::Success || !(min_pivot(factor) > floor))
      fail(ErrorKind::SingularCovariance, "pooled covariance is rank deficient");
  }

  const Vector diff = mean_p - mean_t;
  const double quad = diff.dot(factor.solve(diff));
  const double weight = static_cast<double>(np) * static_cast<double>(nt) / static_cast<double>(np + nt);
  return std::max(0.0, weight * quad);
}

std::size_t AxisBins::locate(double x) const noexcept {
  const double pos = std::floor((x - lo) / width);
  if (!(pos > 0.0)) return 0;
  return std::min(static_cast<std::size_t>(pos), count - 1);
}

std::vector<AxisBins> scott_bins(const Sample& s) {
  if (s.size() < 2) fail(ErrorKind::InsufficientSamples, "Scott's rule needs n >= 2");
  const std::size_t d = s.dim();
  const double n = static_cast<double>(s.size());
  const double shrink = std::pow(n, -1.0 / static_cast<double>(d + 2));

  std::vector<AxisBins> out(d);
  for (std::size_t m = 0; m < d; ++m) {
    const auto col = s.column(m);
    double mean = 0.0;
    for (double v : col) mean += v;
    mean /= n;
    double ss = 0.0;
    for (double v : col) ss += (v - mean) * (v - mean);
    const double sigma = std::sqrt(ss / (n - 1.0));
    const auto [lo_it, hi_it] = std::minmax_element(col.begin(), col.end());
    const double range = *hi_it - *lo_it;
    if (sigma == 0.0 || range == 0.0) {
      out[m] = {*lo_it - 0.5, 1.0, 1};
      continue;
    }
    const double width = kScottConstant * sigma * shrink;
    const double count = std::max(1.0, std::ceil(range / width));
    if (count > static_cast<double>(std::numeric_limits<std::size_t>::max() / 2))
      fail(ErrorKind::GridTooLarge, "bin count overflows");
    out[m] = {*lo_it, width, static_cast<std::size_t>(count)};
  }
  return out;
}

Histogram histogram(const Sample& s, const std::vector<AxisBins>& bins, std::size_t memory_budget) {
  if (bins.size() != s.dim()) fail(ErrorKind::DimensionMismatch, "bin spec and sample differ in dimension");
  check_grid(bins, memory_budget);
  Histogram h;
  for (const auto& b : bins) {
    std::vector<double> edges(b.count + 1);
    for (std::size_t i = 0; i <= b.count; ++i) edges[i] = b.lo + static_cast<double>(i) * b.width;
    h.bin_edges.push_back(std::move(edges));
    h.shape.push_back(b.count);
  }
  h.masses.assign(total_bins(bins), 0.0);
  const double w = 1.0 / static_cast<double>(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) h.masses[flat_bin(s.row(i), bins)] += w;
  return h;
}

double kl_divergence(const Sample& p, const Sample& t, std::size_t memory_budget) {
  validate_pair(p, t);
  const auto bins = scott_bins(concatenate(p, t));
  check_grid(bins, memory_budget);
  const std::size_t total = total_bins(bins);

  // Only occupied bins contribute: where both histograms are empty the
  // smoothed masses are equal and the term vanishes.
  std::vector<std::size_t> idx_p(p.size());
  std::vector<std::size_t> idx_t(t.size());
  for (std::size_t i = 0; i < p.size(); ++i) idx_p[i] = flat_bin(p.row(i), bins);
  for (std::size_t i = 0; i < t.size(); ++i) idx_t[i] = flat_bin(t.row(i), bins);
  std::sort(idx_p.begin(), idx_p.end());
  std::sort(idx_t.begin(), idx_t.end());

  const double pseudo = 1.0 / static_cast<double>(total);
  const double wp = 1.0 / static_cast<double>(p.size());
  const double wt = 1.0 / static_cast<double>(t.size());
  double kl = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
  while (i < idx_p.size() || j < idx_t.size()) {
    const std::size_t bin = std::min(i < idx_p.size() ? idx_p[i] : total, j < idx_t.size() ? idx_t[j] : total);
    std::size_t cp = 0;
    std::size_t ct = 0;
    while (i < idx_p.size() && idx_p[i] == bin) ++i, ++cp;
    while (j < idx_t.size() && idx_t[j] == bin) ++j, ++ct;
    const double r = (static_cast<double>(cp) * wp + pseudo) / 2.0;
    const double q = (static_cast<double>(ct) * wt + pseudo) / 2.0;
    kl += q * std::log(q / r);
  }
  return std::max(0.0, kl);
}

}  // namespace ddks
