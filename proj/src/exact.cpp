#include "ddks/exact.hpp"

#include <algorithm>
#include <sstream>

#include "ddks/parallel.hpp"

namespace ddks {

namespace {

constexpr std::size_t kHardMaxDim = 30;
constexpr std::size_t kTestPointsPerTask = 32;

void check_dimension(std::size_t d, std::size_t n_total, const ExactOptions& options) {
  if (d > options.max_dim || d > kHardMaxDim) {
    std::ostringstream msg;
    msg << "d=" << d << " exceeds the exact ddKS limit of " << std::min(options.max_dim, kHardMaxDim)
        << "; use rdks for high-dimensional data";
    fail(ErrorKind::DimensionTooLarge, msg.str());
  }
  const std::size_t per_point = 2 * (std::size_t{1} << d) * sizeof(std::uint32_t) +
                                n_total * sizeof(std::uint32_t);
  if (per_point > options.memory_budget) {
    std::ostringstream msg;
    msg << "2^" << d << " orthant counters do not fit the memory budget of "
        << options.memory_budget << " bytes";
    fail(ErrorKind::DimensionTooLarge, msg.str());
  }
}

// Orthant codes of every point of one sample, stored column-major so the
// comparison loop vectorizes.
class CodedSample {
 public:
  CodedSample(std::span<const double> cols, std::size_t n, std::size_t d)
      : n_(n), d_(d), cols_(cols), codes_(n) {}

  std::size_t size() const noexcept { return n_; }

  std::span<const std::uint32_t> encode(std::span<const double> test_point) {
    std::fill(codes_.begin(), codes_.end(), 0u);
    std::uint32_t* codes = codes_.data();
    for (std::size_t m = 0; m < d_; ++m) {
      const double x = test_point[m];
      const double* col = cols_.data() + m * n_;
      const auto bit = static_cast<std::uint32_t>(m);
      for (std::size_t k = 0; k < n_; ++k) codes[k] |= static_cast<std::uint32_t>(col[k] >= x) << bit;
    }
    return codes_;
  }

 private:
  std::size_t n_;
  std::size_t d_;
  std::span<const double> cols_;
  std::vector<std::uint32_t> codes_;
};

// Per-worker evaluation state: code buffers for both samples and one dense
// counter array per sample. Counters are cleared by revisiting the touched
// codes, so the cost per test point is independent of 2^d.
class OrthantWorker {
 public:
  OrthantWorker(std::span<const double> cols_p, std::size_t np, std::span<const double> cols_t,
                std::size_t nt, std::size_t d)
      : p_(cols_p, np, d),
        t_(cols_t, nt, d),
        counts_p_(std::size_t{1} << d, 0),
        counts_t_(counts_p_.size(), 0) {}

  // Largest orthant gap at one test point. When out_p/out_t are given the
  // full count rows are copied there before the counters are cleared.
  double evaluate(std::span<const double> x, std::uint32_t* out_p = nullptr,
                  std::uint32_t* out_t = nullptr) {
    const auto codes_p = p_.encode(x);
    const auto codes_t = t_.encode(x);
    for (auto c : codes_p) ++counts_p_[c];
    for (auto c : codes_t) ++counts_t_[c];

    const std::size_t np = p_.size();
    const std::size_t nt = t_.size();
    double best = 0.0;
    for (auto c : codes_p) best = std::max(best, orthant_gap(counts_p_[c], np, counts_t_[c], nt));
    for (auto c : codes_t) best = std::max(best, orthant_gap(counts_p_[c], np, counts_t_[c], nt));

    if (out_p) std::copy(counts_p_.begin(), counts_p_.end(), out_p);
    if (out_t) std::copy(counts_t_.begin(), counts_t_.end(), out_t);
    for (auto c : codes_p) counts_p_[c] = 0;
    for (auto c : codes_t) counts_t_[c] = 0;
    return best;
  }

 private:
  CodedSample p_;
  CodedSample t_;
  std::vector<std::uint32_t> counts_p_;
  std::vector<std::uint32_t> counts_t_;
};

}  // namespace

std::uint64_t orthant_index(std::span<const double> test_point, std::span<const double> point) {
  if (test_point.size() != point.size())
    fail(ErrorKind::DimensionMismatch, "test point and point differ in dimension");
  if (point.size() > 63) fail(ErrorKind::DimensionTooLarge, "orthant index needs d <= 63");
  std::uint64_t index = 0;
  for (std::size_t m = 0; m < point.size(); ++m)
    if (point[m] >= test_point[m]) index |= std::uint64_t{1} << m;
  return index;
}

MembershipMatrix membership(const Sample& counted, const Sample& test_points,
                            const ExactOptions& options) {
  validate_pair(counted, test_points);
  const std::size_t d = counted.dim();
  check_dimension(d, counted.size(), options);

  MembershipMatrix out;
  out.rows = test_points.size();
  out.orthants = std::size_t{1} << d;
  out.source_n = counted.size();
  if (out.rows * out.orthants * sizeof(std::uint32_t) > options.memory_budget)
    fail(ErrorKind::DimensionTooLarge, "membership matrix does not fit the memory budget");
  out.counts.assign(out.rows * out.orthants, 0);

  const auto cols = counted.columns();
  CodedSample coded(cols, counted.size(), d);
  for (std::size_t i = 0; i < out.rows; ++i) {
    auto codes = coded.encode(test_points.row(i));
    std::uint32_t* row = out.counts.data() + i * out.orthants;
    for (auto c : codes) ++row[c];
  }
  return out;
}

double ddks_statistic_naive(const Sample& p, const Sample& t) {
  validate_pair(p, t);
  const std::size_t d = p.dim();
  if (d > kHardMaxDim) fail(ErrorKind::DimensionTooLarge, "naive ddKS needs d <= 30");
  const std::uint64_t orthants = std::uint64_t{1} << d;

  double best = 0.0;
  auto scan = [&](const Sample& tests) {
    for (std::size_t i = 0; i < tests.size(); ++i) {
      const auto x = tests.row(i);
      for (std::uint64_t j = 0; j < orthants; ++j) {
        std::uint64_t cp = 0;
        std::uint64_t ct = 0;
        for (std::size_t k = 0; k < p.size(); ++k) cp += orthant_index(x, p.row(k)) == j;
        for (std::size_t k = 0; k < t.size(); ++k) ct += orthant_index(x, t.row(k)) == j;
        best = std::max(best, orthant_gap(cp, p.size(), ct, t.size()));
      }
    }
  };
  scan(p);
  scan(t);
  return best;
}

double ddks_statistic(const Sample& p, const Sample& t, const ExactOptions& options) {
  validate_pair(p, t);
  const std::size_t n_total = p.size() + t.size();
  check_dimension(p.dim(), n_total, options);

  const std::size_t tasks = (n_total + kTestPointsPerTask - 1) / kTestPointsPerTask;
  const auto cols_p = p.columns();
  const auto cols_t = t.columns();
  std::vector<double> task_max(tasks, 0.0);
  parallel_for(tasks, kTestPointsPerTask * n_total * p.dim(), [&](std::size_t task) {
    OrthantWorker worker(cols_p, p.size(), cols_t, t.size(), p.dim());
    const std::size_t begin = task * kTestPointsPerTask;
    const std::size_t end = std::min(begin + kTestPointsPerTask, n_total);
    double best = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = i < p.size() ? p.row(i) : t.row(i - p.size());
      best = std::max(best, worker.evaluate(x));
    }
    task_max[task] = best;
  });
  return *std::max_element(task_max.begin(), task_max.end());
}

DdksEvaluation ddks_evaluate(const Sample& p, const Sample& t, const ExactOptions& options) {
  validate_pair(p, t);
  const std::size_t n_total = p.size() + t.size();
  check_dimension(p.dim(), n_total, options);
  const std::size_t orthants = std::size_t{1} << p.dim();
  if (2 * n_total * orthants * sizeof(std::uint32_t) > options.memory_budget)
    fail(ErrorKind::DimensionTooLarge, "membership matrices do not fit the memory budget");

  DdksEvaluation out;
  for (auto* m : {&out.counts_p, &out.counts_t}) {
    m->rows = n_total;
    m->orthants = orthants;
    m->counts.assign(n_total * orthants, 0);
  }
  out.counts_p.source_n = p.size();
  out.counts_t.source_n = t.size();

  const std::size_t tasks = (n_total + kTestPointsPerTask - 1) / kTestPointsPerTask;
  const auto cols_p = p.columns();
  const auto cols_t = t.columns();
  std::vector<double> task_max(tasks, 0.0);
  parallel_for(tasks, kTestPointsPerTask * n_total * p.dim(), [&](std::size_t task) {
    OrthantWorker worker(cols_p, p.size(), cols_t, t.size(), p.dim());
    const std::size_t begin = task * kTestPointsPerTask;
    const std::size_t end = std::min(begin + kTestPointsPerTask, n_total);
    double best = 0.0;
    for (std::size_t i = begin; i < end; ++i) {
      const auto x = i < p.size() ? p.row(i) : t.row(i - p.size());
      best = std::max(best, worker.evaluate(x, out.counts_p.counts.data() + i * orthants,
                                            out.counts_t.counts.data() + i * orthants));
    }
    task_max[task] = best;
  });
  out.statistic = *std::max_element(task_max.begin(), task_max.end());
  return out;
}

}  // namespace ddks
