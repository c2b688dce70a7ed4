// Acceptance suite: one PASS/FAIL line per criterion.
//
// Usage: ddks_acceptance [id ...]   (no ids: run all)

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "ddks/baselines.hpp"
#include "ddks/datasets.hpp"
#include "ddks/exact.hpp"
#include "ddks/harness.hpp"
#include "ddks/method.hpp"
#include "ddks/rdks.hpp"
#include "ddks/significance.hpp"
#include "ddks/vdks.hpp"
#include "support.hpp"

using namespace ddks;
using ddks::testing::random_sample;

namespace {

struct Result {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      detail << " [failed: " << what << "]";
    }
  }
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t) { return std::chrono::duration<double>(Clock::now() - t).count(); }

double mean(const std::vector<double>& v) { return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size()); }

double sd(const std::vector<double>& v) {
  const double m = mean(v);
  double s = 0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size() - 1));
}

DatasetSpec spec_of(Family f, std::size_t d, RngSpec rng) {
  DatasetSpec s;
  s.family = f;
  s.d = d;
  s.params = default_params(f);
  s.rng = rng;
  return s;
}

// Both samples from the diagonal half of the dvu family.
std::pair<Sample, Sample> diagonal_pair(std::size_t n, std::size_t d, RngSpec rng) {
  auto one = [&](std::uint64_t side) {
    std::vector<double> v(n * d);
    const RngSpec s = rng.derive(side);
    for (std::size_t i = 0; i < n; ++i) {
      Rng r(s.derive(i));
      const double u = r.uniform();
      std::fill(v.begin() + static_cast<std::ptrdiff_t>(i * d), v.begin() + static_cast<std::ptrdiff_t>((i + 1) * d), u);
    }
    return Sample(n, d, std::move(v));
  };
  return {one(0), one(1)};
}

std::string fmt(double v, int prec = 4) {
  std::ostringstream o;
  o.precision(prec);
  o << v;
  return o.str();
}

// ---------------------------------------------------------------------------

void c1(Result& r) {
  const auto start = Clock::now();
  Rng rng({1001, 0});
  std::size_t same = 0;
  for (int i = 0; i < 200; ++i) {
    const std::size_t d = 1 + static_cast<std::size_t>(i % 4);
    const Sample p = random_sample(rng, 1 + rng.below(50), d, i % 3 == 0);
    const Sample t = random_sample(rng, 1 + rng.below(50), d, i % 3 == 0);
    same += ddks_statistic(p, t) == ddks_statistic_naive(p, t);
  }
  const double secs = seconds_since(start);
  r.detail << same << "/200 pairs bit-identical (n<=50, d=1..4) in " << fmt(secs, 3) << " s";
  r.require(same == 200, "all pairs identical");
  r.require(secs < 60, "runtime < 1 min");
}

void c2(Result& r) {
  Rng rng({1002, 0});
  double worst = 0;
  for (int i = 0; i < 200; ++i) {
    const Sample p = random_sample(rng, 1 + rng.below(60), 1, i % 2 == 0);
    const Sample t = random_sample(rng, 1 + rng.below(60), 1, i % 2 == 0);
    worst = std::max(worst, std::abs(ddks_statistic(p, t) - ks_1d(p.column(0), t.column(0))));
  }
  r.detail << "max |ddks - ks_1d| over 200 pairs = " << worst;
  r.require(worst <= 1e-12, "within 1e-12");
}

void c3(Result& r) {
  Rng rng({1003, 0});
  std::size_t identity = 0, symmetric = 0, triangle = 0;
  double worst_slack = -1;
  for (int i = 0; i < 500; ++i) {
    const std::size_t d = 1 + rng.below(3), n = 2 + rng.below(25);
    const bool ties = i % 4 == 0;
    const Sample p = random_sample(rng, n, d, ties), t = random_sample(rng, n, d, ties),
                 z = random_sample(rng, n, d, ties);
    identity += ddks_statistic(p, p) == 0.0;
    const double pt = ddks_statistic(p, t);
    symmetric += pt == ddks_statistic(t, p);
    const double slack = pt - ddks_statistic(p, z) - ddks_statistic(z, t);
    worst_slack = std::max(worst_slack, slack);
    triangle += slack <= 1e-12;
  }
  r.detail << "identity " << identity << "/500, symmetry " << symmetric << "/500, triangle " << triangle
           << "/500 (max D(P,T)-D(P,Z)-D(Z,T) = " << fmt(worst_slack) << ")";
  r.require(identity == 500 && symmetric == 500 && triangle == 500, "all triples");
}

void c4(Result& r) {
  const auto start = Clock::now();
  const auto fn = statistic_fn(Method::ddks);
  r.detail << "dvu d=3, 30 repeats:";
  for (std::size_t n : {5, 10, 20, 50}) {
    std::vector<double> s, p;
    for (std::uint64_t rep = 0; rep < 30; ++rep) {
      const RngSpec rng = RngSpec{1004, n}.derive(rep);
      const auto [a, b] = gen_pair(spec_of(Family::dvu, 3, rng.derive(0)), n);
      s.push_back(ddks_analytical(a, b).significance);
      p.push_back(permutation_test(fn, a, b, 100, rng.derive(1)));
    }
    const double pooled = std::sqrt(0.5 * (sd(s) * sd(s) + sd(p) * sd(p)));
    const double gap = std::abs(mean(s) - mean(p));
    r.detail << " N=" << n << ": S=" << fmt(mean(s), 3) << " p=" << fmt(mean(p), 3) << " sd=" << fmt(pooled, 3) << ";";
    r.require(gap <= pooled, "overlap at N=" + std::to_string(n));
    if (n > 10) r.require(mean(s) <= 0.05 && mean(p) <= 0.05, "both reject at N=" + std::to_string(n));
  }
  const double secs = seconds_since(start);
  r.detail << " " << fmt(secs, 3) << " s";
  r.require(secs <= 600, "runtime <= 10 min");
}

void c5(Result& r) {
  std::size_t rejections = 0;
  const std::size_t trials = 1000;
  for (std::uint64_t i = 0; i < trials; ++i) {
    const auto [p, t] = diagonal_pair(50, 3, RngSpec{1005, 0}.derive(i));
    rejections += ddks_analytical(p, t).significance <= 0.05;
  }
  const double rate = static_cast<double>(rejections) / trials;
  r.detail << "diagonal vs diagonal, d=3, n=50, analytical, " << trials << " trials: rejection rate " << fmt(rate);
  r.require(rate >= 0.02 && rate <= 0.065, "rate in [2.0%, 6.5%]");
}

void c6(Result& r) {
  PowerConfig c;
  c.analytical = true;
  const double rate = rejection_rate(c, spec_of(Family::dvu, 3, {}), 50, 500, 0.05, {1006, 0});
  r.detail << "dvu d=3, n=50, analytical, 500 trials: rejection rate " << fmt(rate);
  r.require(rate >= 0.99, "rate >= 0.99");
}

void c7(Result& r) {
  const std::size_t d = 1000, n = 100, trials = 200;
  const auto fn = statistic_fn(Method::rdks);

  const auto [p0, t0] = gen_pair(spec_of(Family::dvu, d, {1007, 9}), n);
  const auto start = Clock::now();
  const double stat = rdks_statistic(p0, t0);
  const double single = seconds_since(start);
  (void)stat;

  std::vector<double> null_p(trials), alt_p(trials);
  for (std::uint64_t i = 0; i < trials; ++i) {
    const RngSpec rng = RngSpec{1007, 0}.derive(i);
    const auto [a, b] = diagonal_pair(n, d, rng.derive(0));
    null_p[i] = permutation_test(fn, a, b, 100, rng.derive(1));
    const auto [x, y] = gen_pair(spec_of(Family::dvu, d, rng.derive(2)), n);
    alt_p[i] = permutation_test(fn, x, y, 100, rng.derive(3));
  }
  auto rate = [](const std::vector<double>& v) {
    return static_cast<double>(std::count_if(v.begin(), v.end(), [](double x) { return x <= 0.05; })) /
           static_cast<double>(v.size());
  };
  const double type1 = rate(null_p), power = rate(alt_p);
  r.detail << "rdks d=1000, n=100, 100 permutations, 200 trials: type I " << fmt(type1) << ", power " << fmt(power)
           << ", single statistic " << fmt(single, 3) << " s";
  r.require(type1 >= 0.025 && type1 <= 0.07, "type I in [2.5%, 7%]");
  r.require(power >= 0.98, "power >= 0.98");
  r.require(single <= 10, "single statistic <= 10 s");
}

void c8(Result& r) {
  const auto dd = statistic_fn(Method::ddks), vd = statistic_fn(Method::vdks), rd = statistic_fn(Method::rdks);
  std::size_t cells = 0, ok = 0;
  for (double noise : {0.1, 0.3, 0.5}) {
    for (std::size_t n : {50, 200}) {
      std::vector<double> sd_, sv, sr, pd, pv, pr;
      for (std::uint64_t rep = 0; rep < 10; ++rep) {
        const RngSpec rng = RngSpec{1008, static_cast<std::uint64_t>(noise * 10) * 1000 + n}.derive(rep);
        auto spec = spec_of(Family::mm, 3, rng.derive(0));
        spec.params.noise_fraction = noise;
        const auto [p, t] = gen_pair(spec, n);
        sd_.push_back(dd(p, t));
        sv.push_back(vd(p, t));
        sr.push_back(rd(p, t));
        pd.push_back(permutation_test(dd, p, t, 100, rng.derive(1)));
        pv.push_back(permutation_test(vd, p, t, 100, rng.derive(1)));
        pr.push_back(permutation_test(rd, p, t, 100, rng.derive(1)));
      }
      const double s = sd(sd_);
      const double pooled = std::sqrt((sd(pd) * sd(pd) + sd(pv) * sd(pv) + sd(pr) * sd(pr)) / 3.0);
      const double pmax = std::max({mean(pd), mean(pv), mean(pr)}), pmin = std::min({mean(pd), mean(pv), mean(pr)});
      const bool stat_ok = std::abs(mean(sv) - mean(sd_)) <= 3 * s && std::abs(mean(sr) - mean(sd_)) <= 3 * s;
      const bool sig_ok = pmax - pmin <= pooled || pmax - pmin == 0.0;
      ++cells;
      ok += stat_ok && sig_ok;
      r.detail << " [f=" << noise << " n=" << n << ": ddks " << fmt(mean(sd_), 3) << "+-" << fmt(s, 2) << " vdks "
               << fmt(mean(sv), 3) << " rdks " << fmt(mean(sr), 3) << "; p " << fmt(mean(pd), 3) << "/"
               << fmt(mean(pv), 3) << "/" << fmt(mean(pr), 3) << " sd " << fmt(pooled, 2) << "]";
      if (!stat_ok) r.require(false, "statistics within 3 sd at f=" + fmt(noise) + " n=" + std::to_string(n));
      if (!sig_ok) r.require(false, "significances within pooled sd at f=" + fmt(noise) + " n=" + std::to_string(n));
    }
  }
  r.detail << " " << ok << "/" << cells << " cells";
}

PowerReport sample_size(Method m, Family f, std::size_t reps, std::uint64_t seed, std::size_t d = 3) {
  PowerConfig c;
  c.method = m;
  c.repetitions = reps;
  return min_sample_size(c, spec_of(f, d, {seed, 0}), {seed, 1});
}

void c9(Result& r) {
  r.detail << "ddks found-n (10 repetitions):";
  double ddks_dvu = 0;
  for (Family f : kSyntheticFamilies) {
    const auto rep = sample_size(Method::ddks, f, 10, 1009);
    r.detail << " " << to_string(f) << "=" << fmt(rep.spread.mean, 3);
    if (f == Family::dvu) ddks_dvu = rep.spread.mean;
    r.require(!rep.not_reachable && rep.spread.mean <= 50, std::string("ddks <= 50 on ") + std::string(to_string(f)));
  }
  for (Family f : {Family::gvs, Family::dvu}) {
    const auto rep = sample_size(Method::hotelling_t2, f, 3, 1009);
    r.detail << "; hotelling " << to_string(f) << (rep.not_reachable ? " NotReachable" : " reached " + fmt(rep.spread.mean, 4));
    r.require(rep.not_reachable, std::string("hotelling NotReachable on ") + std::string(to_string(f)));
  }
  bool onedks_fails = false;
  for (Family f : {Family::gvs, Family::dvu}) {
    const auto rep = sample_size(Method::onedks, f, 3, 1009);
    r.detail << "; onedks " << to_string(f) << (rep.not_reachable ? " NotReachable" : " reached " + fmt(rep.spread.mean, 4));
    onedks_fails = onedks_fails || rep.not_reachable;
  }
  r.require(onedks_fails, "onedks NotReachable on gvs or dvu");
  const auto kl = sample_size(Method::kl_div, Family::dvu, 10, 1009);
  r.detail << "; kl_div dvu=" << fmt(kl.spread.mean, 3) << " vs ddks " << fmt(ddks_dvu, 3);
  r.require(kl.spread.mean <= ddks_dvu, "kl_div dvu <= ddks dvu");
}

void c10(Result& r) {
  PowerConfig c;
  c.repetitions = 10;
  const std::vector<std::size_t> dims{2, 3, 4, 5};
  c.method = Method::ddks;
  const auto dd = dimension_sweep(c, spec_of(Family::dvu, 3, {1010, 0}), dims, {1010, 1});
  c.method = Method::kl_div;
  const auto kl = dimension_sweep(c, spec_of(Family::gvm, 3, {1010, 0}), dims, {1010, 2});
  r.detail << "ddks dvu mean found-n d=2..5:";
  for (const auto& x : dd) r.detail << " " << fmt(x.spread.mean, 3);
  r.detail << "; kl_div gvm:";
  for (const auto& x : kl) r.detail << " " << fmt(x.spread.mean, 3);
  for (std::size_t i = 1; i < dims.size(); ++i) {
    r.require(dd[i].spread.mean >= dd[i - 1].spread.mean, "ddks dvu nondecreasing at d=" + std::to_string(dims[i]));
    r.require(kl[i].spread.mean <= kl[i - 1].spread.mean, "kl_div gvm nonincreasing at d=" + std::to_string(dims[i]));
  }
}

void c11(Result& r) {
  const auto gvm = spec_of(Family::gvm, 3, {1011, 0});
  auto median_s = [&](Method m, std::size_t n, std::size_t d, const StatisticOptions& o = {}) {
    return static_cast<double>(timing_benchmark(m, {n}, d, 5, gvm, o).front().median_ns) * 1e-9;
  };
  const double t_ddks = median_s(Method::ddks, 10'000, 3);
  const double t_vdks = median_s(Method::vdks, 10'000, 3);
  const double t_rdks = median_s(Method::rdks, 10'000, 3);
  const double rd32 = median_s(Method::rdks, 500, 32), rd64 = median_s(Method::rdks, 500, 64);
  StatisticOptions fixed;
  fixed.vdks.voxels_per_dim = 16;
  const double v1 = median_s(Method::vdks, 50'000, 3, fixed), v2 = median_s(Method::vdks, 100'000, 3, fixed);
  r.detail << "n=1e4 d=3 medians: ddks " << fmt(t_ddks) << " s, vdks " << fmt(t_vdks) << " s, rdks " << fmt(t_rdks)
           << " s; rdks d64/d32 at n=500 = " << fmt(rd64 / rd32, 3) << "; vdks 2N/N at N=5e4, k=16 = "
           << fmt(v2 / v1, 3);
  r.require(t_ddks <= 5, "ddks <= 5 s");
  r.require(t_vdks <= 1, "vdks <= 1 s");
  r.require(t_rdks <= 1, "rdks <= 1 s");
  r.require(rd64 / rd32 <= 2.5, "rdks d-scaling <= 2.5");
  r.require(v2 / v1 <= 2.4, "vdks N-scaling <= 2.4");
}

double log_pmf_oracle(std::size_t n, std::size_t m, double lambda) {
  long double acc = 0;
  for (std::size_t k = 1; k <= n; ++k)
    acc += std::log(static_cast<long double>(m - n + k)) - std::log(static_cast<long double>(k));
  return static_cast<double>(acc + n * std::log(static_cast<long double>(lambda)) +
                             (m - n) * std::log1p(-static_cast<long double>(lambda)));
}

void c12(Result& r) {
  const bool four = delta_cdf(0.0, 1, 1, 0.5) == 0.5 && delta_cdf(0.999, 1, 1, 0.5) == 0.5 &&
                    delta_cdf(1.0, 1, 1, 0.5) == 1.0;
  r.require(four, "four-outcome enumerations exact");

  double worst_rel = 0;
  Rng rng({1012, 0});
  for (int i = 0; i < 200; ++i) {
    const std::size_t m = 1 + rng.below(2000), n = rng.below(m + 1);
    const double lambda = 0.001 + 0.998 * rng.uniform();
    const double a = log_binomial_pmf(n, m, lambda), b = log_pmf_oracle(n, m, lambda);
    worst_rel = std::max(worst_rel, std::abs(a - b) / std::max(std::abs(b), 1e-300));
  }
  worst_rel = std::max(worst_rel, std::abs(log_binomial_pmf(500, 1000, 0.5) - log_pmf_oracle(500, 1000, 0.5)) /
                                      std::abs(log_pmf_oracle(500, 1000, 0.5)));
  r.require(worst_rel <= 1e-10, "binomial log-space within 1e-10");

  const auto ev = ddks_evaluate(Sample::from_rows({{0, 0}, {0.1, 0.2}}), Sample::from_rows({{1, 1}, {0.9, 0.8}}));
  const double s1 = ddks_significance({1.0, 2, 2, ev.counts_t, std::nullopt});
  r.require(s1 == 0.0, "S(D=1) == 0");

  std::size_t monotone = 0;
  for (int i = 0; i < 100; ++i) {
    SignificanceInput in;
    in.n_p = 2 + rng.below(15);
    in.n_t = 2 + rng.below(15);
    in.counts_t.orthants = std::size_t{1} << (1 + rng.below(3));
    in.counts_t.rows = in.n_p + in.n_t;
    in.counts_t.source_n = in.n_t;
    in.counts_t.counts.resize(in.counts_t.rows * in.counts_t.orthants);
    for (auto& c : in.counts_t.counts) c = static_cast<std::uint32_t>(rng.below(in.n_t + 1));
    double prev = 2;
    bool ok = true;
    for (int k = 0; k <= 20; ++k) {
      in.statistic = k / 20.0;
      const double s = ddks_significance(in);
      ok = ok && s <= prev;
      prev = s;
    }
    monotone += ok;
  }
  r.require(monotone == 100, "S nonincreasing in D");
  r.detail << "four-outcome exact " << (four ? "yes" : "no") << ", binomial max rel err " << worst_rel
           << ", S(D=1) = " << s1 << ", monotone " << monotone << "/100";
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<int, std::pair<const char*, std::function<void(Result&)>>>> criteria = {
      {1, {"oracle equivalence", c1}},
      {2, {"1-D reduction", c2}},
      {3, {"metric properties", c3}},
      {4, {"analytical vs permutation", c4}},
      {5, {"type-I calibration", c5}},
      {6, {"power", c6}},
      {7, {"rdks high dimension", c7}},
      {8, {"approximation fidelity", c8}},
      {9, {"qualitative power ranking", c9}},
      {10, {"dimension trends", c10}},
      {11, {"timing", c11}},
      {12, {"significance unit layer", c12}},
  };
  std::set<int> wanted;
  for (int i = 1; i < argc; ++i) wanted.insert(std::atoi(argv[i]));

  int failures = 0;
  for (const auto& [id, entry] : criteria) {
    if (!wanted.empty() && !wanted.count(id)) continue;
    Result r;
    const auto start = Clock::now();
    try {
      entry.second(r);
    } catch (const std::exception& e) {
      r.pass = false;
      r.detail << " [exception: " << e.what() << "]";
    }
    failures += !r.pass;
    std::cout << (r.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << entry.first << "): " << r.detail.str()
              << " (" << fmt(seconds_since(start), 3) << " s)" << std::endl;
  }
  return failures == 0 ? 0 : 1;
}
