#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>

#include "ddks/datasets.hpp"
#include "ddks/io.hpp"

using namespace ddks;

namespace {

DatasetSpec make(Family f, std::size_t d, std::uint64_t seed) {
  DatasetSpec s;
  s.family = f;
  s.d = d;
  s.params = default_params(f);
  s.rng = {seed, 0};
  return s;
}

// One-sample KS distance to U[0, 1].
double ks_uniform(std::vector<double> x) {
  std::sort(x.begin(), x.end());
  const double n = static_cast<double>(x.size());
  double best = 0;
  for (std::size_t i = 0; i < x.size(); ++i)
    best = std::max({best, (static_cast<double>(i) + 1) / n - x[i], x[i] - static_cast<double>(i) / n});
  return best;
}

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  return ErrorKind::IoError;
}

}  // namespace

TEST_SUITE("datasets") {
  TEST_CASE("family names") {
    for (Family f : {Family::gvm, Family::gvs, Family::dvu, Family::skew, Family::mm, Family::file})
      CHECK(parse_family(to_string(f)) == f);
    CHECK_THROWS_AS(parse_family("ls"), Error);
  }

  TEST_CASE("generation is deterministic per spec") {
    for (Family f : kSyntheticFamilies) {
      const auto a = gen_pair(make(f, 3, 1), 40);
      const auto b = gen_pair(make(f, 3, 1), 40);
      const auto c = gen_pair(make(f, 3, 2), 40);
      CHECK(a.first == b.first);
      CHECK(a.second == b.second);
      CHECK(a.first != c.first);
      CHECK(a.first.size() == 40);
      CHECK(a.second.dim() == 3);
    }
    // a point does not depend on how many were requested
    const auto small = gen_pair(make(Family::gvm, 2, 9), 5);
    const auto large = gen_pair(make(Family::gvm, 2, 9), 50);
    for (std::size_t i = 0; i < 5; ++i) CHECK(small.first(i, 1) == large.first(i, 1));
  }

  TEST_CASE("diagonal points have equal coordinates") {
    const auto [p, t] = gen_pair(make(Family::dvu, 5, 3), 100);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t m = 1; m < 5; ++m) CHECK(p(i, m) == p(i, 0));
    bool varied = false;
    for (std::size_t i = 0; i < t.size(); ++i) varied = varied || t(i, 1) != t(i, 0);
    CHECK(varied);
  }

  TEST_CASE("diagonal marginals are uniform") {
    const std::size_t n = 200, seeds = 100;
    const double critical = 1.628 / std::sqrt(static_cast<double>(n));  // alpha = 0.01
    std::size_t pass = 0, total = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto [p, t] = gen_pair(make(Family::dvu, 3, 100 + s), n);
      for (const Sample* x : {&p, &t})
        for (std::size_t m = 0; m < 3; ++m) {
          pass += ks_uniform(x->column(m)) <= critical;
          ++total;
        }
    }
    CHECK(static_cast<double>(pass) >= 0.95 * static_cast<double>(total));
  }

  TEST_CASE("gaussian means") {
    const std::size_t n = 500;
    const auto spec = make(Family::gvm, 4, 17);
    const auto [p, t] = gen_pair(spec, n);
    const double tol = 4 * spec.params.sigma / std::sqrt(static_cast<double>(n));
    for (std::size_t m = 0; m < 4; ++m) {
      double mp = 0, mt = 0;
      for (double v : p.column(m)) mp += v;
      for (double v : t.column(m)) mt += v;
      CHECK(std::abs(mp / n - spec.params.centre) <= tol);
      CHECK(std::abs(mt / n - spec.params.centre - spec.params.shift) <= tol);
    }
  }

  TEST_CASE("scale and rate families") {
    const std::size_t n = 4000;
    const auto gvs = make(Family::gvs, 2, 5);
    const auto [p, t] = gen_pair(gvs, n);
    auto sd = [](const std::vector<double>& v) {
      double m = 0, s = 0;
      for (double e : v) m += e;
      m /= static_cast<double>(v.size());
      for (double e : v) s += (e - m) * (e - m);
      return std::sqrt(s / static_cast<double>(v.size() - 1));
    };
    CHECK(sd(p.column(0)) == doctest::Approx(gvs.params.sigma1).epsilon(0.05));
    CHECK(sd(t.column(1)) == doctest::Approx(gvs.params.sigma2).epsilon(0.05));

    const auto skew = make(Family::skew, 2, 6);
    const auto [a, b] = gen_pair(skew, n);
    double ma = 0, mb = 0;
    for (double v : a.column(0)) ma += v;
    for (double v : b.column(1)) mb += v;
    CHECK(ma / n == doctest::Approx(1 / skew.params.lambda1).epsilon(0.06));
    CHECK(mb / n == doctest::Approx(1 / skew.params.lambda2).epsilon(0.06));
    CHECK(*std::min_element(a.values().begin(), a.values().end()) >= 0.0);
  }

  TEST_CASE("mixture noise count is binomial") {
    const std::size_t n = 100, seeds = 200;
    const double f = 0.3, mean = n * f, var = n * f * (1 - f);
    double chi2 = 0, total = 0;
    for (std::uint64_t s = 0; s < seeds; ++s) {
      const auto g = generate(make(Family::mm, 3, 500 + s), n);
      for (std::size_t k : {g.noise_p, g.noise_t}) {
        chi2 += std::pow(static_cast<double>(k) - mean, 2) / var;
        total += static_cast<double>(k);
      }
    }
    // chi-square with 400 degrees of freedom: mean 400, sd 28.3
    CHECK(std::abs(chi2 - 400.0) <= 4 * std::sqrt(800.0));
    CHECK(std::abs(total / (2.0 * seeds) - mean) <= 4 * std::sqrt(var / (2.0 * seeds)));
  }

  TEST_CASE("pure noise mixture") {
    auto spec = make(Family::mm, 2, 8);
    spec.params.noise_fraction = 1.0;
    const auto g = generate(spec, 300);
    CHECK(g.noise_p == 300);
    CHECK(g.noise_t == 300);
    const double mid = spec.params.centre + spec.params.shift / 2, half = 3 * spec.params.sigma;
    for (const Sample* s : {&g.p, &g.t})
      for (double v : s->values()) {
        CHECK(v >= mid - half);
        CHECK(v <= mid + half);
      }
  }

  TEST_CASE("spec validation") {
    auto spec = make(Family::gvs, 3, 0);
    spec.params.sigma2 = 0;
    CHECK(kind_of([&] { spec.check(); }) == ErrorKind::BadSpec);
    spec = make(Family::mm, 3, 0);
    spec.params.noise_fraction = 1.5;
    CHECK(kind_of([&] { spec.check(); }) == ErrorKind::BadSpec);
    spec = make(Family::gvm, 0, 0);
    CHECK(kind_of([&] { spec.check(); }) == ErrorKind::BadSpec);
    spec = make(Family::skew, 2, 0);
    spec.params.lambda1 = -1;
    CHECK(kind_of([&] { gen_pair(spec, 5); }) == ErrorKind::BadSpec);
    CHECK(kind_of([&] { gen_pair(make(Family::gvm, 2, 0), 0); }) == ErrorKind::BadSpec);
  }

  TEST_CASE("difference parameters") {
    const auto q = default_params(Family::gvs);
    CHECK(difference_parameter(Family::gvs, q) == doctest::Approx(q.sigma2 - q.sigma1));
    CHECK(with_difference(Family::gvs, q, 0.3).sigma2 == doctest::Approx(q.sigma1 + 0.3));
    CHECK(with_difference(Family::gvm, q, 0.1).shift == 0.1);
    CHECK(with_difference(Family::skew, q, 2.0).lambda2 == q.lambda1 + 2.0);
    CHECK(difference_upper_bound(Family::mm) > 0);
    CHECK(kind_of([&] { difference_parameter(Family::dvu, q); }) == ErrorKind::BadSpec);
    CHECK(kind_of([&] { difference_upper_bound(Family::dvu); }) == ErrorKind::BadSpec);
  }

  TEST_CASE("parameter file") {
    const auto table = ParameterTable::parse(
        "# comment\n[gvm]\nshift = 0.4  # trailing\nsigma=0.2\n\n[skew]\nlambda2 = 4\n");
    CHECK(table.at(Family::gvm).shift == 0.4);
    CHECK(table.at(Family::gvm).sigma == 0.2);
    CHECK(table.at(Family::gvm).centre == default_params(Family::gvm).centre);
    CHECK(table.at(Family::skew).lambda2 == 4.0);
    CHECK(table.at(Family::gvs) == default_params(Family::gvs));

    CHECK(kind_of([] { ParameterTable::parse("shift = 1\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { ParameterTable::parse("[gvm]\nshift = abc\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { ParameterTable::parse("[gvm]\nwidth = 1\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { ParameterTable::parse("[nope]\n"); }) == ErrorKind::ParseError);
    CHECK(kind_of([] { ParameterTable::load("/nonexistent/defaults.toml"); }) == ErrorKind::IoError);
  }

  TEST_CASE("checked-in defaults match the built-in ones") {
    const auto table = ParameterTable::load(std::string(DDKS_SOURCE_DIR) + "/data/defaults.toml");
    for (Family f : kSyntheticFamilies) CHECK(table.at(f) == default_params(f));
  }

  TEST_CASE("loading sample files") {
    namespace fs = std::filesystem;
    const auto dir = fs::temp_directory_path() / "ddks_dataset_test";
    fs::create_directories(dir);
    Rng rng({19, 0});
    auto write = [&](const fs::path& path, std::size_t n, std::size_t d, bool header) {
      std::ofstream out(path);
      if (header)
        for (std::size_t m = 0; m < d; ++m) out << "x" << m << (m + 1 < d ? "," : "\n");
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t m = 0; m < d; ++m) out << rng.uniform() << (m + 1 < d ? "," : "\n");
    };
    write(dir / "a.csv", 100, 7, true);
    write(dir / "b.csv", 100, 7, false);
    write(dir / "c.csv", 100, 6, false);
    const auto [p, t] = load_samples((dir / "a.csv").string(), (dir / "b.csv").string());
    CHECK(p.size() == 100);
    CHECK(p.dim() == 7);
    CHECK(t.size() == 100);
    CHECK(kind_of([&] { load_samples((dir / "a.csv").string(), (dir / "c.csv").string()); }) ==
          ErrorKind::DimensionMismatch);

    DatasetSpec spec;
    spec.family = Family::file;
    spec.path_p = (dir / "a.csv").string();
    spec.path_t = (dir / "b.csv").string();
    CHECK(gen_pair(spec, 1).first == p);
    fs::remove_all(dir);
  }
}
