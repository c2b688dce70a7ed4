#include "ddks/datasets.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "ddks/io.hpp"

namespace ddks {

std::string_view to_string(Family f) noexcept {
  switch (f) {
    case Family::gvm: return "gvm";
    case Family::gvs: return "gvs";
    case Family::dvu: return "dvu";
    case Family::skew: return "skew";
    case Family::mm: return "mm";
    case Family::file: return "file";
  }
  return "unknown";
}

Family parse_family(std::string_view name) {
  for (Family f : {Family::gvm, Family::gvs, Family::dvu, Family::skew, Family::mm, Family::file})
    if (to_string(f) == name) return f;
  fail(ErrorKind::BadSpec, "unknown dataset family '" + std::string(name) + "'");
}

void DatasetSpec::check() const {
  if (d == 0) fail(ErrorKind::BadSpec, "d must be >= 1");
  const auto& q = params;
  if (!(q.sigma > 0 && q.sigma1 > 0 && q.sigma2 > 0)) fail(ErrorKind::BadSpec, "standard deviations must be > 0");
  if (!(q.lambda1 > 0 && q.lambda2 > 0)) fail(ErrorKind::BadSpec, "rates must be > 0");
  if (!(q.noise_fraction >= 0 && q.noise_fraction <= 1)) fail(ErrorKind::BadSpec, "noise_fraction outside [0, 1]");
  if (!std::isfinite(q.centre) || !std::isfinite(q.shift)) fail(ErrorKind::BadSpec, "means must be finite");
  if (family == Family::file && (path_p.empty() || path_t.empty()))
    fail(ErrorKind::BadSpec, "file family needs both sample paths");
}

namespace {

enum Side : std::uint64_t { kSideP = 0, kSideT = 1 };

// Each point draws from its own stream so generation order is irrelevant.
template <typename PointFn>
Sample draw(const DatasetSpec& spec, Side side, std::size_t n, PointFn&& point) {
  const std::size_t d = spec.d;
  std::vector<double> values(n * d);
  const RngSpec side_spec = spec.rng.derive(side);
  for (std::size_t i = 0; i < n; ++i) {
    Rng rng(side_spec.derive(i));
    point(rng, std::span<double>(values.data() + i * d, d));
  }
  return Sample(n, d, std::move(values));
}

}  // namespace

GeneratedPair generate(const DatasetSpec& spec, std::size_t n) {
  spec.check();
  if (n == 0) fail(ErrorKind::BadSpec, "sample size must be >= 1");
  const auto& q = spec.params;

  auto gaussian = [](double mean, double sigma) {
    return [mean, sigma](Rng& rng, std::span<double> x) {
      for (double& v : x) v = mean + sigma * rng.normal();
    };
  };
  auto exponential = [](double rate) {
    return [rate](Rng& rng, std::span<double> x) {
      for (double& v : x) v = rng.exponential(rate);
    };
  };

  GeneratedPair out;
  switch (spec.family) {
    case Family::gvm:
      out.p = draw(spec, kSideP, n, gaussian(q.centre, q.sigma));
      out.t = draw(spec, kSideT, n, gaussian(q.centre + q.shift, q.sigma));
      break;
    case Family::gvs:
      out.p = draw(spec, kSideP, n, gaussian(q.centre, q.sigma1));
      out.t = draw(spec, kSideT, n, gaussian(q.centre, q.sigma2));
      break;
    case Family::dvu:
      out.p = draw(spec, kSideP, n, [](Rng& rng, std::span<double> x) {
        const double u = rng.uniform();
        for (double& v : x) v = u;
      });
      out.t = draw(spec, kSideT, n, [](Rng& rng, std::span<double> x) {
        for (double& v : x) v = rng.uniform();
      });
      break;
    case Family::skew:
      out.p = draw(spec, kSideP, n, exponential(q.lambda1));
      out.t = draw(spec, kSideT, n, exponential(q.lambda2));
      break;
    case Family::mm: {
      const double mid = q.centre + 0.5 * q.shift;
      const double half = 3.0 * q.sigma;
      auto mixture = [&](double mean, std::size_t& noise) {
        return [&, mean](Rng& rng, std::span<double> x) {
          if (rng.bernoulli(q.noise_fraction)) {
            ++noise;
            for (double& v : x) v = mid - half + 2.0 * half * rng.uniform();
          } else {
            for (double& v : x) v = mean + q.sigma * rng.normal();
          }
        };
      };
      out.p = draw(spec, kSideP, n, mixture(q.centre, out.noise_p));
      out.t = draw(spec, kSideT, n, mixture(q.centre + q.shift, out.noise_t));
      break;
    }
    case Family::file: {
      auto [p, t] = load_samples(spec.path_p, spec.path_t);
      out.p = std::move(p);
      out.t = std::move(t);
      break;
    }
  }
  return out;
}

std::pair<Sample, Sample> gen_pair(const DatasetSpec& spec, std::size_t n) {
  GeneratedPair g = generate(spec, n);
  return {std::move(g.p), std::move(g.t)};
}

std::pair<Sample, Sample> load_samples(const std::string& path_p, const std::string& path_t) {
  Sample p = read_csv(path_p);
  Sample t = read_csv(path_t);
  if (p.dim() != t.dim()) {
    std::ostringstream msg;
    msg << path_p << " has " << p.dim() << " columns, " << path_t << " has " << t.dim();
    fail(ErrorKind::DimensionMismatch, msg.str());
  }
  return {std::move(p), std::move(t)};
}

// ---------------------------------------------------------------------------

DatasetParams default_params(Family f) {
  DatasetParams q;
  switch (f) {
    case Family::gvs:
      q.sigma2 = 0.25;
      break;
    case Family::skew:
      q.lambda2 = 2.5;
      break;
    default:
      break;
  }
  return q;
}

ParameterTable::ParameterTable() {
  for (Family f : {Family::gvm, Family::gvs, Family::dvu, Family::skew, Family::mm, Family::file})
    table_[f] = default_params(f);
}

const DatasetParams& ParameterTable::at(Family f) const { return table_.at(f); }

void ParameterTable::set(Family f, const DatasetParams& params) { table_[f] = params; }

void set_param(DatasetParams& q, std::string_view key, double value) {
  if (key == "centre" || key == "center" || key == "mu") q.centre = value;
  else if (key == "shift" || key == "delta") q.shift = value;
  else if (key == "sigma") q.sigma = value;
  else if (key == "sigma1") q.sigma1 = value;
  else if (key == "sigma2") q.sigma2 = value;
  else if (key == "lambda1") q.lambda1 = value;
  else if (key == "lambda2") q.lambda2 = value;
  else if (key == "noise_fraction") q.noise_fraction = value;
  else fail(ErrorKind::BadSpec, "unknown dataset parameter '" + std::string(key) + "'");
}

namespace {

std::string_view strip(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

}  // namespace

ParameterTable ParameterTable::parse(std::string_view text, std::string_view source) {
  ParameterTable table;
  std::optional<Family> section;
  std::size_t line_no = 0;
  auto error = [&](const std::string& what) {
    std::ostringstream msg;
    msg << source << ":" << line_no << ": " << what;
    fail(ErrorKind::ParseError, msg.str());
  };

  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = strip(line);
    if (line.empty()) continue;

    if (line.front() == '[') {
      if (line.back() != ']') error("unterminated section header");
      try {
        section = parse_family(strip(line.substr(1, line.size() - 2)));
      } catch (const Error& e) {
        error(e.what());
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) error("expected 'key = value'");
    if (!section) error("parameter outside of a [family] section");
    const auto key = strip(line.substr(0, eq));
    const auto raw = strip(line.substr(eq + 1));
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(raw.data(), raw.data() + raw.size(), value);
    if (ec != std::errc() || ptr != raw.data() + raw.size()) error("value of '" + std::string(key) + "' is not a number");
    try {
      set_param(table.table_[*section], key, value);
    } catch (const Error& e) {
      error(e.what());
    }
  }
  return table;
}

ParameterTable ParameterTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), path);
}

double difference_parameter(Family f, const DatasetParams& q) {
  switch (f) {
    case Family::gvm:
    case Family::mm: return q.shift;
    case Family::gvs: return q.sigma2 - q.sigma1;
    case Family::skew: return q.lambda2 - q.lambda1;
    default: break;
  }
  fail(ErrorKind::BadSpec, "family '" + std::string(to_string(f)) + "' has no difference parameter");
}

DatasetParams with_difference(Family f, DatasetParams q, double difference) {
  switch (f) {
    case Family::gvm:
    case Family::mm: q.shift = difference; return q;
    case Family::gvs: q.sigma2 = q.sigma1 + difference; return q;
    case Family::skew: q.lambda2 = q.lambda1 + difference; return q;
    default: break;
  }
  fail(ErrorKind::BadSpec, "family '" + std::string(to_string(f)) + "' has no difference parameter");
}

double difference_upper_bound(Family f) {
  switch (f) {
    case Family::gvm: return 0.5;
    case Family::mm: return 1.0;
    case Family::gvs: return 0.4;
    case Family::skew: return 5.0;
    default: break;
  }
  fail(ErrorKind::BadSpec, "family '" + std::string(to_string(f)) + "' has no difference parameter");
}

}  // namespace ddks
