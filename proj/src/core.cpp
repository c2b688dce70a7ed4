#include "ddks/core.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ddks {

std::string_view to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::DimensionTooLarge: return "DimensionTooLarge";
    case ErrorKind::OutOfRange: return "OutOfRange";
    case ErrorKind::GridTooLarge: return "GridTooLarge";
    case ErrorKind::EmptyList: return "EmptyList";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::SingularCovariance: return "SingularCovariance";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::IoError: return "IoError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

// ---------------------------------------------------------------------------

Sample::Sample(std::size_t n, std::size_t d, std::vector<double> values)
    : n_(n), d_(d), values_(std::move(values)) {
  if (n_ == 0) fail(ErrorKind::EmptySample, "sample has no rows");
  if (d_ == 0) fail(ErrorKind::EmptySample, "sample has zero columns");
  if (values_.size() != n_ * d_) {
    std::ostringstream msg;
    msg << "expected " << n_ << "x" << d_ << " values, got " << values_.size();
    fail(ErrorKind::DimensionMismatch, msg.str());
  }
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!std::isfinite(values_[i])) {
      std::ostringstream msg;
      msg << "row " << i / d_ << ", column " << i % d_ << " is not finite";
      fail(ErrorKind::NonFiniteValue, msg.str());
    }
  }
}

Sample Sample::from_rows(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) fail(ErrorKind::EmptySample, "sample has no rows");
  const std::size_t d = rows.front().size();
  std::vector<double> values;
  values.reserve(rows.size() * d);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != d) {
      std::ostringstream msg;
      msg << "row " << i << " has " << rows[i].size() << " columns, expected " << d;
      fail(ErrorKind::DimensionMismatch, msg.str());
    }
    values.insert(values.end(), rows[i].begin(), rows[i].end());
  }
  return Sample(rows.size(), d, std::move(values));
}

std::vector<double> Sample::column(std::size_t m) const {
  std::vector<double> out(n_);
  for (std::size_t i = 0; i < n_; ++i) out[i] = values_[i * d_ + m];
  return out;
}

std::vector<double> Sample::columns() const {
  std::vector<double> out(n_ * d_);
  for (std::size_t i = 0; i < n_; ++i)
    for (std::size_t m = 0; m < d_; ++m) out[m * n_ + i] = values_[i * d_ + m];
  return out;
}

Sample concatenate(const Sample& a, const Sample& b) {
  if (a.dim() != b.dim()) fail(ErrorKind::DimensionMismatch, "cannot concatenate samples");
  std::vector<double> values(a.values().begin(), a.values().end());
  values.insert(values.end(), b.values().begin(), b.values().end());
  return Sample(a.size() + b.size(), a.dim(), std::move(values));
}

Sample gather(const Sample& s, std::span<const std::size_t> rows) {
  std::vector<double> values;
  values.reserve(rows.size() * s.dim());
  for (std::size_t r : rows) {
    auto src = s.row(r);
    values.insert(values.end(), src.begin(), src.end());
  }
  return Sample(rows.size(), s.dim(), std::move(values));
}

void validate_pair(const Sample& p, const Sample& t) {
  // Samples are validated for finiteness on construction; a default
  // constructed Sample is the only way to hold an empty one.
  if (p.empty() || t.empty()) fail(ErrorKind::EmptySample, "both samples need at least one row");
  if (p.dim() != t.dim()) {
    std::ostringstream msg;
    msg << "P has d=" << p.dim() << ", T has d=" << t.dim();
    fail(ErrorKind::DimensionMismatch, msg.str());
  }
}

// ---------------------------------------------------------------------------

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t mix(std::uint64_t a, std::uint64_t b) noexcept {
  std::uint64_t s = a ^ (b * 0xd1342543de82ef95ULL);
  return splitmix64(s);
}

}  // namespace

RngSpec RngSpec::derive(std::uint64_t index) const noexcept {
  return {seed, mix(stream + 0x632be59bd9b4e019ULL, index)};
}

Rng::Rng(const RngSpec& spec) noexcept {
  std::uint64_t state = mix(spec.seed, spec.stream) ^ spec.seed;
  for (auto& word : s_) word = splitmix64(state);
}

Rng::result_type Rng::operator()() noexcept {
  const std::uint64_t result = std::rotl(s_[1] * 5, 7) * 9;
  const std::uint64_t t = s_[1] << 17;
  s_[2] ^= s_[0];
  s_[3] ^= s_[1];
  s_[1] ^= s_[2];
  s_[0] ^= s_[3];
  s_[2] ^= t;
  s_[3] = std::rotl(s_[3], 45);
  return result;
}

double Rng::uniform() noexcept { return static_cast<double>((*this)() >> 11) * 0x1.0p-53; }

namespace {
__extension__ using u128 = unsigned __int128;
}

std::uint64_t Rng::below(std::uint64_t bound) noexcept {
  // Lemire's multiply-shift with rejection.
  u128 m = static_cast<u128>((*this)()) * bound;
  auto low = static_cast<std::uint64_t>(m);
  if (low < bound) {
    const std::uint64_t threshold = -bound % bound;
    while (low < threshold) {
      m = static_cast<u128>((*this)()) * bound;
      low = static_cast<std::uint64_t>(m);
    }
  }
  return static_cast<std::uint64_t>(m >> 64);
}

double Rng::normal() noexcept {
  // Box-Muller, one variate per call.
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate) noexcept { return -std::log1p(-uniform()) / rate; }

std::vector<double> rng_uniform(const RngSpec& spec, std::size_t count) {
  Rng rng(spec);
  std::vector<double> out(count);
  for (auto& v : out) v = rng.uniform();
  return out;
}

// ---------------------------------------------------------------------------

std::string_view to_string(Method m) noexcept {
  switch (m) {
    case Method::ddks: return "ddks";
    case Method::ddks_naive: return "ddks_naive";
    case Method::vdks: return "vdks";
    case Method::rdks: return "rdks";
    case Method::onedks: return "onedks";
    case Method::hotelling_t2: return "hotelling_t2";
    case Method::kl_div: return "kl_div";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (Method m : {Method::ddks, Method::ddks_naive, Method::vdks, Method::rdks, Method::onedks,
                   Method::hotelling_t2, Method::kl_div}) {
    if (to_string(m) == name) return m;
  }
  if (name == "hotelling") return Method::hotelling_t2;
  if (name == "kldiv") return Method::kl_div;
  fail(ErrorKind::BadSpec, "unknown method '" + std::string(name) + "'");
}

bool is_ks_family(Method m) noexcept {
  return m != Method::hotelling_t2 && m != Method::kl_div;
}

void TestOutcome::check() const {
  if (!(statistic >= 0.0)) fail(ErrorKind::DomainError, "statistic must be nonnegative");
  if (is_ks_family(method) && statistic > 1.0)
    fail(ErrorKind::DomainError, "KS-family statistic exceeds 1");
  if (p_value && !(*p_value >= 0.0 && *p_value <= 1.0))
    fail(ErrorKind::DomainError, "p-value outside [0, 1]");
}

}  // namespace ddks
