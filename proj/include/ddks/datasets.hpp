#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "ddks/core.hpp"

namespace ddks {

enum class Family { gvm, gvs, dvu, skew, mm, file };

std::string_view to_string(Family f) noexcept;
Family parse_family(std::string_view name);

inline constexpr std::array<Family, 5> kSyntheticFamilies = {Family::gvm, Family::gvs, Family::dvu,
                                                             Family::skew, Family::mm};

// Parameters of the synthetic families. Means are of the form c * (1,...,1):
// gvm/mm compare centre against centre + shift with a common sigma, gvs
// compares sigma1 against sigma2 around centre, skew compares exponential
// rates lambda1 and lambda2 in every coordinate. mm then replaces each point
// with probability noise_fraction by a uniform draw from the cube of
// half-width 3 sigma around the midpoint of the two means.
struct DatasetParams {
  double centre = 0.5;
  double shift = 0.2;
  double sigma = 0.1;
  double sigma1 = 0.1;
  double sigma2 = 0.25;
  double lambda1 = 1.0;
  double lambda2 = 2.5;
  double noise_fraction = 0.3;

  friend bool operator==(const DatasetParams&, const DatasetParams&) = default;
};

struct DatasetSpec {
  Family family = Family::gvm;
  std::size_t d = 3;
  DatasetParams params;
  RngSpec rng;
  std::string path_p;  // family == file
  std::string path_t;

  // Throws BadSpec when a scale or rate is not positive, noise_fraction is
  // outside [0, 1] or d == 0.
  void check() const;
};

struct GeneratedPair {
  Sample p;
  Sample t;
  std::size_t noise_p = 0;  // mm only: points replaced by noise
  std::size_t noise_t = 0;
};

GeneratedPair generate(const DatasetSpec& spec, std::size_t n);
std::pair<Sample, Sample> gen_pair(const DatasetSpec& spec, std::size_t n);

std::pair<Sample, Sample> load_samples(const std::string& path_p, const std::string& path_t);

// ---------------------------------------------------------------------------
// Defaults and the parameter file

// Built-in per-family defaults. They equal data/defaults.toml.
DatasetParams default_params(Family f);

// Per-family parameter table read from a "key = value" file with [family]
// section headers and '#' comments. Families or keys missing from the file
// keep the built-in defaults.
class ParameterTable {
 public:
  ParameterTable();

  static ParameterTable parse(std::string_view text, std::string_view source = "<memory>");
  static ParameterTable load(const std::string& path);

  const DatasetParams& at(Family f) const;
  void set(Family f, const DatasetParams& params);

 private:
  std::map<Family, DatasetParams> table_;
};

// Sets one named parameter ("shift", "sigma1", ...). Throws BadSpec for
// unknown keys.
void set_param(DatasetParams& params, std::string_view key, double value);

// The scalar distance between P's and T's distributions for a family: shift
// for gvm/mm, sigma2 - sigma1 for gvs, lambda2 - lambda1 for skew. dvu and
// file have none and throw BadSpec.
double difference_parameter(Family f, const DatasetParams& params);
DatasetParams with_difference(Family f, DatasetParams params, double difference);
// Upper end of the bisection bracket for the difference parameter.
double difference_upper_bound(Family f);

}  // namespace ddks
