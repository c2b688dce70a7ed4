// ddks command-line front end.
//
// Exit codes: 0 ok, 2 usage, 3 data, 4 internal.

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "ddks/datasets.hpp"
#include "ddks/harness.hpp"
#include "ddks/io.hpp"
#include "ddks/method.hpp"
#include "ddks/parallel.hpp"

namespace {

using nlohmann::json;

enum Exit : int { kOk = 0, kUsage = 2, kData = 3, kInternal = 4 };

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dataset flags shared by every subcommand that draws synthetic samples.
struct DatasetFlags {
  std::string family = "gvm";
  std::size_t d = 3;
  std::string params_file;
  std::optional<double> centre, shift, sigma, sigma1, sigma2, lambda1, lambda2, noise_fraction;

  void add(CLI::App* app, bool with_d = true) {
    app->add_option("--dataset", family, "gvm|gvs|dvu|skew|mm")->capture_default_str();
    if (with_d) app->add_option("--d", d, "dimension")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--params", params_file, "per-family parameter file (key = value under [family])");
    app->add_option("--centre", centre);
    app->add_option("--shift", shift);
    app->add_option("--sigma", sigma);
    app->add_option("--sigma1", sigma1);
    app->add_option("--sigma2", sigma2);
    app->add_option("--lambda1", lambda1);
    app->add_option("--lambda2", lambda2);
    app->add_option("--noise-fraction", noise_fraction);
  }

  ddks::DatasetSpec resolve(std::uint64_t seed) const {
    ddks::DatasetSpec spec;
    spec.family = ddks::parse_family(family);
    if (spec.family == ddks::Family::file) throw UsageError("use --p/--t for file input");
    spec.d = d;
    const auto table = params_file.empty() ? ddks::ParameterTable() : ddks::ParameterTable::load(params_file);
    spec.params = table.at(spec.family);
    auto& q = spec.params;
    if (centre) q.centre = *centre;
    if (shift) q.shift = *shift;
    if (sigma) q.sigma = *sigma;
    if (sigma1) q.sigma1 = *sigma1;
    if (sigma2) q.sigma2 = *sigma2;
    if (lambda1) q.lambda1 = *lambda1;
    if (lambda2) q.lambda2 = *lambda2;
    if (noise_fraction) q.noise_fraction = *noise_fraction;
    spec.rng = ddks::RngSpec{seed, 0};
    spec.check();
    return spec;
  }
};

struct OutputFlags {
  std::string path;
  std::string format = "json";

  void add(CLI::App* app) {
    app->add_option("-o,--output", path, "output file (default stdout)");
    app->add_option("--format", format, "json|csv")->check(CLI::IsMember({"json", "csv"}))->capture_default_str();
  }
};

// Writes to the -o path or stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path, std::ios::binary);
      if (!*file_) ddks::fail(ddks::ErrorKind::IoError, "cannot open '" + path + "' for writing");
    }
  }
  std::ostream& out() { return file_ ? *file_ : std::cout; }

 private:
  std::unique_ptr<std::ofstream> file_;
};

void header(std::ostream& out, const OutputFlags& o, const json& config) {
  if (o.format == "json")
    out << json{{"config", config}}.dump() << '\n';
  else
    out << "# config: " << config.dump() << '\n';
}

std::string csv_number(const json& v) { return v.is_null() ? "" : v.dump(); }

struct PowerFlags {
  std::string method = "ddks";
  bool analytical = false;
  double alpha = 0.05;
  std::size_t repeats = 10;
  std::size_t trials = 100;
  std::size_t perms = 100;
  double tolerance = 1e-3;
  double power_target = 0.0;  // 0: 1 - alpha
  std::size_t n_max = 5000;
  std::uint64_t seed = 0;

  void add(CLI::App* app) {
    app->add_option("--method", method)->capture_default_str();
    app->add_flag("--analytical", analytical, "analytical significance (ddks only)");
    app->add_option("--alpha", alpha)->capture_default_str();
    app->add_option("--repeats", repeats)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--trials", trials, "draws per candidate")->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--perms", perms)->capture_default_str()->check(CLI::PositiveNumber);
    app->add_option("--tolerance", tolerance)->capture_default_str();
    app->add_option("--power-target", power_target, "required rejection rate (default 1 - alpha)");
    app->add_option("--n-max", n_max)->capture_default_str();
    app->add_option("--seed", seed)->capture_default_str();
  }

  ddks::PowerConfig resolve() const {
    if (!(alpha > 0 && alpha < 1)) throw UsageError("--alpha must lie in (0, 1)");
    ddks::PowerConfig c;
    c.method = ddks::parse_method(method);
    c.analytical = analytical;
    c.alpha = alpha;
    c.repetitions = repeats;
    c.trials = trials;
    c.permutations = perms;
    c.tolerance = tolerance;
    c.power_target = power_target > 0 ? power_target : 1.0 - alpha;
    c.n_max = n_max;
    return c;
  }
};

void write_reports(Sink& sink, const OutputFlags& o, const json& config, const std::vector<ddks::PowerReport>& reports) {
  auto& out = sink.out();
  header(out, o, config);
  if (o.format == "json") {
    for (const auto& r : reports) out << ddks::to_json(r).dump() << '\n';
    return;
  }
  out << "target,method,family,d,alpha,repetition,found,min,mean,max,not_reachable,trials,sample_size\n";
  for (const auto& r : reports) {
    const json j = ddks::to_json(r);
    out << r.target << ',' << j["method"].get<std::string>() << ',' << j["dataset"]["family"].get<std::string>()
        << ',' << r.dataset.d << ',' << csv_number(j["alpha"]) << ','
        << (r.repetition ? std::to_string(*r.repetition) : std::string()) << ',' << csv_number(j["found"]) << ','
        << csv_number(j["spread"]["min"]) << ',' << csv_number(j["spread"]["mean"]) << ','
        << csv_number(j["spread"]["max"]) << ',' << (r.not_reachable ? "true" : "false") << ',' << r.config.trials
        << ',' << (r.target == "parameter_difference" ? std::to_string(r.sample_size) : std::string()) << '\n';
  }
}

std::vector<std::size_t> parse_list(const std::string& text, const char* flag) {
  std::vector<std::size_t> out;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const std::size_t comma = std::min(text.find(',', pos), text.size());
    const std::string item = text.substr(pos, comma - pos);
    try {
      std::size_t used = 0;
      const long long v = std::stoll(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw UsageError(std::string(flag) + ": '" + item + "' is not a positive integer");
    }
    pos = comma + 1;
  }
  return out;
}

int exit_code(ddks::ErrorKind kind) {
  return kind == ddks::ErrorKind::BadSpec ? kUsage : kData;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multidimensional two-sample Kolmogorov-Smirnov tests"};
  app.require_subcommand(1);
  std::size_t threads = 0;
  app.add_option("--threads", threads, "worker threads (default: DDKS_THREADS or all cores)");

  // test
  auto* test = app.add_subcommand("test", "run one two-sample test");
  std::string test_method = "ddks", path_p, path_t;
  std::size_t test_perms = 100, test_n = 50;
  std::uint64_t test_seed = 0;
  double test_alpha = 0.05;
  bool test_analytical = false, record_runtime = false;
  DatasetFlags test_data;
  OutputFlags test_out;
  test->add_option("--method", test_method)->capture_default_str();
  test->add_option("--p", path_p, "CSV sample P");
  test->add_option("--t", path_t, "CSV sample T");
  test->add_option("--n", test_n, "points per sample when drawing a dataset")->capture_default_str();
  test->add_option("--alpha", test_alpha)->capture_default_str();
  test->add_option("--perms", test_perms, "permutations (0: statistic only)")->capture_default_str();
  test->add_option("--seed", test_seed)->capture_default_str();
  test->add_flag("--analytical", test_analytical, "analytical significance (ddks only)");
  test->add_flag("--record-runtime", record_runtime, "report the measured runtime instead of 0");
  test_data.add(test);
  test_out.add(test);

  // gen
  auto* gen = app.add_subcommand("gen", "write a synthetic sample pair as CSV");
  DatasetFlags gen_data;
  std::size_t gen_n = 50;
  std::uint64_t gen_seed = 0;
  std::string out_p, out_t;
  gen_data.add(gen);
  gen->add_option("--n", gen_n)->capture_default_str()->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_seed)->capture_default_str();
  gen->add_option("--out-p", out_p)->required();
  gen->add_option("--out-t", out_t)->required();

  // power / shrink / dims
  auto* power = app.add_subcommand("power", "minimum sample size that rejects H0");
  auto* shrink = app.add_subcommand("shrink", "minimum parameter difference that rejects H0 at fixed n");
  auto* dims = app.add_subcommand("dims", "minimum sample size over a list of dimensions");
  PowerFlags power_flags, shrink_flags, dims_flags;
  DatasetFlags power_data, shrink_data, dims_data;
  OutputFlags power_out, shrink_out, dims_out;
  std::size_t shrink_n = 50;
  std::string dims_list = "2,3,4,5";
  power_flags.add(power);
  power_data.add(power);
  power_out.add(power);
  shrink_flags.add(shrink);
  shrink_data.add(shrink);
  shrink_out.add(shrink);
  shrink->add_option("--n", shrink_n)->capture_default_str();
  dims_flags.add(dims);
  dims_data.add(dims, false);
  dims_out.add(dims);
  dims->add_option("--dims", dims_list, "comma-separated dimensions")->capture_default_str();

  // timing
  auto* timing = app.add_subcommand("timing", "median runtime of a single statistic");
  std::string timing_method = "ddks", timing_n = "100,1000,10000";
  std::size_t timing_reps = 5;
  std::uint64_t timing_seed = 0;
  DatasetFlags timing_data;
  OutputFlags timing_out;
  timing->add_option("--method", timing_method)->capture_default_str();
  timing->add_option("--n", timing_n, "comma-separated sample sizes")->capture_default_str();
  timing->add_option("--reps", timing_reps)->capture_default_str();
  timing->add_option("--seed", timing_seed)->capture_default_str();
  timing_data.add(timing);
  timing_out.add(timing);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (threads > 0) ddks::set_worker_count(threads);

    if (test->parsed()) {
      if (!(test_alpha > 0 && test_alpha < 1)) throw UsageError("--alpha must lie in (0, 1)");
      const ddks::Method method = ddks::parse_method(test_method);
      ddks::Sample p, t;
      json data;
      if (!path_p.empty() || !path_t.empty()) {
        if (path_p.empty() || path_t.empty()) throw UsageError("--p and --t must be given together");
        std::tie(p, t) = ddks::load_samples(path_p, path_t);
        data = {{"p", path_p}, {"t", path_t}};
      } else {
        const auto spec = test_data.resolve(test_seed);
        std::tie(p, t) = ddks::gen_pair(spec, test_n);
        data = ddks::to_json(spec);
        data["n"] = test_n;
      }
      ddks::TestConfig config;
      config.permutations = test_perms;
      config.seed = test_seed;
      config.analytical = test_analytical;
      const auto outcome = [&] {
        auto o = ddks::run_test(method, p, t, config);
        std::clog << "ddks: " << to_string(method) << " took " << o.runtime_ns / 1e6 << " ms\n";
        if (!record_runtime) o.runtime_ns = 0;
        return o;
      }();

      Sink sink(test_out.path);
      auto& out = sink.out();
      header(out, test_out,
             {{"command", "test"},
              {"method", std::string(to_string(method))},
              {"alpha", test_alpha},
              {"permutations", test_perms},
              {"analytical", test_analytical},
              {"seed", test_seed},
              {"data", data}});
      json j = ddks::to_json(outcome);
      j["alpha"] = test_alpha;
      j["reject"] = outcome.p_value ? json(*outcome.p_value <= test_alpha) : json(nullptr);
      if (test_out.format == "json") {
        out << j.dump() << '\n';
      } else {
        out << "method,statistic,p_value,n_p,n_t,d,seed,runtime_ns,alpha,reject\n";
        out << j["method"].get<std::string>() << ',' << csv_number(j["statistic"]) << ','
            << csv_number(j["p_value"]) << ',' << outcome.n_p << ',' << outcome.n_t << ',' << outcome.d << ','
            << outcome.seed << ',' << outcome.runtime_ns << ',' << csv_number(j["alpha"]) << ','
            << (j["reject"].is_null() ? "" : j["reject"].dump()) << '\n';
      }
    } else if (gen->parsed()) {
      const auto g = ddks::generate(gen_data.resolve(gen_seed), gen_n);
      ddks::write_csv(out_p, g.p);
      ddks::write_csv(out_t, g.t);
    } else if (power->parsed() || shrink->parsed()) {
      const bool is_power = power->parsed();
      const auto& flags = is_power ? power_flags : shrink_flags;
      const auto& data = is_power ? power_data : shrink_data;
      const auto& o = is_power ? power_out : shrink_out;
      const auto config = flags.resolve();
      const auto spec = data.resolve(flags.seed);
      const ddks::RngSpec rng{flags.seed, 1};
      const auto start = std::chrono::steady_clock::now();
      const auto report = is_power ? ddks::min_sample_size(config, spec, rng)
                                   : ddks::min_parameter_difference(config, spec, shrink_n, rng);
      std::clog << "ddks: " << (is_power ? "power" : "shrink") << " finished in "
                << std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count() << " s\n";
      Sink sink(o.path);
      json cfg = {{"command", is_power ? "power" : "shrink"},
                  {"harness", ddks::to_json(config)},
                  {"dataset", ddks::to_json(spec)},
                  {"seed", flags.seed}};
      if (!is_power) cfg["n"] = shrink_n;
      write_reports(sink, o, cfg, ddks::split_repetitions(report));
    } else if (dims->parsed()) {
      const auto config = dims_flags.resolve();
      const auto spec = dims_data.resolve(dims_flags.seed);
      const auto list = parse_list(dims_list, "--dims");
      const auto reports = ddks::dimension_sweep(config, spec, list, ddks::RngSpec{dims_flags.seed, 1});
      Sink sink(dims_out.path);
      write_reports(sink, dims_out,
                    {{"command", "dims"},
                     {"harness", ddks::to_json(config)},
                     {"dataset", ddks::to_json(spec)},
                     {"dims", list},
                     {"seed", dims_flags.seed}},
                    reports);
    } else if (timing->parsed()) {
      const ddks::Method method = ddks::parse_method(timing_method);
      const auto list = parse_list(timing_n, "--n");
      const auto spec = timing_data.resolve(timing_seed);
      const auto rows = ddks::timing_benchmark(method, list, spec.d, timing_reps, spec);
      Sink sink(timing_out.path);
      auto& out = sink.out();
      header(out, timing_out,
             {{"command", "timing"},
              {"method", std::string(to_string(method))},
              {"reps", timing_reps},
              {"dataset", ddks::to_json(spec)},
              {"workers", ddks::worker_count()}});
      if (timing_out.format == "csv") out << "method,n,d,median_runtime_ns,reps\n";
      for (const auto& row : rows) {
        if (timing_out.format == "json") {
          json j = ddks::to_json(row);
          j["method"] = std::string(to_string(method));
          out << j.dump() << '\n';
        } else {
          out << to_string(method) << ',' << row.n << ',' << row.d << ',' << row.median_ns << ',' << row.reps << '\n';
        }
      }
    }
    std::cout.flush();
    return kOk;
  } catch (const UsageError& e) {
    std::cerr << "ddks: usage: " << e.what() << '\n';
    return kUsage;
  } catch (const ddks::Error& e) {
    std::cerr << "ddks: " << e.what() << '\n';
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "ddks: internal error: " << e.what() << '\n';
    return kInternal;
  }
}
