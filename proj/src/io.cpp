#include "ddks/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>
#include <vector>

namespace ddks {

namespace {

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

bool parse_double(std::string_view field, double& out) {
  field = trim(field);
  if (field.empty()) return false;
  if (field.front() == '+') field.remove_prefix(1);
  const char* end = field.data() + field.size();
  auto [ptr, ec] = std::from_chars(field.data(), end, out);
  return ec == std::errc() && ptr == end;
}

std::vector<std::string_view> split_fields(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const std::size_t comma = line.find(',', start);
    if (comma == std::string_view::npos) {
      fields.push_back(line.substr(start));
      break;
    }
    fields.push_back(line.substr(start, comma - start));
    start = comma + 1;
  }
  return fields;
}

}  // namespace

Sample parse_csv(std::string_view text, std::string_view source) {
  std::vector<double> values;
  std::size_t d = 0;
  std::size_t rows = 0;
  std::size_t line_no = 0;
  bool seen_content = false;

  while (!text.empty()) {
    const std::size_t nl = text.find('\n');
    std::string_view line = text.substr(0, nl);
    text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
    ++line_no;
    if (trim(line).empty()) continue;

    const auto fields = split_fields(line);
    std::vector<double> parsed(fields.size());
    std::size_t numeric = 0;
    for (std::size_t i = 0; i < fields.size(); ++i)
      if (parse_double(fields[i], parsed[i])) ++numeric;

    if (!seen_content) {
      seen_content = true;
      if (numeric == 0) continue;  // header row
    }
    if (numeric != fields.size()) {
      std::ostringstream msg;
      msg << source << ":" << line_no << ": non-numeric field";
      fail(ErrorKind::ParseError, msg.str());
    }
    if (d == 0) {
      d = fields.size();
    } else if (fields.size() != d) {
      std::ostringstream msg;
      msg << source << ":" << line_no << ": expected " << d << " columns, found " << fields.size();
      fail(ErrorKind::ParseError, msg.str());
    }
    for (double v : parsed) {
      if (!std::isfinite(v)) {
        std::ostringstream msg;
        msg << source << ":" << line_no << ": value is not finite";
        fail(ErrorKind::NonFiniteValue, msg.str());
      }
    }
    values.insert(values.end(), parsed.begin(), parsed.end());
    ++rows;
  }
  if (rows == 0) fail(ErrorKind::EmptySample, std::string(source) + ": no data rows");
  return Sample(rows, d, std::move(values));
}

Sample read_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::IoError, "cannot open '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  if (in.bad()) fail(ErrorKind::IoError, "read failed for '" + path + "'");
  return parse_csv(buf.str(), path);
}

void write_csv(std::ostream& out, const Sample& s) {
  out << std::setprecision(17);
  for (std::size_t i = 0; i < s.size(); ++i) {
    auto row = s.row(i);
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (m) out << ',';
      out << row[m];
    }
    out << '\n';
  }
}

void write_csv(const std::string& path, const Sample& s) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::IoError, "cannot write '" + path + "'");
  write_csv(out, s);
  if (!out) fail(ErrorKind::IoError, "write failed for '" + path + "'");
}

nlohmann::json to_json(const TestOutcome& o) {
  nlohmann::json j;
  j["method"] = std::string(to_string(o.method));
  j["statistic"] = o.statistic;
  j["p_value"] = o.p_value ? nlohmann::json(*o.p_value) : nlohmann::json(nullptr);
  j["n_p"] = o.n_p;
  j["n_t"] = o.n_t;
  j["d"] = o.d;
  j["seed"] = o.seed;
  j["runtime_ns"] = o.runtime_ns;
  return j;
}

TestOutcome outcome_from_json(const nlohmann::json& j) {
  try {
    TestOutcome o;
    o.method = parse_method(j.at("method").get<std::string>());
    o.statistic = j.at("statistic").get<double>();
    if (!j.at("p_value").is_null()) o.p_value = j.at("p_value").get<double>();
    o.n_p = j.at("n_p").get<std::size_t>();
    o.n_t = j.at("n_t").get<std::size_t>();
    o.d = j.at("d").get<std::size_t>();
    o.seed = j.at("seed").get<std::uint64_t>();
    o.runtime_ns = j.at("runtime_ns").get<std::int64_t>();
    o.check();
    return o;
  } catch (const nlohmann::json::exception& e) {
    fail(ErrorKind::ParseError, std::string("bad TestOutcome: ") + e.what());
  }
}

}  // namespace ddks
