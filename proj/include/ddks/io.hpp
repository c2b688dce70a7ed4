#pragma once

#include <iosfwd>
#include <string>
#include <string_view>

#include <json.hpp>

#include "ddks/core.hpp"

namespace ddks {

// CSV sample format: one row per point, d numeric columns. A single header
// row is accepted as the first line if none of its fields parses as a number.
// Blank lines are ignored.
Sample parse_csv(std::string_view text, std::string_view source = "<memory>");
Sample read_csv(const std::string& path);
void write_csv(std::ostream& out, const Sample& s);
void write_csv(const std::string& path, const Sample& s);

// Flat JSON object; p_value is null for distance-only results.
nlohmann::json to_json(const TestOutcome& outcome);
TestOutcome outcome_from_json(const nlohmann::json& j);

}  // namespace ddks
