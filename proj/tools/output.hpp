#pragma once
// Records are JSON objects; the same list prints as text, CSV or JSON.
#include "diffsum/config.hpp"

#include <json.hpp>

#include <iosfwd>
#include <vector>

namespace diffsum::cli {

using Record = nlohmann::ordered_json;

// One record prints as "key: value" lines in text mode; several print as an
// aligned table. CSV always has a header row. JSON is an object or an array.
void emit(std::ostream& out, OutputFormat format, const std::vector<Record>& records, bool single = false);

std::string csv_field(const Record& value);

}  // namespace diffsum::cli
