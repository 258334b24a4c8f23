#include "output.hpp"

#include <algorithm>
#include <ostream>

namespace diffsum::cli {

namespace {

std::string plain(const Record& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "-";
  return v.dump();
}

std::vector<std::string> keys_of(const std::vector<Record>& records) {
  std::vector<std::string> keys;
  for (const auto& r : records) {
    for (const auto& [k, v] : r.items()) {
      if (std::find(keys.begin(), keys.end(), k) == keys.end()) keys.push_back(k);
    }
  }
  return keys;
}

}  // namespace

std::string csv_field(const Record& value) {
  if (value.is_null()) return "";
  std::string s = plain(value);
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

void emit(std::ostream& out, OutputFormat format, const std::vector<Record>& records, bool single) {
  const auto keys = keys_of(records);
  switch (format) {
    case OutputFormat::json:
      if (single && records.size() == 1) {
        out << records.front().dump(2) << '\n';
      } else {
        out << Record(records).dump(2) << '\n';
      }
      return;
    case OutputFormat::csv:
      for (std::size_t i = 0; i < keys.size(); ++i) out << (i ? "," : "") << keys[i];
      out << '\n';
      for (const auto& r : records) {
        for (std::size_t i = 0; i < keys.size(); ++i) {
          out << (i ? "," : "") << (r.contains(keys[i]) ? csv_field(r.at(keys[i])) : "");
        }
        out << '\n';
      }
      return;
    case OutputFormat::text:
      if (single && records.size() == 1) {
        for (const auto& [k, v] : records.front().items()) out << k << ": " << plain(v) << '\n';
        return;
      }
      {
        std::vector<std::size_t> width(keys.size());
        for (std::size_t i = 0; i < keys.size(); ++i) {
          width[i] = keys[i].size();
          for (const auto& r : records) {
            if (r.contains(keys[i])) width[i] = std::max(width[i], plain(r.at(keys[i])).size());
          }
        }
        auto row = [&](auto cell) {
          std::string line;
          for (std::size_t i = 0; i < keys.size(); ++i) {
            std::string c = cell(i);
            if (i + 1 < keys.size()) c.resize(width[i], ' ');
            line += (i ? "  " : "") + c;
          }
          out << line << '\n';
        };
        row([&](std::size_t i) { return keys[i]; });
        for (const auto& r : records) {
          row([&](std::size_t i) { return r.contains(keys[i]) ? plain(r.at(keys[i])) : std::string("-"); });
        }
      }
      return;
  }
}

}  // namespace diffsum::cli
