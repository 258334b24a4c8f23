#include "diffsum/set_io.hpp"

#include "diffsum/errors.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

namespace diffsum {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <class T>
T parse_number(const std::string& s, std::size_t line_no) {
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (ec != std::errc() || ptr != last) {
    throw FormatError("set file line " + std::to_string(line_no) + ": bad number '" + s + "'");
  }
  return value;
}

}  // namespace

AnySet read_set(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  std::string header;
  while (header.empty() && std::getline(in, line)) {
    ++line_no;
    header = trim(line);
  }
  if (header.empty()) throw FormatError("set file: missing header");

  std::vector<std::int64_t> elements;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string t = trim(line);
    if (t.empty()) continue;
    elements.push_back(parse_number<std::int64_t>(t, line_no));
  }

  if (header == "int") return IntegerSet(std::move(elements));
  if (header.rfind("zq ", 0) == 0) {
    const auto q = parse_number<std::uint64_t>(trim(header.substr(3)), 1);
    if (q < 2) throw FormatError("set file: modulus must be >= 2");
    CyclicSet s(q);
    for (std::int64_t e : elements) {
      if (e < 0 || static_cast<std::uint64_t>(e) >= q) {
        throw FormatError("set file: element " + std::to_string(e) + " outside [0, " + std::to_string(q) + ")");
      }
      s.insert(static_cast<std::uint64_t>(e));
    }
    return s;
  }
  throw FormatError("set file: header must be 'int' or 'zq <q>', got '" + header + "'");
}

AnySet read_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open set file '" + path + "'");
  return read_set(in);
}

AnySet parse_set(const std::string& text) {
  std::istringstream in(text);
  return read_set(in);
}

void write_set(std::ostream& out, const CyclicSet& s) {
  out << "zq " << s.modulus() << '\n';
  for (std::uint64_t r : s.members()) out << r << '\n';
}

void write_set(std::ostream& out, const IntegerSet& s) {
  out << "int\n";
  for (std::int64_t x : s.members()) out << x << '\n';
}

std::string format_set(const AnySet& s) {
  std::ostringstream out;
  std::visit([&](const auto& set) { write_set(out, set); }, s);
  return out.str();
}

void write_set_file(const std::string& path, const AnySet& s) {
  std::ofstream out(path);
  if (!out) throw FormatError("cannot write set file '" + path + "'");
  out << format_set(s);
}

std::string join_members(const CyclicSet& s) {
  std::string out;
  for (std::uint64_t r : s.members()) {
    if (!out.empty()) out += ',';
    out += std::to_string(r);
  }
  return out;
}

std::string join_members(const IntegerSet& s) {
  std::string out;
  for (std::int64_t x : s.members()) {
    if (!out.empty()) out += ',';
    out += std::to_string(x);
  }
  return out;
}

}  // namespace diffsum
