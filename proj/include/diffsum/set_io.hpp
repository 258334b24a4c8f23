#pragma once

// Set text format:
//
//   zq <q>        or    int
//   <element>           <element>
//   ...                 ...
//
// One decimal element per line, ascending. write_set(read_set(t)) == t for
// any canonical text.

#include "diffsum/setcore.hpp"

#include <iosfwd>
#include <string>
#include <variant>

namespace diffsum {

using AnySet = std::variant<CyclicSet, IntegerSet>;

AnySet read_set(std::istream& in);
AnySet read_set_file(const std::string& path);
AnySet parse_set(const std::string& text);

void write_set(std::ostream& out, const CyclicSet& s);
void write_set(std::ostream& out, const IntegerSet& s);
std::string format_set(const AnySet& s);
void write_set_file(const std::string& path, const AnySet& s);

// "0,1,3" style, for reports.
std::string join_members(const CyclicSet& s);
std::string join_members(const IntegerSet& s);

}  // namespace diffsum
