#pragma once

#include <gmpxx.h>

#include <string>
#include <string_view>

namespace diffsum {

// Parses "num/den" or a plain integer into a canonical rational.
// Throws FormatError on malformed text or a zero denominator.
mpq_class parse_rational(std::string_view text);

// Canonical "num/den" (always with a slash, den > 0).
std::string format_rational(const mpq_class& value);

// Decimal approximation for human-readable tables only.
double approx(const mpq_class& value);

// Raises an integer to a small power.
mpz_class ipow(const mpz_class& base, unsigned long exponent);

}  // namespace diffsum
