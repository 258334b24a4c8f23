#include "diffsum/rational.hpp"

#include "diffsum/errors.hpp"

#include <cctype>

namespace diffsum {

namespace {

mpz_class parse_integer(std::string_view text, std::string_view whole) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '-' || text[i] == '+')) ++i;
  if (i == text.size()) throw FormatError("bad rational '" + std::string(whole) + "'");
  for (std::size_t j = i; j < text.size(); ++j) {
    if (!std::isdigit(static_cast<unsigned char>(text[j]))) {
      throw FormatError("bad rational '" + std::string(whole) + "'");
    }
  }
  std::string digits(text.substr(text[0] == '+' ? 1 : 0));
  return mpz_class(digits, 10);
}

}  // namespace

mpq_class parse_rational(std::string_view text) {
  const auto slash = text.find('/');
  mpz_class num = parse_integer(text.substr(0, slash), text);
  mpz_class den = 1;
  if (slash != std::string_view::npos) den = parse_integer(text.substr(slash + 1), text);
  if (den == 0) throw FormatError("zero denominator in '" + std::string(text) + "'");
  mpq_class q(num, den);
  q.canonicalize();
  return q;
}

std::string format_rational(const mpq_class& value) {
  return value.get_num().get_str() + "/" + value.get_den().get_str();
}

double approx(const mpq_class& value) { return value.get_d(); }

mpz_class ipow(const mpz_class& base, unsigned long exponent) {
  mpz_class out;
  mpz_pow_ui(out.get_mpz_t(), base.get_mpz_t(), exponent);
  return out;
}

}  // namespace diffsum
