#pragma once
// Exhaustive branch-and-bound for the six extremal quantities on small
// arguments, plus greedy B_k generators and log-ratio tables.
//
//   F: min |kA|   over A in Z_q, A-A = Z_q
//   f: min |A-A|  over A in Z_q, kA  = Z_q
//   H: min |kA|   over A in [0,D], |A-A| >= q
//   h: min |A-A|  over A in [0,D], |kA|  >= q
//   G: min |kA|   over A in [0,D], A-A contains q consecutive integers
//   g: min |A-A|  over A in [0,D], kA  contains q consecutive integers
#include "diffsum/set_io.hpp"

#include <optional>
#include <string_view>

namespace diffsum {

enum class Quantity { F, G, H, f, g, h };

Quantity parse_quantity(std::string_view name);
std::string_view quantity_name(Quantity q);
bool is_cyclic(Quantity q);

struct OracleLimits {
  std::uint64_t max_q = 26;
  std::uint64_t max_diameter = 26;
};

struct OracleResult {
  Quantity quantity = Quantity::F;
  unsigned k = 1;
  std::uint64_t q = 0;
  std::uint64_t value = 0;
  AnySet witness = IntegerSet{};
  bool exhaustive = false;
  // Present for integer quantities: the value is exact within A in [0, D]
  // and only an upper bound for the unrestricted quantity.
  std::optional<std::uint64_t> diameter_bound;
};

OracleResult oracle_F(unsigned k, std::uint64_t q, Quantity mode = Quantity::F, const OracleLimits& limits = {});
OracleResult oracle_H(unsigned k, std::uint64_t q, std::uint64_t diameter, Quantity mode = Quantity::H,
                      const OracleLimits& limits = {});
OracleResult oracle_G(unsigned k, std::uint64_t q, std::uint64_t diameter, Quantity mode = Quantity::G,
                      const OracleLimits& limits = {});
// Dispatch on quantity; the diameter is ignored for F and f.
OracleResult run_oracle(Quantity quantity, unsigned k, std::uint64_t q, std::uint64_t diameter,
                        const OracleLimits& limits = {});

// Recomputes side condition and objective of the witness through setcore.
bool witness_valid(const OracleResult& r);

// Greedy B_k set starting at 0: each next element is the smallest integer
// keeping all k-fold sums distinct.
IntegerSet greedy_bk_set(unsigned k, std::size_t n);

struct ExponentRow {
  std::uint64_t q = 0;
  std::uint64_t value = 0;
  double log_ratio = 0;
  double running_inf = 0;
};

struct ExponentReport {
  Quantity quantity = Quantity::F;
  unsigned k = 1;
  std::optional<std::uint64_t> diameter_bound;
  std::vector<ExponentRow> rows;
};

ExponentReport exponent_table(Quantity quantity, unsigned k, std::uint64_t q_lo, std::uint64_t q_hi,
                              std::uint64_t diameter = 26, const OracleLimits& limits = {});

}  // namespace diffsum
