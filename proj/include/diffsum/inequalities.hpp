#pragma once
// Empirical checks of the sumset inequalities the constructions rely on.
// Every comparison is exact: a <= b^(p/r) is tested as a^r <= b^p.
#include "diffsum/set_io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace diffsum {

struct CheckResult {
  bool holds = true;
  double slack = 0;  // informational; the verdict never depends on it
};

// |kA| >= |A-A|^(1 - 2^-k); k <= 20.
CheckResult check_triangle_lower(const AnySet& a, unsigned k);
// |kA| <= t^k n with n = |A|, t = |A-A| / n.
CheckResult check_plunnecke(const AnySet& a, unsigned k);
// |kA|^(2k-1) <= |A-A|^(k^2).
CheckResult check_combined_beta(const AnySet& a, unsigned k);
// |kA| <= n^k.
CheckResult check_trivial_bound(const AnySet& a, unsigned k);

struct FreimanPigaev {
  CheckResult lower;  // |2A|^(3/4) <= |A-A|
  CheckResult upper;  // |A-A| <= |2A|^(4/3)
  bool holds() const { return lower.holds && upper.holds; }
};
FreimanPigaev check_freiman_pigaev(const AnySet& a);

// |(k+1)A|^k <= |kA|^(k+1) for 1 <= k < k_max; one entry per k.
std::vector<CheckResult> check_power_mean(const AnySet& a, unsigned k_max);

// |X| |Y-Z| <= |X-Y| |X-Z|. Operands must live in the same group.
CheckResult check_difference_triangle(const AnySet& x, const AnySet& y, const AnySet& z);

enum class Generator { interval_subset, cyclic_subset, progression, bk_set, two_progressions, crt_composite };

std::string generator_name(Generator g);
Generator parse_generator(const std::string& name);
std::vector<Generator> all_generators();

// Deterministic in (g, key).
AnySet generate_set(Generator g, std::uint64_t key);

struct CheckOutcome {
  std::string property;
  std::uint64_t trials = 0;
  std::uint64_t violations = 0;
  double worst_margin = 0;
  std::string generator;
  std::uint64_t seed = 0;
};

struct SuiteOptions {
  unsigned k_max = 4;
  std::vector<std::string> properties;  // empty: all
};

std::vector<std::string> suite_properties();

// Trial i draws from generators[i mod |generators|] with key derive_key(seed, i).
// One outcome per (generator, property), generators in the given order.
std::vector<CheckOutcome> run_suite(const std::vector<Generator>& generators, std::uint64_t trials,
                                    std::uint64_t seed, const SuiteOptions& options = {});

void write_outcomes_csv(std::ostream& out, const std::vector<CheckOutcome>& outcomes);
std::string format_margin(double v);

}  // namespace diffsum
