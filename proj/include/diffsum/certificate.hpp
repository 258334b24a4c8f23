#pragma once
// Construction certificates as JSON documents.
//
// stage1: kind, k, delta, primes, modulus, set_size, difference_set_full,
//         level_sum_size, density
// step:   kind, k, level, inner (nested certificate), pair_count, delta,
//         delta_prime, inner_density, primes {threshold, count, first, last,
//         list}, claimed_density_below_delta_prime, claimed_density_approx,
//         seed, samples, first_branch_samples, violations, accepted
//
// Rationals are "num/den" strings. The step prime list is omitted above
// kMaxRecordedPrimes entries; readers then regenerate it with the sieve.
#include "diffsum/construction.hpp"

#include <string>
#include <variant>

namespace diffsum {

inline constexpr std::uint64_t kMaxRecordedPrimes = 1'000'000;

struct Stage1Certificate {
  std::shared_ptr<const ConstructionTree> tree;
  std::uint64_t modulus = 0;
  std::uint64_t set_size = 0;
  bool difference_set_full = false;
  std::uint64_t level_sum_size = 0;  // |S_1(phi)|
  mpq_class density;                 // |S_1(phi)| / q

  bool accepted() const;  // A - A = Z_q and density < delta
};

using Certificate = std::variant<Stage1Certificate, StepCertificate>;

// Materializes the tree and records its verified invariants.
Stage1Certificate certify_stage1(const ConstructionTree& tree,
                                 std::uint64_t materialization_limit = kDefaultMaterializationLimit);

std::string certificate_to_text(const Certificate& cert);
// Rebuilds the tree from the recorded parameters, recomputes every recorded
// invariant, and throws FormatError on any mismatch.
Certificate certificate_from_text(const std::string& text, const StepOptions& options = {});

void write_certificate_file(const std::string& path, const Certificate& cert);
Certificate read_certificate_file(const std::string& path, const StepOptions& options = {});

// Leading decimal digits of num/den, truncated.
std::string decimal_prefix(const BigFraction& f, unsigned digits);

}  // namespace diffsum
