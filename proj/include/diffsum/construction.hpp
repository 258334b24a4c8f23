#pragma once

// Recursive construction of a set A = {phi(x), x + phi(x)} in a cyclic group
// with A - A everything and few k-fold sums.
//
// Elements of the modulus are handled as residue vectors over a list of
// pairwise coprime coordinate moduli. A stage-1 tree uses k+1 primes; a step
// tree keeps the inner tree's coordinates as block 0 and adds one prime
// coordinate per level-(m+1) pair on the inner modulus. Step moduli are never
// flattened to a single integer.

#include "diffsum/level_pairs.hpp"
#include "diffsum/primes.hpp"
#include "diffsum/setcore.hpp"

#include <gmpxx.h>

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace diffsum {

inline constexpr std::uint64_t kDefaultMaterializationLimit = std::uint64_t{1} << 20;

class ConstructionTree;

struct Stage1Node {
  unsigned k = 0;
  mpq_class delta;
  std::vector<std::uint64_t> primes;        // p_0 .. p_k
  std::vector<std::uint64_t> coefficients;  // (j - k) / k mod p_j
};

struct StepNode {
  std::shared_ptr<const ConstructionTree> inner;
  unsigned level = 0;           // m + 1
  std::uint64_t pair_count = 0;  // t
  mpq_class delta;
  mpq_class delta_prime;
  mpq_class prime_threshold;  // t / (delta' - delta); every step prime exceeds it
  std::vector<std::uint64_t> primes;  // p_1 .. p_t
};

class ConstructionTree {
 public:
  explicit ConstructionTree(Stage1Node node);
  explicit ConstructionTree(StepNode node);

  const Stage1Node* stage1() const { return std::get_if<Stage1Node>(&node_); }
  const StepNode* step() const { return std::get_if<StepNode>(&node_); }

  unsigned k() const;
  // Largest level m for which this tree controls S_m.
  unsigned level() const;
  std::size_t arity() const;
  std::vector<std::uint64_t> coordinate_moduli() const;
  // Product of the coordinate moduli when it fits in 64 bits.
  std::optional<std::uint64_t> modulus() const;
  double log2_modulus() const;
  bool materializable(std::uint64_t limit = kDefaultMaterializationLimit) const;

 private:
  std::variant<Stage1Node, StepNode> node_;
};

struct CrtPoint {
  std::vector<std::uint64_t> coordinates;
  friend bool operator==(const CrtPoint&, const CrtPoint&) = default;
  friend auto operator<=>(const CrtPoint&, const CrtPoint&) = default;
};

using PointPair = LevelPairOf<CrtPoint>;

struct DensityBudget {
  mpq_class delta;
  mpq_class delta_prime;
  mpq_class epsilon;
};

// Exact rational kept as separate numerator and denominator; the step density
// has a denominator with millions of bits, so it is never canonicalized.
struct BigFraction {
  mpz_class num;
  mpz_class den;
};

struct StepCertificate {
  std::shared_ptr<const ConstructionTree> tree;
  mpq_class inner_density;  // |S_m(phi)| / q
  BigFraction claimed_density;
  std::uint64_t verified_samples = 0;
  std::uint64_t first_branch_samples = 0;  // samples whose shadow had level <= m
  std::uint64_t seed = 0;
  std::uint64_t violations = 0;

  bool accepted() const { return violations == 0; }
};

// ---------------------------------------------------------------------------
// Stage 1

// The k+1 smallest primes exceeding max(k, (k+1)/delta), with c_j = (j-k)/k.
ConstructionTree stage1_build(unsigned k, const mpq_class& delta);
// Rebuilds a stage-1 tree from recorded primes, validating every invariant.
ConstructionTree stage1_from_primes(unsigned k, const mpq_class& delta, std::vector<std::uint64_t> primes);

// ---------------------------------------------------------------------------
// Points and phi

// CRT conversions for trees with a 64-bit flat modulus.
CrtPoint to_point(const ConstructionTree& tree, std::uint64_t residue);
std::uint64_t to_residue(const ConstructionTree& tree, const CrtPoint& x);

CrtPoint phi_eval(const ConstructionTree& tree, const CrtPoint& x);

// Single step coordinate of phi' (1-based j): -v x_j / (u + v) mod p, or 0
// when u + v = 0. Requires u + v < p.
std::uint64_t step_phi_coordinate(PairWeight w, std::uint64_t xj, std::uint64_t p);

// A = {phi(x), x + phi(x)} as residues. Throws LimitError past `limit`.
CyclicSet materialize_set(const ConstructionTree& tree, std::uint64_t limit = kDefaultMaterializationLimit);

// ---------------------------------------------------------------------------
// Representation sums

// sum over the support of u(x) phi(x) + v(x) (x + phi(x)), coordinatewise.
CrtPoint representation_sum(const ConstructionTree& tree, const PointPair& pair);
// Same for a pair on flat residues of a materializable tree.
std::uint64_t representation_residue(const ConstructionTree& tree, const LevelPair& pair);

// Shadow on the inner modulus: weights summed over points sharing block 0.
LevelPair shadow_of(const ConstructionTree& step_tree, const PointPair& pair);

struct LevelSumBudget {
  // Upper bound on word-shift operations spent in sumset kernels.
  std::uint64_t max_work = std::uint64_t{1} << 36;
};

// S_m(phi): every representation sum of level <= m, as residues.
CyclicSet compute_level_sums(const ConstructionTree& tree, unsigned m, const LevelSumBudget& budget = {},
                             std::uint64_t limit = kDefaultMaterializationLimit);

// ---------------------------------------------------------------------------
// Inductive step

struct StepBuild {
  ConstructionTree tree;
  StepCertificate certificate;
};

struct StepOptions {
  SieveLimits sieve;
  std::uint64_t materialization_limit = kDefaultMaterializationLimit;
};

// Extends a materializable inner tree by one level. budget.delta must bound the
// inner density |S_m|/q from above; the certificate's claimed density is
// checked against budget.delta_prime in exact arithmetic.
StepBuild step_build(const ConstructionTree& inner, const DensityBudget& budget, const StepOptions& options = {});
// Same, with step primes taken from a record instead of the sieve. Each must be
// prime, above the threshold, strictly ascending, and t of them.
StepBuild step_from_primes(const ConstructionTree& inner, const DensityBudget& budget,
                           const std::vector<std::uint64_t>& primes, const StepOptions& options = {});

// sum of 1/p over the primes, exactly (binary splitting).
BigFraction reciprocal_sum(const std::vector<std::uint64_t>& primes);

// inner_density + sum 1/p_j for a step tree.
BigFraction step_claimed_density(const mpq_class& inner_density, const StepNode& step);

// a/b < c/d for big fractions with positive denominators.
bool less_than(const BigFraction& lhs, const mpq_class& rhs);

// A point of a step tree whose step coordinates are derived on demand from a
// key (coordinate j = counter-derived draw below p_j).
struct SampledStepPoint {
  std::uint64_t inner = 0;  // residue of block 0 on the inner modulus
  std::uint64_t key = 0;
  friend bool operator==(const SampledStepPoint&, const SampledStepPoint&) = default;
};

using SampledPair = LevelPairOf<SampledStepPoint>;

// Coordinate j (1-based) of a sampled point.
std::uint64_t sampled_coordinate(const StepNode& step, const SampledStepPoint& x, std::size_t j);
// Full residue vector of a sampled point.
CrtPoint materialize_point(const ConstructionTree& step_tree, const SampledStepPoint& x);

struct DichotomyOutcome {
  std::size_t shadow_level = 0;
  bool first_branch = false;  // shadow level <= m
  bool holds = false;
};

// Precomputed state for checking the dichotomy on one step tree.
class StepVerifier {
 public:
  explicit StepVerifier(std::shared_ptr<const ConstructionTree> step_tree,
                        std::uint64_t materialization_limit = kDefaultMaterializationLimit);

  const ConstructionTree& tree() const { return *tree_; }
  const StepNode& step() const { return *tree_->step(); }
  const CyclicSet& inner_level_sums() const { return inner_sums_; }
  const LevelPairEnumerator& pairs() const { return pairs_; }

  LevelPair shadow(const SampledPair& pair) const;
  // Block 0 of the representation sum, as an inner residue.
  std::uint64_t block0(const SampledPair& pair) const;
  // Step coordinate j (1-based) of the representation sum.
  std::uint64_t step_coordinate(const SampledPair& pair, std::size_t j) const;

  // Either block 0 lies in S_m(phi) (shadow level <= m) or the step
  // coordinate indexed by the shadow's canonical rank vanishes.
  DichotomyOutcome check(const SampledPair& pair) const;

  // Uniform level-<=(m+1), weight-k pair for sample `index` under `seed`.
  SampledPair sample(std::uint64_t seed, std::uint64_t index) const;

 private:
  std::shared_ptr<const ConstructionTree> tree_;
  std::uint64_t inner_q_;
  CyclicSet inner_sums_;
  LevelPairEnumerator pairs_;
  std::vector<double> level_cdf_;  // cumulative stratum probabilities, levels 1..m+1
};

// Draws `samples` pairs (OpenMP over samples; identical for any thread count)
// and fills verified_samples / violations / seed of `cert`.
void step_sample_verify(StepCertificate& cert, std::uint64_t samples, std::uint64_t seed,
                        std::uint64_t materialization_limit = kDefaultMaterializationLimit);

// ---------------------------------------------------------------------------
// Feasibility schedule

enum class StageStatus { materializable, symbolic_verifiable, infeasible };
std::string to_string(StageStatus s);

struct StagePlan {
  unsigned level = 0;
  mpq_class budget;  // (m + 1) epsilon / (k + 1)
  StageStatus status = StageStatus::infeasible;
  std::string modulus;      // decimal when known, else "~2^<bits>"
  std::string pair_count;   // step stages: t, decimal or "~2^<bits>"
  std::string density;      // exact when computed
  std::string note;
};

struct ConstructionPlan {
  unsigned k = 0;
  mpq_class epsilon;
  std::vector<StagePlan> stages;
};

ConstructionPlan construction_report(unsigned k, const mpq_class& epsilon, const StepOptions& options = {});

}  // namespace diffsum
