#include "diffsum/construction.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/modular.hpp"
#include "diffsum/rational.hpp"
#include "diffsum/rng.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

namespace diffsum {

namespace {

mpz_class floor_of(const mpq_class& x) {
  mpz_class out;
  mpz_fdiv_q(out.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return out;
}

std::uint64_t to_u64(const mpz_class& z, const char* what) {
  if (z < 0 || mpz_sizeinbase(z.get_mpz_t(), 2) > 64) throw OverflowError(std::string(what) + " exceeds 64 bits");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, -1, sizeof(out), 0, 0, z.get_mpz_t());
  return out;
}

void require_open_unit(const mpq_class& x, const char* what) {
  if (x <= 0 || x >= 1) throw PreconditionError(std::string(what) + " must lie in (0, 1), got " + format_rational(x));
}

void validate_point(const ConstructionTree& tree, const CrtPoint& x) {
  const auto moduli = tree.coordinate_moduli();
  if (x.coordinates.size() != moduli.size()) {
    throw DomainError("arity mismatch: point has " + std::to_string(x.coordinates.size()) +
                      " coordinates, tree has " + std::to_string(moduli.size()));
  }
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    if (x.coordinates[i] >= moduli[i]) throw DomainError("coordinate " + std::to_string(i) + " out of range");
  }
}

template <class Point>
void validate_support(const LevelPairOf<Point>& pair, unsigned k) {
  if (pair.support.empty()) throw DomainError("pair has empty support");
  std::vector<const Point*> pts;
  pts.reserve(pair.support.size());
  for (const auto& e : pair.support) {
    if (e.weight.total() == 0) throw DomainError("support entry with zero weight");
    pts.push_back(&e.point);
  }
  // order is irrelevant to the sum; only distinctness matters
  std::sort(pts.begin(), pts.end(), [](const Point* a, const Point* b) { return *a < *b; });
  for (std::size_t i = 1; i < pts.size(); ++i) {
    if (!(*pts[i - 1] < *pts[i])) throw DomainError("pair support has a repeated point");
  }
  if (pair.weight() != k) throw DomainError("pair weight " + std::to_string(pair.weight()) + " != k");
}

std::uint64_t require_flat_modulus(const ConstructionTree& tree, std::uint64_t limit, const char* op) {
  const auto q = tree.modulus();
  if (!q || *q > limit) {
    std::ostringstream msg;
    msg << op << ": modulus ~2^" << std::lround(tree.log2_modulus()) << " exceeds materialization limit " << limit
        << "; use sampled verification";
    throw LimitError(msg.str());
  }
  return *q;
}

// phi as a residue for every residue of a materializable tree.
std::vector<std::uint64_t> phi_table(const ConstructionTree& tree, std::uint64_t q) {
  std::vector<std::uint64_t> phi(q);
  for (std::uint64_t r = 0; r < q; ++r) phi[r] = to_residue(tree, phi_eval(tree, to_point(tree, r)));
  return phi;
}

// Partitions of `total` into exactly `parts` parts, non-increasing.
void partitions(unsigned total, unsigned parts, unsigned max_part, std::vector<unsigned>& cur,
                std::vector<std::vector<unsigned>>& out) {
  if (parts == 0) {
    if (total == 0) out.push_back(cur);
    return;
  }
  for (unsigned p = std::min(max_part, total - (parts - 1)); p >= 1; --p) {
    if (p * parts < total) break;
    cur.push_back(p);
    partitions(total - p, parts - 1, p, cur, out);
    cur.pop_back();
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// ConstructionTree

ConstructionTree::ConstructionTree(Stage1Node node) : node_(std::move(node)) {}
ConstructionTree::ConstructionTree(StepNode node) : node_(std::move(node)) {}

unsigned ConstructionTree::k() const {
  if (const auto* s = stage1()) return s->k;
  return step()->inner->k();
}

unsigned ConstructionTree::level() const {
  if (stage1() != nullptr) return 1;
  return step()->level;
}

std::size_t ConstructionTree::arity() const {
  if (const auto* s = stage1()) return s->primes.size();
  return step()->inner->arity() + step()->primes.size();
}

std::vector<std::uint64_t> ConstructionTree::coordinate_moduli() const {
  if (const auto* s = stage1()) return s->primes;
  auto out = step()->inner->coordinate_moduli();
  out.insert(out.end(), step()->primes.begin(), step()->primes.end());
  return out;
}

std::optional<std::uint64_t> ConstructionTree::modulus() const {
  std::uint64_t q = 1;
  for (std::uint64_t m : coordinate_moduli()) {
    if (__builtin_mul_overflow(q, m, &q)) return std::nullopt;
  }
  return q;
}

double ConstructionTree::log2_modulus() const {
  double bits = 0;
  for (std::uint64_t m : coordinate_moduli()) bits += std::log2(static_cast<double>(m));
  return bits;
}

bool ConstructionTree::materializable(std::uint64_t limit) const {
  const auto q = modulus();
  return q && *q <= limit;
}

// ---------------------------------------------------------------------------
// Stage 1

ConstructionTree stage1_from_primes(unsigned k, const mpq_class& delta, std::vector<std::uint64_t> primes) {
  if (k < 1) throw PreconditionError("stage1: k must be >= 1");
  require_open_unit(delta, "stage1 delta");
  if (primes.size() != k + 1) throw PreconditionError("stage1: need exactly k+1 primes");
  const mpq_class threshold = std::max(mpq_class(k), mpq_class(mpq_class(k + 1) / delta));
  mpq_class reciprocal = 0;
  for (std::size_t i = 0; i < primes.size(); ++i) {
    const std::uint64_t p = primes[i];
    if (!is_prime(p)) throw PreconditionError("stage1: " + std::to_string(p) + " is not prime");
    if (mpq_class(mpz_class(std::to_string(p))) <= threshold) {
      throw PreconditionError("stage1: prime " + std::to_string(p) + " does not exceed max(k, (k+1)/delta)");
    }
    for (std::size_t j = 0; j < i; ++j) {
      if (primes[j] == p) throw PreconditionError("stage1: primes must be distinct");
    }
    reciprocal += mpq_class(1, static_cast<unsigned long>(p));
  }
  if (reciprocal >= delta) throw Error("stage1: sum of 1/p_j does not stay below delta");

  Stage1Node node;
  node.k = k;
  node.delta = delta;
  node.primes = std::move(primes);
  for (unsigned j = 0; j <= k; ++j) {
    const std::uint64_t p = node.primes[j];
    const std::uint64_t k_inv = *mod_inverse(k % p, p);
    const std::uint64_t numerator = mod_floor(static_cast<std::int64_t>(j) - static_cast<std::int64_t>(k), p);
    node.coefficients.push_back(mulmod(numerator, k_inv, p));
  }
  return ConstructionTree(std::move(node));
}

ConstructionTree stage1_build(unsigned k, const mpq_class& delta) {
  if (k < 1) throw PreconditionError("stage1: k must be >= 1");
  require_open_unit(delta, "stage1 delta");
  const mpq_class threshold = std::max(mpq_class(k), mpq_class(mpq_class(k + 1) / delta));
  const std::uint64_t floor_threshold = to_u64(floor_of(threshold), "stage1 prime threshold");
  return stage1_from_primes(k, delta, primes_above(floor_threshold, k + 1));
}

// ---------------------------------------------------------------------------
// Points and phi

CrtPoint to_point(const ConstructionTree& tree, std::uint64_t residue) {
  CrtPoint x;
  for (std::uint64_t m : tree.coordinate_moduli()) x.coordinates.push_back(residue % m);
  return x;
}

std::uint64_t to_residue(const ConstructionTree& tree, const CrtPoint& x) {
  const auto moduli = tree.coordinate_moduli();
  if (x.coordinates.size() != moduli.size()) throw DomainError("arity mismatch in to_residue");
  if (!tree.modulus()) throw OverflowError("to_residue: flat modulus exceeds 64 bits");
  // Garner: r stays below the running product M.
  std::uint64_t r = 0;
  std::uint64_t big_m = 1;
  for (std::size_t i = 0; i < moduli.size(); ++i) {
    const std::uint64_t m = moduli[i];
    const std::uint64_t diff = addmod(x.coordinates[i] % m, negmod(r % m, m), m);
    const std::uint64_t t = mulmod(diff, *mod_inverse(big_m % m, m), m);
    r += big_m * t;
    big_m *= m;
  }
  return r;
}

std::uint64_t step_phi_coordinate(PairWeight w, std::uint64_t xj, std::uint64_t p) {
  const std::uint64_t total = w.total();
  if (total == 0) return 0;
  if (total >= p) throw Error("step prime " + std::to_string(p) + " does not exceed pair weight");
  const std::uint64_t scaled = mulmod(w.v, xj, p);
  return negmod(mulmod(scaled, *mod_inverse(total, p), p), p);
}

CrtPoint phi_eval(const ConstructionTree& tree, const CrtPoint& x) {
  validate_point(tree, x);
  if (const auto* s = tree.stage1()) {
    CrtPoint y;
    for (std::size_t j = 0; j < s->primes.size(); ++j) {
      y.coordinates.push_back(mulmod(s->coefficients[j], x.coordinates[j], s->primes[j]));
    }
    return y;
  }
  const StepNode& step = *tree.step();
  const ConstructionTree& inner = *step.inner;
  const std::size_t a = inner.arity();
  CrtPoint block{{x.coordinates.begin(), x.coordinates.begin() + static_cast<std::ptrdiff_t>(a)}};
  CrtPoint y = phi_eval(inner, block);
  y.coordinates.resize(a + step.primes.size(), 0);

  const auto q_inner = inner.modulus();
  if (!q_inner) throw LimitError("phi_eval: inner modulus exceeds 64 bits");
  const LevelPairEnumerator pairs(*q_inner, tree.k(), step.level);
  pairs.for_each_pair_containing(to_residue(inner, block), [&](std::uint64_t rank, PairWeight w) {
    const std::size_t c = a + static_cast<std::size_t>(rank);
    y.coordinates[c] = step_phi_coordinate(w, x.coordinates[c], step.primes[rank]);
  });
  return y;
}

CyclicSet materialize_set(const ConstructionTree& tree, std::uint64_t limit) {
  const std::uint64_t q = require_flat_modulus(tree, limit, "materialize_set");
  CyclicSet a(q);
  for (std::uint64_t r = 0; r < q; ++r) {
    const std::uint64_t phi = to_residue(tree, phi_eval(tree, to_point(tree, r)));
    a.insert(phi);
    a.insert(addmod(r, phi, q));
  }
  return a;
}

// ---------------------------------------------------------------------------
// Representation sums

CrtPoint representation_sum(const ConstructionTree& tree, const PointPair& pair) {
  validate_support(pair, tree.k());
  const auto moduli = tree.coordinate_moduli();
  CrtPoint sum{std::vector<std::uint64_t>(moduli.size(), 0)};
  for (const auto& e : pair.support) {
    const CrtPoint phi = phi_eval(tree, e.point);
    for (std::size_t i = 0; i < moduli.size(); ++i) {
      const std::uint64_t m = moduli[i];
      const std::uint64_t term =
          addmod(mulmod(e.weight.total(), phi.coordinates[i], m), mulmod(e.weight.v, e.point.coordinates[i], m), m);
      sum.coordinates[i] = addmod(sum.coordinates[i], term, m);
    }
  }
  return sum;
}

std::uint64_t representation_residue(const ConstructionTree& tree, const LevelPair& pair) {
  PointPair p;
  for (const auto& e : pair.support) p.support.push_back({to_point(tree, e.point), e.weight});
  return to_residue(tree, representation_sum(tree, p));
}

LevelPair shadow_of(const ConstructionTree& step_tree, const PointPair& pair) {
  const StepNode* step = step_tree.step();
  if (step == nullptr) throw PreconditionError("shadow_of: tree is not a step tree");
  validate_support(pair, step_tree.k());
  const ConstructionTree& inner = *step->inner;
  const std::size_t a = inner.arity();
  std::map<std::uint64_t, PairWeight> acc;
  for (const auto& e : pair.support) {
    validate_point(step_tree, e.point);
    CrtPoint block{{e.point.coordinates.begin(), e.point.coordinates.begin() + static_cast<std::ptrdiff_t>(a)}};
    auto& w = acc[to_residue(inner, block)];
    w.u += e.weight.u;
    w.v += e.weight.v;
  }
  LevelPair out;
  for (const auto& [x, w] : acc) out.support.push_back({x, w});
  return out;
}

CyclicSet compute_level_sums(const ConstructionTree& tree, unsigned m, const LevelSumBudget& budget,
                             std::uint64_t limit) {
  const unsigned k = tree.k();
  if (m < 1 || m > k) throw DomainError("compute_level_sums: level cap outside [1, k]");
  const std::uint64_t q = require_flat_modulus(tree, limit, "compute_level_sums");
  const auto phi = phi_table(tree, q);

  // singles[w] = {w phi(x) + v x : x, 0 <= v <= w}: one support point of weight w.
  std::vector<CyclicSet> singles;
  singles.reserve(k + 1);
  singles.emplace_back(q);
  for (unsigned w = 1; w <= k; ++w) {
    CyclicSet t(q);
    for (std::uint64_t x = 0; x < q; ++x) {
      const std::uint64_t base = mulmod(w, phi[x], q);
      for (unsigned v = 0; v <= w; ++v) t.insert(addmod(base, mulmod(v, x, q), q));
    }
    singles.push_back(std::move(t));
  }

  // A level-L sum with weights w_1..w_L lies in singles[w_1] + ... + singles[w_L];
  // coincident points in that sumset only produce sums of lower level.
  CyclicSet out(q);
  std::uint64_t work = 0;
  const std::uint64_t words = kernels::words_for(q);
  for (unsigned level = 1; level <= m; ++level) {
    std::vector<std::vector<unsigned>> parts;
    std::vector<unsigned> cur;
    partitions(k, level, k, cur, parts);
    for (const auto& p : parts) {
      CyclicSet acc = singles[p[0]];
      for (std::size_t i = 1; i < p.size(); ++i) {
        work += std::min(acc.size(), singles[p[i]].size()) * words;
        if (work > budget.max_work) throw LimitError("compute_level_sums: work budget exceeded");
        acc = sumset(acc, singles[p[i]]);
      }
      out.insert_all(acc);
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Inductive step

BigFraction reciprocal_sum(const std::vector<std::uint64_t>& primes) {
  if (primes.empty()) return {mpz_class(0), mpz_class(1)};
  std::function<BigFraction(std::size_t, std::size_t)> split = [&](std::size_t lo, std::size_t hi) -> BigFraction {
    if (hi - lo == 1) return {mpz_class(1), mpz_class(std::to_string(primes[lo]))};
    const std::size_t mid = lo + (hi - lo) / 2;
    BigFraction l = split(lo, mid);
    BigFraction r = split(mid, hi);
    return {l.num * r.den + r.num * l.den, l.den * r.den};
  };
  return split(0, primes.size());
}

BigFraction step_claimed_density(const mpq_class& inner_density, const StepNode& step) {
  const BigFraction s = reciprocal_sum(step.primes);
  // Step primes do not divide the inner modulus, so this stays in lowest terms.
  return {inner_density.get_num() * s.den + inner_density.get_den() * s.num, inner_density.get_den() * s.den};
}

bool less_than(const BigFraction& lhs, const mpq_class& rhs) {
  return lhs.num * rhs.get_den() < rhs.get_num() * lhs.den;
}

namespace {

StepBuild build_step(const ConstructionTree& inner, const DensityBudget& budget, const StepOptions& options,
                     const std::vector<std::uint64_t>* recorded) {
  require_open_unit(budget.delta, "delta");
  require_open_unit(budget.delta_prime, "delta'");
  if (budget.delta_prime <= budget.delta) throw PreconditionError("step: need delta < delta'");
  const std::uint64_t q = require_flat_modulus(inner, options.materialization_limit, "step_build");
  const unsigned k = inner.k();
  const unsigned m = inner.level();
  if (m >= k) throw PreconditionError("step: inner tree already controls level k");

  const CyclicSet sums = compute_level_sums(inner, m, {}, options.materialization_limit);
  mpq_class density(mpz_class(std::to_string(sums.size())), mpz_class(std::to_string(q)));
  density.canonicalize();
  if (density > budget.delta) {
    throw PreconditionError("step: inner density " + format_rational(density) + " exceeds budget delta " +
                            format_rational(budget.delta));
  }

  const LevelPairEnumerator pairs(q, k, m + 1);
  StepNode node;
  node.inner = std::make_shared<const ConstructionTree>(inner);
  node.level = m + 1;
  node.pair_count = pairs.count();
  node.delta = budget.delta;
  node.delta_prime = budget.delta_prime;
  node.prime_threshold = mpq_class(mpz_class(std::to_string(node.pair_count))) / (budget.delta_prime - budget.delta);
  const std::uint64_t floor_threshold = to_u64(floor_of(node.prime_threshold), "step prime threshold");
  const auto skip = inner.coordinate_moduli();
  if (recorded == nullptr) {
    node.primes = primes_above(floor_threshold, node.pair_count, skip, options.sieve);
  } else {
    if (recorded->size() != node.pair_count) {
      throw PreconditionError("step: recorded prime count " + std::to_string(recorded->size()) +
                              " != pair count " + std::to_string(node.pair_count));
    }
    for (std::size_t i = 0; i < recorded->size(); ++i) {
      const std::uint64_t p = (*recorded)[i];
      if (p <= floor_threshold) throw PreconditionError("step: recorded prime " + std::to_string(p) + " below threshold");
      if (i > 0 && p <= (*recorded)[i - 1]) throw PreconditionError("step: recorded primes not strictly ascending");
      if (!is_prime(p)) throw PreconditionError("step: recorded value " + std::to_string(p) + " is not prime");
      if (std::find(skip.begin(), skip.end(), p) != skip.end()) {
        throw PreconditionError("step: recorded prime " + std::to_string(p) + " repeats an inner modulus");
      }
    }
    node.primes = *recorded;
  }
  for (std::uint64_t p : node.primes) {
    if (p <= k) throw Error("step prime " + std::to_string(p) + " does not exceed k");
  }

  auto tree = std::make_shared<const ConstructionTree>(std::move(node));
  StepCertificate cert;
  cert.tree = tree;
  cert.inner_density = density;
  cert.claimed_density = step_claimed_density(density, *tree->step());
  if (!less_than(cert.claimed_density, budget.delta_prime)) {
    throw Error("step: claimed density is not below delta' (construction defect)");
  }
  return {*tree, std::move(cert)};
}

}  // namespace

StepBuild step_build(const ConstructionTree& inner, const DensityBudget& budget, const StepOptions& options) {
  return build_step(inner, budget, options, nullptr);
}

StepBuild step_from_primes(const ConstructionTree& inner, const DensityBudget& budget,
                           const std::vector<std::uint64_t>& primes, const StepOptions& options) {
  return build_step(inner, budget, options, &primes);
}

std::uint64_t sampled_coordinate(const StepNode& step, const SampledStepPoint& x, std::size_t j) {
  CounterRng rng(x.key, j);
  return rng.below(step.primes[j - 1]);
}

CrtPoint materialize_point(const ConstructionTree& step_tree, const SampledStepPoint& x) {
  const StepNode* step = step_tree.step();
  if (step == nullptr) throw PreconditionError("materialize_point: not a step tree");
  CrtPoint p = to_point(*step->inner, x.inner);
  for (std::size_t j = 1; j <= step->primes.size(); ++j) p.coordinates.push_back(sampled_coordinate(*step, x, j));
  return p;
}

// ---------------------------------------------------------------------------
// StepVerifier

namespace {

// Three-way comparison of two sampled points in coordinate order.
int compare_points(const StepNode& step, const SampledStepPoint& a, const SampledStepPoint& b) {
  if (a.inner != b.inner) return a.inner < b.inner ? -1 : 1;
  if (a.key == b.key) return 0;
  for (std::size_t j = 1; j <= step.primes.size(); ++j) {
    const std::uint64_t ca = sampled_coordinate(step, a, j);
    const std::uint64_t cb = sampled_coordinate(step, b, j);
    if (ca != cb) return ca < cb ? -1 : 1;
  }
  return 0;
}

}  // namespace

StepVerifier::StepVerifier(std::shared_ptr<const ConstructionTree> step_tree, std::uint64_t materialization_limit)
    : tree_(std::move(step_tree)),
      inner_q_(0),
      inner_sums_(1),
      pairs_(1, 1, 1) {
  if (tree_ == nullptr || tree_->step() == nullptr) throw PreconditionError("StepVerifier: not a step tree");
  const StepNode& s = *tree_->step();
  inner_q_ = require_flat_modulus(*s.inner, materialization_limit, "StepVerifier");
  const unsigned k = tree_->k();
  const unsigned m = s.level - 1;
  inner_sums_ = compute_level_sums(*s.inner, m, {}, materialization_limit);
  pairs_ = LevelPairEnumerator(inner_q_, k, s.level);
  if (pairs_.count() != s.primes.size()) throw Error("StepVerifier: pair count does not match step primes");

  // Stratum sizes C(q', L) * W_L, in the log domain: q' is astronomically large.
  const double ln_q = tree_->log2_modulus() * std::log(2.0);
  std::vector<double> ln_count;
  for (unsigned level = 1; level <= s.level; ++level) {
    double lc = -std::lgamma(static_cast<double>(level) + 1.0);
    for (unsigned i = 0; i < level; ++i) lc += ln_q + std::log1p(-static_cast<double>(i) * std::exp(-ln_q));
    std::uint64_t w = 0;
    for (const auto& c : compositions(k, level)) {
      std::uint64_t splits = 1;
      for (unsigned part : c) splits *= part + 1;
      w += splits;
    }
    ln_count.push_back(lc + std::log(static_cast<double>(w)));
  }
  const double top = *std::max_element(ln_count.begin(), ln_count.end());
  double total = 0;
  for (double lc : ln_count) total += std::exp(lc - top);
  double acc = 0;
  for (double lc : ln_count) {
    acc += std::exp(lc - top) / total;
    level_cdf_.push_back(acc);
  }
  level_cdf_.back() = 1.0;
}

LevelPair StepVerifier::shadow(const SampledPair& pair) const {
  std::map<std::uint64_t, PairWeight> acc;
  for (const auto& e : pair.support) {
    auto& w = acc[e.point.inner];
    w.u += e.weight.u;
    w.v += e.weight.v;
  }
  LevelPair out;
  for (const auto& [x, w] : acc) out.support.push_back({x, w});
  return out;
}

std::uint64_t StepVerifier::block0(const SampledPair& pair) const {
  // Residue arithmetic mod q agrees with coordinatewise arithmetic on block 0.
  const ConstructionTree& inner = *step().inner;
  std::uint64_t sum = 0;
  for (const auto& e : pair.support) {
    const std::uint64_t x = e.point.inner;
    const std::uint64_t phi = to_residue(inner, phi_eval(inner, to_point(inner, x)));
    const std::uint64_t term = addmod(mulmod(e.weight.total(), phi, inner_q_), mulmod(e.weight.v, x, inner_q_), inner_q_);
    sum = addmod(sum, term, inner_q_);
  }
  return sum;
}

std::uint64_t StepVerifier::step_coordinate(const SampledPair& pair, std::size_t j) const {
  const StepNode& s = step();
  if (j < 1 || j > s.primes.size()) throw DomainError("step coordinate index out of range");
  const std::uint64_t p = s.primes[j - 1];
  const LevelPair listed = pairs_.unrank(j - 1);
  std::uint64_t sum = 0;
  for (const auto& e : pair.support) {
    PairWeight wj;
    for (const auto& le : listed.support) {
      if (le.point == e.point.inner) wj = le.weight;
    }
    const std::uint64_t xj = sampled_coordinate(s, e.point, j);
    const std::uint64_t phi_j = step_phi_coordinate(wj, xj, p);
    const std::uint64_t term = addmod(mulmod(e.weight.total(), phi_j, p), mulmod(e.weight.v, xj, p), p);
    sum = addmod(sum, term, p);
  }
  return sum;
}

DichotomyOutcome StepVerifier::check(const SampledPair& pair) const {
  DichotomyOutcome out;
  const LevelPair sh = shadow(pair);
  out.shadow_level = sh.level();
  const unsigned m = step().level - 1;
  if (out.shadow_level <= m) {
    out.first_branch = true;
    out.holds = inner_sums_.contains(block0(pair));
  } else {
    out.holds = step_coordinate(pair, pairs_.rank(sh) + 1) == 0;
  }
  return out;
}

SampledPair StepVerifier::sample(std::uint64_t seed, std::uint64_t index) const {
  const StepNode& s = step();
  const unsigned k = tree_->k();
  CounterRng rng(seed, index);
  const double u = rng.unit();
  unsigned level = 1;
  while (level < s.level && u >= level_cdf_[level - 1]) ++level;

  std::vector<SampledStepPoint> points;
  while (points.size() < level) {
    SampledStepPoint x{rng.below(inner_q_), rng.next()};
    const bool dup = std::any_of(points.begin(), points.end(),
                                 [&](const SampledStepPoint& y) { return compare_points(s, x, y) == 0; });
    if (!dup) points.push_back(x);
  }
  std::sort(points.begin(), points.end(),
            [&](const SampledStepPoint& a, const SampledStepPoint& b) { return compare_points(s, a, b) < 0; });

  const LevelPairEnumerator weights(inner_q_, k, level);
  const auto w = weights.decode_weights(rng.below(weights.per_support()));
  SampledPair pair;
  for (std::size_t i = 0; i < points.size(); ++i) pair.support.push_back({points[i], w[i]});
  return pair;
}

void step_sample_verify(StepCertificate& cert, std::uint64_t samples, std::uint64_t seed,
                        std::uint64_t materialization_limit) {
  const StepVerifier verifier(cert.tree, materialization_limit);
  std::uint64_t violations = 0;
  std::uint64_t first_branch = 0;
  const auto n = static_cast<std::int64_t>(samples);
#pragma omp parallel for schedule(dynamic, 64) reduction(+ : violations, first_branch)
  for (std::int64_t i = 0; i < n; ++i) {
    const DichotomyOutcome o = verifier.check(verifier.sample(seed, static_cast<std::uint64_t>(i)));
    if (!o.holds) ++violations;
    if (o.first_branch) ++first_branch;
  }
  cert.verified_samples = samples;
  cert.first_branch_samples = first_branch;
  cert.seed = seed;
  cert.violations = violations;
}

// ---------------------------------------------------------------------------
// Feasibility schedule

std::string to_string(StageStatus s) {
  switch (s) {
    case StageStatus::materializable:
      return "materializable";
    case StageStatus::symbolic_verifiable:
      return "symbolic-verifiable";
    case StageStatus::infeasible:
      return "infeasible";
  }
  return "?";
}

namespace {

std::string approx_power_of_two(double bits) {
  std::ostringstream out;
  out << "~2^" << std::llround(bits);
  return out.str();
}

}  // namespace

ConstructionPlan construction_report(unsigned k, const mpq_class& epsilon, const StepOptions& options) {
  if (k < 1) throw PreconditionError("report: k must be >= 1");
  if (epsilon <= 0) throw PreconditionError("report: epsilon must be positive");
  ConstructionPlan plan;
  plan.k = k;
  plan.epsilon = epsilon;

  std::optional<ConstructionTree> stage1;
  mpq_class density;       // verified density of the previous stage, when known
  double log2_q = 0;       // flat modulus of the previous stage
  double log2_pairs = 0;   // its pair count (step stages)
  bool previous_materialized = false;

  for (unsigned m = 1; m <= k; ++m) {
    StagePlan row;
    row.level = m;
    row.budget = mpq_class(m + 1) * epsilon / mpq_class(k + 1);

    if (m == 1) {
      if (row.budget >= 1) {
        row.status = StageStatus::infeasible;
        row.note = "budget >= 1; choose a smaller epsilon";
        plan.stages.push_back(row);
        break;
      }
      stage1 = stage1_build(k, row.budget);
      log2_q = stage1->log2_modulus();
      std::ostringstream primes;
      for (std::uint64_t p : stage1->stage1()->primes) primes << (primes.tellp() > 0 ? "," : "") << p;
      if (stage1->materializable(options.materialization_limit)) {
        row.modulus = std::to_string(*stage1->modulus());
        const CyclicSet s1 = compute_level_sums(*stage1, 1, {}, options.materialization_limit);
        density = mpq_class(mpz_class(std::to_string(s1.size())), mpz_class(row.modulus));
        density.canonicalize();
        row.density = format_rational(density);
        row.status = StageStatus::materializable;
        previous_materialized = true;
      } else {
        row.modulus = stage1->modulus() ? std::to_string(*stage1->modulus()) : approx_power_of_two(log2_q);
        row.status = StageStatus::symbolic_verifiable;
        row.note = "density bounded by sum of 1/p_j < delta; ";
      }
      row.note += "primes " + primes.str();
      plan.stages.push_back(row);
      continue;
    }

    if (m == 2 && previous_materialized) {
      const std::uint64_t q = *stage1->modulus();
      row.modulus = "q * p_1 ... p_t";
      try {
        const LevelPairEnumerator pairs(q, k, 2);
        const std::uint64_t t = pairs.count();
        row.pair_count = std::to_string(t);
        if (density >= row.budget || row.budget >= 1) {
          row.status = StageStatus::infeasible;
          row.note = "budget does not exceed the verified inner density or is >= 1";
        } else {
          const mpq_class threshold = mpq_class(mpz_class(std::to_string(t))) / (row.budget - density);
          const double thr = threshold.get_d();
          const double largest = thr + 1.2 * static_cast<double>(t) * std::log(std::max(thr, 3.0)) + 1e4;
          row.note = "prime threshold " + format_rational(threshold);
          if (t > options.sieve.max_count || largest > static_cast<double>(options.sieve.max_value)) {
            row.status = StageStatus::infeasible;
            row.note += "; sieve budget exceeded";
          } else {
            row.status = StageStatus::symbolic_verifiable;
          }
          log2_pairs = std::log2(static_cast<double>(t));
          log2_q += static_cast<double>(t) * std::log2(std::max(thr, 2.0));
        }
      } catch (const OverflowError&) {
        row.status = StageStatus::infeasible;
        row.pair_count = "> 2^64";
        row.note = "pair count overflows";
        log2_pairs = 64;
        log2_q = INFINITY;
      }
      plan.stages.push_back(row);
      previous_materialized = false;
      continue;
    }

    // Inner modulus is itself a step modulus: tower growth.
    row.status = StageStatus::infeasible;
    row.modulus = std::isfinite(log2_q) ? approx_power_of_two(log2_q) : "tower";
    const double lg_pairs = static_cast<double>(m) * log2_q;
    row.pair_count = std::isfinite(lg_pairs) ? approx_power_of_two(lg_pairs) : "tower";
    row.note = "inner modulus not materializable (previous stage has " +
               (std::isfinite(log2_pairs) ? approx_power_of_two(log2_pairs) : std::string("tower")) +
               " step coordinates)";
    log2_q = std::isfinite(lg_pairs) ? log2_q + std::pow(2.0, std::min(lg_pairs, 1000.0)) : INFINITY;
    log2_pairs = lg_pairs;
    plan.stages.push_back(row);
  }
  return plan;
}

}  // namespace diffsum
