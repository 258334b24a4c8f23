#include "diffsum/oracles.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/level_pairs.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cmath>
#include <limits>
#include <string>

namespace diffsum {

namespace {

using u128 = unsigned __int128;

int popcount(std::uint64_t m) { return std::popcount(m); }
int popcount(u128 m) {
  return std::popcount(static_cast<std::uint64_t>(m)) + std::popcount(static_cast<std::uint64_t>(m >> 64));
}

template <class Mask>
std::uint64_t longest_run(Mask m) {
  std::uint64_t n = 0;
  while (m != 0) {
    m &= m << 1;
    ++n;
  }
  return n;
}

// Z_q with q <= 64, bit i = residue i.
struct CyclicDomain {
  using Mask = std::uint64_t;
  std::uint64_t q;
  Mask full;

  explicit CyclicDomain(std::uint64_t modulus)
      : q(modulus), full(modulus == 64 ? ~Mask{0} : (Mask{1} << modulus) - 1) {}

  Mask bit(std::uint64_t x) const { return Mask{1} << (x % q); }
  // translate by s (mod q)
  Mask shift(Mask m, std::uint64_t s) const {
    s %= q;
    if (s == 0) return m;
    return ((m << s) | (m >> (q - s))) & full;
  }
  Mask neg_bit(std::uint64_t c) const { return bit((q - c % q) % q); }
  Mask minus(Mask a, std::uint64_t c) const { return shift(a, q - c % q); }  // A - c
  Mask plus_neg(Mask neg_a, std::uint64_t c) const { return shift(neg_a, c); }  // c - A
  Mask zero() const { return bit(0); }
};

// Integers in [0, D]; sums live in [0, kD], differences are offset by D.
struct IntegerDomain {
  using Mask = u128;
  std::uint64_t d;

  Mask bit(std::uint64_t x) const { return Mask{1} << x; }
  Mask shift(Mask m, std::uint64_t s) const { return m << s; }
  Mask neg_bit(std::uint64_t c) const { return bit(d - c); }
  Mask minus(Mask a, std::uint64_t c) const { return a << (d - c); }
  Mask plus_neg(Mask neg_a, std::uint64_t c) const { return neg_a << c; }
  Mask zero() const { return bit(d); }
};

enum class Side { differences, sums };
enum class Condition { full, count, run };

struct Problem {
  unsigned k;
  std::uint64_t q;
  Side constrained;  // which set carries the side condition; the other is the objective
  Condition condition;
  std::uint64_t objective_growth;  // guaranteed objective increase per added element
};

template <class Domain>
struct State {
  using Mask = typename Domain::Mask;
  Mask a = 0;
  Mask neg_a = 0;
  Mask diff = 0;
  std::vector<Mask> sums;  // sums[j] = jA
  std::uint64_t size = 0;

  State(const Domain& dom, unsigned k) : sums(k + 1, 0) { sums[0] = dom.bit(0); }

  void add(const Domain& dom, std::uint64_t c) {
    diff |= dom.minus(a, c) | dom.plus_neg(neg_a, c) | dom.zero();
    const std::size_t k = sums.size() - 1;
    for (std::size_t j = k; j >= 1; --j) {
      Mask acc = sums[j];
      for (std::size_t i = 1; i <= j; ++i) acc |= dom.shift(sums[j - i], i * c);
      sums[j] = acc;
    }
    a |= dom.bit(c);
    neg_a |= dom.neg_bit(c);
    ++size;
  }
};

template <class Domain>
class Search {
 public:
  using Mask = typename Domain::Mask;
  using Filter = bool (*)(const Domain&, const State<Domain>&, std::uint64_t c);

  Search(Domain dom, Problem p) : dom_(dom), p_(p) {}

  struct Best {
    std::uint64_t value = std::numeric_limits<std::uint64_t>::max();
    Mask witness = 0;
  };

  // Exhausts all supersets of `root` obtained by adding candidates from
  // [first, last] in increasing order, subject to `filter`.
  // Returns the first minimizer in depth-first order.
  Best run(const State<Domain>& root, std::uint64_t first, std::uint64_t last, Filter filter,
           std::atomic<std::uint64_t>& global) const {
    Best best;
    if (visit_root(root, best, global)) return best;
    const std::int64_t lo = static_cast<std::int64_t>(first);
    const std::int64_t hi = static_cast<std::int64_t>(last);
    if (hi < lo) return best;
    std::vector<Best> branch(static_cast<std::size_t>(hi - lo + 1));
#pragma omp parallel for schedule(dynamic, 1)
    for (std::int64_t c = lo; c <= hi; ++c) {
      const auto cu = static_cast<std::uint64_t>(c);
      if (filter != nullptr && !filter(dom_, root, cu)) continue;
      State<Domain> child = root;
      child.add(dom_, cu);
      Best local;
      visit(child, cu + 1, last, filter, local, global);
      branch[static_cast<std::size_t>(c - lo)] = local;
    }
    for (const Best& b : branch) {
      if (b.value < best.value) best = b;
    }
    return best;
  }

 private:
  Mask constrained(const State<Domain>& s) const {
    return p_.constrained == Side::differences ? s.diff : s.sums[p_.k];
  }
  std::uint64_t objective(const State<Domain>& s) const {
    return static_cast<std::uint64_t>(popcount(p_.constrained == Side::differences ? s.sums[p_.k] : s.diff));
  }
  bool satisfied(const State<Domain>& s) const {
    const Mask m = constrained(s);
    switch (p_.condition) {
      case Condition::full:
      case Condition::count:
        return static_cast<std::uint64_t>(popcount(m)) >= p_.q;
      case Condition::run:
        return longest_run(m) >= p_.q;
    }
    return false;
  }

  // Most new elements a single addition can create on the constrained side.
  std::uint64_t max_growth(std::uint64_t n) const {
    if (p_.constrained == Side::differences) return 2 * n;
    const std::uint64_t b = binomial(n + p_.k - 1, p_.k - 1);
    return b;
  }

  static std::uint64_t bound(const Best& local, const std::atomic<std::uint64_t>& global) {
    return std::min(local.value, global.load(std::memory_order_relaxed));
  }

  void record(const State<Domain>& s, std::uint64_t value, Best& local, std::atomic<std::uint64_t>& global) const {
    if (value >= local.value) return;
    local.value = value;
    local.witness = s.a;
    std::uint64_t cur = global.load(std::memory_order_relaxed);
    while (value < cur && !global.compare_exchange_weak(cur, value, std::memory_order_relaxed)) {
    }
  }

  bool visit_root(const State<Domain>& s, Best& local, std::atomic<std::uint64_t>& global) const {
    if (!satisfied(s)) return false;
    record(s, objective(s), local, global);
    return true;
  }

  void visit(const State<Domain>& s, std::uint64_t next, std::uint64_t last, Filter filter, Best& local,
             std::atomic<std::uint64_t>& global) const {
    const std::uint64_t obj = objective(s);
    if (obj > bound(local, global)) return;
    if (satisfied(s)) {
      record(s, obj, local, global);
      return;  // objectives are monotone: extensions cannot do better
    }
    const std::uint64_t remaining = next <= last ? last - next + 1 : 0;
    // additions still needed to reach q on the constrained side
    std::uint64_t have = static_cast<std::uint64_t>(popcount(constrained(s)));
    std::uint64_t need = 0;
    while (have < p_.q) {
      if (need == remaining) return;
      have += max_growth(s.size + need);
      ++need;
    }
    if (obj + p_.objective_growth * need > bound(local, global)) return;

    // closure prune: not even all remaining candidates together satisfy
    // (the filter is ignored here, which only weakens the prune)
    State<Domain> closure = s;
    for (std::uint64_t c = next; c <= last; ++c) closure.add(dom_, c);
    if (!satisfied(closure)) return;

    for (std::uint64_t c = next; c <= last; ++c) {
      if (filter != nullptr && !filter(dom_, s, c)) continue;
      State<Domain> child = s;
      child.add(dom_, c);
      visit(child, c + 1, last, filter, local, global);
    }
  }

  Domain dom_;
  Problem p_;
};

std::vector<std::int64_t> mask_members(std::uint64_t m) {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; m != 0; ++i, m >>= 1) {
    if (m & 1U) out.push_back(i);
  }
  return out;
}

std::vector<std::int64_t> mask_members(u128 m) {
  std::vector<std::int64_t> out;
  for (std::int64_t i = 0; m != 0; ++i, m >>= 1) {
    if (m & 1U) out.push_back(i);
  }
  return out;
}

void require_k(unsigned k) {
  if (k == 0) throw PreconditionError("k must be positive");
}

OracleResult integer_search(Quantity mode, unsigned k, std::uint64_t q, std::uint64_t diameter,
                            const OracleLimits& limits) {
  require_k(k);
  if (q == 0) throw PreconditionError("q must be positive");
  if (diameter > limits.max_diameter) {
    throw LimitError("diameter " + std::to_string(diameter) + " exceeds oracle limit " +
                     std::to_string(limits.max_diameter));
  }
  if (static_cast<std::uint64_t>(k) * diameter + 1 > 128 || 2 * diameter + 1 > 128) {
    throw LimitError("k*D+1 = " + std::to_string(static_cast<std::uint64_t>(k) * diameter + 1) +
                     " exceeds the 128-bit search word");
  }
  const bool diff_side = mode == Quantity::H || mode == Quantity::G;
  const Condition cond = (mode == Quantity::G || mode == Quantity::g) ? Condition::run : Condition::count;
  const Problem p{k, q, diff_side ? Side::differences : Side::sums, cond, diff_side ? 1U : 2U};

  const IntegerDomain dom{diameter};
  State<IntegerDomain> root(dom, k);
  root.add(dom, 0);
  std::atomic<std::uint64_t> global{std::numeric_limits<std::uint64_t>::max()};
  const auto best = Search<IntegerDomain>(dom, p).run(root, 1, diameter, nullptr, global);
  if (best.value == std::numeric_limits<std::uint64_t>::max()) {
    throw SearchFailure(std::string(quantity_name(mode)) + "_" + std::to_string(k) + "(" + std::to_string(q) +
                        "): no set of diameter <= " + std::to_string(diameter) + " meets the side condition");
  }
  OracleResult r;
  r.quantity = mode;
  r.k = k;
  r.q = q;
  r.value = best.value;
  r.witness = IntegerSet(mask_members(best.witness));
  r.exhaustive = true;
  r.diameter_bound = diameter;
  return r;
}

bool not_adjacent(const CyclicDomain& dom, const State<CyclicDomain>& s, std::uint64_t c) {
  return (s.a & dom.bit(c - 1)) == 0 && (s.a & dom.bit(c + 1)) == 0;
}

}  // namespace

Quantity parse_quantity(std::string_view name) {
  if (name == "F") return Quantity::F;
  if (name == "G") return Quantity::G;
  if (name == "H") return Quantity::H;
  if (name == "f") return Quantity::f;
  if (name == "g") return Quantity::g;
  if (name == "h") return Quantity::h;
  throw DomainError("unknown quantity '" + std::string(name) + "' (expected one of F G H f g h)");
}

std::string_view quantity_name(Quantity q) {
  switch (q) {
    case Quantity::F: return "F";
    case Quantity::G: return "G";
    case Quantity::H: return "H";
    case Quantity::f: return "f";
    case Quantity::g: return "g";
    case Quantity::h: return "h";
  }
  return "?";
}

bool is_cyclic(Quantity q) { return q == Quantity::F || q == Quantity::f; }

OracleResult oracle_F(unsigned k, std::uint64_t q, Quantity mode, const OracleLimits& limits) {
  require_k(k);
  if (mode != Quantity::F && mode != Quantity::f) throw DomainError("oracle_F handles modes F and f");
  if (q == 0) throw PreconditionError("q must be positive");
  if (q > limits.max_q || q > 64) {
    throw LimitError("q = " + std::to_string(q) + " exceeds oracle limit " + std::to_string(std::min<std::uint64_t>(limits.max_q, 64)));
  }
  OracleResult r;
  r.quantity = mode;
  r.k = k;
  r.q = q;
  r.exhaustive = true;
  if (q == 1) {
    r.value = 1;
    r.witness = CyclicSet(1, {0});
    return r;
  }

  const CyclicDomain dom(q);
  const bool diff_side = mode == Quantity::F;
  const std::uint64_t growth = (diff_side && k == 1) ? 1 : 0;
  const Problem p{k, q, diff_side ? Side::differences : Side::sums, Condition::full, growth};
  const Search<CyclicDomain> search(dom, p);
  std::atomic<std::uint64_t> global{std::numeric_limits<std::uint64_t>::max()};

  // Phase 1: some difference equals 1, so translate to {0, 1} subset of A.
  State<CyclicDomain> base(dom, k);
  base.add(dom, 0);
  State<CyclicDomain> pair = base;
  pair.add(dom, 1);
  auto best = search.run(pair, 2, q - 1, nullptr, global);
  // Phase 2 (mode f only): 0 in A and no two cyclically adjacent elements.
  // Mode F needs 1 in A-A, so phase 1 is already exhaustive there.
  if (mode == Quantity::f && q >= 4) {
    const auto other = search.run(base, 2, q - 2, not_adjacent, global);
    if (other.value < best.value) best = other;
  }
  r.value = best.value;
  r.witness = CyclicSet::from_members(q, mask_members(best.witness));
  return r;
}

OracleResult oracle_H(unsigned k, std::uint64_t q, std::uint64_t diameter, Quantity mode,
                      const OracleLimits& limits) {
  if (mode != Quantity::H && mode != Quantity::h) throw DomainError("oracle_H handles modes H and h");
  return integer_search(mode, k, q, diameter, limits);
}

OracleResult oracle_G(unsigned k, std::uint64_t q, std::uint64_t diameter, Quantity mode,
                      const OracleLimits& limits) {
  if (mode != Quantity::G && mode != Quantity::g) throw DomainError("oracle_G handles modes G and g");
  return integer_search(mode, k, q, diameter, limits);
}

OracleResult run_oracle(Quantity quantity, unsigned k, std::uint64_t q, std::uint64_t diameter,
                        const OracleLimits& limits) {
  switch (quantity) {
    case Quantity::F:
    case Quantity::f:
      return oracle_F(k, q, quantity, limits);
    case Quantity::H:
    case Quantity::h:
      return oracle_H(k, q, diameter, quantity, limits);
    case Quantity::G:
    case Quantity::g:
      return oracle_G(k, q, diameter, quantity, limits);
  }
  throw DomainError("unknown quantity");
}

bool witness_valid(const OracleResult& r) {
  if (is_cyclic(r.quantity)) {
    const auto* a = std::get_if<CyclicSet>(&r.witness);
    if (a == nullptr || a->modulus() != r.q || a->empty()) return false;
    const CyclicSet d = difference_set(*a);
    const CyclicSet s = kfold_sum(*a, r.k);
    if (r.quantity == Quantity::F) return d.is_full() && s.size() == r.value;
    return s.is_full() && d.size() == r.value;
  }
  const auto* a = std::get_if<IntegerSet>(&r.witness);
  if (a == nullptr || a->empty()) return false;
  if (r.diameter_bound && (a->min() != 0 || static_cast<std::uint64_t>(a->max()) > *r.diameter_bound)) return false;
  const IntegerSet d = difference_set(*a);
  const IntegerSet s = kfold_sum(*a, r.k);
  switch (r.quantity) {
    case Quantity::H: return d.size() >= r.q && s.size() == r.value;
    case Quantity::h: return s.size() >= r.q && d.size() == r.value;
    case Quantity::G: return longest_consecutive_run(d).run_length >= r.q && s.size() == r.value;
    case Quantity::g: return longest_consecutive_run(s).run_length >= r.q && d.size() == r.value;
    default: return false;
  }
}

IntegerSet greedy_bk_set(unsigned k, std::size_t n) {
  require_k(k);
  if (n == 0) throw PreconditionError("greedy_bk_set: n must be positive");
  std::vector<std::int64_t> members{0};
  while (members.size() < n) {
    const std::uint64_t target = binomial(members.size() + k, k);  // C((n+1)+k-1, k)
    for (std::int64_t c = members.back() + 1;; ++c) {
      if (c == std::numeric_limits<std::int64_t>::max()) throw OverflowError("greedy_bk_set: word overflow");
      std::vector<std::int64_t> trial = members;
      trial.push_back(c);
      if (kfold_sum(IntegerSet(trial), k).size() == target) {
        members = std::move(trial);
        break;
      }
    }
  }
  return IntegerSet(std::move(members));
}

ExponentReport exponent_table(Quantity quantity, unsigned k, std::uint64_t q_lo, std::uint64_t q_hi,
                              std::uint64_t diameter, const OracleLimits& limits) {
  if (q_lo < 2 || q_hi < q_lo) throw PreconditionError("exponent_table: need 2 <= q_lo <= q_hi");
  ExponentReport rep;
  rep.quantity = quantity;
  rep.k = k;
  if (!is_cyclic(quantity)) rep.diameter_bound = diameter;
  double inf = std::numeric_limits<double>::infinity();
  for (std::uint64_t q = q_lo; q <= q_hi; ++q) {
    const OracleResult r = run_oracle(quantity, k, q, diameter, limits);
    ExponentRow row;
    row.q = q;
    row.value = r.value;
    row.log_ratio = std::log(static_cast<double>(r.value)) / std::log(static_cast<double>(q));
    inf = std::min(inf, row.log_ratio);
    row.running_inf = inf;
    rep.rows.push_back(row);
  }
  return rep;
}

}  // namespace diffsum
