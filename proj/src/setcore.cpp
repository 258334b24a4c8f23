#include "diffsum/setcore.hpp"

#include "diffsum/errors.hpp"
#include "diffsum/modular.hpp"

#include <algorithm>
#include <limits>
#include <string>

namespace diffsum {

namespace {

// Integer sumsets whose span fits in this many bits go through the bitset
// kernel; wider ones fall back to sorting pairwise sums.
constexpr std::uint64_t kLinearBitsetLimit = std::uint64_t{1} << 27;

std::int64_t checked_add(std::int64_t a, std::int64_t b, const char* op) {
  std::int64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) throw OverflowError(std::string(op) + ": integer overflow");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b, const char* op) {
  std::int64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) throw OverflowError(std::string(op) + ": integer overflow");
  return out;
}

void require_nonempty(bool empty, const char* op) {
  if (empty) throw EmptySetError(op);
}

void require_same_modulus(const CyclicSet& a, const CyclicSet& b) {
  if (a.modulus() != b.modulus()) {
    throw PreconditionError("cyclic sets with different moduli " + std::to_string(a.modulus()) + " and " +
                            std::to_string(b.modulus()));
  }
}

}  // namespace

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b) {
  while (b != 0) {
    const std::uint64_t t = a % b;
    a = b;
    b = t;
  }
  return a;
}

std::uint64_t mod_floor(std::int64_t x, std::uint64_t q) {
  if (x >= 0) return static_cast<std::uint64_t>(x) % q;
  // -(x) may not fit in int64; go through unsigned negation.
  const std::uint64_t r = (~static_cast<std::uint64_t>(x) + 1) % q;
  return r == 0 ? 0 : q - r;
}

// ---------------------------------------------------------------------------
// CyclicSet

CyclicSet::CyclicSet(std::uint64_t modulus) : q_(modulus) {
  if (modulus < 1) throw PreconditionError("cyclic modulus must be positive");
  words_.assign(kernels::words_for(modulus), 0);
}

CyclicSet::CyclicSet(std::uint64_t modulus, std::initializer_list<std::int64_t> members) : CyclicSet(modulus) {
  for (std::int64_t m : members) insert(mod_floor(m, modulus));
}

CyclicSet CyclicSet::from_members(std::uint64_t modulus, std::span<const std::int64_t> members) {
  CyclicSet s(modulus);
  for (std::int64_t m : members) s.insert(mod_floor(m, modulus));
  return s;
}

CyclicSet CyclicSet::from_residues(std::uint64_t modulus, std::span<const std::uint64_t> residues) {
  CyclicSet s(modulus);
  for (std::uint64_t r : residues) s.insert(r % modulus);
  return s;
}

CyclicSet CyclicSet::full(std::uint64_t modulus) {
  CyclicSet s(modulus);
  std::fill(s.words_.begin(), s.words_.end(), ~kernels::Word{0});
  if (const unsigned r = modulus & 63; r != 0) s.words_.back() = (kernels::Word{1} << r) - 1;
  return s;
}

bool CyclicSet::empty() const {
  return std::all_of(words_.begin(), words_.end(), [](kernels::Word w) { return w == 0; });
}

void CyclicSet::insert(std::uint64_t residue) {
  if (residue >= q_) throw DomainError("residue " + std::to_string(residue) + " outside Z_" + std::to_string(q_));
  kernels::set_bit(words_, residue);
}

void CyclicSet::insert_all(const CyclicSet& other) {
  require_same_modulus(*this, other);
  for (std::size_t i = 0; i < words_.size(); ++i) words_[i] |= other.words_[i];
}

// ---------------------------------------------------------------------------
// IntegerSet

IntegerSet::IntegerSet(std::initializer_list<std::int64_t> members)
    : IntegerSet(std::vector<std::int64_t>(members)) {}

IntegerSet::IntegerSet(std::vector<std::int64_t> members) : members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  members_.erase(std::unique(members_.begin(), members_.end()), members_.end());
}

std::int64_t IntegerSet::min() const {
  require_nonempty(empty(), "IntegerSet::min");
  return members_.front();
}

std::int64_t IntegerSet::max() const {
  require_nonempty(empty(), "IntegerSet::max");
  return members_.back();
}

std::int64_t IntegerSet::diameter() const { return checked_add(max(), -min(), "diameter"); }

bool IntegerSet::contains(std::int64_t x) const { return std::binary_search(members_.begin(), members_.end(), x); }

// ---------------------------------------------------------------------------
// Sumsets

CyclicSet sumset(const CyclicSet& a, const CyclicSet& b) {
  require_same_modulus(a, b);
  require_nonempty(a.empty() || b.empty(), "sumset");
  const bool a_smaller = a.size() <= b.size();
  const CyclicSet& big = a_smaller ? b : a;
  const std::vector<std::uint64_t> shifts = (a_smaller ? a : b).members();
  CyclicSet out(a.modulus());
  kernels::cyclic_sumset(big.words(), a.modulus(), shifts, out.words());
  return out;
}

IntegerSet sumset(const IntegerSet& a, const IntegerSet& b) {
  require_nonempty(a.empty() || b.empty(), "sumset");
  const std::int64_t lo = checked_add(a.min(), b.min(), "sumset");
  checked_add(a.max(), b.max(), "sumset");
  const auto span_a = static_cast<std::uint64_t>(a.max()) - static_cast<std::uint64_t>(a.min());
  const auto span_b = static_cast<std::uint64_t>(b.max()) - static_cast<std::uint64_t>(b.min());
  const std::uint64_t out_bits = span_a + span_b + 1;

  if (span_a < kLinearBitsetLimit && span_b < kLinearBitsetLimit) {
    const bool a_smaller = a.size() <= b.size();
    const IntegerSet& big = a_smaller ? b : a;
    const IntegerSet& small = a_smaller ? a : b;
    const std::uint64_t big_bits = (a_smaller ? span_b : span_a) + 1;
    std::vector<kernels::Word> big_words(kernels::words_for(big_bits), 0);
    for (std::int64_t x : big.members()) {
      kernels::set_bit(big_words, static_cast<std::uint64_t>(x) - static_cast<std::uint64_t>(big.min()));
    }
    std::vector<std::uint64_t> shifts;
    shifts.reserve(small.size());
    for (std::int64_t x : small.members()) {
      shifts.push_back(static_cast<std::uint64_t>(x) - static_cast<std::uint64_t>(small.min()));
    }
    std::vector<kernels::Word> out(kernels::words_for(out_bits), 0);
    kernels::linear_sumset(big_words, big_bits, shifts, out, out_bits);
    std::vector<std::int64_t> members;
    for (std::uint64_t off : kernels::set_bits(out)) members.push_back(lo + static_cast<std::int64_t>(off));
    return IntegerSet(std::move(members));
  }

  std::vector<std::int64_t> sums;
  sums.reserve(a.size() * b.size());
  for (std::int64_t x : a.members()) {
    for (std::int64_t y : b.members()) sums.push_back(x + y);  // bounded by lo/hi checks above
  }
  return IntegerSet(std::move(sums));
}

CyclicSet kfold_sum(const CyclicSet& a, unsigned k) {
  if (k < 1) throw PreconditionError("kfold_sum: k must be >= 1");
  require_nonempty(a.empty(), "kfold_sum");
  CyclicSet acc = a;
  for (unsigned j = 1; j < k; ++j) {
    if (acc.is_full()) break;
    acc = sumset(acc, a);
  }
  return acc;
}

IntegerSet kfold_sum(const IntegerSet& a, unsigned k) {
  if (k < 1) throw PreconditionError("kfold_sum: k must be >= 1");
  require_nonempty(a.empty(), "kfold_sum");
  checked_mul(a.min(), static_cast<std::int64_t>(k), "kfold_sum");
  checked_mul(a.max(), static_cast<std::int64_t>(k), "kfold_sum");
  IntegerSet acc = a;
  for (unsigned j = 1; j < k; ++j) acc = sumset(acc, a);
  return acc;
}

CyclicSet negate(const CyclicSet& a) {
  CyclicSet out(a.modulus());
  for (std::uint64_t r : a.members()) out.insert(negmod(r, a.modulus()));
  return out;
}

IntegerSet negate(const IntegerSet& a) {
  std::vector<std::int64_t> out;
  out.reserve(a.size());
  for (std::int64_t x : a.members()) out.push_back(checked_mul(x, -1, "negate"));
  return IntegerSet(std::move(out));
}

CyclicSet difference_set(const CyclicSet& a) {
  require_nonempty(a.empty(), "difference_set");
  return sumset(a, negate(a));
}

IntegerSet difference_set(const IntegerSet& a) {
  require_nonempty(a.empty(), "difference_set");
  return sumset(a, negate(a));
}

CyclicSet dilate(const CyclicSet& a, std::int64_t m) {
  const std::uint64_t q = a.modulus();
  const std::uint64_t mm = mod_floor(m, q);
  CyclicSet out(q);
  for (std::uint64_t r : a.members()) out.insert(mulmod(r, mm, q));
  return out;
}

IntegerSet dilate(const IntegerSet& a, std::int64_t m) {
  std::vector<std::int64_t> out;
  out.reserve(a.size());
  for (std::int64_t x : a.members()) out.push_back(checked_mul(x, m, "dilate"));
  return IntegerSet(std::move(out));
}

CyclicSet translate(const CyclicSet& a, std::int64_t shift) {
  const std::uint64_t q = a.modulus();
  const std::uint64_t s = mod_floor(shift, q);
  CyclicSet out(q);
  for (std::uint64_t r : a.members()) out.insert(addmod(r, s, q));
  return out;
}

IntegerSet translate(const IntegerSet& a, std::int64_t shift) {
  std::vector<std::int64_t> out;
  out.reserve(a.size());
  for (std::int64_t x : a.members()) out.push_back(checked_add(x, shift, "translate"));
  return IntegerSet(std::move(out));
}

CyclicSet crt_compose(const CyclicSet& a1, const CyclicSet& a2) {
  const std::uint64_t q1 = a1.modulus();
  const std::uint64_t q2 = a2.modulus();
  if (gcd_u64(q1, q2) != 1) {
    throw PreconditionError("crt_compose: moduli " + std::to_string(q1) + " and " + std::to_string(q2) +
                            " are not coprime");
  }
  std::uint64_t q = 0;
  if (__builtin_mul_overflow(q1, q2, &q)) throw OverflowError("crt_compose: modulus overflow");
  const std::uint64_t inv = *mod_inverse(q1 % q2, q2);
  CyclicSet out(q);
  const auto r2s = a2.members();
  for (std::uint64_t r1 : a1.members()) {
    for (std::uint64_t r2 : r2s) {
      // r = r1 + q1 * ((r2 - r1) * q1^{-1} mod q2)
      const std::uint64_t diff = addmod(r2, negmod(r1 % q2, q2), q2);
      out.insert(r1 + q1 * mulmod(diff, inv, q2));
    }
  }
  return out;
}

RunReport longest_consecutive_run(const IntegerSet& d) {
  RunReport best;
  const auto& m = d.members();
  std::size_t i = 0;
  while (i < m.size()) {
    std::size_t j = i;
    while (j + 1 < m.size() && m[j + 1] == m[j] + 1) ++j;
    const std::uint64_t len = j - i + 1;
    if (len > best.run_length) best = {len, m[i]};
    i = j + 1;
  }
  return best;
}

CyclicSet reduce_mod(const IntegerSet& a, std::uint64_t q) {
  if (q < 2) throw PreconditionError("reduce_mod: q must be >= 2");
  return CyclicSet::from_members(q, a.members());
}

}  // namespace diffsum
