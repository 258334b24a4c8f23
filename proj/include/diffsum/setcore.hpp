#pragma once

// Exact finite set arithmetic over Z and Z_q.

#include "diffsum/kernels.hpp"

#include <compare>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <vector>

namespace diffsum {

// A subset of Z_q stored as a q-bit vector.
class CyclicSet {
 public:
  explicit CyclicSet(std::uint64_t modulus);
  CyclicSet(std::uint64_t modulus, std::initializer_list<std::int64_t> members);

  // Members are reduced mod q (negative values allowed).
  static CyclicSet from_members(std::uint64_t modulus, std::span<const std::int64_t> members);
  static CyclicSet from_residues(std::uint64_t modulus, std::span<const std::uint64_t> residues);
  static CyclicSet full(std::uint64_t modulus);

  std::uint64_t modulus() const { return q_; }
  std::uint64_t size() const { return kernels::popcount(words_); }
  bool empty() const;
  bool is_full() const { return size() == q_; }
  bool contains(std::uint64_t residue) const { return residue < q_ && kernels::test_bit(words_, residue); }
  void insert(std::uint64_t residue);
  void insert_all(const CyclicSet& other);

  std::vector<std::uint64_t> members() const { return kernels::set_bits(words_); }
  std::span<const kernels::Word> words() const { return words_; }
  std::span<kernels::Word> words() { return words_; }

  friend bool operator==(const CyclicSet&, const CyclicSet&) = default;

 private:
  std::uint64_t q_;
  std::vector<kernels::Word> words_;
};

// A finite sorted, duplicate-free set of integers.
class IntegerSet {
 public:
  IntegerSet() = default;
  IntegerSet(std::initializer_list<std::int64_t> members);
  explicit IntegerSet(std::vector<std::int64_t> members);  // sorts and dedups

  std::size_t size() const { return members_.size(); }
  bool empty() const { return members_.empty(); }
  std::int64_t min() const;
  std::int64_t max() const;
  std::int64_t diameter() const;
  bool contains(std::int64_t x) const;
  const std::vector<std::int64_t>& members() const { return members_; }

  friend bool operator==(const IntegerSet&, const IntegerSet&) = default;

 private:
  std::vector<std::int64_t> members_;
};

// Longest window of consecutive integers inside a set; leftmost on ties.
struct RunReport {
  std::uint64_t run_length = 0;
  std::int64_t run_start = 0;
  friend bool operator==(const RunReport&, const RunReport&) = default;
};

// A + B. Cyclic operands must share the modulus.
CyclicSet sumset(const CyclicSet& a, const CyclicSet& b);
IntegerSet sumset(const IntegerSet& a, const IntegerSet& b);

// kA = A + ... + A (k times), by iterated pairwise sumsets.
CyclicSet kfold_sum(const CyclicSet& a, unsigned k);
IntegerSet kfold_sum(const IntegerSet& a, unsigned k);

CyclicSet negate(const CyclicSet& a);
IntegerSet negate(const IntegerSet& a);

CyclicSet difference_set(const CyclicSet& a);
IntegerSet difference_set(const IntegerSet& a);

// {m*a : a in A}.
CyclicSet dilate(const CyclicSet& a, std::int64_t m);
IntegerSet dilate(const IntegerSet& a, std::int64_t m);

// {a + shift : a in A}.
CyclicSet translate(const CyclicSet& a, std::int64_t shift);
IntegerSet translate(const IntegerSet& a, std::int64_t shift);

// Image of A1 x A2 under Z_q1 x Z_q2 -> Z_{q1 q2}. Requires gcd(q1, q2) = 1.
CyclicSet crt_compose(const CyclicSet& a1, const CyclicSet& a2);

RunReport longest_consecutive_run(const IntegerSet& d);

// {a mod q}, representatives in [0, q).
CyclicSet reduce_mod(const IntegerSet& a, std::uint64_t q);

std::uint64_t gcd_u64(std::uint64_t a, std::uint64_t b);

// Residue of x mod q in [0, q).
std::uint64_t mod_floor(std::int64_t x, std::uint64_t q);

}  // namespace diffsum
