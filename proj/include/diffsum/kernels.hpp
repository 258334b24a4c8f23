#pragma once

// Bit-vector sumset kernels. A set is a little-endian array of 64-bit words;
// bit i of word i/64 marks element i.
//
// The parallel kernels compute each output word independently as the OR of
// 64-bit windows of the input taken at every shift, so OpenMP splits the
// output range with no synchronization. The `reference` namespace keeps the
// naive element-by-element versions used as test oracles and benchmark
// baselines.

#include <cstdint>
#include <span>
#include <vector>

namespace diffsum::kernels {

using Word = std::uint64_t;

constexpr std::size_t words_for(std::uint64_t bits) { return static_cast<std::size_t>((bits + 63) / 64); }

inline bool test_bit(std::span<const Word> words, std::uint64_t i) { return (words[i >> 6] >> (i & 63)) & 1U; }
inline void set_bit(std::span<Word> words, std::uint64_t i) { words[i >> 6] |= Word{1} << (i & 63); }

std::uint64_t popcount(std::span<const Word> words);

// Positions of set bits, ascending.
std::vector<std::uint64_t> set_bits(std::span<const Word> words);

// out = {(a + s) mod q : a in A, s in shifts}. `a` holds q bits; `out` must
// have words_for(q) words and is overwritten. Shifts must lie in [0, q).
void cyclic_sumset(std::span<const Word> a, std::uint64_t q, std::span<const std::uint64_t> shifts,
                   std::span<Word> out);

// out = {a + s : a in A, s in shifts} over the naturals; bits at or past
// out_bits are dropped. `out` must have words_for(out_bits) words.
void linear_sumset(std::span<const Word> a, std::uint64_t a_bits, std::span<const std::uint64_t> shifts,
                   std::span<Word> out, std::uint64_t out_bits);

namespace reference {

void cyclic_sumset(std::span<const Word> a, std::uint64_t q, std::span<const std::uint64_t> shifts,
                   std::span<Word> out);

void linear_sumset(std::span<const Word> a, std::uint64_t a_bits, std::span<const std::uint64_t> shifts,
                   std::span<Word> out, std::uint64_t out_bits);

}  // namespace reference

}  // namespace diffsum::kernels
