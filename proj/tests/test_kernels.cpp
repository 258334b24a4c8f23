#include "doctest.h"

#include "diffsum/kernels.hpp"
#include "diffsum/rng.hpp"

#include <vector>

using namespace diffsum;
using kernels::Word;

namespace {

std::vector<Word> random_bits(CounterRng& rng, std::uint64_t nbits, std::uint64_t density_per_mille) {
  std::vector<Word> w(kernels::words_for(nbits), 0);
  for (std::uint64_t i = 0; i < nbits; ++i) {
    if (rng.below(1000) < density_per_mille) kernels::set_bit(w, i);
  }
  return w;
}

}  // namespace

TEST_CASE("cyclic shift-or kernel matches the pairwise reference") {
  CounterRng rng(2024, 0);
  for (std::uint64_t q : {2ULL, 3ULL, 7ULL, 31ULL, 63ULL, 64ULL, 65ULL, 127ULL, 128ULL, 1001ULL, 4099ULL}) {
    for (int trial = 0; trial < 6; ++trial) {
      const auto a = random_bits(rng, q, 1 + rng.below(400));
      std::vector<std::uint64_t> shifts;
      for (std::uint64_t s = 0; s < q; ++s) {
        if (rng.below(100) < 10) shifts.push_back(s);
      }
      if (shifts.empty()) shifts.push_back(rng.below(q));
      std::vector<Word> fast(kernels::words_for(q)), slow(kernels::words_for(q));
      kernels::cyclic_sumset(a, q, shifts, fast);
      kernels::reference::cyclic_sumset(a, q, shifts, slow);
      CHECK(fast == slow);
    }
  }
}

TEST_CASE("linear shift-or kernel matches the pairwise reference") {
  CounterRng rng(7, 1);
  for (std::uint64_t bits : {1ULL, 5ULL, 64ULL, 65ULL, 300ULL, 2048ULL}) {
    const auto a = random_bits(rng, bits, 300);
    std::vector<std::uint64_t> shifts{0, 1, 63, 64, 65, 200};
    const std::uint64_t out_bits = bits + 200;
    std::vector<Word> fast(kernels::words_for(out_bits)), slow(kernels::words_for(out_bits));
    kernels::linear_sumset(a, bits, shifts, fast, out_bits);
    kernels::reference::linear_sumset(a, bits, shifts, slow, out_bits);
    CHECK(fast == slow);
  }
}

TEST_CASE("large cyclic sumset takes the parallel path and stays exact") {
  CounterRng rng(99, 3);
  const std::uint64_t q = 200003;
  const auto a = random_bits(rng, q, 2);
  std::vector<std::uint64_t> shifts;
  for (int i = 0; i < 300; ++i) shifts.push_back(rng.below(q));
  std::vector<Word> fast(kernels::words_for(q)), slow(kernels::words_for(q));
  kernels::cyclic_sumset(a, q, shifts, fast);
  kernels::reference::cyclic_sumset(a, q, shifts, slow);
  CHECK(fast == slow);
}
