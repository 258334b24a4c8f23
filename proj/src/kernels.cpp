#include "diffsum/kernels.hpp"

#include <algorithm>
#include <bit>

namespace diffsum::kernels {

namespace {

// Below this many word-shift products the OpenMP fork costs more than it saves.
constexpr std::uint64_t kParallelWork = 1U << 15;

// 64 bits of `words` starting at bit `pos`; `words` must have one word of
// slack past the last position read.
inline Word window(const Word* words, std::uint64_t pos) {
  const std::uint64_t w = pos >> 6;
  const unsigned r = static_cast<unsigned>(pos & 63);
  if (r == 0) return words[w];
  return (words[w] >> r) | (words[w + 1] << (64 - r));
}

// Same, with zeros outside [0, nbits).
inline Word window_zero_padded(std::span<const Word> words, std::int64_t pos) {
  const auto nwords = static_cast<std::int64_t>(words.size());
  auto word_at = [&](std::int64_t i) -> Word { return (i >= 0 && i < nwords) ? words[static_cast<std::size_t>(i)] : 0; };
  const std::int64_t w = pos >= 0 ? pos / 64 : -((-pos + 63) / 64);
  const auto r = static_cast<unsigned>(pos - w * 64);
  if (r == 0) return word_at(w);
  return (word_at(w) >> r) | (word_at(w + 1) << (64 - r));
}

inline void mask_tail(std::span<Word> out, std::uint64_t bits) {
  if (out.empty()) return;
  const unsigned r = static_cast<unsigned>(bits & 63);
  if (r != 0) out.back() &= (Word{1} << r) - 1;
}

}  // namespace

std::uint64_t popcount(std::span<const Word> words) {
  std::uint64_t n = 0;
  for (Word w : words) n += static_cast<std::uint64_t>(std::popcount(w));
  return n;
}

std::vector<std::uint64_t> set_bits(std::span<const Word> words) {
  std::vector<std::uint64_t> out;
  out.reserve(popcount(words));
  for (std::size_t i = 0; i < words.size(); ++i) {
    Word w = words[i];
    while (w != 0) {
      out.push_back(i * 64 + static_cast<std::uint64_t>(std::countr_zero(w)));
      w &= w - 1;
    }
  }
  return out;
}

void cyclic_sumset(std::span<const Word> a, std::uint64_t q, std::span<const std::uint64_t> shifts,
                   std::span<Word> out) {
  const std::size_t nwords = words_for(q);
  // Periodic extension: ext bit i = A bit (i mod q) for i < q + 64, plus a
  // slack word so window() never reads past the end.
  std::vector<Word> ext(words_for(q + 64) + 1, 0);
  std::copy(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(nwords), ext.begin());
  mask_tail(std::span<Word>(ext.data(), nwords), q);
  for (std::uint64_t i = q; i < q + 64; ++i) {
    if (test_bit(a, i % q)) set_bit(ext, i);
  }

  const auto n = static_cast<std::int64_t>(nwords);
  const bool parallel = static_cast<std::uint64_t>(nwords) * shifts.size() >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t w = 0; w < n; ++w) {
    const std::uint64_t base = static_cast<std::uint64_t>(w) * 64 % q;
    Word acc = 0;
    for (std::uint64_t s : shifts) {
      // Output bit 64w + r comes from input bit (64w + r - s) mod q.
      const std::uint64_t start = base >= s ? base - s : base + q - s;
      acc |= window(ext.data(), start);
    }
    out[static_cast<std::size_t>(w)] = acc;
  }
  mask_tail(out.first(nwords), q);
}

void linear_sumset(std::span<const Word> a, std::uint64_t a_bits, std::span<const std::uint64_t> shifts,
                   std::span<Word> out, std::uint64_t out_bits) {
  const std::size_t in_words = words_for(a_bits);
  std::vector<Word> src(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(in_words));
  mask_tail(src, a_bits);

  const auto n = static_cast<std::int64_t>(words_for(out_bits));
  const bool parallel = static_cast<std::uint64_t>(n) * shifts.size() >= kParallelWork;
#pragma omp parallel for schedule(static) if (parallel)
  for (std::int64_t w = 0; w < n; ++w) {
    Word acc = 0;
    for (std::uint64_t s : shifts) {
      acc |= window_zero_padded(src, w * 64 - static_cast<std::int64_t>(s));
    }
    out[static_cast<std::size_t>(w)] = acc;
  }
  mask_tail(out.first(static_cast<std::size_t>(n)), out_bits);
}

namespace reference {

void cyclic_sumset(std::span<const Word> a, std::uint64_t q, std::span<const std::uint64_t> shifts,
                   std::span<Word> out) {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(words_for(q)), Word{0});
  for (std::uint64_t i = 0; i < q; ++i) {
    if (!test_bit(a, i)) continue;
    for (std::uint64_t s : shifts) set_bit(out, (i + s) % q);
  }
}

void linear_sumset(std::span<const Word> a, std::uint64_t a_bits, std::span<const std::uint64_t> shifts,
                   std::span<Word> out, std::uint64_t out_bits) {
  std::fill(out.begin(), out.begin() + static_cast<std::ptrdiff_t>(words_for(out_bits)), Word{0});
  for (std::uint64_t i = 0; i < a_bits; ++i) {
    if (!test_bit(a, i)) continue;
    for (std::uint64_t s : shifts) {
      if (i + s < out_bits) set_bit(out, i + s);
    }
  }
}

}  // namespace reference

}  // namespace diffsum::kernels
