// Parallel shift-OR kernels against the serial reference.
#include "diffsum/kernels.hpp"
#include "diffsum/rng.hpp"

#include <benchmark/benchmark.h>

#include <omp.h>

using namespace diffsum;
namespace k = diffsum::kernels;

namespace {

struct Input {
  std::vector<k::Word> a;
  std::vector<std::uint64_t> shifts;
};

// Density-1/8 set on q bits and `n_shifts` random shifts below q.
Input make_input(std::uint64_t q, std::uint64_t n_shifts) {
  CounterRng rng(2024, q);
  Input in;
  in.a.assign(k::words_for(q), 0);
  for (std::uint64_t i = 0; i < q; ++i) {
    if (rng.below(8) == 0) k::set_bit(in.a, i);
  }
  for (std::uint64_t i = 0; i < n_shifts; ++i) in.shifts.push_back(rng.below(q));
  return in;
}

template <bool Parallel>
void cyclic(benchmark::State& state) {
  const auto q = static_cast<std::uint64_t>(state.range(0));
  const auto s = static_cast<std::uint64_t>(state.range(1));
  const Input in = make_input(q, s);
  std::vector<k::Word> out(k::words_for(q));
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::cyclic_sumset(in.a, q, in.shifts, out);
    } else {
      k::reference::cyclic_sumset(in.a, q, in.shifts, out);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.counters["threads"] = Parallel ? omp_get_max_threads() : 1;
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s));
}

template <bool Parallel>
void linear(benchmark::State& state) {
  const auto bits = static_cast<std::uint64_t>(state.range(0));
  const auto s = static_cast<std::uint64_t>(state.range(1));
  const Input in = make_input(bits, s);
  const std::uint64_t out_bits = 2 * bits;
  std::vector<k::Word> out(k::words_for(out_bits));
  for (auto _ : state) {
    if constexpr (Parallel) {
      k::linear_sumset(in.a, bits, in.shifts, out, out_bits);
    } else {
      k::reference::linear_sumset(in.a, bits, in.shifts, out, out_bits);
    }
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(static_cast<std::int64_t>(state.iterations() * s));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (std::int64_t q : {1001, 46189, 1 << 20}) {
    for (std::int64_t s : {16, 256}) b->Args({q, s});
  }
}

}  // namespace

BENCHMARK(cyclic<true>)->Name("cyclic_sumset/parallel")->Apply(sizes)->UseRealTime();
BENCHMARK(cyclic<false>)->Name("cyclic_sumset/reference")->Apply(sizes)->UseRealTime();
BENCHMARK(linear<true>)->Name("linear_sumset/parallel")->Apply(sizes)->UseRealTime();
BENCHMARK(linear<false>)->Name("linear_sumset/reference")->Apply(sizes)->UseRealTime();

BENCHMARK_MAIN();
