// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/protocol.hpp>
#include <randlock/statetrace.hpp>

#include <benchmark/benchmark.h>

using namespace randlock;
using namespace randlock::protocol;

namespace {

// Fresh seeds per session keep signature caching honest.
SessionConfig config(Flow flow, std::size_t n, std::uint64_t i)
{
    SessionConfig c;
    c.flow = flow;
    c.n = n;
    c.alice_seed = "bench/" + std::to_string(i) + "/alice";
    c.bob_seed = "bench/" + std::to_string(i) + "/bob";
    return c;
}

void BM_Session(benchmark::State& state, Flow flow)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    RunOptions opts;
    opts.record = false;
    std::uint64_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(run_session(config(flow, n, i++), {}, opts).report);
}
BENCHMARK_CAPTURE(BM_Session, thimbles, Flow::Thimbles)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Session, oprand, Flow::OpRand)->Arg(2)->Arg(8)->Arg(32)->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_Session, covenant, Flow::Covenant)->Arg(2)->Unit(benchmark::kMillisecond);

void BM_Replay(benchmark::State& state)
{
    std::vector<Transcript> corpus;
    for (std::uint64_t i = 0; i < 16; ++i) corpus.push_back(run_session(config(Flow::Thimbles, 2, 1000 + i)).transcript);
    std::size_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(replay(corpus[k++ % corpus.size()]));
}
BENCHMARK(BM_Replay)->Unit(benchmark::kMicrosecond);

void BM_TraceBuild(benchmark::State& state)
{
    const auto depth = static_cast<std::size_t>(state.range(0));
    const auto alice = crypto::keygen("bench/trace");
    const auto fns = trace::default_transitions();
    std::uint64_t k = 0;
    for (auto _ : state) {
        const auto s = crypto::hash_p(as_bytes("bench/state/" + std::to_string(k++)));
        benchmark::DoNotOptimize(trace::build_tree(alice.pk, s, fns, depth));
    }
}
BENCHMARK(BM_TraceBuild)->DenseRange(2, 8, 2)->Unit(benchmark::kMillisecond);

} // namespace
