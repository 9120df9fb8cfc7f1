// Copyright (c) 2026 The randlock developers
// Distributed under the MIT software license, see the accompanying
// file COPYING or http://www.opensource.org/licenses/mit-license.php.

#include <randlock/commitments.hpp>
#include <randlock/hash.hpp>
#include <randlock/keys.hpp>

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

using namespace randlock;
using namespace randlock::crypto;

namespace {

std::vector<Scalar> scalars(std::size_t count)
{
    std::vector<Scalar> out;
    for (std::size_t i = 0; i < count; ++i) out.push_back(hash_p(as_bytes("bench/" + std::to_string(i))));
    return out;
}

void BM_BaseMul(benchmark::State& state)
{
    auto ks = scalars(64);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(GroupPoint::base_mul(ks[i++ % ks.size()]));
}
BENCHMARK(BM_BaseMul);

void BM_VarMul(benchmark::State& state)
{
    auto ks = scalars(64);
    const auto P = GroupPoint::base_mul(ks[0]);
    std::size_t i = 0;
    for (auto _ : state) benchmark::DoNotOptimize(ks[i++ % ks.size()] * P);
}
BENCHMARK(BM_VarMul);

void BM_PointAdd(benchmark::State& state)
{
    auto ks = scalars(2);
    auto P = GroupPoint::base_mul(ks[0]);
    const auto Q = GroupPoint::base_mul(ks[1]);
    for (auto _ : state) {
        P = P + Q;
        benchmark::DoNotOptimize(P);
    }
}
BENCHMARK(BM_PointAdd);

void BM_Decompress(benchmark::State& state)
{
    const auto c = GroupPoint::base_mul(scalars(1)[0]).compress();
    for (auto _ : state) benchmark::DoNotOptimize(GroupPoint::from_compressed(c));
}
BENCHMARK(BM_Decompress);

void BM_HashP(benchmark::State& state)
{
    const auto P = GroupPoint::base_mul(scalars(1)[0]);
    for (auto _ : state) benchmark::DoNotOptimize(hash_p(P));
}
BENCHMARK(BM_HashP);

void BM_Hash160(benchmark::State& state)
{
    const auto P = GroupPoint::base_mul(scalars(1)[0]);
    for (auto _ : state) benchmark::DoNotOptimize(hash_160(P));
}
BENCHMARK(BM_Hash160);

void BM_SigGen(benchmark::State& state)
{
    const auto kp = keygen("bench");
    std::uint64_t n = 0;
    for (auto _ : state) {
        const std::string msg = "message " + std::to_string(n++);
        benchmark::DoNotOptimize(sig_gen(kp, as_bytes(msg)));
    }
}
BENCHMARK(BM_SigGen);

// Every iteration checks a signature never seen before, so the
// verification cache never hits.
void BM_SigVerFresh(benchmark::State& state)
{
    const auto kp = keygen("bench");
    std::uint64_t n = 0;
    for (auto _ : state) {
        state.PauseTiming();
        const std::string msg = "fresh " + std::to_string(n++);
        const auto sig = sig_gen(kp, as_bytes(msg));
        state.ResumeTiming();
        benchmark::DoNotOptimize(sig_ver(kp.pk, as_bytes(msg), sig));
    }
}
BENCHMARK(BM_SigVerFresh);

void BM_CommitmentSet(benchmark::State& state)
{
    const auto n = static_cast<std::size_t>(state.range(0));
    std::uint64_t k = 0;
    for (auto _ : state) benchmark::DoNotOptimize(commit::gen_commitment_set("set/" + std::to_string(k++), n));
    state.SetComplexityN(state.range(0));
}
BENCHMARK(BM_CommitmentSet)->RangeMultiplier(4)->Range(2, 128)->Complexity(benchmark::oN);

} // namespace
