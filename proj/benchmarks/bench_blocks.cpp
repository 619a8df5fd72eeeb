// SPDX-License-Identifier: Apache-2.0
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

///
/// \file bench_blocks.cpp
///
/// Timings of the building blocks on the reduced and full-size scenarios:
/// receive filtering, the conic solver, the quartic kernels and one call of
/// each lifted block.
///
#include <benchmark/benchmark.h>

#include "arisrsma/aris.hpp"
#include "arisrsma/driver.hpp"
#include "arisrsma/rx_beam.hpp"
#include "arisrsma/tx_rs.hpp"

namespace
{

using namespace arisrsma;

SystemConfig scenario(int full)
{
    SystemConfig cfg;
    if (!full) {
        cfg.M = 4;
        cfg.L = 8;
        resize_users(cfg, 2);
        resize_targets(cfg, 2, default_target_angle_pool());
        cfg.R_min.assign(2, 1.0);
    }
    return cfg;
}

struct Fixture
{
    explicit Fixture(int full) : cfg(scenario(full)), ch(sample_channels(cfg, 1))
    {
        s = initialize(cfg, ch);
        const ReceiveDesign rd = p1_solve(cfg, ch, s);
        s.w = rd.w;
        gamma = rd.min_gamma;
    }
    SystemConfig cfg;
    ChannelSet ch;
    DesignState s;
    double gamma = 0.0;
};

void BM_ReceiveFilters(benchmark::State& state)
{
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(p1_solve(f.cfg, f.ch, f.s));
}
BENCHMARK(BM_ReceiveFilters)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_EchoSinr(benchmark::State& state)
{
    const Fixture f(static_cast<int>(state.range(0)));
    for (auto _ : state)
        benchmark::DoNotOptimize(min_echo_sinr(f.cfg, f.ch, f.s));
}
BENCHMARK(BM_EchoSinr)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_QuarticKernelApply(benchmark::State& state)
{
    const Fixture f(static_cast<int>(state.range(0)));
    const QuarticForms qf = build_quartic_forms(f.cfg, f.ch, f.s.F, f.s.w[0], 0);
    const CVec x = lift_phi(f.s.phi);
    for (auto _ : state)
        benchmark::DoNotOptimize(qf.M1.apply(x));
}
BENCHMARK(BM_QuarticKernelApply)->Arg(0)->Arg(1)->Unit(benchmark::kMicrosecond);

void BM_MmSurrogate(benchmark::State& state)
{
    const Fixture f(static_cast<int>(state.range(0)));
    const QuarticForms qf = build_quartic_forms(f.cfg, f.ch, f.s.F, f.s.w[0], 0);
    for (auto _ : state)
        benchmark::DoNotOptimize(mm_surrogate(qf.D1, f.s.phi, f.cfg.a_max));
}
BENCHMARK(BM_MmSurrogate)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

void BM_ConicEigenvalueSdp(benchmark::State& state)
{
    const auto n = static_cast<Index>(state.range(0));
    CMat A = CMat::Zero(n, n);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < n; ++j)
            A(i, j) = cd(std::cos(1.0 + i + 2.0 * j), std::sin(3.0 * i - j));
    A = (A + A.adjoint()).eval();
    ConicProblem p;
    const int x = p.add_matrix_var("X", n);
    AffineExpr obj;
    obj.add(x, A);
    p.set_objective(obj);
    AffineExpr tr;
    tr.add(x, HermitianCoef::identity(n));
    p.add_constraint(tr, Sense::eq, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve(p));
}
BENCHMARK(BM_ConicEigenvalueSdp)->Arg(8)->Arg(16)->Arg(33)->Unit(benchmark::kMillisecond);

void BM_TransmitBlock(benchmark::State& state)
{
    const Fixture f(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_p2(f.cfg, f.ch, f.s, f.gamma, ConstraintSet{}));
}
BENCHMARK(BM_TransmitBlock)->Unit(benchmark::kMillisecond);

void BM_ReflectionBlock(benchmark::State& state)
{
    const Fixture f(0);
    for (auto _ : state)
        benchmark::DoNotOptimize(solve_p3(f.cfg, f.ch, f.s, f.gamma, ConstraintSet{}));
}
BENCHMARK(BM_ReflectionBlock)->Unit(benchmark::kMillisecond);

void BM_FullDesign(benchmark::State& state)
{
    const Fixture f(0);
    const BcdOptions o = BcdOptions::from_config(f.cfg);
    for (auto _ : state)
        benchmark::DoNotOptimize(run_bcd(f.cfg, f.ch, o));
}
BENCHMARK(BM_FullDesign)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
