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

#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "arisrsma/model.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

using testing::aris_power_direct;
using testing::echo_sinr_direct;
using testing::random_instance;
using testing::rel_err;
using testing::user_sinrs_direct;

TEST(Model, EchoSinrMatchesDirectEvaluation)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto in = random_instance(seed);
        for (Index q = 0; q < in.cfg.Q; ++q)
            EXPECT_LT(rel_err(echo_sinr(in.cfg, in.ch, in.s, q),
                              echo_sinr_direct(in.cfg, in.ch, in.s, q)),
                      1e-10);
    }
}

TEST(Model, UserSinrsMatchDirectEvaluation)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto in = random_instance(seed);
        for (Index u = 0; u < in.cfg.U; ++u) {
            const UserSinr a = user_sinrs(in.cfg, in.ch, in.s, u);
            const UserSinr b = user_sinrs_direct(in.cfg, in.ch, in.s, u);
            EXPECT_LT(rel_err(a.priv, b.priv), 1e-10);
            EXPECT_LT(rel_err(a.common, b.common), 1e-10);
        }
    }
}

TEST(Model, ArisPowerMatchesDirectEvaluation)
{
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const auto in = random_instance(seed);
        EXPECT_LT(rel_err(aris_power(in.cfg, in.ch, in.s), aris_power_direct(in.cfg, in.ch, in.s)),
                  1e-12);
    }
}

TEST(Model, ArisPowerLimitCases)
{
    auto in = random_instance(5);
    in.s.phi.setZero();
    EXPECT_EQ(aris_power(in.cfg, in.ch, in.s), 0.0);

    in.s.F.setZero();
    for (auto& g : in.ch.G)
        g.setZero();
    in.s.phi = CVec::Ones(in.cfg.L);
    EXPECT_NEAR(aris_power(in.cfg, in.ch, in.s),
                2.0 * in.cfg.sigma_z2 * static_cast<double>(in.cfg.L), 1e-25);
}

TEST(Model, EchoSinrInvariantToFilterScale)
{
    auto in = random_instance(8);
    const double a = echo_sinr(in.cfg, in.ch, in.s, 0);
    in.s.w[0] *= 7.0;
    EXPECT_LT(rel_err(echo_sinr(in.cfg, in.ch, in.s, 0), a), 1e-10);
}

TEST(Model, SingleTargetHasNoCrossTerm)
{
    SystemConfig cfg = testing::reduced_config();
    resize_targets(cfg, 1, default_target_angle_pool());
    const ChannelSet ch = sample_channels(cfg, 4);
    std::mt19937_64 rng(4);
    DesignState s = make_state(cfg.M, cfg.L, cfg.U, 1);
    s.F = testing::random_cmat(rng, cfg.M, cfg.U + 1);
    s.phi = testing::random_phi(rng, cfg.L, cfg.a_max);
    s.w[0] = testing::random_cvec(rng, cfg.M);
    const CascadeMatrices cm = build_cascade_matrices(cfg, ch, s.phi);
    EXPECT_EQ(cm.H_bq_tilde[0].norm(), 0.0);
    const double den = (s.w[0].adjoint() * cm.C * s.w[0]).value().real();
    const double num = (s.w[0].adjoint() * cm.H_bq[0] * s.F).squaredNorm();
    EXPECT_LT(rel_err(echo_sinr(cfg, ch, s, 0), num / den), 1e-12);
}

TEST(Model, AchievableRate)
{
    EXPECT_DOUBLE_EQ(achievable_rate(0.0), 0.0);
    EXPECT_DOUBLE_EQ(achievable_rate(3.0), 2.0);
    EXPECT_NEAR(achievable_rate(1023.0), 10.0, 1e-12);
}

TEST(Model, QuarticKernelApplyMatchesDense)
{
    std::mt19937_64 rng(11);
    const Index L = 3;
    QuarticKernel K(L);
    CMat A = testing::random_cmat(rng, L, L);
    A = (A * A.adjoint()).eval();
    CMat B = testing::random_cmat(rng, L, L);
    B = (B * B.adjoint()).eval();
    K.add_term(0.7, testing::random_cmat(rng, L, L), A, B);
    K.add_diagonal(RVec::LinSpaced(L * L, 0.1, 0.9));
    const CMat D = K.dense();
    EXPECT_LT((D - D.adjoint()).norm(), 1e-12 * D.norm());
    const CVec x = testing::random_cvec(rng, L * L);
    EXPECT_LT((K.apply(x) - D * x).norm(), 1e-12 * (D * x).norm());
    const CVec phi = testing::random_cvec(rng, L);
    const CVec xl = lift_phi(phi);
    EXPECT_LT(rel_err(K.quadratic_form(phi), xl.dot(D * xl).real()), 1e-12);
}

TEST(Model, LiftIsColumnMajorOuterProduct)
{
    CVec phi(2);
    phi << cd(1.0, 1.0), cd(0.0, 2.0);
    const CVec x = lift_phi(phi);
    ASSERT_EQ(x.size(), 4);
    EXPECT_NEAR(std::abs(x(1) - phi(1) * std::conj(phi(0))), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(x(2) - phi(0) * std::conj(phi(1))), 0.0, 1e-15);
}

TEST(Model, FeasibilityReportFlagsEachConstraint)
{
    const SystemConfig cfg = testing::reduced_config();
    const ChannelSet ch = sample_channels(cfg, 1);
    DesignState s = initialize(cfg, ch);
    FeasibilityReport r = verify_feasibility(cfg, ch, s, 1e-6);
    EXPECT_TRUE(r.pass) << "worst " << r.worst;

    DesignState loud = s;
    loud.F *= 2.0;
    r = verify_feasibility(cfg, ch, loud, 1e-6);
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.bs_power, 3.0, 1e-9);

    DesignState wide = s;
    wide.phi(0) = std::polar(cfg.a_max * 1.5, 0.3);
    r = verify_feasibility(cfg, ch, wide, 1e-6);
    EXPECT_FALSE(r.pass);
    EXPECT_NEAR(r.amplitude, 0.5, 1e-12);

    DesignState greedy = s;
    greedy.c.setConstant(50.0);
    r = verify_feasibility(cfg, ch, greedy, 1e-6);
    EXPECT_FALSE(r.pass);
    ConstraintSet no_common;
    no_common.common = false;
    EXPECT_GT(verify_feasibility(cfg, ch, greedy, 1e-6).worst, 0.0);
    EXPECT_NEAR(verify_feasibility(cfg, ch, s, 1e-6, no_common).min_echo_sinr,
                min_echo_sinr(cfg, ch, s), 1e-20);
}

TEST(Model, FrozenInitialDesign)
{
    const SystemConfig cfg = testing::reduced_config();
    const ChannelSet ch = sample_channels(cfg, 1);
    const DesignState s = initialize(cfg, ch);
    EXPECT_NEAR(s.F.squaredNorm(), cfg.P_bs_max, 1e-9);
    EXPECT_LE(aris_power(cfg, ch, s), cfg.P_ris_max);
    EXPECT_LT(rel_err(min_echo_sinr(cfg, ch, s), 1.2548937018310901e-05), 1e-8);
    const UserSinr g = user_sinrs(cfg, ch, s, 0);
    EXPECT_LT(rel_err(g.priv, 1.0514725548634474), 1e-8);
    EXPECT_LT(rel_err(g.common, 0.50614582398820662), 1e-8);
}

} // namespace
} // namespace arisrsma
