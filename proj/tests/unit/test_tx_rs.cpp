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

#include "arisrsma/rx_beam.hpp"
#include "arisrsma/tx_rs.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

TEST(TxRs, ExpTangentIsAGlobalLowerBound)
{
    EXPECT_DOUBLE_EQ(exp_tangent(0.0, 1.0), 2.0);
    EXPECT_NEAR(exp_tangent(1.0, 1.0), std::exp(1.0), 1e-15);
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> d(-20.0, 20.0);
    for (int k = 0; k < 1000; ++k) {
        const double x0 = d(rng), x = d(rng);
        EXPECT_LE(exp_tangent(x0, x), std::exp(x) * (1.0 + 1e-12));
    }
}

TEST(TxRs, SrocrUpdate)
{
    EXPECT_DOUBLE_EQ(srocr_update(CMat::Identity(2, 2), 0.1), 0.6);
    CMat X = CMat::Zero(2, 2);
    X(0, 0) = 1.0;
    EXPECT_DOUBLE_EQ(srocr_update(X, 0.1), 1.0);
}

TEST(TxRs, RankOneExtraction)
{
    CVec u(3);
    u << cd(1.0, 0.0), cd(0.0, 2.0), cd(-1.0, 1.0);
    const RankOneExtraction e = extract_rank_one(4.0 * u * u.adjoint());
    EXPECT_NEAR(e.ratio, 1.0, 1e-12);
    EXPECT_FALSE(e.flagged);
    EXPECT_LT((e.f * e.f.adjoint() - 4.0 * u * u.adjoint()).norm(), 1e-10);

    const RankOneExtraction mixed = extract_rank_one(CMat::Identity(3, 3));
    EXPECT_NEAR(mixed.ratio, 1.0 / 3.0, 1e-12);
    EXPECT_TRUE(mixed.flagged);
}

TEST(TxRs, LiftedVariableAtFullLevelIsRankOne)
{
    CVec u(2);
    u << cd(0.6, 0.0), cd(0.0, 0.8);
    ConicProblem p;
    const LiftedVar lv = add_lifted(p, "X", 2, 1.0, u);
    EXPECT_TRUE(lv.rank_one);
    AffineExpr obj;
    lv.add_trace(obj);
    p.set_objective(obj);
    AffineExpr budget;
    lv.add_trace(budget);
    p.add_constraint(budget, Sense::le, 2.0);
    const ConicSolution s = solve(p);
    ASSERT_TRUE(s.ok()) << s.message;
    const CMat X = lv.value(s);
    EXPECT_LT((X - 2.0 * u * u.adjoint()).norm(), 1e-6);
}

TEST(TxRs, SrocrCutRestrictsTheSpectrum)
{
    // max tr(D X) with tr X = 1, D = diag(1, 2): the cut around e1 at level
    // 0.9 keeps at least 90% of the trace on e1.
    CVec u = CVec::Zero(2);
    u(0) = 1.0;
    ConicProblem p;
    const LiftedVar lv = add_lifted(p, "X", 2, 0.9, u);
    CMat D = CMat::Zero(2, 2);
    D.diagonal() << 1.0, 2.0;
    AffineExpr obj;
    lv.add_pairing(obj, D);
    p.set_objective(obj);
    AffineExpr tr;
    lv.add_trace(tr);
    p.add_constraint(tr, Sense::eq, 1.0);
    const ConicSolution s = solve(p);
    ASSERT_TRUE(s.ok()) << s.message;
    EXPECT_NEAR(s.objective, 1.1, 1e-6);
}

class P2Block : public ::testing::Test
{
protected:
    void SetUp() override
    {
        cfg = testing::reduced_config();
        ch = sample_channels(cfg, 1);
        s = initialize(cfg, ch);
        gamma = p1_solve(cfg, ch, s).min_gamma;
    }
    SystemConfig cfg;
    ChannelSet ch;
    DesignState s;
    double gamma = 0.0;
};

TEST_F(P2Block, ProgramLayout)
{
    const CascadeMatrices cm = build_cascade_matrices(cfg, ch, s.phi, &s.w);
    SrocrState st;
    st.varpi.assign(3, 0.0);
    st.delta.assign(3, 0.1);
    for (Index i = 0; i < 3; ++i)
        st.prev_solution.push_back(s.F.col(i) * s.F.col(i).adjoint());
    st.prev_xi_p.assign(2, 0.0);
    st.prev_xi_c.assign(2, 0.0);
    const P2Program prog = build_p2(cfg, ch, cm, s, gamma, st, ConstraintSet{});
    EXPECT_EQ(prog.layout.lifted.size(), 3u);
    EXPECT_EQ(prog.layout.c.size(), 2u);
    EXPECT_EQ(prog.layout.rho_p.size(), 2u);
    EXPECT_EQ(prog.layout.xi_c.size(), 2u);
    EXPECT_GE(prog.layout.gamma, 0);
    EXPECT_NO_THROW(prog.problem.validate());
    EXPECT_FALSE(prog.problem.exp_constraints().empty());

    ConstraintSet sdma;
    sdma.common = false;
    SrocrState st2 = st;
    st2.varpi.pop_back();
    st2.delta.pop_back();
    st2.prev_solution.pop_back();
    const P2Program p2 = build_p2(cfg, ch, cm, s, gamma, st2, sdma);
    EXPECT_THROW(build_p2(cfg, ch, cm, s, gamma, st, sdma), std::invalid_argument);
    EXPECT_EQ(p2.layout.lifted.size(), 2u);
    EXPECT_TRUE(p2.layout.c.empty());
}

TEST_F(P2Block, SolveImprovesAndReturnsRankOneBeams)
{
    const P2Result r = solve_p2(cfg, ch, s, gamma, ConstraintSet{});
    ASSERT_EQ(r.status, BlockStatus::ok) << r.message;
    ASSERT_EQ(r.rank_ratios.size(), 3u);
    for (double x : r.rank_ratios)
        EXPECT_GE(x, 0.999);
    EXPECT_EQ(r.F.rows(), cfg.M);
    EXPECT_EQ(r.F.cols(), 3);
    EXPECT_LE(r.F.squaredNorm(), cfg.P_bs_max * (1.0 + 1e-6));
    EXPECT_GE(r.gamma_lifted, gamma * (1.0 - 1e-6));
    EXPECT_FALSE(r.trace.empty());

    DesignState next = s;
    next.F = r.F;
    next.c = r.c;
    EXPECT_TRUE(verify_feasibility(cfg, ch, next, 1e-6).pass);
    EXPECT_GE(min_echo_sinr(cfg, ch, next), gamma * (1.0 - 1e-5));
}

TEST_F(P2Block, UnreachableRatesAreInfeasible)
{
    SystemConfig hard = cfg;
    hard.R_min.assign(2, 40.0);
    const P2Result r = solve_p2(hard, ch, s, gamma, ConstraintSet{});
    EXPECT_EQ(r.status, BlockStatus::infeasible);
}

} // namespace
} // namespace arisrsma
