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

#include <random>

#include <Eigen/Cholesky>

#include "arisrsma/rx_beam.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

TEST(RxBeam, DiagonalQuotient)
{
    CMat A1 = CMat::Zero(2, 2);
    A1.diagonal() << 2.0, 1.0;
    const QuotientSolution qs = optimal_receive_beamformer(A1, CMat::Identity(2, 2));
    EXPECT_NEAR(qs.gamma, 2.0, 1e-12);
    EXPECT_NEAR(std::abs(qs.w(0)), 1.0, 1e-12);
    EXPECT_NEAR(std::abs(qs.w(1)), 0.0, 1e-12);
}

TEST(RxBeam, RankOneNumeratorClosedForm)
{
    std::mt19937_64 rng(4);
    const CVec a = testing::random_cvec(rng, 5);
    CMat B = testing::random_cmat(rng, 5, 5);
    const CMat A2 = B * B.adjoint() + CMat::Identity(5, 5);
    const QuotientSolution qs = optimal_receive_beamformer(a * a.adjoint(), A2);
    const double oracle = a.dot(A2.llt().solve(a)).real();
    EXPECT_LT(testing::rel_err(qs.gamma, oracle), 1e-12);
    EXPECT_NEAR(qs.w.norm(), 1.0, 1e-12);
    const double attained = (qs.w.adjoint() * a * a.adjoint() * qs.w).value().real() /
                            (qs.w.adjoint() * A2 * qs.w).value().real();
    EXPECT_LT(testing::rel_err(attained, oracle), 1e-12);
}

TEST(RxBeam, RejectsSingularDenominator)
{
    EXPECT_THROW(optimal_receive_beamformer(CMat::Identity(2, 2), CMat::Zero(2, 2)),
                 std::invalid_argument);
}

TEST(RxBeam, P1AttainsEchoSinrOfItsFilters)
{
    const SystemConfig cfg = testing::reduced_config();
    const ChannelSet ch = sample_channels(cfg, 2);
    DesignState s = initialize(cfg, ch);
    const ReceiveDesign rd = p1_solve(cfg, ch, s);
    ASSERT_EQ(rd.w.size(), 2u);
    s.w = rd.w;
    for (Index q = 0; q < 2; ++q)
        EXPECT_LT(testing::rel_err(echo_sinr(cfg, ch, s, q), rd.gamma[static_cast<std::size_t>(q)]),
                  1e-10);
    EXPECT_DOUBLE_EQ(rd.min_gamma, std::min(rd.gamma[0], rd.gamma[1]));

    // No other filter does better.
    std::mt19937_64 rng(12);
    for (int k = 0; k < 200; ++k) {
        DesignState t = s;
        t.w[0] = testing::random_cvec(rng, cfg.M);
        EXPECT_LE(echo_sinr(cfg, ch, t, 0), rd.gamma[0] * (1.0 + 1e-12));
    }
}

} // namespace
} // namespace arisrsma
