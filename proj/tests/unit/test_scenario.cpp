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

#include "arisrsma/scenario.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

using testing::reduced_config;

TEST(Scenario, SteeringVectorPhaseProgression)
{
    const CVec a = steering_vector(kPi / 6.0, 4);
    ASSERT_EQ(a.size(), 4);
    const cd expected[] = {{1.0, 0.0}, {0.0, 1.0}, {-1.0, 0.0}, {0.0, -1.0}};
    for (Index l = 0; l < 4; ++l)
        EXPECT_NEAR(std::abs(a(l) - expected[l]), 0.0, 1e-12);
}

TEST(Scenario, TargetResponseIsScaledOuterProduct)
{
    const cd beta(0.3, -0.4);
    const CMat G = target_response(0.2, beta, 5);
    const CVec a = steering_vector(0.2, 5);
    EXPECT_NEAR((G - beta * a * a.adjoint()).norm(), 0.0, 1e-14);
}

TEST(Scenario, PathlossReferenceValues)
{
    SystemConfig cfg;
    EXPECT_DOUBLE_EQ(pathloss(cfg, cfg.d0, 3.0), cfg.C0);
    EXPECT_NEAR(pathloss(cfg, 10.0, 2.2), 6.3095734448019305e-06, 1e-20);
}

TEST(Scenario, DefaultConfigurationIsValid)
{
    EXPECT_NO_THROW(validate(SystemConfig{}));
    EXPECT_NO_THROW(validate(reduced_config()));
}

TEST(Scenario, ValidateRejectsMismatchedLengths)
{
    SystemConfig cfg = reduced_config();
    cfg.R_min.push_back(1.0);
    EXPECT_THROW(validate(cfg), ConfigError);

    cfg = reduced_config();
    cfg.rcs.pop_back();
    EXPECT_THROW(validate(cfg), ConfigError);

    cfg = reduced_config();
    cfg.a_max = -1.0;
    EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Scenario, ValidateChecksTargetPositions)
{
    SystemConfig cfg = reduced_config();
    anchor_targets(cfg);
    EXPECT_NO_THROW(validate(cfg));
    cfg.geometry.target_position.pop_back();
    EXPECT_THROW(validate(cfg), ConfigError);

    cfg = reduced_config();
    anchor_targets(cfg);
    // Behind the ARIS plane: the angle leaves (-pi/2, pi/2).
    cfg.geometry.target_position[0] = {cfg.geometry.aris.x, cfg.geometry.aris.y + 4.0};
    EXPECT_THROW(validate(cfg), ConfigError);
}

TEST(Scenario, ResizeKeepsPerEntityVectorsConsistent)
{
    SystemConfig cfg;
    resize_users(cfg, 3);
    resize_targets(cfg, 4, default_target_angle_pool());
    EXPECT_EQ(cfg.R_min.size(), 3u);
    EXPECT_EQ(cfg.target_angles.size(), 4u);
    EXPECT_EQ(cfg.rcs.size(), 4u);
    EXPECT_EQ(cfg.geometry.target_distance.size(), 4u);
    EXPECT_NO_THROW(validate(cfg));
    EXPECT_THROW(resize_targets(cfg, 7, default_target_angle_pool()), ConfigError);
}

TEST(Scenario, AnchoredTargetsStayPutWhenTheArisMoves)
{
    SystemConfig cfg = reduced_config();
    const TargetPlacement before = target_placement(cfg);
    anchor_targets(cfg);
    const TargetPlacement same = target_placement(cfg);
    for (std::size_t q = 0; q < 2; ++q) {
        EXPECT_NEAR(same.angle[q], before.angle[q], 1e-12);
        EXPECT_NEAR(same.distance[q], before.distance[q], 1e-12);
    }
    const std::vector<Point2> pinned = cfg.geometry.target_position;
    cfg.geometry.aris.x += 1.5;
    const TargetPlacement moved = target_placement(cfg);
    for (std::size_t q = 0; q < 2; ++q) {
        const Point2 p{cfg.geometry.aris.x + moved.distance[q] * std::sin(moved.angle[q]),
                       cfg.geometry.aris.y - moved.distance[q] * std::cos(moved.angle[q])};
        EXPECT_NEAR(p.x, pinned[q].x, 1e-12);
        EXPECT_NEAR(p.y, pinned[q].y, 1e-12);
    }
}

TEST(Scenario, ChannelsAreDeterministicInSeed)
{
    const SystemConfig cfg = reduced_config();
    const ChannelSet a = sample_channels(cfg, 1);
    const ChannelSet b = sample_channels(cfg, 1);
    const ChannelSet c = sample_channels(cfg, 2);
    EXPECT_EQ((a.H_br - b.H_br).norm(), 0.0);
    EXPECT_GT((a.H_br - c.H_br).norm(), 0.0);

    // Frozen draw of seed 1.
    EXPECT_NEAR(a.H_br(0, 0).real(), 0.0054579793369337369, 1e-15);
    EXPECT_NEAR(a.H_br(0, 0).imag(), -0.00026337717449939337, 1e-15);
    EXPECT_NEAR(a.h_bu[0](0).real(), -0.00012513569040373084, 1e-16);
    EXPECT_NEAR(a.h_bu[0](0).imag(), 0.00015610867231373004, 1e-16);
    EXPECT_NEAR(a.user_positions[0].x, 20.718597832700897, 1e-12);
    EXPECT_NEAR(a.user_positions[0].y, 0.82976318968147156, 1e-12);
}

TEST(Scenario, ChannelShapes)
{
    const SystemConfig cfg = reduced_config();
    const ChannelSet ch = sample_channels(cfg, 3);
    EXPECT_EQ(ch.H_br.rows(), 8);
    EXPECT_EQ(ch.H_br.cols(), 4);
    ASSERT_EQ(ch.h_bu.size(), 2u);
    ASSERT_EQ(ch.h_ru.size(), 2u);
    ASSERT_EQ(ch.G.size(), 2u);
    EXPECT_EQ(ch.h_bu[0].size(), 4);
    EXPECT_EQ(ch.h_ru[0].size(), 8);
    EXPECT_EQ(ch.G[1].rows(), 8);
    for (const Point2& p : ch.user_positions)
        EXPECT_LE(distance(p, cfg.geometry.user_center), cfg.geometry.user_radius + 1e-12);
}

} // namespace
} // namespace arisrsma
