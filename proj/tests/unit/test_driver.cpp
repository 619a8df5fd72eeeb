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

#include "arisrsma/driver.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

TEST(Driver, ModeNamesRoundTrip)
{
    ASSERT_EQ(all_modes().size(), 5u);
    for (Mode m : all_modes())
        EXPECT_EQ(mode_from_string(to_string(m)), m);
    EXPECT_THROW(mode_from_string("noma"), std::invalid_argument);
}

TEST(Driver, ModeSetups)
{
    const SystemConfig base = testing::reduced_config();
    const ModeSetup sdma = mode_setup(base, Mode::aris_sdma);
    EXPECT_FALSE(sdma.set.common);
    EXPECT_TRUE(sdma.set.rates);

    const ModeSetup pris = mode_setup(base, Mode::pris_rsma);
    EXPECT_EQ(pris.cfg.sigma_z2, 0.0);
    EXPECT_EQ(pris.cfg.a_max, 1.0);
    EXPECT_FALSE(pris.set.aris_power);
    EXPECT_TRUE(pris.set.common);

    const ModeSetup sens = mode_setup(base, Mode::only_sensing);
    EXPECT_TRUE(sens.sensing_only);
    EXPECT_FALSE(sens.set.rates);
}

TEST(Driver, InitialPointsAreFeasible)
{
    const SystemConfig base = testing::reduced_config();
    const ChannelSet ch = sample_channels(base, 6);
    for (Mode m : all_modes()) {
        const ModeSetup ms = mode_setup(base, m);
        const DesignState s = initialize(base, ch, m);
        EXPECT_EQ(s.F.cols(), ms.sensing_only ? 1 : base.U + 1) << to_string(m);
        EXPECT_NEAR(s.F.squaredNorm(), base.P_bs_max, 1e-9) << to_string(m);
        EXPECT_LE(s.phi.cwiseAbs().maxCoeff(), ms.cfg.a_max * (1.0 + 1e-12)) << to_string(m);
        if (ms.set.aris_power) {
            EXPECT_LE(aris_power(ms.cfg, ch, s), ms.cfg.P_ris_max) << to_string(m);
        }
    }
}

TEST(Driver, FrozenReducedScaleResults)
{
    const SystemConfig cfg = testing::reduced_config();
    const ChannelSet ch = sample_channels(cfg, 1);
    const BcdOptions o = BcdOptions::from_config(cfg);
    const struct
    {
        Mode mode;
        double db;
    } expected[] = {{Mode::aris_rsma, -10.466729547620439},
                    {Mode::aris_sdma, -10.681605625399676},
                    {Mode::pris_rsma, -35.450767571384823},
                    {Mode::pris_sdma, -35.399753909593286},
                    {Mode::only_sensing, -10.394373836605602}};
    for (const auto& e : expected) {
        const RunResult r = run_baseline(e.mode, cfg, ch, o);
        EXPECT_EQ(r.status, RunStatus::ok) << to_string(e.mode) << ": " << r.message;
        EXPECT_NEAR(r.min_sinr_db, e.db, 1e-6) << to_string(e.mode);
    }
}

TEST(Driver, OuterLoopIsMonotoneAndTraced)
{
    const SystemConfig cfg = testing::reduced_config();
    const ChannelSet ch = sample_channels(cfg, 2);
    const RunResult r = run_bcd(cfg, ch, BcdOptions::from_config(cfg));
    ASSERT_EQ(r.status, RunStatus::ok) << r.message;
    ASSERT_EQ(static_cast<int>(r.trace.outer.size()), r.outer_iterations);
    EXPECT_TRUE(r.converged);
    EXPECT_EQ(r.trace.termination, "converged");
    double prev = r.trace.gamma_init;
    for (const OuterRecord& rec : r.trace.outer) {
        EXPECT_LE(rec.gamma_p1, rec.gamma_p2 * (1.0 + 1e-9));
        EXPECT_LE(rec.gamma_p2, rec.gamma_p3 * (1.0 + 1e-9));
        EXPECT_LE(prev, rec.gamma_p1 * (1.0 + 1e-9));
        prev = rec.gamma_p3;
    }
    EXPECT_LE(prev, r.min_sinr * (1.0 + 1e-9));
    EXPECT_TRUE(r.feasibility.pass);
    for (double x : r.rank_ratios)
        EXPECT_GE(x, 0.999);
    EXPECT_EQ(r.rates.size(), 2u);
    for (double rate : r.rates)
        EXPECT_GE(rate, 1.0 - 1e-6);
    EXPECT_LE(r.bs_power, cfg.P_bs_max * (1.0 + 1e-6));
    EXPECT_LE(r.aris_power, cfg.P_ris_max * (1.0 + 1e-6));
}

TEST(Driver, UnreachableRatesEndInfeasible)
{
    SystemConfig cfg = testing::reduced_config(40.0);
    const ChannelSet ch = sample_channels(cfg, 1);
    const RunResult r = run_bcd(cfg, ch, BcdOptions::from_config(cfg));
    EXPECT_EQ(r.status, RunStatus::infeasible);
    EXPECT_FALSE(r.message.empty());
}

} // namespace
} // namespace arisrsma
