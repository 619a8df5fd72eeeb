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
/// \file driver.hpp
///
/// Block coordinate descent over (w, F/c, phi) and the benchmark variants.
///
#ifndef ARISRSMA_DRIVER_HPP
#define ARISRSMA_DRIVER_HPP

#include <string>
#include <string_view>
#include <vector>

#include "arisrsma/aris.hpp"
#include "arisrsma/model.hpp"
#include "arisrsma/rx_beam.hpp"
#include "arisrsma/scenario.hpp"
#include "arisrsma/tx_rs.hpp"

namespace arisrsma
{

enum class Mode
{
    aris_rsma,
    aris_sdma,
    pris_rsma,
    pris_sdma,
    only_sensing
};

const char* to_string(Mode m);
/// Throws std::invalid_argument for unknown names.
Mode mode_from_string(std::string_view name);
std::vector<Mode> all_modes();

/// Effective configuration and constraint set of a mode.
struct ModeSetup
{
    SystemConfig cfg;
    ConstraintSet set;
    bool sensing_only = false;
};

/// PRIS: no dynamic noise, a_max = 1, no ARIS power budget.
/// SDMA: no common stream. Sensing-only: one beam, no rate constraints.
ModeSetup mode_setup(const SystemConfig& base, Mode m);

struct BcdOptions
{
    int max_outer = 50;
    double tol = 1e-3;          ///< relative change of the P3 value
    double feas_tol = 1e-6;     ///< acceptance tolerance of verify_feasibility
    int max_backtracks = 8;     ///< halvings toward the incumbent for a slightly infeasible phi
    bool require_rank_one = true; ///< accept lifted candidates only when the rank test passed
    SrocrOptions srocr;         ///< shared by both lifted blocks
    MmNormBound bound = MmNormBound::exact;
    bool verbose = false;

    /// Caps and tolerance taken from the configuration.
    static BcdOptions from_config(const SystemConfig& cfg);
};

struct OuterRecord
{
    int iteration = 0;
    double gamma_p1 = 0.0;  ///< linear
    double gamma_p2 = 0.0;
    double gamma_p3 = 0.0;
    bool p2_accepted = false;
    bool p3_accepted = false;
    BlockStatus p2_status = BlockStatus::degraded;
    BlockStatus p3_status = BlockStatus::degraded;
    std::vector<InnerRecord> p2_inner;
    std::vector<InnerRecord> p3_inner;
    std::vector<double> p2_rank_ratios;
    double p3_rank_ratio = 0.0;
    double feasibility_worst = 0.0;  ///< residual of the state after this iteration
    double seconds = 0.0;
};

struct RunTrace
{
    double gamma_init = 0.0;
    std::vector<OuterRecord> outer;
    std::string termination;
};

enum class RunStatus
{
    ok,
    infeasible,
    degraded
};

const char* to_string(RunStatus s);

struct RunResult
{
    Mode mode = Mode::aris_rsma;
    RunStatus status = RunStatus::degraded;
    DesignState state;
    double min_sinr = 0.0;       ///< linear
    double min_sinr_db = 0.0;
    std::vector<double> rates;   ///< c_u + private rate, bits/s/Hz
    std::vector<double> common;  ///< allocated common rate c_u
    double bs_power = 0.0;       ///< W
    double aris_power = 0.0;     ///< W
    int outer_iterations = 0;
    bool converged = false;
    /// Rank ratios of the last accepted lifted solutions (P2 variables, then P3).
    std::vector<double> rank_ratios;
    FeasibilityReport feasibility;
    RunTrace trace;
    std::string message;
    double seconds = 0.0;
};

/// Initial point: phases steering the ARIS toward the first target, a common
/// amplitude meeting the ARIS budget, MRT beams with equal power, a
/// QoS-motivated common split and optimal receive filters.
DesignState initialize(const SystemConfig& cfg, const ChannelSet& ch, Mode mode = Mode::aris_rsma);

/// Algorithm loop for the ARIS-RSMA design.
RunResult run_bcd(const SystemConfig& cfg, const ChannelSet& ch, const BcdOptions& opts);

/// Any of the five designs on the same channels.
RunResult run_baseline(Mode mode, const SystemConfig& cfg, const ChannelSet& ch,
                       const BcdOptions& opts);

} // namespace arisrsma

#endif // ARISRSMA_DRIVER_HPP
