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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "arisrsma/experiment.hpp"
#include "fixtures.hpp"

namespace arisrsma
{
namespace
{

const char* kSmall = R"({
  "M": 4, "L": 8, "U": 2, "Q": 2, "R_th": 1, "seed": 7,
  "sweep": {
    "parameter": "R_th",
    "values": [1, 2],
    "modes": ["aris_rsma", "aris_sdma"],
    "n_seeds": 2,
    "output": "results.csv"
  }
})";

std::filesystem::path scratch_dir(const std::string& name)
{
    const auto dir = std::filesystem::temp_directory_path() / ("arisrsma_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

TEST(Experiment, SweepParameterNames)
{
    for (SweepParameter p : {SweepParameter::R_th, SweepParameter::a_max, SweepParameter::aris_x,
                             SweepParameter::Q, SweepParameter::P_bs_max, SweepParameter::L})
        EXPECT_EQ(sweep_parameter_from_string(to_string(p)), p);
    EXPECT_THROW(sweep_parameter_from_string("K"), ConfigError);
}

TEST(Experiment, ParsesSweepSection)
{
    const ExperimentConfig ec = parse_experiment_config(kSmall);
    EXPECT_EQ(ec.system.M, 4);
    EXPECT_EQ(ec.system.seed, 7u);
    EXPECT_EQ(ec.sweep.parameter, SweepParameter::R_th);
    ASSERT_EQ(ec.sweep.values.size(), 2u);
    ASSERT_EQ(ec.sweep.modes.size(), 2u);
    EXPECT_EQ(ec.sweep.modes[1], Mode::aris_sdma);
    EXPECT_EQ(ec.sweep.n_seeds, 2);
    EXPECT_EQ(ec.sweep.output_path, "results.csv");
}

TEST(Experiment, RejectsBadSweeps)
{
    EXPECT_THROW(parse_experiment_config(R"({"M": 4})"), ConfigError);
    EXPECT_THROW(parse_experiment_config(
                     R"({"sweep": {"parameter": "R_th", "values": [], "modes": ["aris_rsma"]}})"),
                 ConfigError);
    EXPECT_THROW(parse_experiment_config(
                     R"({"sweep": {"parameter": "R_th", "values": [1], "modes": ["noma"]}})"),
                 ConfigError);
    EXPECT_THROW(parse_experiment_config(
                     R"({"sweep": {"parameter": "L", "values": [2.5], "modes": ["aris_rsma"]}})"),
                 ConfigError);
    EXPECT_THROW(parse_experiment_config(
                     R"({"sweep": {"parameter": "a_max", "values": [-1], "modes": ["aris_rsma"]}})"),
                 ConfigError);
    try {
        parse_experiment_config("{\n  \"sweep\": {\n    \"parameter\": \"R_th\",\n"
                                "    \"values\": [1],\n    \"modes\": [\"aris_rsma\"],\n"
                                "    \"extra\": 1\n  }\n}");
        FAIL() << "unknown sweep key accepted";
    } catch (const ConfigError& e) {
        EXPECT_NE(std::string(e.what()).find("line 6"), std::string::npos) << e.what();
    }
}

TEST(Experiment, ApplySweepValue)
{
    const SystemConfig base = testing::reduced_config();
    EXPECT_EQ(apply_sweep_value(base, SweepParameter::R_th, 3.0).R_min,
              (std::vector<double>{3.0, 3.0}));
    EXPECT_EQ(apply_sweep_value(base, SweepParameter::a_max, 8.0).a_max, 8.0);
    EXPECT_EQ(apply_sweep_value(base, SweepParameter::L, 16.0).L, 16);
    EXPECT_NEAR(apply_sweep_value(base, SweepParameter::P_bs_max, 30.0).P_bs_max, 1.0, 1e-12);
    const SystemConfig q3 = apply_sweep_value(base, SweepParameter::Q, 3.0);
    EXPECT_EQ(q3.Q, 3);
    EXPECT_EQ(q3.rcs.size(), 3u);

    const SystemConfig moved = apply_sweep_value(base, SweepParameter::aris_x, 4.0);
    EXPECT_EQ(moved.geometry.aris.x, 4.0);
    ASSERT_EQ(moved.geometry.target_position.size(), 2u);
    SystemConfig pinned = base;
    anchor_targets(pinned);
    EXPECT_NEAR(moved.geometry.target_position[1].x, pinned.geometry.target_position[1].x, 1e-12);
    EXPECT_NEAR(moved.geometry.target_position[1].y, pinned.geometry.target_position[1].y, 1e-12);
}

TEST(Experiment, DerivedSeedsAreFrozenAndDistinct)
{
    EXPECT_EQ(derive_seed(1, 0, 0), 12793040940332582595ull);
    EXPECT_EQ(derive_seed(1, 0, 1), 7806873273932414515ull);
    EXPECT_EQ(derive_seed(7, 2, 3), 12322787970845588431ull);
    EXPECT_NE(derive_seed(1, 1, 0), derive_seed(1, 0, 1));
}

TEST(Experiment, RowFormatting)
{
    ResultRow row;
    row.param = "R_th";
    row.value = 2.0;
    row.mode = Mode::aris_sdma;
    row.seed = 17;
    row.min_sinr_db = -10.25;
    row.rates = {1.5, 2.0};
    row.bs_power = 10.0;
    row.aris_power = 0.1;
    row.outer_iterations = 4;
    row.seconds = 0.5;
    row.status = RunStatus::ok;
    EXPECT_EQ(results_header(2),
              "param,value,mode,seed,minSinr_dB,rate_u0,rate_u1,bsPower_W,arisPower_W,"
              "outerIters,wallTime_s,status");
    EXPECT_EQ(format_row(row), "R_th,2,aris_sdma,17,-10.25,1.5,2,10,0.1,4,0.5,ok");
}

TEST(Experiment, RunWritesOrderedRowsAndTraces)
{
    const auto dir = scratch_dir("run");
    const ExperimentConfig ec = parse_experiment_config(kSmall);
    ExperimentOptions opts;
    opts.out_dir = dir;
    opts.jobs = 2;
    const ExperimentReport rep = run_experiment(ec, opts);
    ASSERT_EQ(rep.rows.size(), 8u);
    EXPECT_EQ(rep.ok + rep.failed, 8);
    EXPECT_EQ(rep.csv_path, dir / "results.csv");
    // value -> mode -> seed order; modes on one (value, seed) share channels.
    EXPECT_EQ(rep.rows[0].value, 1.0);
    EXPECT_EQ(rep.rows[0].mode, Mode::aris_rsma);
    EXPECT_EQ(rep.rows[2].mode, Mode::aris_sdma);
    EXPECT_EQ(rep.rows[0].seed, rep.rows[2].seed);
    EXPECT_NE(rep.rows[0].seed, rep.rows[1].seed);
    EXPECT_EQ(rep.rows[4].value, 2.0);

    std::ifstream in(rep.csv_path);
    std::string line;
    int n = 0;
    while (std::getline(in, line))
        ++n;
    EXPECT_EQ(n, 9);
    int traces = 0;
    for (const auto& e : std::filesystem::directory_iterator(dir / "traces"))
        traces += e.path().extension() == ".jsonl";
    EXPECT_EQ(traces, 8);
}

TEST(Experiment, SummarizeSingleAndGroupedRows)
{
    std::istringstream one(
        "param,value,mode,seed,minSinr_dB,rate_u0,bsPower_W,arisPower_W,outerIters,wallTime_s,"
        "status\n"
        "R_th,1,aris_rsma,5,-10,1,10,0.1,3,0.2,ok\n");
    const auto s1 = summarize(one);
    ASSERT_EQ(s1.size(), 1u);
    EXPECT_EQ(s1[0].n, 1);
    EXPECT_EQ(s1[0].std_db, 0.0);
    EXPECT_EQ(s1[0].mean_db, -10.0);

    std::ostringstream csv;
    csv << results_header(1) << '\n';
    for (int v = 1; v <= 3; ++v)
        for (const char* mode : {"aris_rsma", "aris_sdma"})
            for (int s = 0; s < 5; ++s)
                csv << "R_th," << v << ',' << mode << ',' << s << ',' << -(v + s) << ",1,10,0.1,3,0.2,"
                    << (s == 4 ? "infeasible" : "ok") << '\n';
    std::istringstream many(csv.str());
    const auto rows = summarize(many);
    ASSERT_EQ(rows.size(), 6u);
    EXPECT_EQ(rows[0].n, 5);
    EXPECT_EQ(rows[0].n_ok, 4);
    EXPECT_DOUBLE_EQ(rows[0].mean_db, -3.0);
    EXPECT_NEAR(rows[0].std_db, std::sqrt(2.5), 1e-12);
    EXPECT_DOUBLE_EQ(rows[0].min_db, -5.0);
    EXPECT_EQ(rows[1].mode, "aris_sdma");

    std::ostringstream out;
    write_summary(out, rows);
    EXPECT_EQ(out.str().substr(0, out.str().find('\n')),
              "param,value,mode,n,n_ok,mean_dB,std_dB,min_dB");
}

TEST(Experiment, SummarizeRejectsMalformedInput)
{
    std::istringstream missing("param,value,mode\nR_th,1,aris_rsma\n");
    EXPECT_THROW(summarize(missing), ConfigError);
    std::istringstream bad(results_header(1) + "\nR_th,1,aris_rsma,0,abc,1,10,0.1,3,0.2,ok\n");
    EXPECT_THROW(summarize(bad), ConfigError);
}

} // namespace
} // namespace arisrsma
