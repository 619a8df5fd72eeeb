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
/// \file experiment.hpp
///
/// Monte-Carlo sweeps over one system parameter, a results CSV with one row
/// per (value, mode, seed), JSON-lines traces and a summary table.
///
/// Results CSV columns, in order:
///
///   param, value, mode, seed, minSinr_dB, rate_u0 .. rate_u{U-1},
///   bsPower_W, arisPower_W, outerIters, wallTime_s, status
///
/// where seed is the derived channel seed and status is one of ok,
/// infeasible, degraded. Rows are ordered by sweep value, then mode, then
/// seed, independently of the number of workers.
///
#ifndef ARISRSMA_EXPERIMENT_HPP
#define ARISRSMA_EXPERIMENT_HPP

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "arisrsma/driver.hpp"
#include "arisrsma/scenario.hpp"

namespace arisrsma
{

enum class SweepParameter
{
    R_th,      ///< common rate threshold, bits/s/Hz
    a_max,     ///< amplification cap
    aris_x,    ///< ARIS x coordinate, m (targets stay at fixed positions)
    Q,         ///< number of targets
    P_bs_max,  ///< BS power budget, dBm
    L          ///< ARIS elements
};

const char* to_string(SweepParameter p);
/// Throws ConfigError for unknown names.
SweepParameter sweep_parameter_from_string(std::string_view name);

struct SweepSpec
{
    SweepParameter parameter = SweepParameter::R_th;
    std::vector<double> values;
    std::vector<Mode> modes;
    int n_seeds = 1;
    /// Results CSV; relative paths resolve against the output directory.
    std::filesystem::path output_path = "results.csv";
};

struct ExperimentConfig
{
    SystemConfig system;
    SweepSpec sweep;
};

/// A system configuration object with an additional "sweep" member:
///   {"parameter": "R_th", "values": [1, 2, 3],
///    "modes": ["aris_rsma", "aris_sdma"], "n_seeds": 20,
///    "output": "results.csv"}
/// Throws ConfigError (with a line number when possible).
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

/// \p base with the swept parameter set to \p value. Moving the ARIS first
/// pins the targets at their current absolute positions.
SystemConfig apply_sweep_value(const SystemConfig& base, SweepParameter p, double value);

/// Channel seed of draw \p s at sweep point \p k (splitmix64 chain). All
/// modes of one (k, s) share the same channels.
std::uint64_t derive_seed(std::uint64_t config_seed, std::uint64_t k, std::uint64_t s);

struct ResultRow
{
    std::string param;
    double value = 0.0;
    Mode mode = Mode::aris_rsma;
    std::uint64_t seed = 0;
    double min_sinr_db = 0.0;
    std::vector<double> rates;
    double bs_power = 0.0;
    double aris_power = 0.0;
    int outer_iterations = 0;
    double seconds = 0.0;
    RunStatus status = RunStatus::degraded;
};

ResultRow make_row(SweepParameter p, double value, std::uint64_t seed, const RunResult& r);

/// Header line for \p users user-rate columns (no trailing newline).
std::string results_header(Index users);
/// One CSV line (no trailing newline). Numbers use a fixed, locale-free
/// format so that identical runs give identical bytes.
std::string format_row(const ResultRow& row);

/// One JSON object per outer iteration.
void write_trace(std::ostream& os, const RunResult& r);

struct ExperimentOptions
{
    int jobs = 1;
    std::filesystem::path out_dir = ".";
    bool write_traces = true;
    /// 0 silent, 1 outer-iteration log, 2 also solver log.
    int verbosity = 0;
};

struct ExperimentReport
{
    std::vector<ResultRow> rows;
    std::filesystem::path csv_path;
    int ok = 0;
    int failed = 0;  ///< rows whose status is not ok
};

/// Runs every (value, mode, seed) point. Infeasible points are recorded,
/// never aborted. Throws ConfigError when a swept value is invalid.
ExperimentReport run_experiment(const ExperimentConfig& cfg, const ExperimentOptions& opts);

struct SummaryRow
{
    std::string param;
    double value = 0.0;
    std::string mode;
    int n = 0;
    int n_ok = 0;
    double mean_db = 0.0;
    double std_db = 0.0;  ///< sample standard deviation (0 for one row)
    double min_db = 0.0;
};

/// Per (value, mode) statistics of minSinr_dB over all rows, in order of
/// first appearance. Throws ConfigError on a missing column or a malformed
/// number.
std::vector<SummaryRow> summarize(std::istream& results_csv);
std::vector<SummaryRow> summarize(const std::filesystem::path& results_csv);

/// Long-format CSV: param,value,mode,n,n_ok,mean_dB,std_dB,min_dB.
void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows);

} // namespace arisrsma

#endif // ARISRSMA_EXPERIMENT_HPP
