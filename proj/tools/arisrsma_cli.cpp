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

// Command-line front end:
//
//   arisrsma run <config.json> [--jobs N] [--out DIR]
//   arisrsma summarize <results.csv> [--out FILE]
//
// Exit codes: 0 success, 1 configuration or input error, 2 every point of
// the sweep failed. ARISRSMA_VERBOSE=1 logs outer iterations to stderr,
// ARISRSMA_VERBOSE=2 adds the conic solver log.

#include <cstdlib>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "arisrsma/experiment.hpp"

namespace
{

int verbosity_from_env()
{
    const char* v = std::getenv("ARISRSMA_VERBOSE");
    if (v == nullptr || *v == '\0')
        return 0;
    try {
        return std::stoi(v);
    } catch (const std::exception&) {
        return 1;
    }
}

int cmd_run(const std::string& config, int jobs, const std::string& out_dir)
{
    arisrsma::ExperimentConfig ec;
    try {
        ec = arisrsma::load_experiment_config(config);
    } catch (const arisrsma::ConfigError& e) {
        std::cerr << config << ": " << e.what() << '\n';
        return 1;
    }
    arisrsma::ExperimentOptions opts;
    opts.jobs = jobs;
    opts.out_dir = out_dir;
    opts.verbosity = verbosity_from_env();

    const arisrsma::ExperimentReport rep = arisrsma::run_experiment(ec, opts);
    std::cerr << "wrote " << rep.rows.size() << " rows to " << rep.csv_path.string() << " ("
              << rep.ok << " ok, " << rep.failed << " not ok)\n";
    return rep.ok == 0 ? 2 : 0;
}

int cmd_summarize(const std::string& csv, const std::string& out)
{
    std::vector<arisrsma::SummaryRow> rows;
    try {
        rows = arisrsma::summarize(std::filesystem::path(csv));
    } catch (const arisrsma::ConfigError& e) {
        std::cerr << csv << ": " << e.what() << '\n';
        return 1;
    }
    if (out.empty()) {
        arisrsma::write_summary(std::cout, rows);
        return 0;
    }
    std::ofstream os(out, std::ios::binary);
    if (!os) {
        std::cerr << "cannot write " << out << '\n';
        return 1;
    }
    arisrsma::write_summary(os, rows);
    return 0;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Joint transceiver, rate-splitting and active-RIS design for multi-target ISAC"};
    app.require_subcommand(1);

    std::string config;
    int jobs = 1;
    std::string out_dir = ".";
    auto* run = app.add_subcommand("run", "run a parameter sweep");
    run->add_option("config", config, "experiment JSON (system parameters plus a sweep section)")
        ->required()
        ->check(CLI::ExistingFile);
    run->add_option("--jobs,-j", jobs, "worker threads (0 = hardware concurrency)")
        ->check(CLI::NonNegativeNumber);
    run->add_option("--out,-o", out_dir, "output directory for the CSV and traces");

    std::string csv;
    std::string summary_out;
    auto* sum = app.add_subcommand("summarize", "per (value, mode) statistics of a results CSV");
    sum->add_option("results", csv, "results CSV written by run")->required()->check(CLI::ExistingFile);
    sum->add_option("--out,-o", summary_out, "write the summary here instead of stdout");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*run)
            return cmd_run(config, jobs, out_dir);
        return cmd_summarize(csv, summary_out);
    } catch (const arisrsma::ConfigError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}
