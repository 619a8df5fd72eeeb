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

#include "arisrsma/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

#include "arisrsma/config_io.hpp"
#include "json_support.hpp"

namespace arisrsma
{

namespace
{

using nlohmann::json;

constexpr SweepParameter kAllParameters[] = {SweepParameter::R_th,   SweepParameter::a_max,
                                             SweepParameter::aris_x, SweepParameter::Q,
                                             SweepParameter::P_bs_max, SweepParameter::L};

std::uint64_t splitmix64(std::uint64_t x)
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::string number_text(double v)
{
    if (std::isnan(v))
        return "nan";
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

json finite_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

int integer_value(double v, const char* what)
{
    const double r = std::round(v);
    if (std::abs(v - r) > 1e-9 || r < 1.0)
        throw ConfigError(std::string(what) + " sweep values must be positive integers");
    return static_cast<int>(r);
}

std::vector<std::string> split_csv(const std::string& line)
{
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ','))
        out.push_back(cell);
    if (!line.empty() && line.back() == ',')
        out.emplace_back();
    return out;
}

double parse_number(const std::string& s, int line)
{
    if (s == "nan")
        return std::numeric_limits<double>::quiet_NaN();
    if (s == "inf")
        return std::numeric_limits<double>::infinity();
    if (s == "-inf")
        return -std::numeric_limits<double>::infinity();
    double v = 0.0;
    const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
    if (res.ec != std::errc() || res.ptr != s.data() + s.size())
        throw ConfigError("line " + std::to_string(line) + ": malformed number \"" + s + "\"");
    return v;
}

} // namespace

const char* to_string(SweepParameter p)
{
    switch (p) {
    case SweepParameter::R_th: return "R_th";
    case SweepParameter::a_max: return "a_max";
    case SweepParameter::aris_x: return "aris_x";
    case SweepParameter::Q: return "Q";
    case SweepParameter::P_bs_max: return "P_bs_max";
    case SweepParameter::L: return "L";
    }
    return "?";
}

SweepParameter sweep_parameter_from_string(std::string_view name)
{
    for (SweepParameter p : kAllParameters)
        if (name == to_string(p))
            return p;
    throw ConfigError("unknown sweep parameter \"" + std::string(name) +
                      "\" (expected R_th, a_max, aris_x, Q, P_bs_max or L)");
}

ExperimentConfig parse_experiment_config(const std::string& json_text)
{
    const detail::LineLocator loc(json_text);
    json obj = detail::parse_json(loc);
    if (!obj.is_object())
        loc.fail("", "experiment configuration must be a JSON object");
    if (!obj.contains("sweep"))
        loc.fail("", "missing \"sweep\" section");
    const json sweep = obj["sweep"];
    obj.erase("sweep");

    ExperimentConfig ec;
    ec.system = detail::system_config_from_json(obj, loc);

    if (!sweep.is_object())
        loc.fail("sweep", "sweep must be an object");
    for (const auto& [k, _] : sweep.items())
        if (k != "parameter" && k != "values" && k != "modes" && k != "n_seeds" && k != "output")
            loc.fail(k, "unknown sweep key \"" + k + "\"");

    SweepSpec& sp = ec.sweep;
    if (!sweep.contains("parameter") || !sweep["parameter"].is_string())
        loc.fail("parameter", "sweep.parameter must be a string");
    try {
        sp.parameter = sweep_parameter_from_string(sweep["parameter"].get<std::string>());
    } catch (const ConfigError& e) {
        loc.fail("parameter", e.what());
    }

    if (!sweep.contains("values") || !sweep["values"].is_array() || sweep["values"].empty())
        loc.fail("values", "sweep.values must be a non-empty list of numbers");
    for (const auto& v : sweep["values"]) {
        if (!v.is_number())
            loc.fail("values", "sweep.values must be a non-empty list of numbers");
        sp.values.push_back(v.get<double>());
    }

    if (!sweep.contains("modes") || !sweep["modes"].is_array() || sweep["modes"].empty())
        loc.fail("modes", "sweep.modes must be a non-empty list of mode names");
    for (const auto& m : sweep["modes"]) {
        if (!m.is_string())
            loc.fail("modes", "sweep.modes must be a non-empty list of mode names");
        try {
            sp.modes.push_back(mode_from_string(m.get<std::string>()));
        } catch (const std::invalid_argument& e) {
            loc.fail("modes", e.what());
        }
    }

    if (sweep.contains("n_seeds")) {
        const json& n = sweep["n_seeds"];
        if (!n.is_number_integer() || n.get<long long>() < 1)
            loc.fail("n_seeds", "sweep.n_seeds must be an integer >= 1");
        sp.n_seeds = n.get<int>();
    }
    if (sweep.contains("output")) {
        if (!sweep["output"].is_string() || sweep["output"].get<std::string>().empty())
            loc.fail("output", "sweep.output must be a non-empty path");
        sp.output_path = sweep["output"].get<std::string>();
    }

    // Every point must be a valid configuration before anything runs.
    for (double v : sp.values) {
        try {
            validate(apply_sweep_value(ec.system, sp.parameter, v));
        } catch (const ConfigError& e) {
            loc.fail("values", std::string("sweep value ") + number_text(v) + ": " + e.what());
        }
    }
    return ec;
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_experiment_config(ss.str());
}

SystemConfig apply_sweep_value(const SystemConfig& base, SweepParameter p, double value)
{
    SystemConfig cfg = base;
    switch (p) {
    case SweepParameter::R_th:
        cfg.R_min.assign(static_cast<std::size_t>(cfg.U), value);
        break;
    case SweepParameter::a_max: cfg.a_max = value; break;
    case SweepParameter::aris_x:
        if (cfg.geometry.target_position.empty())
            anchor_targets(cfg);
        cfg.geometry.aris.x = value;
        break;
    case SweepParameter::Q: {
        const int Q = integer_value(value, "Q");
        if (Q > static_cast<int>(default_target_angle_pool().size()))
            throw ConfigError("Q sweep value exceeds the target angle pool");
        resize_targets(cfg, Q, default_target_angle_pool());
        break;
    }
    case SweepParameter::P_bs_max: cfg.P_bs_max = dbm_to_watt(value); break;
    case SweepParameter::L: cfg.L = integer_value(value, "L"); break;
    }
    return cfg;
}

std::uint64_t derive_seed(std::uint64_t config_seed, std::uint64_t k, std::uint64_t s)
{
    return splitmix64(splitmix64(splitmix64(config_seed) ^ k) ^ s);
}

ResultRow make_row(SweepParameter p, double value, std::uint64_t seed, const RunResult& r)
{
    ResultRow row;
    row.param = to_string(p);
    row.value = value;
    row.mode = r.mode;
    row.seed = seed;
    row.min_sinr_db = r.min_sinr_db;
    row.rates = r.rates;
    row.bs_power = r.bs_power;
    row.aris_power = r.aris_power;
    row.outer_iterations = r.outer_iterations;
    row.seconds = r.seconds;
    row.status = r.status;
    return row;
}

std::string results_header(Index users)
{
    std::string h = "param,value,mode,seed,minSinr_dB";
    for (Index u = 0; u < users; ++u)
        h += ",rate_u" + std::to_string(u);
    h += ",bsPower_W,arisPower_W,outerIters,wallTime_s,status";
    return h;
}

std::string format_row(const ResultRow& row)
{
    std::string s = row.param + "," + number_text(row.value) + "," + to_string(row.mode) + "," +
                    std::to_string(row.seed) + "," + number_text(row.min_sinr_db);
    for (double r : row.rates)
        s += "," + number_text(r);
    s += "," + number_text(row.bs_power) + "," + number_text(row.aris_power) + "," +
         std::to_string(row.outer_iterations) + "," + number_text(row.seconds) + "," +
         to_string(row.status);
    return s;
}

void write_trace(std::ostream& os, const RunResult& r)
{
    for (const OuterRecord& rec : r.trace.outer) {
        json j;
        j["iteration"] = rec.iteration;
        j["gamma_p1_dB"] = finite_or_null(to_db(rec.gamma_p1));
        j["gamma_p2_dB"] = finite_or_null(to_db(rec.gamma_p2));
        j["gamma_p3_dB"] = finite_or_null(to_db(rec.gamma_p3));
        j["p2_status"] = to_string(rec.p2_status);
        j["p3_status"] = to_string(rec.p3_status);
        j["p2_accepted"] = rec.p2_accepted;
        j["p3_accepted"] = rec.p3_accepted;
        j["p2_inner_iterations"] = rec.p2_inner.size();
        j["p3_inner_iterations"] = rec.p3_inner.size();
        j["p2_rank_ratios"] = rec.p2_rank_ratios;
        j["p3_rank_ratio"] = rec.p3_rank_ratio;
        j["feasibility_worst"] = rec.feasibility_worst;
        j["seconds"] = rec.seconds;
        os << j.dump() << '\n';
    }
}

ExperimentReport run_experiment(const ExperimentConfig& ec, const ExperimentOptions& opts)
{
    const SweepSpec& sp = ec.sweep;
    if (sp.values.empty() || sp.modes.empty() || sp.n_seeds < 1)
        throw ConfigError("sweep needs values, modes and n_seeds >= 1");

    struct Task
    {
        std::size_t k;
        Mode mode;
        int s;
    };
    std::vector<Task> tasks;
    std::vector<SystemConfig> point_cfg;
    for (std::size_t k = 0; k < sp.values.size(); ++k) {
        point_cfg.push_back(apply_sweep_value(ec.system, sp.parameter, sp.values[k]));
        validate(point_cfg.back());
        for (Mode m : sp.modes)
            for (int s = 0; s < sp.n_seeds; ++s)
                tasks.push_back({k, m, s});
    }

    std::filesystem::create_directories(opts.out_dir);
    const std::filesystem::path trace_dir = opts.out_dir / "traces";
    if (opts.write_traces)
        std::filesystem::create_directories(trace_dir);

    ExperimentReport report;
    report.csv_path = sp.output_path.is_absolute() ? sp.output_path : opts.out_dir / sp.output_path;
    if (report.csv_path.has_parent_path())
        std::filesystem::create_directories(report.csv_path.parent_path());
    std::ofstream csv(report.csv_path, std::ios::binary);
    if (!csv)
        throw std::runtime_error("cannot write " + report.csv_path.string());
    csv << results_header(ec.system.U) << '\n';

    auto run_task = [&](const Task& t) {
        const SystemConfig& cfg = point_cfg[t.k];
        const std::uint64_t seed = derive_seed(ec.system.seed, t.k, static_cast<std::uint64_t>(t.s));
        BcdOptions bo = BcdOptions::from_config(cfg);
        bo.verbose = opts.verbosity >= 1;
        bo.srocr.solver.verbose = opts.verbosity >= 2;
        RunResult r;
        try {
            const ChannelSet ch = sample_channels(cfg, seed);
            r = run_baseline(t.mode, cfg, ch, bo);
        } catch (const std::exception& e) {
            r = RunResult{};
            r.mode = t.mode;
            r.status = RunStatus::degraded;
            r.min_sinr_db = std::numeric_limits<double>::quiet_NaN();
            r.rates.assign(static_cast<std::size_t>(cfg.U),
                           std::numeric_limits<double>::quiet_NaN());
            r.message = e.what();
        }
        if (r.rates.size() != static_cast<std::size_t>(cfg.U))
            r.rates.resize(static_cast<std::size_t>(cfg.U), 0.0);
        if (opts.write_traces) {
            const std::string name = std::string(to_string(sp.parameter)) + "-" +
                                     std::to_string(t.k) + "-" + to_string(t.mode) + "-" +
                                     std::to_string(t.s) + ".jsonl";
            std::ofstream tr(trace_dir / name, std::ios::binary);
            write_trace(tr, r);
        }
        return make_row(sp.parameter, sp.values[t.k], seed, r);
    };

    std::vector<std::optional<ResultRow>> done(tasks.size());
    std::mutex mu;
    std::condition_variable cv;
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (;;) {
            const std::size_t i = next.fetch_add(1);
            if (i >= tasks.size())
                return;
            ResultRow row = run_task(tasks[i]);
            {
                std::lock_guard<std::mutex> lock(mu);
                done[i] = std::move(row);
            }
            cv.notify_all();
        }
    };

    int jobs = opts.jobs > 0 ? opts.jobs : static_cast<int>(std::thread::hardware_concurrency());
    jobs = std::clamp(jobs, 1, static_cast<int>(std::max<std::size_t>(1, tasks.size())));
    std::vector<std::thread> pool;
    for (int j = 0; j < jobs; ++j)
        pool.emplace_back(worker);

    // Single sink: rows leave in task order as soon as their prefix is done.
    for (std::size_t i = 0; i < tasks.size(); ++i) {
        std::unique_lock<std::mutex> lock(mu);
        cv.wait(lock, [&] { return done[i].has_value(); });
        ResultRow row = std::move(*done[i]);
        lock.unlock();
        csv << format_row(row) << '\n';
        csv.flush();
        (row.status == RunStatus::ok ? report.ok : report.failed) += 1;
        report.rows.push_back(std::move(row));
    }
    for (auto& th : pool)
        th.join();
    return report;
}

std::vector<SummaryRow> summarize(std::istream& in)
{
    std::string line;
    if (!std::getline(in, line))
        throw ConfigError("results CSV is empty");
    const std::vector<std::string> head = split_csv(line);
    auto column = [&](const char* name) {
        const auto it = std::find(head.begin(), head.end(), name);
        if (it == head.end())
            throw ConfigError(std::string("results CSV lacks column \"") + name + "\"");
        return static_cast<std::size_t>(it - head.begin());
    };
    const std::size_t c_param = column("param");
    const std::size_t c_value = column("value");
    const std::size_t c_mode = column("mode");
    const std::size_t c_sinr = column("minSinr_dB");
    const std::size_t c_status = column("status");

    struct Acc
    {
        SummaryRow row;
        std::vector<double> x;
    };
    std::vector<Acc> groups;
    std::map<std::pair<std::string, std::string>, std::size_t> index;
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (line.empty())
            continue;
        const std::vector<std::string> cells = split_csv(line);
        if (cells.size() != head.size())
            throw ConfigError("line " + std::to_string(lineno) + ": expected " +
                              std::to_string(head.size()) + " fields");
        const auto key = std::make_pair(cells[c_value], cells[c_mode]);
        auto it = index.find(key);
        if (it == index.end()) {
            it = index.emplace(key, groups.size()).first;
            Acc a;
            a.row.param = cells[c_param];
            a.row.value = parse_number(cells[c_value], lineno);
            a.row.mode = cells[c_mode];
            groups.push_back(std::move(a));
        }
        Acc& a = groups[it->second];
        a.x.push_back(parse_number(cells[c_sinr], lineno));
        a.row.n += 1;
        if (cells[c_status] == "ok")
            a.row.n_ok += 1;
    }

    std::vector<SummaryRow> out;
    for (Acc& a : groups) {
        const double n = static_cast<double>(a.x.size());
        double mean = 0.0;
        for (double v : a.x)
            mean += v;
        mean /= n;
        double ss = 0.0;
        for (double v : a.x)
            ss += (v - mean) * (v - mean);
        a.row.mean_db = mean;
        a.row.std_db = a.x.size() > 1 ? std::sqrt(ss / (n - 1.0)) : 0.0;
        a.row.min_db = *std::min_element(a.x.begin(), a.x.end());
        out.push_back(a.row);
    }
    return out;
}

std::vector<SummaryRow> summarize(const std::filesystem::path& results_csv)
{
    std::ifstream in(results_csv, std::ios::binary);
    if (!in)
        throw ConfigError("cannot open " + results_csv.string());
    return summarize(in);
}

void write_summary(std::ostream& os, const std::vector<SummaryRow>& rows)
{
    os << "param,value,mode,n,n_ok,mean_dB,std_dB,min_dB\n";
    for (const SummaryRow& r : rows)
        os << r.param << ',' << number_text(r.value) << ',' << r.mode << ',' << r.n << ','
           << r.n_ok << ',' << number_text(r.mean_db) << ',' << number_text(r.std_db) << ','
           << number_text(r.min_db) << '\n';
}

} // namespace arisrsma
