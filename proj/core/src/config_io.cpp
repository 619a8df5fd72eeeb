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

#include "arisrsma/config_io.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <set>
#include <sstream>

#include "json_support.hpp"

namespace arisrsma
{

namespace detail
{

using nlohmann::json;

int LineLocator::line_of_offset(std::size_t byte) const
{
    const std::size_t end = std::min(byte, text_.size());
    return 1 + static_cast<int>(std::count(text_.begin(), text_.begin() + static_cast<long>(end), '\n'));
}

int LineLocator::line_of_key(const std::string& key) const
{
    const std::string needle = "\"" + key + "\"";
    const auto pos = text_.find(needle);
    if (pos == std::string::npos)
        return 0;
    return line_of_offset(pos);
}

void LineLocator::fail(const std::string& key, const std::string& what) const
{
    const int line = key.empty() ? 0 : line_of_key(key);
    std::ostringstream msg;
    if (line > 0)
        msg << "line " << line << ": ";
    msg << what;
    throw ConfigError(msg.str());
}

json parse_json(const LineLocator& loc)
{
    try {
        return json::parse(loc.text());
    } catch (const json::parse_error& e) {
        std::ostringstream msg;
        msg << "line " << loc.line_of_offset(e.byte > 0 ? e.byte - 1 : 0)
            << ": malformed JSON (" << e.what() << ")";
        throw ConfigError(msg.str());
    }
}

namespace
{

double number(const json& v, const std::string& key, const LineLocator& loc)
{
    if (v.is_string() && (v.get<std::string>() == "inf" || v.get<std::string>() == "Infinity"))
        return std::numeric_limits<double>::infinity();
    if (!v.is_number())
        loc.fail(key, key + " must be a number");
    return v.get<double>();
}

Index integer(const json& v, const std::string& key, const LineLocator& loc)
{
    if (!v.is_number_integer())
        loc.fail(key, key + " must be an integer");
    return v.get<Index>();
}

std::vector<double> number_list(const json& v, const std::string& key, const LineLocator& loc)
{
    std::vector<double> out;
    if (v.is_array()) {
        for (const auto& e : v)
            out.push_back(number(e, key, loc));
    } else {
        out.push_back(number(v, key, loc));
    }
    return out;
}

Point2 point(const json& v, const std::string& key, const LineLocator& loc)
{
    if (!v.is_array() || v.size() != 2)
        loc.fail(key, key + " must be a two-element array [x, y]");
    return {number(v[0], key, loc), number(v[1], key, loc)};
}

void reject_unknown(const json& obj, const std::set<std::string>& known, const LineLocator& loc)
{
    for (const auto& [k, _] : obj.items())
        if (!known.contains(k))
            loc.fail(k, "unknown configuration key \"" + k + "\"");
}

// Broadcast a scalar or check a list against the expected length.
std::vector<double> sized(std::vector<double> v, Index n, const std::string& key,
                          const LineLocator& loc)
{
    if (v.size() == 1 && n > 1)
        v.assign(static_cast<std::size_t>(n), v.front());
    if (static_cast<Index>(v.size()) != n)
        loc.fail(key, key + " must have " + std::to_string(n) + " entries");
    return v;
}

} // namespace

SystemConfig system_config_from_json(const json& obj, const LineLocator& loc)
{
    if (!obj.is_object())
        loc.fail("", "system configuration must be a JSON object");

    static const std::set<std::string> known{
        "M", "L", "U", "Q", "P_bs_max_dBm", "P_ris_max_dBm", "a_max", "sigma_u2_dBm",
        "sigma_z2_dBm", "sigma_r2_dBm", "R_th", "R_min", "target_angles_deg",
        "pathloss_exponents", "geometry", "rcs", "C0_dB", "d0", "rician_kappa", "seed",
        "bcd_tol", "max_outer", "max_srocr"};
    reject_unknown(obj, known, loc);

    SystemConfig cfg;
    auto get = [&](const char* key) -> const json* {
        auto it = obj.find(key);
        return it == obj.end() ? nullptr : &*it;
    };

    if (auto* v = get("M")) cfg.M = integer(*v, "M", loc);
    if (auto* v = get("L")) cfg.L = integer(*v, "L", loc);
    if (auto* v = get("U")) resize_users(cfg, integer(*v, "U", loc));
    if (auto* v = get("Q")) {
        const Index Q = integer(*v, "Q", loc);
        if (Q < 1 || Q > static_cast<Index>(default_target_angle_pool().size()))
            loc.fail("Q", "Q out of range");
        resize_targets(cfg, Q, default_target_angle_pool());
    }
    if (cfg.M < 1 || cfg.L < 1 || cfg.U < 1)
        loc.fail("M", "M, L, U must all be >= 1");

    if (auto* v = get("P_bs_max_dBm")) cfg.P_bs_max = dbm_to_watt(number(*v, "P_bs_max_dBm", loc));
    if (auto* v = get("P_ris_max_dBm")) cfg.P_ris_max = dbm_to_watt(number(*v, "P_ris_max_dBm", loc));
    if (auto* v = get("a_max")) cfg.a_max = number(*v, "a_max", loc);
    if (auto* v = get("sigma_u2_dBm")) cfg.sigma_u2 = dbm_to_watt(number(*v, "sigma_u2_dBm", loc));
    if (auto* v = get("sigma_z2_dBm")) cfg.sigma_z2 = dbm_to_watt(number(*v, "sigma_z2_dBm", loc));
    if (auto* v = get("sigma_r2_dBm")) cfg.sigma_r2 = dbm_to_watt(number(*v, "sigma_r2_dBm", loc));

    if (get("R_th") && get("R_min"))
        loc.fail("R_min", "give either R_th or R_min, not both");
    if (auto* v = get("R_th"))
        cfg.R_min.assign(static_cast<std::size_t>(cfg.U), number(*v, "R_th", loc));
    if (auto* v = get("R_min"))
        cfg.R_min = sized(number_list(*v, "R_min", loc), cfg.U, "R_min", loc);

    if (auto* v = get("target_angles_deg")) {
        auto deg = sized(number_list(*v, "target_angles_deg", loc), cfg.Q, "target_angles_deg", loc);
        for (auto& a : deg)
            a *= kPi / 180.0;
        cfg.target_angles = deg;
    }
    if (auto* v = get("rcs"))
        cfg.rcs = sized(number_list(*v, "rcs", loc), cfg.Q, "rcs", loc);

    if (auto* v = get("pathloss_exponents")) {
        if (!v->is_object())
            loc.fail("pathloss_exponents", "pathloss_exponents must be an object");
        reject_unknown(*v, {"bs_ris", "bs_user", "ris_user", "ris_target"}, loc);
        if (v->contains("bs_ris")) cfg.pathloss.bs_ris = number((*v)["bs_ris"], "bs_ris", loc);
        if (v->contains("bs_user")) cfg.pathloss.bs_user = number((*v)["bs_user"], "bs_user", loc);
        if (v->contains("ris_user")) cfg.pathloss.ris_user = number((*v)["ris_user"], "ris_user", loc);
        if (v->contains("ris_target"))
            cfg.pathloss.ris_target = number((*v)["ris_target"], "ris_target", loc);
    }

    if (auto* v = get("geometry")) {
        if (!v->is_object())
            loc.fail("geometry", "geometry must be an object");
        reject_unknown(*v,
                       {"bs", "aris", "user_center", "user_radius", "target_distance",
                        "target_position"},
                       loc);
        if (v->contains("bs")) cfg.geometry.bs = point((*v)["bs"], "bs", loc);
        if (v->contains("aris")) cfg.geometry.aris = point((*v)["aris"], "aris", loc);
        if (v->contains("user_center"))
            cfg.geometry.user_center = point((*v)["user_center"], "user_center", loc);
        if (v->contains("user_radius"))
            cfg.geometry.user_radius = number((*v)["user_radius"], "user_radius", loc);
        if (v->contains("target_distance"))
            cfg.geometry.target_distance = sized(
                number_list((*v)["target_distance"], "target_distance", loc), cfg.Q,
                "target_distance", loc);
        if (v->contains("target_position")) {
            const auto& list = (*v)["target_position"];
            if (!list.is_array())
                loc.fail("target_position", "target_position must be a list of [x, y] points");
            cfg.geometry.target_position.clear();
            for (const auto& item : list)
                cfg.geometry.target_position.push_back(point(item, "target_position", loc));
        }
    }

    if (auto* v = get("C0_dB")) cfg.C0 = from_db(number(*v, "C0_dB", loc));
    if (auto* v = get("d0")) cfg.d0 = number(*v, "d0", loc);
    if (auto* v = get("rician_kappa")) cfg.rician_kappa = number(*v, "rician_kappa", loc);
    if (auto* v = get("seed")) {
        if (!v->is_number_unsigned() && !v->is_number_integer())
            loc.fail("seed", "seed must be a non-negative integer");
        cfg.seed = v->get<std::uint64_t>();
    }
    if (auto* v = get("bcd_tol")) cfg.bcd_tol = number(*v, "bcd_tol", loc);
    if (auto* v = get("max_outer")) cfg.max_outer = static_cast<int>(integer(*v, "max_outer", loc));
    if (auto* v = get("max_srocr")) cfg.max_srocr = static_cast<int>(integer(*v, "max_srocr", loc));

    try {
        validate(cfg);
    } catch (const ConfigError& e) {
        loc.fail("", e.what());
    }
    return cfg;
}

json system_config_to_json(const SystemConfig& cfg)
{
    json j;
    j["M"] = cfg.M;
    j["L"] = cfg.L;
    j["U"] = cfg.U;
    j["Q"] = cfg.Q;
    j["P_bs_max_dBm"] = watt_to_dbm(cfg.P_bs_max);
    j["P_ris_max_dBm"] = watt_to_dbm(cfg.P_ris_max);
    j["a_max"] = cfg.a_max;
    j["sigma_u2_dBm"] = watt_to_dbm(cfg.sigma_u2);
    j["sigma_z2_dBm"] = watt_to_dbm(cfg.sigma_z2);
    j["sigma_r2_dBm"] = watt_to_dbm(cfg.sigma_r2);
    j["R_min"] = cfg.R_min;
    std::vector<double> deg;
    for (double a : cfg.target_angles)
        deg.push_back(a * 180.0 / kPi);
    j["target_angles_deg"] = deg;
    j["pathloss_exponents"] = {{"bs_ris", cfg.pathloss.bs_ris},
                               {"bs_user", cfg.pathloss.bs_user},
                               {"ris_user", cfg.pathloss.ris_user},
                               {"ris_target", cfg.pathloss.ris_target}};
    const auto& g = cfg.geometry;
    j["geometry"] = {{"bs", {g.bs.x, g.bs.y}},
                     {"aris", {g.aris.x, g.aris.y}},
                     {"user_center", {g.user_center.x, g.user_center.y}},
                     {"user_radius", g.user_radius},
                     {"target_distance", g.target_distance}};
    if (!g.target_position.empty()) {
        json pos = json::array();
        for (const auto& p : g.target_position)
            pos.push_back({p.x, p.y});
        j["geometry"]["target_position"] = pos;
    }
    j["rcs"] = cfg.rcs;
    j["C0_dB"] = to_db(cfg.C0);
    j["d0"] = cfg.d0;
    if (std::isinf(cfg.rician_kappa))
        j["rician_kappa"] = "inf";
    else
        j["rician_kappa"] = cfg.rician_kappa;
    j["seed"] = cfg.seed;
    j["bcd_tol"] = cfg.bcd_tol;
    j["max_outer"] = cfg.max_outer;
    j["max_srocr"] = cfg.max_srocr;
    return j;
}

} // namespace detail

SystemConfig parse_system_config(const std::string& json_text)
{
    const detail::LineLocator loc(json_text);
    return detail::system_config_from_json(detail::parse_json(loc), loc);
}

SystemConfig load_system_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open configuration file " + path.string());
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_system_config(buf.str());
}

std::string to_json(const SystemConfig& cfg)
{
    return detail::system_config_to_json(cfg).dump(2);
}

} // namespace arisrsma
