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

#include "arisrsma/scenario.hpp"

#include <cmath>
#include <random>
#include <sstream>

namespace arisrsma
{

namespace
{

void require(bool ok, const std::string& what)
{
    if (!ok)
        throw ConfigError(what);
}

// Unit-variance circularly symmetric complex Gaussian.
cd crandn(std::mt19937_64& rng)
{
    std::normal_distribution<double> n(0.0, std::sqrt(0.5));
    const double re = n(rng);
    const double im = n(rng);
    return {re, im};
}

CMat crandn(std::mt19937_64& rng, Index rows, Index cols)
{
    CMat out(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i)
            out(i, j) = crandn(rng);
    return out;
}

double checked_distance(const Point2& a, const Point2& b, const char* link)
{
    const double d = distance(a, b);
    if (!(d > 0.0)) {
        std::ostringstream msg;
        msg << "degenerate geometry: zero " << link << " distance";
        throw ConfigError(msg.str());
    }
    return d;
}

// Rician weights (LoS, NLoS); kappa = inf keeps only the LoS part.
std::pair<double, double> rician_weights(double kappa)
{
    if (std::isinf(kappa))
        return {1.0, 0.0};
    return {std::sqrt(kappa / (1.0 + kappa)), std::sqrt(1.0 / (1.0 + kappa))};
}

} // namespace

void validate(const SystemConfig& cfg)
{
    require(cfg.M >= 1 && cfg.L >= 1 && cfg.U >= 1 && cfg.Q >= 1,
            "M, L, U, Q must all be >= 1");
    require(cfg.P_bs_max > 0.0, "P_bs_max must be positive");
    require(cfg.P_ris_max > 0.0, "P_ris_max must be positive");
    require(cfg.a_max > 0.0, "a_max must be positive");
    require(cfg.sigma_u2 > 0.0 && cfg.sigma_z2 > 0.0 && cfg.sigma_r2 > 0.0,
            "noise powers must be positive");
    require(static_cast<Index>(cfg.R_min.size()) == cfg.U, "R_min must have U entries");
    for (double r : cfg.R_min)
        require(r >= 0.0, "R_min entries must be >= 0");
    require(static_cast<Index>(cfg.target_angles.size()) == cfg.Q,
            "target_angles must have Q entries");
    for (double a : cfg.target_angles)
        require(a > -kPi / 2.0 && a < kPi / 2.0, "target angles must lie in (-pi/2, pi/2)");
    require(static_cast<Index>(cfg.rcs.size()) == cfg.Q, "rcs must have Q entries");
    for (double s : cfg.rcs)
        require(s > 0.0, "rcs entries must be positive");
    require(static_cast<Index>(cfg.geometry.target_distance.size()) == cfg.Q,
            "geometry.target_distance must have Q entries");
    for (double d : cfg.geometry.target_distance)
        require(d > 0.0, "degenerate geometry: target distance must be positive");
    if (!cfg.geometry.target_position.empty()) {
        require(static_cast<Index>(cfg.geometry.target_position.size()) == cfg.Q,
                "geometry.target_position must have Q entries");
        const TargetPlacement tp = target_placement(cfg);
        for (Index q = 0; q < cfg.Q; ++q) {
            const auto qi = static_cast<std::size_t>(q);
            require(tp.distance[qi] > 0.0, "degenerate geometry: zero ARIS-target distance");
            require(tp.angle[qi] > -kPi / 2.0 && tp.angle[qi] < kPi / 2.0,
                    "target positions must lie in front of the ARIS");
        }
    }
    require(cfg.geometry.user_radius >= 0.0, "user radius must be >= 0");
    require(cfg.C0 > 0.0 && cfg.d0 > 0.0, "C0 and d0 must be positive");
    require(cfg.rician_kappa >= 0.0, "rician_kappa must be >= 0");
    require(cfg.bcd_tol > 0.0, "bcd_tol must be positive");
    require(cfg.max_outer >= 1 && cfg.max_srocr >= 1, "iteration caps must be >= 1");
}

std::vector<double> default_target_angle_pool()
{
    return {0.0, kPi / 4.0, -kPi / 6.0, kPi / 6.0, -kPi / 3.0, kPi / 3.0};
}

void resize_users(SystemConfig& cfg, Index U)
{
    const double r = cfg.R_min.empty() ? 0.0 : cfg.R_min.front();
    cfg.U = U;
    cfg.R_min.assign(static_cast<std::size_t>(U), r);
}

void resize_targets(SystemConfig& cfg, Index Q, const std::vector<double>& angle_pool)
{
    require(static_cast<Index>(angle_pool.size()) >= Q,
            "target angle pool too small for the requested target count");
    const double rcs = cfg.rcs.empty() ? 1.0 : cfg.rcs.front();
    const double dist =
        cfg.geometry.target_distance.empty() ? 10.0 : cfg.geometry.target_distance.front();
    cfg.Q = Q;
    cfg.target_angles.assign(angle_pool.begin(), angle_pool.begin() + Q);
    cfg.rcs.assign(static_cast<std::size_t>(Q), rcs);
    cfg.geometry.target_distance.assign(static_cast<std::size_t>(Q), dist);
    cfg.geometry.target_position.clear();
}

TargetPlacement target_placement(const SystemConfig& cfg)
{
    const Geometry& g = cfg.geometry;
    TargetPlacement tp;
    if (g.target_position.empty()) {
        tp.angle = cfg.target_angles;
        tp.distance = g.target_distance;
        return tp;
    }
    for (const Point2& p : g.target_position) {
        tp.angle.push_back(aris_angle(g, p));
        tp.distance.push_back(std::hypot(p.x - g.aris.x, p.y - g.aris.y));
    }
    return tp;
}

void anchor_targets(SystemConfig& cfg)
{
    const TargetPlacement tp = target_placement(cfg);
    Geometry& g = cfg.geometry;
    g.target_position.clear();
    for (std::size_t q = 0; q < tp.angle.size(); ++q)
        g.target_position.push_back({g.aris.x + tp.distance[q] * std::sin(tp.angle[q]),
                                     g.aris.y - tp.distance[q] * std::cos(tp.angle[q])});
}

CVec steering_vector(double angle, Index L)
{
    CVec a(L);
    const double s = std::sin(angle);
    for (Index l = 0; l < L; ++l)
        a(l) = std::polar(1.0, static_cast<double>(l) * kPi * s);
    return a;
}

CMat target_response(double angle, cd beta, Index L)
{
    const CVec a = steering_vector(angle, L);
    return beta * a * a.adjoint();
}

double pathloss(const SystemConfig& cfg, double d, double alpha)
{
    return cfg.C0 * std::pow(d / cfg.d0, -alpha);
}

double bs_angle(const Geometry& g, const Point2& p)
{
    return std::atan2(p.y - g.bs.y, p.x - g.bs.x);
}

double aris_angle(const Geometry& g, const Point2& p)
{
    return std::atan2(p.x - g.aris.x, g.aris.y - p.y);
}

ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed)
{
    validate(cfg);
    const Geometry& geo = cfg.geometry;
    const auto [w_los, w_nlos] = rician_weights(cfg.rician_kappa);

    // Draw order is fixed: user positions, H_br, then (h_bu, h_ru) per user,
    // then target phases.
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> unif(0.0, 1.0);

    ChannelSet ch;
    ch.user_positions.reserve(static_cast<std::size_t>(cfg.U));
    for (Index u = 0; u < cfg.U; ++u) {
        const double r = geo.user_radius * std::sqrt(unif(rng));
        const double ang = 2.0 * kPi * unif(rng);
        ch.user_positions.push_back(
            {geo.user_center.x + r * std::cos(ang), geo.user_center.y + r * std::sin(ang)});
    }

    const double d_br = checked_distance(geo.bs, geo.aris, "BS-ARIS");
    const double g_br = std::sqrt(pathloss(cfg, d_br, cfg.pathloss.bs_ris));
    const CVec a_ris_in = steering_vector(aris_angle(geo, geo.bs), cfg.L);
    const CVec a_bs_out = steering_vector(bs_angle(geo, geo.aris), cfg.M);
    ch.H_br_los = g_br * a_ris_in * a_bs_out.adjoint();
    ch.H_br = w_los * ch.H_br_los;
    {
        const CMat nlos = crandn(rng, cfg.L, cfg.M);
        if (w_nlos > 0.0)
            ch.H_br += (w_nlos * g_br) * nlos;
    }

    for (Index u = 0; u < cfg.U; ++u) {
        const Point2& pu = ch.user_positions[static_cast<std::size_t>(u)];
        const double d_bu = checked_distance(geo.bs, pu, "BS-user");
        const double d_ru = checked_distance(geo.aris, pu, "ARIS-user");

        const double g_bu = std::sqrt(pathloss(cfg, d_bu, cfg.pathloss.bs_user));
        ch.h_bu.push_back(g_bu * crandn(rng, cfg.M, 1).col(0));

        const double g_ru = std::sqrt(pathloss(cfg, d_ru, cfg.pathloss.ris_user));
        CVec h = (w_los * g_ru) * steering_vector(aris_angle(geo, pu), cfg.L);
        const CVec nlos = crandn(rng, cfg.L, 1).col(0);
        if (w_nlos > 0.0)
            h += (w_nlos * g_ru) * nlos;
        ch.h_ru.push_back(std::move(h));
    }

    const TargetPlacement tp = target_placement(cfg);
    for (Index q = 0; q < cfg.Q; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        const double d = tp.distance[qi];
        const double mag2 = cfg.C0 * cfg.C0 * std::pow(d / cfg.d0, -2.0 * cfg.pathloss.ris_target) *
                            cfg.rcs[qi];
        const double phase = 2.0 * kPi * unif(rng);
        const cd beta = std::polar(std::sqrt(mag2), phase);
        ch.beta.push_back(beta);
        ch.target_angles.push_back(tp.angle[qi]);
        ch.G.push_back(target_response(tp.angle[qi], beta, cfg.L));
    }
    return ch;
}

} // namespace arisrsma
