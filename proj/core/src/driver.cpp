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

#include "arisrsma/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include <Eigen/SVD>

namespace arisrsma
{

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// MRT columns on the equivalent channels, equal power split.
CMat mrt_beams(const SystemConfig& cfg, const ChannelSet& ch, const CVec& phi, bool common)
{
    const Index M = ch.H_br.cols();
    const Index U = static_cast<Index>(ch.h_bu.size());
    CMat F = CMat::Zero(M, U + 1);
    const double p = cfg.P_bs_max / static_cast<double>(U + (common ? 1 : 0));
    CVec sum = CVec::Zero(M);
    for (Index u = 0; u < U; ++u) {
        const CVec h = equivalent_user_channel(ch, phi, u).normalized();
        F.col(u) = std::sqrt(p) * h;
        sum += h;
    }
    if (common && sum.norm() > 0.0)
        F.col(U) = std::sqrt(p) * sum.normalized();
    return F;
}

// Largest a in [0, a_max] with aris_power(a phi1) <= P_ris_max for fixed F.
double amplitude_for_budget(const SystemConfig& cfg, const ChannelSet& ch, DesignState s,
                            const CVec& phi1)
{
    auto power = [&](double a) {
        s.phi = a * phi1;
        return aris_power(cfg, ch, s);
    };
    if (power(cfg.a_max) <= cfg.P_ris_max)
        return cfg.a_max;
    double lo = 0.0, hi = cfg.a_max;
    for (int i = 0; i < 100; ++i) {
        const double mid = 0.5 * (lo + hi);
        (power(mid) <= cfg.P_ris_max ? lo : hi) = mid;
    }
    return lo;
}

} // namespace

const char* to_string(Mode m)
{
    switch (m) {
    case Mode::aris_rsma: return "aris_rsma";
    case Mode::aris_sdma: return "aris_sdma";
    case Mode::pris_rsma: return "pris_rsma";
    case Mode::pris_sdma: return "pris_sdma";
    case Mode::only_sensing: return "only_sensing";
    }
    return "?";
}

Mode mode_from_string(std::string_view name)
{
    for (Mode m : all_modes())
        if (name == to_string(m))
            return m;
    throw std::invalid_argument("unknown mode '" + std::string(name) + "'");
}

std::vector<Mode> all_modes()
{
    return {Mode::aris_rsma, Mode::aris_sdma, Mode::pris_rsma, Mode::pris_sdma,
            Mode::only_sensing};
}

const char* to_string(RunStatus s)
{
    switch (s) {
    case RunStatus::ok: return "ok";
    case RunStatus::infeasible: return "infeasible";
    case RunStatus::degraded: return "degraded";
    }
    return "?";
}

ModeSetup mode_setup(const SystemConfig& base, Mode m)
{
    ModeSetup ms;
    ms.cfg = base;
    switch (m) {
    case Mode::aris_rsma: break;
    case Mode::aris_sdma: ms.set.common = false; break;
    case Mode::pris_rsma:
    case Mode::pris_sdma:
        ms.cfg.sigma_z2 = 0.0;
        ms.cfg.a_max = 1.0;
        ms.set.aris_power = false;
        ms.set.common = m == Mode::pris_rsma;
        break;
    case Mode::only_sensing:
        ms.set.rates = false;
        ms.set.common = false;
        ms.sensing_only = true;
        break;
    }
    return ms;
}

BcdOptions BcdOptions::from_config(const SystemConfig& cfg)
{
    BcdOptions o;
    o.max_outer = cfg.max_outer;
    o.tol = cfg.bcd_tol;
    o.srocr.max_iter = cfg.max_srocr;
    return o;
}

DesignState initialize(const SystemConfig& base, const ChannelSet& ch, Mode mode)
{
    const ModeSetup ms = mode_setup(base, mode);
    const SystemConfig& cfg = ms.cfg;
    const Index M = ch.H_br.cols();
    const Index L = ch.H_br.rows();
    const Index U = static_cast<Index>(ch.h_bu.size());
    const Index Q = static_cast<Index>(ch.G.size());

    DesignState s = make_state(M, L, U, Q);

    // Dominant BS -> ARIS direction, and phases re-radiating it toward target 1.
    Eigen::JacobiSVD<CMat> svd(ch.H_br, Eigen::ComputeThinV);
    const CVec v1 = svd.matrixV().col(0);
    const CVec g = ch.H_br * v1;
    const CVec a1 = steering_vector(ch.target_angles.front(), L);
    CVec phi1(L);
    for (Index l = 0; l < L; ++l)
        phi1(l) = std::polar(1.0, std::arg(a1(l)) - std::arg(g(l)));

    if (ms.sensing_only) {
        s.F = std::sqrt(cfg.P_bs_max) * v1;
        s.c = RVec::Zero(0);
    }

    double a = cfg.a_max;
    s.phi = a * phi1;
    for (int round = 0; round < 4; ++round) {
        if (!ms.sensing_only) {
            s.F = mrt_beams(cfg, ch, s.phi, ms.set.common);
        } else {
            // Same start as the communication designs, collapsed onto the
            // dominant direction of their transmit covariance.
            const CMat B = mrt_beams(cfg, ch, s.phi, true);
            s.F = std::sqrt(cfg.P_bs_max) * principal_component(CMat(B * B.adjoint())).u1;
        }
        if (ms.set.aris_power)
            a = amplitude_for_budget(cfg, ch, s, phi1);
        s.phi = a * phi1;
    }
    if (ms.set.aris_power)
        while (aris_power(cfg, ch, s) > cfg.P_ris_max) {
            a *= 0.999;
            s.phi = a * phi1;
        }

    if (!ms.sensing_only && ms.set.rates && ms.set.common) {
        double min_common = std::numeric_limits<double>::infinity();
        for (Index u = 0; u < U; ++u) {
            const UserSinr g2 = user_sinrs(cfg, ch, s, u);
            s.c(u) = std::max(0.0, cfg.R_min[static_cast<std::size_t>(u)] -
                                       achievable_rate(g2.priv));
            min_common = std::min(min_common, achievable_rate(g2.common));
        }
        const double total = s.c.sum();
        if (total > 0.0)
            s.c *= std::min(1.0, min_common / total);
    }

    const ReceiveDesign rd = p1_solve(cfg, ch, s);
    s.w = rd.w;
    return s;
}

RunResult run_bcd(const SystemConfig& cfg, const ChannelSet& ch, const BcdOptions& opts)
{
    return run_baseline(Mode::aris_rsma, cfg, ch, opts);
}

namespace
{

const char* worst_constraint(const FeasibilityReport& fr)
{
    const auto top = [](const std::vector<double>& v) {
        return v.empty() ? 0.0 : *std::max_element(v.begin(), v.end());
    };
    const std::pair<double, const char*> items[] = {
        {top(fr.qos), "qos"},           {top(fr.common), "common"},
        {fr.c_negative, "c"},           {fr.bs_power, "bs_power"},
        {fr.aris_power, "aris_power"},  {fr.amplitude, "amplitude"}};
    const auto* best = std::max_element(std::begin(items), std::end(items),
                                        [](const auto& a, const auto& b) { return a.first < b.first; });
    return best->first > 0.0 ? best->second : "none";
}

} // namespace

RunResult run_baseline(Mode mode, const SystemConfig& base, const ChannelSet& ch,
                       const BcdOptions& opts)
{
    const auto t_start = std::chrono::steady_clock::now();
    const ModeSetup ms = mode_setup(base, mode);
    const SystemConfig& cfg = ms.cfg;

    RunResult rr;
    rr.mode = mode;
    DesignState state = initialize(base, ch, mode);

    auto verify = [&](const DesignState& x) {
        return verify_feasibility(cfg, ch, x, opts.feas_tol, ms.set);
    };
    ReceiveDesign rd = p1_solve(cfg, ch, state);
    state.w = rd.w;
    double gamma = rd.min_gamma;
    bool incumbent_feasible = verify(state).pass;
    bool saw_infeasible = false;
    rr.trace.gamma_init = gamma;

    std::vector<double> p2_ratios;
    double p3_ratio = -1.0;
    double prev3 = gamma;
    P3Options p3opts;
    p3opts.srocr = opts.srocr;
    p3opts.bound = opts.bound;

    for (int t = 1; t <= opts.max_outer; ++t) {
        const auto t_iter = std::chrono::steady_clock::now();
        OuterRecord rec;
        rec.iteration = t;

        rd = p1_solve(cfg, ch, state);
        state.w = rd.w;
        gamma = rd.min_gamma;
        rec.gamma_p1 = gamma;

        const P2Result r2 = solve_p2(cfg, ch, state, gamma, ms.set, opts.srocr);
        rec.p2_status = r2.status;
        rec.p2_inner = r2.trace;
        rec.p2_rank_ratios = r2.rank_ratios;
        if (r2.status == BlockStatus::infeasible) {
            saw_infeasible = true;
        } else if (r2.status == BlockStatus::ok || !opts.require_rank_one) {
            DesignState cand = state;
            cand.F = r2.F;
            cand.c = r2.c;
            const double g = min_echo_sinr(cfg, ch, cand);
            const FeasibilityReport fr = verify(cand);
            if (opts.verbose)
                std::fprintf(stderr,
                             "[bcd %s]   P2 candidate: lifted %.4f dB, true %.4f dB, "
                             "residual %.2e\n",
                             to_string(mode), to_db(r2.gamma_lifted), to_db(g), fr.worst);
            if (fr.pass && (g >= gamma || !incumbent_feasible)) {
                state = std::move(cand);
                gamma = g;
                incumbent_feasible = true;
                rec.p2_accepted = true;
                p2_ratios = r2.rank_ratios;
            }
        }
        rec.gamma_p2 = gamma;

        if (incumbent_feasible) {
            const P3Result r3 = solve_p3(cfg, ch, state, gamma, ms.set, p3opts);
            rec.p3_status = r3.status;
            rec.p3_inner = r3.trace;
            rec.p3_rank_ratio = r3.rank_ratio;
            if (r3.status == BlockStatus::ok ||
                (r3.status == BlockStatus::degraded && !opts.require_rank_one)) {
                DesignState cand = state;
                cand.phi = restore_phi(cfg, ch, state, r3.phi, ms.set);
                const double g = min_echo_sinr(cfg, ch, cand);
                const FeasibilityReport fr = verify(cand);
                if (opts.verbose)
                    std::fprintf(stderr,
                                 "[bcd %s]   P3 candidate: lifted %.4f dB, true %.4f dB, "
                                 "residual %.2e (%s), ratio %.6f\n",
                                 to_string(mode), to_db(r3.gamma_lifted), to_db(g), fr.worst,
                                 worst_constraint(fr), r3.rank_ratio);
                if (fr.pass && g >= gamma) {
                    state = std::move(cand);
                    gamma = g;
                    rec.p3_accepted = true;
                    p3_ratio = r3.rank_ratio;
                } else if (g > gamma) {
                    // The candidate improves sensing but misses a constraint by a
                    // small margin: backtrack along the segment from the incumbent.
                    double beta = 0.5;
                    for (int k = 0; k < opts.max_backtracks; ++k, beta *= 0.5) {
                        DesignState mid = state;
                        mid.phi = state.phi + beta * (cand.phi - state.phi);
                        const double gm = min_echo_sinr(cfg, ch, mid);
                        if (gm < gamma)
                            break;
                        if (verify(mid).pass) {
                            if (opts.verbose)
                                std::fprintf(stderr, "[bcd %s]   P3 backtracked to %.4g: %.4f dB\n",
                                             to_string(mode), beta, to_db(gm));
                            state = std::move(mid);
                            gamma = gm;
                            rec.p3_accepted = true;
                            p3_ratio = r3.rank_ratio;
                            break;
                        }
                    }
                }
            }
        }
        rec.gamma_p3 = gamma;
        rec.feasibility_worst = verify(state).worst;
        rec.seconds = seconds_since(t_iter);
        rr.trace.outer.push_back(rec);
        rr.outer_iterations = t;

        if (opts.verbose)
            std::fprintf(stderr,
                         "[bcd %s] t=%d P1=%.4f dB P2=%.4f dB (%s%s) P3=%.4f dB (%s%s) %.2fs\n",
                         to_string(mode), t, to_db(rec.gamma_p1), to_db(rec.gamma_p2),
                         to_string(rec.p2_status), rec.p2_accepted ? ",acc" : "",
                         to_db(rec.gamma_p3), to_string(rec.p3_status),
                         rec.p3_accepted ? ",acc" : "", rec.seconds);

        if (!incumbent_feasible && saw_infeasible) {
            rr.trace.termination = "infeasible";
            break;
        }
        const double change = std::abs(gamma - prev3) / std::max(prev3, 1e-300);
        prev3 = gamma;
        if (incumbent_feasible && change <= opts.tol) {
            rr.converged = true;
            rr.trace.termination = "converged";
            break;
        }
    }
    if (rr.trace.termination.empty())
        rr.trace.termination = "max_outer";

    rd = p1_solve(cfg, ch, state);
    state.w = rd.w;
    rr.min_sinr = rd.min_gamma;
    rr.min_sinr_db = to_db(rr.min_sinr);

    rr.feasibility = verify(state);
    if (rr.feasibility.pass)
        rr.status = RunStatus::ok;
    else
        rr.status = (saw_infeasible || !incumbent_feasible) ? RunStatus::infeasible
                                                            : RunStatus::degraded;
    if (!rr.feasibility.pass)
        rr.message = "final state violates constraints (worst residual " +
                     std::to_string(rr.feasibility.worst) + ")";

    const Index U = state.F.cols() == 1 ? 0 : state.F.cols() - 1;
    for (Index u = 0; u < U; ++u) {
        const UserSinr g = user_sinrs(cfg, ch, state, u);
        const double cu = state.c.size() > u ? state.c(u) : 0.0;
        rr.rates.push_back(cu + achievable_rate(g.priv));
        rr.common.push_back(cu);
    }
    rr.bs_power = state.F.squaredNorm();
    rr.aris_power = aris_power(cfg, ch, state);
    rr.rank_ratios = p2_ratios;
    if (p3_ratio >= 0.0)
        rr.rank_ratios.push_back(p3_ratio);
    rr.state = std::move(state);
    rr.seconds = seconds_since(t_start);
    return rr;
}

} // namespace arisrsma
