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

#include "arisrsma/tx_rs.hpp"

#include <algorithm>
#include <tuple>
#include <chrono>
#include <cmath>
#include <stdexcept>

namespace arisrsma
{

namespace
{

// Box on the log-power scalars; noise-normalized powers stay far inside.
constexpr double kLogLow = -30.0;
constexpr double kLogHigh = 80.0;

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

CVec principal_direction(const CMat& X)
{
    if (X.size() == 0 || X.trace().real() <= 0.0) {
        CVec e = CVec::Zero(X.rows());
        if (e.size() > 0)
            e(0) = 1.0;
        return e;
    }
    return principal_component(X).u1;
}

struct P2Shape
{
    bool sensing_only = false;
    bool rsma = false;
    Index U = 0;
    Index lifted = 0;
};

P2Shape shape_of(const DesignState& s, const ConstraintSet& set)
{
    P2Shape sh;
    sh.sensing_only = s.F.cols() == 1;
    sh.U = sh.sensing_only ? 0 : s.F.cols() - 1;
    sh.rsma = !sh.sensing_only && set.common;
    sh.lifted = sh.sensing_only ? 1 : sh.U + (sh.rsma ? 1 : 0);
    return sh;
}

} // namespace

double exp_tangent(double x0, double x)
{
    return std::exp(x0) * (x - x0 + 1.0);
}

double srocr_update(const CMat& X, double delta)
{
    const double tr = X.trace().real();
    if (!(tr > 0.0))
        throw std::invalid_argument("srocr_update: trace must be positive");
    return std::min(1.0, principal_component(X).lambda1 / tr + delta);
}

RankOneExtraction extract_rank_one(const CMat& X, double threshold)
{
    RankOneExtraction r;
    const double tr = X.trace().real();
    if (!(tr > 0.0)) {
        r.f = CVec::Zero(X.rows());
        r.ratio = 1.0;
        return r;
    }
    const PrincipalComponent pc = principal_component(X);
    r.f = std::sqrt(std::max(0.0, pc.lambda1)) * pc.u1;
    r.ratio = pc.lambda1 / tr;
    r.flagged = r.ratio < threshold;
    return r;
}

void LiftedVar::add_pairing(AffineExpr& expr, const CMat& A) const
{
    if (rank_one)
        expr.add_scalar(var, dir.dot(A * dir).real());
    else
        expr.add(var, A);
}

void LiftedVar::add_pairing(AffineExpr& expr, const HermitianCoef& A) const
{
    if (rank_one)
        expr.add_scalar(var, A.pair(dir * dir.adjoint()));
    else
        expr.add(var, A);
}

void LiftedVar::add_trace(AffineExpr& expr, double coef) const
{
    if (rank_one)
        expr.add_scalar(var, coef * dir.squaredNorm());
    else
        expr.add(var, HermitianCoef::identity(dim, coef));
}

CMat LiftedVar::value(const ConicSolution& sol) const
{
    if (rank_one)
        return std::max(0.0, sol.s(var)) * dir * dir.adjoint();
    return sol.X[static_cast<std::size_t>(var)];
}

LiftedVar add_lifted(ConicProblem& p, const std::string& name, Index dim, double varpi,
                     const CVec& u)
{
    LiftedVar lv;
    lv.dim = dim;
    if (varpi >= 1.0) {
        lv.rank_one = true;
        lv.dir = u.normalized();
        lv.var = p.add_scalar_var(name, 0.0);
        return lv;
    }
    lv.var = p.add_matrix_var(name, dim);
    if (varpi > 0.0) {
        const CVec un = u.normalized();
        CMat cut = un * un.adjoint();
        cut.diagonal().array() -= varpi;
        AffineExpr e;
        e.add(lv.var, HermitianCoef::dense(cut));
        p.add_constraint(std::move(e), Sense::ge, 0.0, name + ":srocr");
    }
    return lv;
}

const char* to_string(BlockStatus s)
{
    switch (s) {
    case BlockStatus::ok: return "ok";
    case BlockStatus::infeasible: return "infeasible";
    case BlockStatus::degraded: return "degraded";
    }
    return "?";
}

P2Program build_p2(const SystemConfig& cfg, const ChannelSet& ch, const CascadeMatrices& cm,
                   const DesignState& s, double gamma_ref, const SrocrState& srocr,
                   const ConstraintSet& set)
{
    const Index M = ch.H_br.cols();
    const P2Shape sh = shape_of(s, set);
    const auto n = static_cast<std::size_t>(sh.lifted);
    if (srocr.varpi.size() != n || srocr.prev_solution.size() != n)
        throw std::invalid_argument("build_p2: SROCR state does not match the lifted variables");
    if (cm.eps1.size() != ch.G.size())
        throw std::invalid_argument("build_p2: cascade matrices lack eps1");
    const bool rates = set.rates && sh.U > 0;
    if (rates && (srocr.prev_xi_p.size() != static_cast<std::size_t>(sh.U) ||
                  (sh.rsma && srocr.prev_xi_c.size() != static_cast<std::size_t>(sh.U))))
        throw std::invalid_argument("build_p2: missing expansion points");

    const double P = cfg.P_bs_max;
    P2Program out;
    ConicProblem& p = out.problem;
    P2Layout& lay = out.layout;

    for (std::size_t i = 0; i < n; ++i)
        lay.lifted.push_back(add_lifted(p, "F" + std::to_string(i), M, srocr.varpi[i],
                                        principal_direction(srocr.prev_solution[i])));
    lay.gamma = p.add_scalar_var("gamma", 0.0);
    lay.gamma_scale = gamma_ref > 0.0 ? gamma_ref : 1.0;

    AffineExpr objective;
    objective.add_scalar(lay.gamma, 1.0);
    p.set_objective(objective);

    // Sensing: sum_i tr((B1 - gamma_ref B2) F_i) >= Gamma eps1.
    for (std::size_t q = 0; q < ch.G.size(); ++q) {
        const CVec& w = s.w[q];
        const CVec v1 = cm.H_bq[q].adjoint() * w;
        const CVec v2 = cm.H_bq_tilde[q].adjoint() * w;
        CMat A = v1 * v1.adjoint() - gamma_ref * (v2 * v2.adjoint());
        symmetrize(A);
        A *= P / (lay.gamma_scale * cm.eps1[q]);
        AffineExpr e;
        for (const auto& lv : lay.lifted)
            lv.add_pairing(e, A);
        e.add_scalar(lay.gamma, -1.0);
        p.add_constraint(std::move(e), Sense::ge, 0.0, "sensing" + std::to_string(q));
    }

    {
        AffineExpr e;
        for (const auto& lv : lay.lifted)
            lv.add_trace(e);
        p.add_constraint(std::move(e), Sense::le, 1.0, "bs_power");
    }
    if (set.aris_power) {
        const CMat A = (P / cfg.P_ris_max) * cm.Sigma;
        AffineExpr e;
        for (const auto& lv : lay.lifted)
            lv.add_pairing(e, A);
        p.add_constraint(std::move(e), Sense::le, 1.0 - cm.eps2 / cfg.P_ris_max, "aris_power");
    }

    if (!rates)
        return out;

    if (sh.rsma)
        for (Index u = 0; u < sh.U; ++u)
            lay.c.push_back(p.add_scalar_var("c" + std::to_string(u), 0.0));

    for (Index u = 0; u < sh.U; ++u) {
        const auto ui = static_cast<std::size_t>(u);
        const std::string tag = std::to_string(u);
        const CVec h = equivalent_user_channel(ch, s.phi, u);
        CMat Hn = (P / cm.eps3[ui]) * (h * h.adjoint());
        symmetrize(Hn);

        // Noise-normalized received powers.
        AffineExpr own, others;
        for (Index k = 0; k < sh.U; ++k)
            lay.lifted[static_cast<std::size_t>(k)].add_pairing(k == u ? own : others, Hn);
        others.add_constant(1.0);
        AffineExpr total = others;
        for (auto& t : own.mats)
            total.mats.push_back(t);
        for (auto& t : own.scalars)
            total.scalars.push_back(t);

        const int rho = p.add_scalar_var("rho_p" + tag, kLogLow, kLogHigh);
        const int xi = p.add_scalar_var("xi_p" + tag, kLogLow, kLogHigh);
        lay.rho_p.push_back(rho);
        lay.xi_p.push_back(xi);

        AffineExpr ur;
        ur.add_scalar(rho, 1.0);
        p.add_exp_constraint(ur, total, "exp_p" + tag);

        const double x0 = srocr.prev_xi_p[ui];
        AffineExpr tan = others;
        tan.add_scalar(xi, -std::exp(x0));
        p.add_constraint(std::move(tan), Sense::le, std::exp(x0) * (1.0 - x0), "tan_p" + tag);

        AffineExpr qos;
        qos.add_scalar(rho, 1.0 / kLn2).add_scalar(xi, -1.0 / kLn2);
        if (sh.rsma)
            qos.add_scalar(lay.c[ui], 1.0);
        p.add_constraint(std::move(qos), Sense::ge, cfg.R_min[ui], "qos" + tag);

        if (!sh.rsma)
            continue;

        AffineExpr all = total;
        lay.lifted[static_cast<std::size_t>(sh.U)].add_pairing(all, Hn);
        const int rc = p.add_scalar_var("rho_c" + tag, kLogLow, kLogHigh);
        const int xc = p.add_scalar_var("xi_c" + tag, kLogLow, kLogHigh);
        lay.rho_c.push_back(rc);
        lay.xi_c.push_back(xc);

        AffineExpr uc;
        uc.add_scalar(rc, 1.0);
        p.add_exp_constraint(uc, all, "exp_c" + tag);

        const double y0 = srocr.prev_xi_c[ui];
        AffineExpr tanc = total;
        tanc.add_scalar(xc, -std::exp(y0));
        p.add_constraint(std::move(tanc), Sense::le, std::exp(y0) * (1.0 - y0), "tan_c" + tag);

        AffineExpr cr;
        cr.add_scalar(rc, 1.0).add_scalar(xc, -1.0);
        for (int cv : lay.c)
            cr.add_scalar(cv, -kLn2);
        p.add_constraint(std::move(cr), Sense::ge, 0.0, "common" + tag);
    }
    return out;
}

namespace
{

// Expansion points at the lifted matrices (physical units): the tangent is
// then tight at the current point.
void refresh_expansion(const SystemConfig& cfg, const ChannelSet& ch, const CascadeMatrices& cm,
                       const DesignState& s, const P2Shape& sh, SrocrState& st)
{
    (void)cfg;
    st.prev_xi_p.assign(static_cast<std::size_t>(sh.U), 0.0);
    st.prev_xi_c.assign(sh.rsma ? static_cast<std::size_t>(sh.U) : 0, 0.0);
    for (Index u = 0; u < sh.U; ++u) {
        const auto ui = static_cast<std::size_t>(u);
        const CVec h = equivalent_user_channel(ch, s.phi, u);
        double all = 0.0, own = 0.0;
        for (Index k = 0; k < sh.U; ++k) {
            const double g = h.dot(st.prev_solution[static_cast<std::size_t>(k)] * h).real();
            all += g;
            if (k == u)
                own = g;
        }
        st.prev_xi_p[ui] = std::log((all - own) / cm.eps3[ui] + 1.0);
        if (sh.rsma)
            st.prev_xi_c[ui] = std::log(all / cm.eps3[ui] + 1.0);
    }
}

} // namespace

P2Result solve_p2(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                  double gamma_ref, const ConstraintSet& set, const SrocrOptions& opts)
{
    const P2Shape sh = shape_of(s, set);
    const auto n = static_cast<std::size_t>(sh.lifted);
    const CascadeMatrices cm = build_cascade_matrices(cfg, ch, s.phi, &s.w);
    const double P = cfg.P_bs_max;

    SrocrState st;
    st.varpi.assign(n, 0.0);
    st.delta.assign(n, opts.delta0);
    for (std::size_t i = 0; i < n; ++i) {
        const CVec f = s.F.col(static_cast<Index>(i));
        st.prev_solution.push_back(f * f.adjoint());
    }
    refresh_expansion(cfg, ch, cm, s, sh, st);

    P2Result res;
    res.F = s.F;
    res.c = s.c;

    struct Accepted
    {
        ConicSolution sol;
        P2Layout layout;
    };
    auto attempt = [&](int iteration, double delta) -> std::pair<ConicSolution, P2Layout> {
        const auto t0 = std::chrono::steady_clock::now();
        P2Program prog = build_p2(cfg, ch, cm, s, gamma_ref, st, set);
        ConicSolution sol = solve(prog.problem, opts.solver);
        InnerRecord rec;
        rec.iteration = iteration;
        rec.varpi_min = n > 0 ? *std::min_element(st.varpi.begin(), st.varpi.end()) : 0.0;
        rec.delta = delta;
        rec.status = sol.status;
        rec.objective = sol.ok() ? sol.objective * prog.layout.gamma_scale : 0.0;
        rec.seconds = seconds_since(t0);
        res.trace.push_back(rec);
        return {std::move(sol), std::move(prog.layout)};
    };
    auto lifted_values = [&](const ConicSolution& sol, const P2Layout& lay) {
        std::vector<CMat> out;
        for (const auto& lv : lay.lifted)
            out.push_back(P * lv.value(sol));
        return out;
    };
    auto ratios_of = [&](const std::vector<CMat>& X) {
        std::vector<double> r;
        for (const auto& x : X) {
            const double tr = x.trace().real();
            r.push_back(tr > 0.0 ? principal_component(x).lambda1 / tr : 1.0);
        }
        return r;
    };

    // Plain relaxation first. The tangent bounds are tight at the current
    // interference, which may lie far from any point meeting the QoS; the
    // interference-free expansion (log 1 = 0) is tried before giving up.
    auto [sol0, lay0] = attempt(0, 0.0);
    if (sol0.status == SolveStatus::infeasible && set.rates && sh.U > 0) {
        std::fill(st.prev_xi_p.begin(), st.prev_xi_p.end(), 0.0);
        std::fill(st.prev_xi_c.begin(), st.prev_xi_c.end(), 0.0);
        std::tie(sol0, lay0) = attempt(0, 0.0);
    }
    if (!sol0.ok()) {
        res.status = sol0.status == SolveStatus::infeasible ? BlockStatus::infeasible
                                                            : BlockStatus::degraded;
        res.message = "relaxation: " + std::string(to_string(sol0.status)) + " " + sol0.message;
        return res;
    }
    Accepted acc{std::move(sol0), std::move(lay0)};
    st.prev_solution = lifted_values(acc.sol, acc.layout);
    std::vector<double> ratios = ratios_of(st.prev_solution);
    double prev_obj = acc.sol.objective;

    int halvings = 0;
    for (int it = 1; it <= opts.max_iter; ++it) {
        refresh_expansion(cfg, ch, cm, s, sh, st);
        for (std::size_t i = 0; i < n; ++i)
            st.varpi[i] = std::min(1.0, ratios[i] + st.delta[i]);
        auto [sol, lay] = attempt(it, st.delta.empty() ? 0.0 : st.delta[0]);
        if (!sol.ok()) {
            if (++halvings > opts.max_halvings)
                break;
            for (auto& d : st.delta)
                d *= 0.5;
            continue;
        }
        acc = Accepted{std::move(sol), std::move(lay)};
        st.prev_solution = lifted_values(acc.sol, acc.layout);
        ratios = ratios_of(st.prev_solution);
        const bool ranked = std::all_of(ratios.begin(), ratios.end(),
                                        [&](double r) { return r >= opts.rank_threshold; });
        const double change =
            std::abs(acc.sol.objective - prev_obj) / std::max(std::abs(prev_obj), 1e-12);
        prev_obj = acc.sol.objective;
        if (ranked && change < opts.rel_tol)
            break;
    }

    if (opts.rank_one_polish) {
        refresh_expansion(cfg, ch, cm, s, sh, st);
        std::fill(st.varpi.begin(), st.varpi.end(), 1.0);
        auto [sol, lay] = attempt(opts.max_iter + 1, 0.0);
        if (sol.ok()) {
            acc = Accepted{std::move(sol), std::move(lay)};
            st.prev_solution = lifted_values(acc.sol, acc.layout);
            ratios = ratios_of(st.prev_solution);
        }
    }

    res.F = CMat::Zero(s.F.rows(), s.F.cols());
    for (std::size_t i = 0; i < n; ++i)
        res.F.col(static_cast<Index>(i)) = extract_rank_one(st.prev_solution[i]).f;
    if (sh.rsma) {
        res.c = RVec::Zero(sh.U);
        for (Index u = 0; u < sh.U; ++u)
            res.c(u) = std::max(0.0, acc.sol.s(acc.layout.c[static_cast<std::size_t>(u)]));
    } else {
        res.c = RVec::Zero(s.c.size());
    }
    res.gamma_lifted = acc.sol.objective * acc.layout.gamma_scale;
    res.rank_ratios = ratios;
    const bool ranked = std::all_of(ratios.begin(), ratios.end(),
                                    [&](double r) { return r >= opts.rank_threshold; });
    res.status = ranked ? BlockStatus::ok : BlockStatus::degraded;
    if (!ranked)
        res.message = "rank-one threshold not reached";
    return res;
}

} // namespace arisrsma
