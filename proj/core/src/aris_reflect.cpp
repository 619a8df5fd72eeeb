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

#include "arisrsma/aris.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "arisrsma/linalg.hpp"

namespace arisrsma
{

namespace
{

double seconds_since(std::chrono::steady_clock::time_point t0)
{
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

MmSurrogate finish_surrogate(const CVec& phit, const CVec& Mx, double lambda, const CVec& phi_s,
                             double a_max)
{
    const Index L = phi_s.size();
    MmSurrogate s;
    s.lambda = std::max(0.0, lambda);
    s.phis = phi_s;
    const CVec p = Mx - s.lambda * phit;
    const Eigen::Map<const CMat> P(p.data(), L, L);
    s.Qbar = P + P.adjoint();
    const double a2 = a_max * a_max;
    s.norm_cap = static_cast<double>(L * L) * a2 * a2;
    s.eta = s.lambda * s.norm_cap + s.lambda * phit.squaredNorm() - phit.dot(Mx).real();
    return s;
}

// [[A, e^H / k], [e / k, 0]] so that
// [phi; k]^H (.) [phi; k] = phi^H A phi + 2 Re(e phi).
CMat bordered(const CMat& A, const Eigen::RowVectorXcd& e, double k = 1.0)
{
    const Index L = A.rows();
    CMat B = CMat::Zero(L + 1, L + 1);
    B.topLeftCorner(L, L) = A;
    if (e.size() == L) {
        B.block(L, 0, 1, L) = e / k;
        B.block(0, L, L, 1) = e.adjoint() / k;
    }
    symmetrize(B);
    return B;
}

CVec principal_direction(const CMat& X)
{
    if (X.trace().real() <= 0.0) {
        CVec e = CVec::Zero(X.rows());
        e(X.rows() - 1) = 1.0;
        return e;
    }
    return principal_component(X).u1;
}

CMat lift_bar(const CVec& phi, double k)
{
    CVec b(phi.size() + 1);
    b.head(phi.size()) = phi;
    b(phi.size()) = k;
    return b * b.adjoint();
}

} // namespace

double MmSurrogate::value(const CVec& phi) const
{
    return phi.dot(Qbar * phi).real() + eta;
}

double MmSurrogate::value_exact(const CVec& phi) const
{
    const double n2 = phi.squaredNorm();
    return phi.dot(Qbar * phi).real() + lambda * n2 * n2 + eta_offset();
}

MmSurrogate mm_surrogate(const QuarticKernel& M, const CVec& phi_s, double a_max)
{
    const CVec phit = lift_phi(phi_s);
    const CVec Mx = M.apply(phit);
    const LanczosResult lz =
        lanczos_max_eigenvalue([&M](const CVec& v) { return M.apply(v); }, M.dim());
    return finish_surrogate(phit, Mx, lz.upper_bound, phi_s, a_max);
}

MmSurrogate mm_surrogate(const CMat& M, const CVec& phi_s, double a_max)
{
    const Index L = phi_s.size();
    if (M.rows() != L * L || M.cols() != L * L)
        throw std::invalid_argument("mm_surrogate: kernel must be L^2 x L^2");
    const CVec phit = lift_phi(phi_s);
    const CVec Mx = M * phit;
    return finish_surrogate(phit, Mx, hermitian_max_eig(M).value, phi_s, a_max);
}

const char* to_string(MmNormBound b)
{
    return b == MmNormBound::cap ? "cap" : "exact";
}

P3Surrogates build_p3_surrogates(const SystemConfig& cfg, const std::vector<QuarticForms>& qf,
                                 const CVec& phi_s, double gamma_ref)
{
    if (qf.empty())
        throw std::invalid_argument("build_p3_surrogates: no targets");
    P3Surrogates out;
    const Index L = phi_s.size();
    for (const auto& f : qf) {
        QuarticKernel K(L);
        K.add_scaled(gamma_ref, f.M2);
        if (cfg.sigma_z2 > 0.0)
            K.add_scaled(gamma_ref * cfg.sigma_z2, f.M3);
        K.add_scaled(-1.0, f.M1);
        out.sensing.push_back(mm_surrogate(K, phi_s, cfg.a_max));
    }
    out.power = mm_surrogate(qf.front().D1, phi_s, cfg.a_max);
    return out;
}

P3Program build_p3(const SystemConfig& cfg, const DesignState& s, double gamma_ref,
                   const std::vector<QuarticForms>& qf, const std::vector<UserQuadratics>& uq,
                   const P3Surrogates& sur, double varpi, const CMat& prev_solution,
                   const ConstraintSet& set, MmNormBound bound)
{
    const Index L = s.phi.size();
    if (prev_solution.rows() != L + 1 || sur.sensing.size() != qf.size())
        throw std::invalid_argument("build_p3: inconsistent dimensions");
    const bool exact = bound == MmNormBound::exact;

    P3Program out;
    ConicProblem& p = out.problem;
    P3Layout& lay = out.layout;
    lay.lifted = add_lifted(p, "Phi", L + 1, varpi, principal_direction(prev_solution));
    lay.gamma = p.add_scalar_var("gamma", 0.0);
    lay.gamma_scale = gamma_ref > 0.0 ? gamma_ref : 1.0;
    {
        AffineExpr obj;
        obj.add_scalar(lay.gamma, 1.0);
        p.set_objective(obj);
    }

    // Phi_bar[L, L] = k^2.
    const double k = lift_scale(s.phi);
    lay.lift_scale = k;
    {
        AffineExpr e;
        lay.lifted.add_pairing(e, HermitianCoef::diagonal_entry(L + 1, L));
        p.add_constraint(std::move(e), Sense::eq, k * k, "normalization");
    }
    // Amplitude caps.
    for (Index l = 0; l < L; ++l) {
        AffineExpr e;
        lay.lifted.add_pairing(e, HermitianCoef::diagonal_entry(L + 1, l));
        p.add_constraint(std::move(e), Sense::le, cfg.a_max * cfg.a_max,
                         "amplitude" + std::to_string(l));
    }

    // t = T[0,0] >= (sum_l Phi_bar[l,l])^2 through [[t, s], [s, 1]] >= 0.
    if (exact) {
        lay.aux = p.add_matrix_var("T", 2);
        AffineExpr one;
        one.add(lay.aux, HermitianCoef::diagonal_entry(2, 1));
        p.add_constraint(std::move(one), Sense::eq, 1.0, "aux_corner");
        std::vector<HermitianCoef::Entry> diag;
        for (Index l = 0; l < L; ++l)
            diag.push_back({l, l, cd(1.0, 0.0)});
        AffineExpr re;
        re.add(lay.aux, HermitianCoef::sparse(2, {{0, 1, cd(0.5, 0.0)}}));
        HermitianCoef trace_phi = HermitianCoef::sparse(L + 1, diag);
        trace_phi.scale(-1.0);
        lay.lifted.add_pairing(re, trace_phi);
        p.add_constraint(std::move(re), Sense::eq, 0.0, "aux_link");
        AffineExpr im;
        im.add(lay.aux, HermitianCoef::sparse(2, {{0, 1, cd(0.0, 0.5)}}));
        p.add_constraint(std::move(im), Sense::eq, 0.0, "aux_imag");
    }

    // Sensing per target, scaled by gamma_ref sigma_r^2 |w|^2.
    for (std::size_t q = 0; q < qf.size(); ++q) {
        const MmSurrogate& m = sur.sensing[q];
        const double noise = -qf[q].tau_q;
        const double scale = 1.0 / (lay.gamma_scale * noise);
        CMat A = m.Qbar;
        if (cfg.sigma_z2 > 0.0)
            A += gamma_ref * cfg.sigma_z2 * qf[q].M4;
        AffineExpr e;
        lay.lifted.add_pairing(e, bordered(scale * A, {}));
        e.add_scalar(lay.gamma, 1.0);
        if (exact)
            e.add(lay.aux, HermitianCoef::diagonal_entry(2, 0, scale * m.lambda));
        const double c = exact ? m.eta_offset() : m.eta;
        p.add_constraint(std::move(e), Sense::le, -scale * c, "sensing" + std::to_string(q));
    }

    if (set.aris_power) {
        const MmSurrogate& m = sur.power;
        const double scale = 1.0 / cfg.P_ris_max;
        const CMat A = m.Qbar + qf.front().D2;
        AffineExpr e;
        lay.lifted.add_pairing(e, bordered(scale * A, {}));
        if (exact)
            e.add(lay.aux, HermitianCoef::diagonal_entry(2, 0, scale * m.lambda));
        const double c = exact ? m.eta_offset() : m.eta;
        p.add_constraint(std::move(e), Sense::le, 1.0 - scale * c, "aris_power");
    }

    if (set.rates && !uq.empty()) {
        const double sz2 = cfg.sigma_z2;
        auto rate_row = [&](const StreamQuadratic& sq, double delta, const std::string& label) {
            const CMat E1 = sq.E1 - delta * (sq.E3 + sz2 * sq.E4);
            const Eigen::RowVectorXcd E2 = sq.E2 - delta * sq.E5;
            const double tau = sq.tau1 - delta * sq.tau2;
            const double scale = 1.0 / sq.tau2;
            AffineExpr e;
            lay.lifted.add_pairing(e, bordered(scale * E1, scale * E2, k));
            p.add_constraint(std::move(e), Sense::ge, -scale * tau, label);
        };
        const double csum = s.c.size() > 0 ? s.c.sum() : 0.0;
        for (std::size_t u = 0; u < uq.size(); ++u) {
            const double cu = (set.common && s.c.size() > static_cast<Index>(u))
                                  ? s.c(static_cast<Index>(u))
                                  : 0.0;
            const double d1 = std::max(0.0, std::exp2(cfg.R_min[u] - cu) - 1.0);
            rate_row(uq[u].p, d1, "private" + std::to_string(u));
            if (set.common && csum > 0.0)
                rate_row(uq[u].c, std::exp2(csum) - 1.0, "common" + std::to_string(u));
        }
    }
    return out;
}

double lift_scale(const CVec& phi)
{
    const double rms = phi.size() > 0 ? phi.norm() / std::sqrt(static_cast<double>(phi.size())) : 0.0;
    return rms > 0.0 ? rms : 1.0;
}

CVec extract_phi(const CMat& Phi_bar, double a_max, double k)
{
    const Index L = Phi_bar.rows() - 1;
    const PrincipalComponent pc = principal_component(Phi_bar);
    const CVec v = std::sqrt(std::max(0.0, pc.lambda1)) * pc.u1;
    CVec phi = v.head(L);
    if (std::abs(v(L)) > 1e-12)
        phi *= k / v(L);
    for (Index l = 0; l < L; ++l) {
        const double r = std::abs(phi(l));
        if (r > a_max && r <= a_max * (1.0 + 1e-6))
            phi(l) *= a_max / r;
    }
    return phi;
}

CVec restore_phi(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                 const CVec& phi, const ConstraintSet& set)
{
    CVec out = phi;
    for (Index l = 0; l < out.size(); ++l) {
        const double a = std::abs(out(l));
        if (a > cfg.a_max)
            out(l) *= cfg.a_max / a;
    }
    if (!set.aris_power)
        return out;
    DesignState x = s;
    const double budget = cfg.P_ris_max * (1.0 - 1e-9);
    auto power_at = [&](double beta) {
        x.phi = beta * out;
        return aris_power(cfg, ch, x);
    };
    if (power_at(1.0) <= budget)
        return out;
    double lo = 0.0;
    double hi = 1.0;
    for (int k = 0; k < 60; ++k) {
        const double mid = 0.5 * (lo + hi);
        (power_at(mid) <= budget ? lo : hi) = mid;
    }
    return lo * out;
}

P3Result solve_p3(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                  double gamma_ref, const ConstraintSet& set, const P3Options& opts)
{
    const Index L = s.phi.size();
    std::vector<QuarticForms> qf;
    for (Index q = 0; q < static_cast<Index>(ch.G.size()); ++q)
        qf.push_back(build_quartic_forms(cfg, ch, s.F, s.w[static_cast<std::size_t>(q)], q));
    std::vector<UserQuadratics> uq;
    const Index U = s.F.cols() == 1 ? 0 : s.F.cols() - 1;
    if (set.rates)
        for (Index u = 0; u < U; ++u)
            uq.push_back(build_user_quadratics(cfg, ch, s.F, u));
    const P3Surrogates sur = build_p3_surrogates(cfg, qf, s.phi, gamma_ref);
    const SrocrOptions& so = opts.srocr;

    P3Result res;
    res.phi = s.phi;

    const double k = lift_scale(s.phi);
    CMat prev = lift_bar(s.phi, k);
    double varpi = 0.0;
    double delta = so.delta0;
    auto attempt = [&](int iteration, double dlt) -> std::pair<ConicSolution, P3Layout> {
        const auto t0 = std::chrono::steady_clock::now();
        P3Program prog = build_p3(cfg, s, gamma_ref, qf, uq, sur, varpi, prev, set, opts.bound);
        ConicSolution sol = solve(prog.problem, so.solver);
        InnerRecord rec;
        rec.iteration = iteration;
        rec.varpi_min = varpi;
        rec.delta = dlt;
        rec.status = sol.status;
        rec.objective = sol.ok() ? sol.objective * prog.layout.gamma_scale : 0.0;
        rec.seconds = seconds_since(t0);
        res.trace.push_back(rec);
        return {std::move(sol), std::move(prog.layout)};
    };
    auto ratio_of = [](const CMat& X) {
        const double tr = X.trace().real();
        return tr > 0.0 ? principal_component(X).lambda1 / tr : 1.0;
    };

    auto [sol0, lay0] = attempt(0, 0.0);
    if (!sol0.ok()) {
        res.status = sol0.status == SolveStatus::infeasible ? BlockStatus::infeasible
                                                            : BlockStatus::degraded;
        res.message = "relaxation: " + std::string(to_string(sol0.status)) + " " + sol0.message;
        return res;
    }
    ConicSolution acc = std::move(sol0);
    P3Layout acc_lay = std::move(lay0);
    prev = acc_lay.lifted.value(acc);
    double ratio = ratio_of(prev);
    double prev_obj = acc.objective;

    int halvings = 0;
    for (int it = 1; it <= so.max_iter; ++it) {
        varpi = std::min(1.0, ratio + delta);
        auto [sol, lay] = attempt(it, delta);
        if (!sol.ok()) {
            if (++halvings > so.max_halvings)
                break;
            delta *= 0.5;
            continue;
        }
        acc = std::move(sol);
        acc_lay = std::move(lay);
        prev = acc_lay.lifted.value(acc);
        ratio = ratio_of(prev);
        const double change = std::abs(acc.objective - prev_obj) / std::max(std::abs(prev_obj), 1e-12);
        prev_obj = acc.objective;
        if (ratio >= so.rank_threshold && change < so.rel_tol)
            break;
    }

    // The relaxed solution can sit far from rank one with every tighter cut
    // around its principal direction infeasible. Restart from rank-one lifts
    // (the incumbent, and the restored principal vector of the relaxation)
    // with the level held at the threshold: each previous iterate stays
    // feasible, so the objective cannot decrease. The better run is kept.
    if (ratio < so.rank_threshold) {
        const CVec starts[] = {s.phi, restore_phi(cfg, ch, s, extract_phi(prev, cfg.a_max, k), set)};
        bool have = false;
        ConicSolution best;
        P3Layout best_lay;
        for (const CVec& start : starts) {
            prev = lift_bar(start, k);
            varpi = so.rank_threshold;
            ConicSolution run;
            P3Layout run_lay;
            bool any = false;
            double last = -std::numeric_limits<double>::infinity();
            for (int it = 1; it <= so.max_iter; ++it) {
                auto [sol, lay] = attempt(so.max_iter + it, 0.0);
                if (!sol.ok())
                    break;
                const double obj = sol.objective;
                run = std::move(sol);
                run_lay = std::move(lay);
                any = true;
                prev = run_lay.lifted.value(run);
                if (std::abs(obj - last) < so.rel_tol * std::max(std::abs(obj), 1e-12))
                    break;
                last = obj;
            }
            if (any && ratio_of(run_lay.lifted.value(run)) >= so.rank_threshold &&
                (!have || run.objective > best.objective)) {
                best = std::move(run);
                best_lay = std::move(run_lay);
                have = true;
            }
        }
        if (have) {
            acc = std::move(best);
            acc_lay = std::move(best_lay);
        }
        prev = acc_lay.lifted.value(acc);
        ratio = ratio_of(prev);
    }

    if (so.rank_one_polish && !acc_lay.lifted.rank_one) {
        varpi = 1.0;
        auto [sol, lay] = attempt(so.max_iter + 1, 0.0);
        if (sol.ok()) {
            acc = std::move(sol);
            acc_lay = std::move(lay);
            prev = acc_lay.lifted.value(acc);
            ratio = ratio_of(prev);
        }
    }

    res.phi = extract_phi(prev, cfg.a_max, k);
    res.gamma_lifted = acc.objective * acc_lay.gamma_scale;
    res.rank_ratio = ratio;
    res.status = ratio >= so.rank_threshold ? BlockStatus::ok : BlockStatus::degraded;
    if (res.status != BlockStatus::ok)
        res.message = "rank-one threshold not reached";
    (void)L;
    return res;
}

} // namespace arisrsma
