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

// Primal path-following barrier method for ConicProblem.
//
// Barrier:  -sum_k logdet X_k - sum_i log l_i(x)
//           - sum_j [ log(log v_j - u_j) + log v_j ]
// The Hessian is blockdiag(P, 0) + B W B^T with P^{-1}[D] = X D X per block,
// where the columns of B are the linear-row and exp-row directions. The
// Newton system is reduced to the small dense system in (y, nu, ds) with
// y = W B^T dx, so each step costs O(#rows * n^3) for the sandwich products
// plus a dense LU of size (#rows + #equalities + #scalars).

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <functional>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <Eigen/LU>
#include <Eigen/QR>

#include "arisrsma/conic.hpp"
#include "arisrsma/linalg.hpp"

namespace arisrsma
{

namespace
{

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Dir
{
    std::vector<std::pair<int, HermitianCoef>> mats;
    RVec scal;
    double constant = 0.0;
};

struct Program
{
    std::vector<Index> dims;
    Index ns = 0;
    std::vector<Dir> lin;                      // l(x) >= 0
    std::vector<Dir> eq;                       // e(x) == 0
    std::vector<std::pair<Dir, Dir>> exps;     // exp(u) <= v
    Dir obj;                                   // minimized

    double nu() const
    {
        double n = 0.0;
        for (Index d : dims)
            n += static_cast<double>(d);
        return n + static_cast<double>(lin.size()) + 2.0 * static_cast<double>(exps.size());
    }
};

struct Point
{
    std::vector<CMat> X;
    RVec s;
};

double linear_part(const Dir& d, const std::vector<CMat>& X, const RVec& s)
{
    double v = d.scal.size() > 0 ? d.scal.dot(s) : 0.0;
    for (const auto& [k, A] : d.mats)
        v += A.pair(X[static_cast<std::size_t>(k)]);
    return v;
}

double eval(const Dir& d, const Point& x)
{
    return linear_part(d, x.X, x.s) + d.constant;
}

double coef_norm2(const Dir& d)
{
    double n = d.scal.squaredNorm();
    for (const auto& [k, A] : d.mats)
        n += A.to_dense().squaredNorm();
    return n;
}

Dir to_dir(const AffineExpr& e, Index ns)
{
    Dir d;
    d.scal = RVec::Zero(ns);
    for (const auto& [v, coef] : e.mats) {
        bool merged = false;
        for (auto& [k, A] : d.mats)
            if (k == v) {
                A.add(coef);
                merged = true;
            }
        if (!merged)
            d.mats.emplace_back(v, coef);
    }
    for (const auto& [v, a] : e.scalars)
        d.scal(v) += a;
    d.constant = e.constant;
    return d;
}

void scale_dir(Dir& d, double s)
{
    for (auto& [k, A] : d.mats)
        A.scale(s);
    d.scal *= s;
    d.constant *= s;
}

// ---------------------------------------------------------------------------

struct Eval
{
    bool ok = false;
    double f = 0.0;  // t * obj + barrier
    std::vector<Eigen::LLT<CMat>> chol;
    RVec lin;
    RVec u, v;
};

Eval evaluate(const Program& P, const Point& x, double t)
{
    Eval e;
    double barrier = 0.0;
    e.chol.resize(P.dims.size());
    for (std::size_t k = 0; k < P.dims.size(); ++k) {
        e.chol[k].compute(x.X[k]);
        if (e.chol[k].info() != Eigen::Success)
            return e;
        const auto diag = e.chol[k].matrixLLT().diagonal().real();
        if ((diag.array() <= 0.0).any() || !diag.allFinite())
            return e;
        barrier -= 2.0 * diag.array().log().sum();
    }
    e.lin.resize(static_cast<Index>(P.lin.size()));
    for (std::size_t i = 0; i < P.lin.size(); ++i) {
        const double l = eval(P.lin[i], x);
        if (!(l > 0.0))
            return e;
        e.lin(static_cast<Index>(i)) = l;
        barrier -= std::log(l);
    }
    e.u.resize(static_cast<Index>(P.exps.size()));
    e.v.resize(static_cast<Index>(P.exps.size()));
    for (std::size_t j = 0; j < P.exps.size(); ++j) {
        const double u = eval(P.exps[j].first, x);
        const double v = eval(P.exps[j].second, x);
        if (!(v > 0.0))
            return e;
        const double z = std::log(v) - u;
        if (!(z > 0.0))
            return e;
        e.u(static_cast<Index>(j)) = u;
        e.v(static_cast<Index>(j)) = v;
        barrier -= std::log(z) + std::log(v);
    }
    e.f = t * eval(P.obj, x) + barrier;
    e.ok = std::isfinite(e.f);
    return e;
}

struct NewtonStep
{
    bool ok = false;
    Point dx;
    std::vector<CMat> dx_scaled;  // L^{-1} dX L^{-H} per block
    RVec nu;                      // equality multipliers of the step
    double decrement2 = 0.0;      // dx^T H dx
};

double hermitian_inner(const CMat& A, const CMat& B)
{
    return (A.array() * B.conjugate().array()).sum().real();
}

// Newton direction in scaled coordinates: with X = L L^H every coefficient
// is replaced by L^H A L and the step by L^{-1} dX L^{-H}. Directions along
// small eigenvalues of X then carry no amplified rounding error, which keeps
// the centering quadratic deep into the path.
NewtonStep newton_step(const Program& P, const Point& x, const Eval& ev, double t)
{
    NewtonStep st;
    const Index nb = static_cast<Index>(P.dims.size());
    const Index nl = static_cast<Index>(P.lin.size());
    const Index ne = static_cast<Index>(P.exps.size());
    const Index r = nl + 2 * ne;
    const Index p = static_cast<Index>(P.eq.size());
    const Index ns = P.ns;
    const Index ncol = r + p;

    // Column directions: B (linear rows, then exp u/v pairs), then E.
    std::vector<const Dir*> cols;
    cols.reserve(static_cast<std::size_t>(ncol));
    for (const auto& d : P.lin)
        cols.push_back(&d);
    for (const auto& [u, v] : P.exps) {
        cols.push_back(&u);
        cols.push_back(&v);
    }
    for (const auto& d : P.eq)
        cols.push_back(&d);

    // Gradient coefficients and W^{-1} on B.
    RVec gamma(r);
    RMat Winv = RMat::Zero(r, r);
    RMat Wmat = RMat::Zero(r, r);
    for (Index i = 0; i < nl; ++i) {
        const double l = ev.lin(i);
        gamma(i) = -1.0 / l;
        Winv(i, i) = l * l;
        Wmat(i, i) = 1.0 / (l * l);
    }
    for (Index j = 0; j < ne; ++j) {
        const double u = ev.u(j);
        const double v = ev.v(j);
        const double z = std::log(v) - u;
        const Index a = nl + 2 * j;
        gamma(a) = 1.0 / z;
        gamma(a + 1) = -(1.0 / v) * (1.0 / z + 1.0);
        Eigen::Matrix2d Psi;
        Psi(0, 0) = 1.0 / (z * z);
        Psi(0, 1) = Psi(1, 0) = -1.0 / (v * z * z);
        Psi(1, 1) = (1.0 / (v * v)) * (1.0 + 1.0 / z + 1.0 / (z * z));
        Wmat.block<2, 2>(a, a) = Psi;
        Winv.block<2, 2>(a, a) = Psi.inverse();
    }

    // Per block: scaled coefficients of every touching direction, and the
    // scaled gradient Zt = t C~ - I + sum gamma_a A~_a.
    std::vector<CMat> Lk(static_cast<std::size_t>(nb));
    std::vector<std::vector<std::pair<Index, CMat>>> At(static_cast<std::size_t>(nb));
    std::vector<CMat> Zt(static_cast<std::size_t>(nb));
    for (Index k = 0; k < nb; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        Lk[ki] = ev.chol[ki].matrixL();
        Zt[ki] = -CMat::Identity(P.dims[ki], P.dims[ki]);
    }
    for (const auto& [k, A] : P.obj.mats)
        Zt[static_cast<std::size_t>(k)] += t * A.congruence(Lk[static_cast<std::size_t>(k)]);
    for (Index a = 0; a < ncol; ++a) {
        for (const auto& [k, A] : cols[static_cast<std::size_t>(a)]->mats) {
            const auto ki = static_cast<std::size_t>(k);
            CMat T = A.congruence(Lk[ki]);
            if (a < r)
                Zt[ki] += gamma(a) * T;
            At[ki].emplace_back(a, std::move(T));
        }
    }

    // Schur entries S_ab = sum_k tr(A~_ak A~_bk) and h_a = <A~_a, Zt>.
    RMat S = RMat::Zero(ncol, ncol);
    RVec h = RVec::Zero(ncol);
    for (Index k = 0; k < nb; ++k) {
        const auto& list = At[static_cast<std::size_t>(k)];
        for (std::size_t i = 0; i < list.size(); ++i) {
            const Index a = list[i].first;
            h(a) += hermitian_inner(list[i].second, Zt[static_cast<std::size_t>(k)]);
            for (std::size_t j = i; j < list.size(); ++j) {
                const Index b = list[j].first;
                const double v = hermitian_inner(list[i].second, list[j].second);
                S(a, b) += v;
                if (a != b)
                    S(b, a) += v;
            }
        }
    }

    // Gradient on the scalars.
    RVec gs = t * P.obj.scal;
    for (Index a = 0; a < r; ++a)
        gs += gamma(a) * cols[static_cast<std::size_t>(a)]->scal;

    RVec eq_res(p);
    for (Index q = 0; q < p; ++q)
        eq_res(q) = eval(P.eq[static_cast<std::size_t>(q)], x);

    const Index N = r + p + ns;
    RMat K = RMat::Zero(N, N);
    RVec rhs = RVec::Zero(N);
    K.topLeftCorner(r, r) = -(S.topLeftCorner(r, r) + Winv);
    K.block(0, r, r, p) = -S.block(0, r, r, p);
    K.block(r, 0, p, r) = -S.block(r, 0, p, r);
    K.block(r, r, p, p) = -S.block(r, r, p, p);
    for (Index a = 0; a < ncol; ++a) {
        const RVec& sc = cols[static_cast<std::size_t>(a)]->scal;
        K.block(a, r + p, 1, ns) = sc.transpose();
        K.block(r + p, a, ns, 1) = sc;
    }
    rhs.head(r) = h.head(r);
    rhs.segment(r, p) = h.tail(p) - eq_res;
    rhs.tail(ns) = -gs;

    // Equilibrate rows/columns symmetrically before factorizing.
    RVec dscale(N);
    for (Index i = 0; i < N; ++i) {
        const double m = K.row(i).cwiseAbs().maxCoeff();
        dscale(i) = m > 0.0 ? 1.0 / std::sqrt(m) : 1.0;
    }
    const RMat Ks = dscale.asDiagonal() * K * dscale.asDiagonal();
    Eigen::PartialPivLU<RMat> lu(Ks);
    RVec sol = dscale.asDiagonal() * lu.solve(dscale.asDiagonal() * rhs);
    // One step of iterative refinement.
    const RVec res = rhs - K * sol;
    sol += dscale.asDiagonal() * lu.solve(dscale.asDiagonal() * res);
    if (!sol.allFinite())
        return st;

    const RVec y = sol.head(r);
    const RVec nu = sol.segment(r, p);
    st.dx.s = sol.tail(ns);
    st.nu = nu;
    st.dx.X.resize(static_cast<std::size_t>(nb));
    st.dx_scaled.resize(static_cast<std::size_t>(nb));
    double dec = 0.0;
    for (Index k = 0; k < nb; ++k) {
        const auto ki = static_cast<std::size_t>(k);
        CMat D = -Zt[ki];
        for (const auto& [a, Ta] : At[ki])
            D -= (a < r ? y(a) : nu(a - r)) * Ta;
        symmetrize(D);
        dec += D.squaredNorm();
        CMat DX = Lk[ki] * D * Lk[ki].adjoint();
        symmetrize(DX);
        st.dx.X[ki] = std::move(DX);
        st.dx_scaled[ki] = std::move(D);
    }

    // Decrement dx^T H dx.
    RVec Bdx = RVec::Zero(r);
    for (Index a = 0; a < r; ++a)
        Bdx(a) = cols[static_cast<std::size_t>(a)]->scal.dot(st.dx.s);
    for (Index k = 0; k < nb; ++k)
        for (const auto& [a, Ta] : At[static_cast<std::size_t>(k)])
            if (a < r)
                Bdx(a) += hermitian_inner(Ta, st.dx_scaled[static_cast<std::size_t>(k)]);
    dec += Bdx.dot(Wmat * Bdx);
    st.decrement2 = dec;
    st.ok = std::isfinite(dec);
    return st;
}

// Largest alpha in (0, 1] keeping the PSD blocks and linear rows interior.
double max_step(const Program& P, const Eval& ev, const NewtonStep& st)
{
    double amax = 1.0;
    for (std::size_t k = 0; k < P.dims.size(); ++k) {
        const double lmin =
            Eigen::SelfAdjointEigenSolver<CMat>(st.dx_scaled[k], Eigen::EigenvaluesOnly)
                .eigenvalues()(0);
        if (lmin < 0.0)
            amax = std::min(amax, 0.99 / -lmin);
    }
    for (std::size_t i = 0; i < P.lin.size(); ++i) {
        const double d = linear_part(P.lin[i], st.dx.X, st.dx.s);
        if (d < 0.0)
            amax = std::min(amax, 0.99 * ev.lin(static_cast<Index>(i)) / -d);
    }
    return amax;
}

// Backtracking on the merit t c^T x + barrier(x) + nu^T e(x), whose slope
// along the Newton direction is exactly -dx^T H dx. Increments are formed
// directly (linear terms times alpha, logdet(I + alpha dX~), log1p) so that
// they stay accurate when t c^T x itself is huge. Returns 0 on failure.
double line_search(const Program& P, const Point& x, const Eval& ev, const NewtonStep& st,
                   double t)
{
    double lin_slope = t * linear_part(P.obj, st.dx.X, st.dx.s);
    for (std::size_t q = 0; q < P.eq.size(); ++q)
        lin_slope += st.nu(static_cast<Index>(q)) * linear_part(P.eq[q], st.dx.X, st.dx.s);
    RVec dl(static_cast<Index>(P.lin.size()));
    for (std::size_t i = 0; i < P.lin.size(); ++i)
        dl(static_cast<Index>(i)) = linear_part(P.lin[i], st.dx.X, st.dx.s);
    RVec du(static_cast<Index>(P.exps.size())), dv(static_cast<Index>(P.exps.size()));
    for (std::size_t j = 0; j < P.exps.size(); ++j) {
        du(static_cast<Index>(j)) = linear_part(P.exps[j].first, st.dx.X, st.dx.s);
        dv(static_cast<Index>(j)) = linear_part(P.exps[j].second, st.dx.X, st.dx.s);
    }
    (void)x;

    double alpha = max_step(P, ev, st);
    for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        double delta = alpha * lin_slope;
        bool ok = true;
        for (std::size_t k = 0; k < P.dims.size() && ok; ++k) {
            CMat T = alpha * st.dx_scaled[k];
            T.diagonal().array() += 1.0;
            Eigen::LLT<CMat> llt(T);
            if (llt.info() != Eigen::Success) {
                ok = false;
                break;
            }
            const auto d = llt.matrixLLT().diagonal().real();
            if ((d.array() <= 0.0).any()) {
                ok = false;
                break;
            }
            delta -= 2.0 * d.array().log().sum();
        }
        for (Index i = 0; i < dl.size() && ok; ++i) {
            const double rel = alpha * dl(i) / ev.lin(i);
            if (!(rel > -1.0))
                ok = false;
            else
                delta -= std::log1p(rel);
        }
        for (Index j = 0; j < du.size() && ok; ++j) {
            const double v = ev.v(j);
            const double z = std::log(v) - ev.u(j);
            const double rv = alpha * dv(j) / v;
            if (!(rv > -1.0)) {
                ok = false;
                break;
            }
            const double lv = std::log1p(rv);
            const double zn = z + lv - alpha * du(j);
            if (!(zn > 0.0)) {
                ok = false;
                break;
            }
            delta -= std::log(zn / z) + lv;
        }
        if (ok && std::isfinite(delta) && delta <= -0.25 * alpha * st.decrement2)
            return alpha;
    }
    return 0.0;
}

Point axpy(const Point& x, double a, const Point& dx)
{
    Point y;
    y.X.resize(x.X.size());
    for (std::size_t k = 0; k < x.X.size(); ++k) {
        y.X[k] = x.X[k] + a * dx.X[k];
        symmetrize(y.X[k]);
    }
    y.s = x.s + a * dx.s;
    return y;
}

struct BarrierResult
{
    enum class Exit
    {
        converged,
        early_stop,
        stalled,
        budget,
        unbounded
    };
    Exit exit = Exit::stalled;
    Point x;
    double t = 1.0;
    int newton = 0;
};

struct BarrierControl
{
    double t0 = 1.0;
    double mu = 20.0;
    double tol = 1e-8;
    int budget = 600;
    bool verbose = false;
    const char* tag = "";
    // Checked after every Newton step; returns true to stop immediately.
    std::function<bool(const Point&)> early_stop;
    // Checked after every centering with the current gap bound.
    std::function<bool(const Point&, double gap)> after_centering;
    double objective_sign = 1.0;  // for reporting / relative tolerance
    // Applied after every centering (equality drift removal).
    std::function<Point(const Point&)> polish;
};

BarrierResult run_barrier(const Program& P, Point x, const BarrierControl& ctl)
{
    BarrierResult br;
    const double nu = P.nu();
    double t = ctl.t0;
    int newton = 0;

    for (int outer = 0; outer < 200; ++outer) {
        // Centering.
        bool stalled = false;
        double prev_dec = kInf;
        for (int it = 0; it < 80; ++it) {
            const Eval ev = evaluate(P, x, t);
            if (!ev.ok) {
                stalled = true;
                break;
            }
            const NewtonStep st = newton_step(P, x, ev, t);
            if (!st.ok) {
                stalled = true;
                break;
            }
            // Converged, or sitting at the rounding floor of the direction
            // (no more quadratic contraction).
            if (st.decrement2 / 2.0 <= 1e-8 || (st.decrement2 < 1e-5 && st.decrement2 > 0.25 * prev_dec))
                break;
            prev_dec = st.decrement2;
            if (++newton > ctl.budget) {
                br.exit = BarrierResult::Exit::budget;
                br.x = x;
                br.t = t;
                br.newton = newton;
                return br;
            }
            const double alpha = line_search(P, x, ev, st, t);
            if (!(alpha > 0.0)) {
                // Near the center the remaining decrease is below rounding.
                stalled = st.decrement2 > 1e-5;
                break;
            }
            x = axpy(x, alpha, st.dx);
            if (ctl.early_stop && ctl.early_stop(x)) {
                br.exit = BarrierResult::Exit::early_stop;
                br.x = x;
                br.t = t;
                br.newton = newton;
                return br;
            }
            const double objv = eval(P.obj, x);
            if (!std::isfinite(objv) || std::abs(objv) > 1e14) {
                br.exit = BarrierResult::Exit::unbounded;
                br.x = x;
                br.t = t;
                br.newton = newton;
                return br;
            }
        }

        if (ctl.polish)
            x = ctl.polish(x);
        const double gap = nu / t;
        const double objv = eval(P.obj, x);
        if (ctl.verbose)
            std::fprintf(stderr, "[conic%s] t=%.3e gap=%.3e obj=%.10e newton=%d%s\n", ctl.tag, t,
                         gap, ctl.objective_sign * objv, newton, stalled ? " (stalled)" : "");
        if (ctl.after_centering && ctl.after_centering(x, gap)) {
            br.exit = BarrierResult::Exit::early_stop;
            break;
        }
        if (gap <= ctl.tol * std::max(1.0, std::abs(objv))) {
            br.exit = BarrierResult::Exit::converged;
            break;
        }
        if (stalled) {
            br.exit = BarrierResult::Exit::stalled;
            break;
        }
        t *= ctl.mu;
    }
    br.x = std::move(x);
    br.t = t;
    br.newton = newton;
    return br;
}

// ---------------------------------------------------------------------------

struct Converted
{
    Program prog;
    bool trivially_infeasible = false;
    std::string message;
};

Converted convert(const ConicProblem& p)
{
    Converted c;
    Program& P = c.prog;
    for (const auto& mv : p.matrix_vars())
        P.dims.push_back(mv.dim);
    P.ns = static_cast<Index>(p.scalar_vars().size());

    std::vector<bool> used(static_cast<std::size_t>(P.ns), false);
    auto mark = [&](const AffineExpr& e) {
        for (const auto& [v, a] : e.scalars)
            if (a != 0.0)
                used[static_cast<std::size_t>(v)] = true;
    };

    auto push_row = [&](Dir d, bool equality, const std::string& label) {
        const double n2 = coef_norm2(d);
        if (n2 == 0.0) {
            const bool ok = equality ? std::abs(d.constant) <= 1e-12 : d.constant >= 0.0;
            if (!ok) {
                c.trivially_infeasible = true;
                c.message = "constant constraint violated: " + label;
            }
            return;
        }
        scale_dir(d, 1.0 / std::sqrt(n2));
        (equality ? P.eq : P.lin).push_back(std::move(d));
    };

    for (Index j = 0; j < P.ns; ++j) {
        const auto& sv = p.scalar_vars()[static_cast<std::size_t>(j)];
        if (std::isfinite(sv.lower)) {
            Dir d;
            d.scal = RVec::Zero(P.ns);
            d.scal(j) = 1.0;
            d.constant = -sv.lower;
            if (sv.lower == sv.upper) {
                push_row(std::move(d), true, sv.name);
                used[static_cast<std::size_t>(j)] = true;
                continue;
            }
            push_row(std::move(d), false, sv.name);
            used[static_cast<std::size_t>(j)] = true;
        }
        if (std::isfinite(sv.upper)) {
            Dir d;
            d.scal = RVec::Zero(P.ns);
            d.scal(j) = -1.0;
            d.constant = sv.upper;
            push_row(std::move(d), false, sv.name);
            used[static_cast<std::size_t>(j)] = true;
        }
    }
    for (const auto& con : p.constraints()) {
        mark(con.expr);
        Dir d = to_dir(con.expr, P.ns);
        d.constant -= con.rhs;
        switch (con.sense) {
        case Sense::ge: push_row(std::move(d), false, con.label); break;
        case Sense::le:
            scale_dir(d, -1.0);
            push_row(std::move(d), false, con.label);
            break;
        case Sense::eq: push_row(std::move(d), true, con.label); break;
        }
    }
    for (const auto& ec : p.exp_constraints()) {
        mark(ec.u);
        mark(ec.v);
        P.exps.emplace_back(to_dir(ec.u, P.ns), to_dir(ec.v, P.ns));
    }
    P.obj = to_dir(p.objective(), P.ns);
    scale_dir(P.obj, -1.0);

    // Scalars that appear nowhere are pinned to zero (they would otherwise
    // make the Newton system singular).
    for (Index j = 0; j < P.ns; ++j) {
        if (used[static_cast<std::size_t>(j)])
            continue;
        if (P.obj.scal(j) != 0.0) {
            c.trivially_infeasible = false;
            c.message = "objective unbounded in unconstrained scalar";
        }
        Dir d;
        d.scal = RVec::Zero(P.ns);
        d.scal(j) = 1.0;
        P.eq.push_back(std::move(d));
    }
    return c;
}

bool strictly_feasible(const Program& P, const Point& x)
{
    return evaluate(P, x, 0.0).ok;
}

// Minimum-norm correction dx with E(x + dx) = 0, i.e. dx = sum_q z_q E_q
// with Gram(E) z = -e(x). Returns false if the system is inconsistent.
bool equality_correction(const Program& P, const Point& x, Point& dx)
{
    const Index p = static_cast<Index>(P.eq.size());
    dx.X.clear();
    for (Index d : P.dims)
        dx.X.push_back(CMat::Zero(d, d));
    dx.s = RVec::Zero(P.ns);
    if (p == 0)
        return true;

    RMat Gm(p, p);
    RVec b(p);
    for (Index a = 0; a < p; ++a) {
        const Dir& da = P.eq[static_cast<std::size_t>(a)];
        b(a) = -eval(da, x);
        for (Index q = a; q < p; ++q) {
            const Dir& dq = P.eq[static_cast<std::size_t>(q)];
            double g = da.scal.dot(dq.scal);
            for (const auto& [k, A] : da.mats)
                for (const auto& [k2, B] : dq.mats)
                    if (k == k2)
                        g += A.pair(B.to_dense());
            Gm(a, q) = Gm(q, a) = g;
        }
    }
    const RVec z = Gm.completeOrthogonalDecomposition().solve(b);
    for (Index a = 0; a < p; ++a) {
        const Dir& da = P.eq[static_cast<std::size_t>(a)];
        dx.s += z(a) * da.scal;
        for (const auto& [k, A] : da.mats)
            dx.X[static_cast<std::size_t>(k)] += z(a) * A.to_dense();
    }
    Point y = axpy(x, 1.0, dx);
    double worst = 0.0;
    for (const auto& d : P.eq)
        worst = std::max(worst, std::abs(eval(d, y)));
    return worst <= 1e-9 * std::max(1.0, b.cwiseAbs().maxCoeff());
}

// Minimum-norm point satisfying the equalities (identity blocks when there
// are none).
bool equality_point(const Program& P, Point& x)
{
    Point zero;
    for (Index d : P.dims)
        zero.X.push_back(CMat::Zero(d, d));
    zero.s = RVec::Zero(P.ns);
    if (P.eq.empty()) {
        x = zero;
        for (auto& X : x.X)
            X.setIdentity();
        return true;
    }
    Point dx;
    const bool ok = equality_correction(P, zero, dx);
    x = dx;
    return ok;
}

// Removes the equality drift accumulated along the path. The correction is
// the minimum-norm one in the local metric, dX_k = sum_q z_q X_k E_qk X_k,
// which is a small relative change of X and so preserves definiteness.
Point polish_equalities(const Program& P, const Point& x)
{
    const Index p = static_cast<Index>(P.eq.size());
    if (p == 0)
        return x;
    std::vector<std::vector<std::pair<Index, CMat>>> Y(P.dims.size());
    for (Index a = 0; a < p; ++a)
        for (const auto& [k, A] : P.eq[static_cast<std::size_t>(a)].mats)
            Y[static_cast<std::size_t>(k)].emplace_back(a, A.sandwich(x.X[static_cast<std::size_t>(k)]));
    RMat Gm = RMat::Zero(p, p);
    RVec b(p);
    for (Index a = 0; a < p; ++a) {
        const Dir& da = P.eq[static_cast<std::size_t>(a)];
        b(a) = -eval(da, x);
        for (Index q = 0; q < p; ++q)
            Gm(a, q) = da.scal.dot(P.eq[static_cast<std::size_t>(q)].scal);
        for (const auto& [k, A] : da.mats)
            for (const auto& [q, Yq] : Y[static_cast<std::size_t>(k)])
                Gm(a, q) += A.pair(Yq);
    }
    if (b.cwiseAbs().maxCoeff() == 0.0)
        return x;
    const RVec z = Gm.completeOrthogonalDecomposition().solve(b);
    Point y = x;
    for (Index a = 0; a < p; ++a)
        y.s += z(a) * P.eq[static_cast<std::size_t>(a)].scal;
    for (std::size_t k = 0; k < Y.size(); ++k) {
        for (const auto& [a, Ya] : Y[k])
            y.X[k] += z(a) * Ya;
        symmetrize(y.X[k]);
    }
    double before = 0.0, after = 0.0;
    for (const auto& d : P.eq) {
        before = std::max(before, std::abs(eval(d, x)));
        after = std::max(after, std::abs(eval(d, y)));
    }
    return (after < before && strictly_feasible(P, y)) ? y : x;
}

} // namespace

ConicSolution solve(const ConicProblem& problem, const SolverOptions& opts)
{
    problem.validate();
    ConicSolution sol;
    Converted cv = convert(problem);
    const Program& P = cv.prog;
    if (cv.trivially_infeasible) {
        sol.status = SolveStatus::infeasible;
        sol.message = cv.message;
        return sol;
    }

    Point x0;
    if (!equality_point(P, x0)) {
        sol.status = SolveStatus::infeasible;
        sol.message = "inconsistent equality constraints";
        return sol;
    }

    int newton_used = 0;
    Point x = x0;
    if (!strictly_feasible(P, x0)) {
        // Phase I on (Y, s, sigma) with X = Y - sigma I; every normalized
        // row is relaxed by +sigma and sigma is minimized.
        Program Q;
        Q.dims = P.dims;
        Q.ns = P.ns + 1;
        const Index sig = P.ns;
        auto lift = [&](const Dir& d, double sigma_extra) {
            Dir e;
            e.mats = d.mats;
            e.scal = RVec::Zero(Q.ns);
            e.scal.head(P.ns) = d.scal;
            double tr = 0.0;
            for (const auto& [k, A] : d.mats)
                tr += A.trace();
            e.scal(sig) = sigma_extra - tr;
            e.constant = d.constant;
            return e;
        };
        for (const auto& d : P.lin)
            Q.lin.push_back(lift(d, 1.0));
        for (const auto& d : P.eq)
            Q.eq.push_back(lift(d, 0.0));
        for (const auto& [u, v] : P.exps)
            Q.exps.emplace_back(lift(u, -1.0), lift(v, 1.0));

        // Start: large enough sigma.
        double sigma0 = 0.0;
        for (const auto& X : x0.X)
            sigma0 = std::max(sigma0, -hermitian_min_eigenvalue(X));
        for (const auto& d : P.lin)
            sigma0 = std::max(sigma0, -eval(d, x0));
        sigma0 += 1.0;
        auto exp_ok = [&](double s) {
            for (const auto& [u, v] : P.exps) {
                const double uu = eval(u, x0) - s;
                const double vv = eval(v, x0) + s;
                if (!(vv > 0.0) || !(std::log(vv) - uu > 0.0))
                    return false;
            }
            return true;
        };
        for (int i = 0; i < 200 && !exp_ok(sigma0); ++i)
            sigma0 *= 2.0;

        {
            Dir floor;
            floor.scal = RVec::Zero(Q.ns);
            floor.scal(sig) = 1.0;
            floor.constant = 1.0;
            Q.lin.push_back(floor);
            Dir cap;
            cap.scal = RVec::Zero(Q.ns);
            cap.scal(sig) = -1.0;
            cap.constant = 2.0 * sigma0 + 1.0;
            Q.lin.push_back(cap);
        }
        Q.obj.scal = RVec::Zero(Q.ns);
        Q.obj.scal(sig) = 1.0;

        Point y;
        for (const auto& X : x0.X)
            y.X.push_back(X + sigma0 * CMat::Identity(X.rows(), X.cols()));
        y.s = RVec::Zero(Q.ns);
        y.s.head(P.ns) = x0.s;
        y.s(sig) = sigma0;

        bool certified_infeasible = false;
        BarrierControl ctl;
        ctl.t0 = 1.0 / std::max(1.0, sigma0);
        ctl.mu = opts.mu;
        ctl.tol = opts.tol;
        ctl.budget = opts.max_newton;
        ctl.verbose = opts.verbose;
        ctl.tag = ":phase1";
        ctl.early_stop = [&](const Point& z) { return z.s(sig) < 0.0; };
        const double nuQ = Q.nu();
        ctl.after_centering = [&](const Point& z, double gap) {
            (void)nuQ;
            if (z.s(sig) - gap > 0.0 || (gap <= 1e-10 && z.s(sig) >= 0.0)) {
                certified_infeasible = true;
                return true;
            }
            return false;
        };
        const BarrierResult r1 = run_barrier(Q, y, ctl);
        newton_used = r1.newton;
        const double sigma = r1.x.s(sig);
        if (r1.exit != BarrierResult::Exit::early_stop || certified_infeasible || !(sigma < 0.0)) {
            sol.iterations = newton_used;
            if (certified_infeasible || r1.exit == BarrierResult::Exit::converged ||
                r1.exit == BarrierResult::Exit::stalled) {
                sol.status = SolveStatus::infeasible;
                std::ostringstream m;
                m << "phase I: minimal relaxation " << sigma << " >= 0";
                sol.message = m.str();
            } else {
                sol.status = SolveStatus::numerical_failure;
                sol.message = "phase I did not finish";
            }
            return sol;
        }
        x.X.clear();
        for (const auto& Yk : r1.x.X)
            x.X.push_back(Yk - sigma * CMat::Identity(Yk.rows(), Yk.cols()));
        x.s = r1.x.s.head(P.ns);
        if (!strictly_feasible(P, x)) {
            sol.status = SolveStatus::numerical_failure;
            sol.iterations = newton_used;
            sol.message = "phase I point not strictly feasible";
            return sol;
        }
    }

    BarrierControl ctl;
    ctl.t0 = 1.0;
    ctl.mu = opts.mu;
    ctl.tol = opts.tol;
    ctl.budget = std::max(1, opts.max_newton - newton_used);
    ctl.verbose = opts.verbose;
    ctl.tag = "";
    ctl.objective_sign = -1.0;
    ctl.polish = [&](const Point& z) { return polish_equalities(P, z); };
    const BarrierResult r2 = run_barrier(P, x, ctl);

    sol.iterations = newton_used + r2.newton;
    const Point xf = polish_equalities(P, r2.x);
    sol.X = xf.X;
    sol.s = xf.s;
    sol.gap = P.nu() / r2.t;
    {
        Point xp{sol.X, sol.s};
        sol.objective = -eval(P.obj, xp);
    }
    const double rel = sol.gap / std::max(1.0, std::abs(sol.objective));
    switch (r2.exit) {
    case BarrierResult::Exit::converged:
        sol.status = SolveStatus::optimal;
        break;
    case BarrierResult::Exit::stalled:
    case BarrierResult::Exit::budget:
        // Accept a slightly less accurate answer when progress stalls near
        // the end of the path.
        if (rel <= std::max(opts.stall_gap, opts.tol)) {
            sol.status = SolveStatus::optimal;
            sol.message = "reduced accuracy";
        } else {
            sol.status = SolveStatus::numerical_failure;
            sol.message = r2.exit == BarrierResult::Exit::budget ? "Newton budget exhausted"
                                                                 : "line search stalled";
        }
        break;
    case BarrierResult::Exit::unbounded:
        sol.status = SolveStatus::numerical_failure;
        sol.message = "objective appears unbounded";
        break;
    case BarrierResult::Exit::early_stop:
        sol.status = SolveStatus::numerical_failure;
        break;
    }
    return sol;
}

} // namespace arisrsma
