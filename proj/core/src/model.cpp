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

#include "arisrsma/model.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace arisrsma
{

namespace
{

CMat sum_targets(const ChannelSet& ch, Index L, Index skip = -1)
{
    CMat G = CMat::Zero(L, L);
    for (std::size_t j = 0; j < ch.G.size(); ++j)
        if (static_cast<Index>(j) != skip)
            G += ch.G[j];
    return G;
}

// Phi H_br, i.e. row l of H_br scaled by phi_l.
CMat reflected_br(const ChannelSet& ch, const CVec& phi)
{
    return phi.asDiagonal() * ch.H_br;
}

} // namespace

DesignState make_state(Index M, Index L, Index U, Index Q)
{
    DesignState s;
    s.F = CMat::Zero(M, U + 1);
    s.phi = CVec::Zero(L);
    s.c = RVec::Zero(U);
    s.w.assign(static_cast<std::size_t>(Q), CVec::Zero(M));
    return s;
}

CascadeMatrices build_cascade_matrices(const SystemConfig& cfg, const ChannelSet& ch,
                                       const CVec& phi, const std::vector<CVec>* w)
{
    const Index L = ch.H_br.rows();
    const Index M = ch.H_br.cols();
    const Index Q = static_cast<Index>(ch.G.size());
    if (phi.size() != L)
        throw std::invalid_argument("build_cascade_matrices: phi has wrong length");

    CascadeMatrices cm;
    const CMat PH = reflected_br(ch, phi);  // Phi H_br
    const CMat G = sum_targets(ch, L);
    const auto Phi = phi.asDiagonal();

    for (Index q = 0; q < Q; ++q) {
        CMat Hq = PH.adjoint() * ch.G[static_cast<std::size_t>(q)] * PH;
        CMat Ht = PH.adjoint() * sum_targets(ch, L, q) * PH;
        cm.H_bq.push_back(std::move(Hq));
        cm.H_bq_tilde.push_back(std::move(Ht));
    }

    const CMat Hz1 = PH.adjoint() * G * Phi;  // M x L
    const CMat& Hz2 = PH.adjoint();
    cm.C = cfg.sigma_z2 * (Hz1 * Hz1.adjoint() + Hz2 * Hz2.adjoint()) +
           cfg.sigma_r2 * CMat::Identity(M, M);
    symmetrize(cm.C);

    // Second-pass signal at the ARIS output is Phi^H G Phi H_br F.
    const CMat K = phi.conjugate().asDiagonal() * G * PH;
    cm.Sigma = PH.adjoint() * PH + K.adjoint() * K;
    symmetrize(cm.Sigma);

    const CMat PGP = phi.conjugate().asDiagonal() * G * Phi;
    cm.eps2 = cfg.sigma_z2 * PGP.squaredNorm() + 2.0 * cfg.sigma_z2 * phi.squaredNorm();

    for (std::size_t u = 0; u < ch.h_ru.size(); ++u)
        cm.eps3.push_back(cfg.sigma_z2 * ch.h_ru[u].cwiseProduct(phi).squaredNorm() +
                          cfg.sigma_u2);

    if (w != nullptr) {
        if (static_cast<Index>(w->size()) != Q)
            throw std::invalid_argument("build_cascade_matrices: need one w per target");
        for (const auto& wq : *w)
            cm.eps1.push_back((wq.adjoint() * cm.C * wq).value().real());
    }
    return cm;
}

CVec equivalent_user_channel(const ChannelSet& ch, const CVec& phi, Index u)
{
    const auto ui = static_cast<std::size_t>(u);
    return ch.h_bu[ui] + ch.H_br.adjoint() * (phi.conjugate().asDiagonal() * ch.h_ru[ui]);
}

UserSinr user_sinrs(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                    Index u)
{
    const Index U = s.private_streams();
    if (U < 1 || u < 0 || u >= U)
        throw std::invalid_argument("user_sinrs: user index out of range");
    const CVec h = equivalent_user_channel(ch, s.phi, u);
    const double noise =
        cfg.sigma_z2 * ch.h_ru[static_cast<std::size_t>(u)].cwiseProduct(s.phi).squaredNorm() +
        cfg.sigma_u2;

    double priv_all = 0.0;
    double own = 0.0;
    for (Index k = 0; k < U; ++k) {
        const double g = std::norm(h.dot(s.F.col(k)));  // |h^H f_k|^2
        priv_all += g;
        if (k == u)
            own = g;
    }
    const double common = std::norm(h.dot(s.F.col(U)));

    UserSinr out;
    out.common = common / (priv_all + noise);
    out.priv = own / (priv_all - own + noise);
    return out;
}

double achievable_rate(double gamma)
{
    return std::log2(1.0 + gamma);
}

double echo_sinr(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s, Index q)
{
    const CascadeMatrices cm = build_cascade_matrices(cfg, ch, s.phi);
    const CVec& w = s.w[static_cast<std::size_t>(q)];
    const auto qi = static_cast<std::size_t>(q);
    const double num = (w.adjoint() * cm.H_bq[qi] * s.F).squaredNorm();
    const double den = (w.adjoint() * cm.H_bq_tilde[qi] * s.F).squaredNorm() +
                       (w.adjoint() * cm.C * w).value().real();
    return num / den;
}

double min_echo_sinr(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s)
{
    double best = std::numeric_limits<double>::infinity();
    for (Index q = 0; q < static_cast<Index>(ch.G.size()); ++q)
        best = std::min(best, echo_sinr(cfg, ch, s, q));
    return best;
}

double aris_power(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s)
{
    const Index L = ch.H_br.rows();
    const CMat G = sum_targets(ch, L);
    const CMat PH = reflected_br(ch, s.phi);
    const CMat PGP = s.phi.conjugate().asDiagonal() * G * s.phi.asDiagonal();
    return (PH * s.F).squaredNorm() + (PGP * ch.H_br * s.F).squaredNorm() +
           cfg.sigma_z2 * PGP.squaredNorm() + 2.0 * cfg.sigma_z2 * s.phi.squaredNorm();
}

// ---------------------------------------------------------------------------
// Quartic kernels

void QuarticKernel::add_term(double coef, const CMat& G, const CMat& A, const CMat& B)
{
    assert(G.rows() == L_ && A.rows() == L_ && B.rows() == L_);
    terms_.push_back({coef, G, A, B});
}

void QuarticKernel::add_diagonal(const RVec& d)
{
    assert(d.size() == dim());
    if (diag_)
        *diag_ += d;
    else
        diag_ = d;
}

void QuarticKernel::add_scaled(double coef, const QuarticKernel& other)
{
    if (L_ == 0)
        L_ = other.L_;
    for (const auto& t : other.terms_)
        terms_.push_back({coef * t.coef, t.G, t.A, t.B});
    if (other.diag_)
        add_diagonal(coef * *other.diag_);
}

CVec QuarticKernel::apply(const CVec& x) const
{
    CVec out = CVec::Zero(dim());
    const Eigen::Map<const CMat> X(x.data(), L_, L_);
    Eigen::Map<CMat> Out(out.data(), L_, L_);
    for (const auto& t : terms_) {
        const CMat Y = t.G.conjugate().cwiseProduct(X);
        Out += t.coef * t.G.cwiseProduct(t.A.transpose() * Y * t.B.transpose());
    }
    if (diag_)
        out += diag_->cast<cd>().cwiseProduct(x);
    return out;
}

double QuarticKernel::quadratic_form(const CVec& phi) const
{
    const CVec x = lift_phi(phi);
    return x.dot(apply(x)).real();
}

CMat QuarticKernel::dense() const
{
    const Index n = dim();
    CMat K = CMat::Zero(n, n);
    for (const auto& t : terms_)
        for (Index l = 0; l < L_; ++l)
            for (Index k = 0; k < L_; ++k)
                for (Index j = 0; j < L_; ++j)
                    for (Index i = 0; i < L_; ++i)
                        K(i + L_ * j, k + L_ * l) += t.coef * t.G(i, j) * std::conj(t.G(k, l)) *
                                                     t.A(k, i) * t.B(j, l);
    if (diag_)
        K.diagonal() += diag_->cast<cd>();
    return K;
}

CVec lift_phi(const CVec& phi)
{
    const CMat P = phi * phi.adjoint();
    return Eigen::Map<const CVec>(P.data(), P.size());
}

QuarticForms build_quartic_forms(const SystemConfig& cfg, const ChannelSet& ch, const CMat& F,
                                 const CVec& w_q, Index q)
{
    const Index L = ch.H_br.rows();
    const CMat HF = ch.H_br * F;
    CMat Fbar = HF * HF.adjoint();
    symmetrize(Fbar);
    const CVec b = ch.H_br * w_q;
    CMat Wbar = b * b.adjoint();
    symmetrize(Wbar);
    const CMat G = sum_targets(ch, L);
    const CMat Gq = ch.G[static_cast<std::size_t>(q)];
    const CMat Gt = sum_targets(ch, L, q);
    const CMat I = CMat::Identity(L, L);

    QuarticForms qf;
    qf.M1 = QuarticKernel(L);
    qf.M1.add_term(1.0, Gq, Wbar, Fbar);
    qf.M2 = QuarticKernel(L);
    qf.M2.add_term(1.0, Gt, Wbar, Fbar);
    qf.M3 = QuarticKernel(L);
    qf.M3.add_term(1.0, G, Wbar, I);
    qf.M4 = Wbar.diagonal().real().cast<cd>().asDiagonal();

    qf.D1 = QuarticKernel(L);
    qf.D1.add_term(1.0, G, I, Fbar);
    const Eigen::Map<const CVec> vecG(G.data(), G.size());
    qf.D1.add_diagonal(cfg.sigma_z2 * vecG.cwiseAbs2());
    qf.D2 = Fbar.diagonal().real().cast<cd>().asDiagonal();
    qf.D2.diagonal().array() += 2.0 * cfg.sigma_z2;

    qf.tau_q = -cfg.sigma_r2 * w_q.squaredNorm();
    return qf;
}

// ---------------------------------------------------------------------------
// User quadratics

double StreamQuadratic::numerator(const CVec& phi) const
{
    return phi.dot(E1 * phi).real() + 2.0 * (E2 * phi).value().real() + tau1;
}

double StreamQuadratic::denominator(const CVec& phi, double sigma_z2) const
{
    return phi.dot((E3 + sigma_z2 * E4) * phi).real() + 2.0 * (E5 * phi).value().real() + tau2;
}

double StreamQuadratic::sinr(const CVec& phi, double sigma_z2) const
{
    return numerator(phi) / denominator(phi, sigma_z2);
}

UserQuadratics build_user_quadratics(const SystemConfig& cfg, const ChannelSet& ch,
                                     const CMat& F, Index u)
{
    const Index L = ch.H_br.rows();
    const Index U = F.cols() - 1;
    const auto ui = static_cast<std::size_t>(u);
    const CVec& hr = ch.h_ru[ui];
    const CVec& hb = ch.h_bu[ui];

    // Stream k reaches user u as t_k + r_k phi.
    auto row = [&](Index k) -> Eigen::RowVectorXcd {
        const CVec g = ch.H_br * F.col(k);
        return hr.conjugate().cwiseProduct(g).transpose();
    };
    auto direct = [&](Index k) -> cd { return hb.dot(F.col(k)); };

    UserQuadratics uq;
    StreamQuadratic& p = uq.p;
    p.E1 = CMat::Zero(L, L);
    p.E3 = CMat::Zero(L, L);
    p.E2 = Eigen::RowVectorXcd::Zero(L);
    p.E5 = Eigen::RowVectorXcd::Zero(L);
    p.E4 = hr.cwiseAbs2().cast<cd>().asDiagonal();
    p.tau2 = cfg.sigma_u2;
    for (Index k = 0; k < U; ++k) {
        const Eigen::RowVectorXcd r = row(k);
        const cd t = direct(k);
        if (k == u) {
            p.E1 = r.adjoint() * r;
            p.E2 = std::conj(t) * r;
            p.tau1 = std::norm(t);
        } else {
            p.E3 += r.adjoint() * r;
            p.E5 += std::conj(t) * r;
            p.tau2 += std::norm(t);
        }
    }

    StreamQuadratic& c = uq.c;
    const Eigen::RowVectorXcd rc = row(U);
    const cd tc = direct(U);
    c.E1 = rc.adjoint() * rc;
    c.E2 = std::conj(tc) * rc;
    c.tau1 = std::norm(tc);
    c.E3 = p.E1 + p.E3;
    c.E4 = p.E4;
    c.E5 = p.E2 + p.E5;
    c.tau2 = p.tau1 + p.tau2;

    for (CMat* m : {&p.E1, &p.E3, &p.E4, &c.E1, &c.E3, &c.E4})
        symmetrize(*m);
    return uq;
}

// ---------------------------------------------------------------------------

FeasibilityReport verify_feasibility(const SystemConfig& cfg, const ChannelSet& ch,
                                     const DesignState& s, double tol, const ConstraintSet& set)
{
    FeasibilityReport r;
    double worst = 0.0;
    auto note = [&](double v) { worst = std::max(worst, v); };

    if (set.rates) {
        const Index U = s.private_streams();
        const double csum = s.c.size() > 0 ? s.c.sum() : 0.0;
        for (Index u = 0; u < U; ++u) {
            const UserSinr g = user_sinrs(cfg, ch, s, u);
            const double Rmin = cfg.R_min[static_cast<std::size_t>(u)];
            const double cu = s.c.size() > u ? s.c(u) : 0.0;
            const double qos = (Rmin - cu - achievable_rate(g.priv)) / std::max(1.0, Rmin);
            r.qos.push_back(qos);
            note(qos);
            if (set.common) {
                const double cr = (csum - achievable_rate(g.common)) / std::max(1.0, csum);
                r.common.push_back(cr);
                note(cr);
            }
        }
        if (s.c.size() > 0)
            r.c_negative = std::max(0.0, -s.c.minCoeff());
        note(r.c_negative);
    }

    r.bs_power = (s.F.squaredNorm() - cfg.P_bs_max) / cfg.P_bs_max;
    note(r.bs_power);
    if (set.aris_power) {
        r.aris_power = (aris_power(cfg, ch, s) - cfg.P_ris_max) / cfg.P_ris_max;
        note(r.aris_power);
    }
    r.amplitude = (s.phi.cwiseAbs().maxCoeff() - cfg.a_max) / cfg.a_max;
    note(r.amplitude);

    bool have_w = !s.w.empty();
    for (const auto& w : s.w)
        have_w = have_w && w.squaredNorm() > 0.0;
    r.min_echo_sinr = have_w ? min_echo_sinr(cfg, ch, s) : 0.0;

    r.worst = worst;
    r.pass = worst <= tol;
    return r;
}

} // namespace arisrsma
