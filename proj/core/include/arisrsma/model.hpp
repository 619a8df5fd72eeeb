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
/// \file model.hpp
///
/// Closed-form physical quantities of the ARIS-assisted RSMA ISAC link and the
/// constant matrices consumed by the optimization blocks.
///
/// Notation: Phi = diag(phi), F = [f_p1 .. f_pU, f_c] (the common column may
/// be absent, see DesignState), b = H_br w, g_k = H_br f_k.
/// The vectorized ARIS variable is phi_t = vec(phi phi^H) in column-major
/// order, i.e. phi_t[i + L j] = phi_i conj(phi_j).
///
#ifndef ARISRSMA_MODEL_HPP
#define ARISRSMA_MODEL_HPP

#include <optional>
#include <vector>

#include <Eigen/Core>

#include "arisrsma/scenario.hpp"
#include "arisrsma/types.hpp"

namespace arisrsma
{

/// Decision variables of the joint design.
struct DesignState
{
    /// M x (U+1): private beams in columns 0..U-1, common beam in column U.
    /// Sensing-only designs carry a single column (no user streams).
    CMat F;
    CVec phi;              ///< ARIS coefficients, length L
    RVec c;                ///< common-rate split per user, bits/s/Hz
    std::vector<CVec> w;   ///< receive beamformer per target

    /// Number of private streams carried by F.
    Index private_streams() const { return F.cols() - 1; }
};

/// Builds a state whose F has U private columns plus a common column.
DesignState make_state(Index M, Index L, Index U, Index Q);

struct CascadeMatrices
{
    std::vector<CMat> H_bq;        ///< H_br^H Phi^H G_q Phi H_br
    std::vector<CMat> H_bq_tilde;  ///< same with the sum of the other targets
    CMat C;                        ///< echo noise covariance at the BS
    CMat Sigma;                    ///< ARIS forward-power kernel in F
    std::vector<double> eps1;      ///< w_q^H C w_q (empty without w)
    double eps2 = 0.0;             ///< F-independent ARIS power
    std::vector<double> eps3;      ///< forwarded noise + AWGN per user
};

/// Cascade matrices for fixed phi. eps1 is filled only when \p w is given.
CascadeMatrices build_cascade_matrices(const SystemConfig& cfg, const ChannelSet& ch,
                                       const CVec& phi,
                                       const std::vector<CVec>* w = nullptr);

/// h_u = h_bu + H_br^H Phi^H h_ru.
CVec equivalent_user_channel(const ChannelSet& ch, const CVec& phi, Index u);

struct UserSinr
{
    double common = 0.0;
    double priv = 0.0;
};

UserSinr user_sinrs(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                    Index u);

/// log2(1 + gamma).
double achievable_rate(double gamma);

/// Echo SINR of target q with receive filter s.w[q].
double echo_sinr(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s, Index q);

/// Minimum echo SINR over all targets.
double min_echo_sinr(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s);

/// Reflect power drawn by the ARIS (signal and amplified noise, both passes).
double aris_power(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s);

/// Hermitian operator on C^{L^2} of the form
///   sum_t coef_t K(G_t, A_t, B_t) + diag(d),
/// K(G, A, B)[(ij),(kl)] = G_ij conj(G_kl) A_ki B_jl,
/// applied without forming the L^2 x L^2 matrix.
class QuarticKernel
{
public:
    QuarticKernel() = default;
    explicit QuarticKernel(Index L) : L_(L) {}

    Index L() const { return L_; }
    Index dim() const { return L_ * L_; }

    void add_term(double coef, const CMat& G, const CMat& A, const CMat& B);
    void add_diagonal(const RVec& d);
    /// this + coef * other (terms are concatenated).
    void add_scaled(double coef, const QuarticKernel& other);

    CVec apply(const CVec& x) const;
    /// x^H K x for x = vec(phi phi^H).
    double quadratic_form(const CVec& phi) const;
    /// Dense L^2 x L^2 matrix; only for small L.
    CMat dense() const;

private:
    struct Term
    {
        double coef;
        CMat G, A, B;
    };
    Index L_ = 0;
    std::vector<Term> terms_;
    std::optional<RVec> diag_;
};

/// vec(phi phi^H), column-major.
CVec lift_phi(const CVec& phi);

struct QuarticForms
{
    QuarticKernel M1;  ///< echo numerator
    QuarticKernel M2;  ///< cross-target echo
    QuarticKernel M3;  ///< noise forwarded through G (weighted by sigma_z^2)
    CMat M4;           ///< second-pass noise (weighted by sigma_z^2)
    QuarticKernel D1;  ///< quartic ARIS power
    CMat D2;           ///< quadratic ARIS power
    double tau_q = 0;  ///< -sigma_r^2 w^H w
};

/// Kernels for target q with the receive filter w_q.
QuarticForms build_quartic_forms(const SystemConfig& cfg, const ChannelSet& ch, const CMat& F,
                                 const CVec& w_q, Index q);

/// Per-user quadratic SINR forms in phi.
///   gamma_x = (phi^H E1 phi + 2 Re(E2 phi) + tau1)
///             / (phi^H (E3 + sz2 E4) phi + 2 Re(E5 phi) + tau2)
struct StreamQuadratic
{
    CMat E1, E3, E4;
    Eigen::RowVectorXcd E2, E5;
    double tau1 = 0.0;
    double tau2 = 0.0;

    double numerator(const CVec& phi) const;
    double denominator(const CVec& phi, double sigma_z2) const;
    double sinr(const CVec& phi, double sigma_z2) const;
};

struct UserQuadratics
{
    StreamQuadratic p;
    StreamQuadratic c;
};

UserQuadratics build_user_quadratics(const SystemConfig& cfg, const ChannelSet& ch,
                                     const CMat& F, Index u);

/// Which constraints of the joint problem apply to a design.
struct ConstraintSet
{
    bool rates = true;       ///< QoS constraints (rate = c_u + r_p,u)
    bool common = true;      ///< common-stream decodability
    bool aris_power = true;  ///< ARIS reflect-power budget
};

struct FeasibilityReport
{
    std::vector<double> qos;     ///< normalized QoS shortfall per user
    std::vector<double> common;  ///< normalized common-rate shortfall per user
    double c_negative = 0.0;     ///< most negative c entry (as a positive number)
    double bs_power = 0.0;       ///< (|F|^2 - P) / P
    double aris_power = 0.0;     ///< (P_RIS - P_max) / P_max
    double amplitude = 0.0;      ///< (max |phi_l| - a_max) / a_max
    double min_echo_sinr = 0.0;  ///< linear
    double worst = 0.0;          ///< largest residual over the checked set
    bool pass = false;
};

/// Residuals are positive when violated; pass iff all are <= tol.
FeasibilityReport verify_feasibility(const SystemConfig& cfg, const ChannelSet& ch,
                                     const DesignState& s, double tol,
                                     const ConstraintSet& set = {});

} // namespace arisrsma

#endif // ARISRSMA_MODEL_HPP
