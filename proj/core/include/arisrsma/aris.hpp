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
/// \file aris.hpp
///
/// ARIS reflection design for fixed F, c and w: the quartic echo and power
/// terms are majorized around the incumbent phi_s, the remaining quadratic
/// problem is lifted to Phi_bar = [phi; 1][phi; 1]^H and tightened by SROCR.
///
#ifndef ARISRSMA_ARIS_HPP
#define ARISRSMA_ARIS_HPP

#include <string>
#include <vector>

#include "arisrsma/conic.hpp"
#include "arisrsma/model.hpp"
#include "arisrsma/scenario.hpp"
#include "arisrsma/tx_rs.hpp"

namespace arisrsma
{

/// Majorizer of x^H M x (x = vec(phi phi^H)) around phi_s:
///   x^H M x <= lambda |x|^2 + phi^H Qbar phi + (eta - lambda L^2 a_max^4)
///           <= phi^H Qbar phi + eta          whenever all |phi_l| <= a_max.
struct MmSurrogate
{
    CMat Qbar;           ///< L x L Hermitian
    double eta = 0.0;    ///< constant including lambda L^2 a_max^4
    double lambda = 0.0; ///< max(lambda_max(M), 0) bound used
    CVec phis;           ///< expansion point
    double norm_cap = 0.0; ///< L^2 a_max^4

    /// phi^H Qbar phi + eta.
    double value(const CVec& phi) const;
    /// The same with |x|^2 in place of L^2 a_max^4.
    double value_exact(const CVec& phi) const;
    /// eta without the norm-cap term.
    double eta_offset() const { return eta - lambda * norm_cap; }
};

/// Surrogate of the kernel \p M. lambda comes from a Lanczos upper estimate
/// of lambda_max(M), clamped at zero.
MmSurrogate mm_surrogate(const QuarticKernel& M, const CVec& phi_s, double a_max);
/// Dense kernel variant (exact eigenvalue); M is L^2 x L^2.
MmSurrogate mm_surrogate(const CMat& M, const CVec& phi_s, double a_max);

/// How |vec(phi phi^H)|^2 is bounded inside the lifted program.
enum class MmNormBound
{
    cap,   ///< L^2 a_max^4 (constant)
    exact  ///< auxiliary t >= (sum_l |phi_l|^2)^2 via a 2 x 2 PSD block
};

const char* to_string(MmNormBound b);

struct P3Surrogates
{
    std::vector<MmSurrogate> sensing;  ///< kernel gamma_ref (M2 + sz2 M3) - M1 per target
    MmSurrogate power;                 ///< kernel D1
};

P3Surrogates build_p3_surrogates(const SystemConfig& cfg, const std::vector<QuarticForms>& qf,
                                 const CVec& phi_s, double gamma_ref);

struct P3Layout
{
    LiftedVar lifted;
    int gamma = -1;
    int aux = -1;  ///< 2 x 2 block for the exact norm bound
    double lift_scale = 1.0;  ///< homogenizing entry k of [phi; k]
    double gamma_scale = 1.0;
};

struct P3Program
{
    ConicProblem problem;
    P3Layout layout;
};

/// Lifted P3 in Phi_bar = [phi; k][phi; k]^H with k = lift_scale(s.phi).
/// \p uq holds the user quadratics (empty when rates are off).
P3Program build_p3(const SystemConfig& cfg, const DesignState& s, double gamma_ref,
                   const std::vector<QuarticForms>& qf, const std::vector<UserQuadratics>& uq,
                   const P3Surrogates& sur, double varpi, const CMat& prev_solution,
                   const ConstraintSet& set, MmNormBound bound);

struct P3Options
{
    SrocrOptions srocr;
    MmNormBound bound = MmNormBound::exact;
};

struct P3Result
{
    BlockStatus status = BlockStatus::degraded;
    CVec phi;
    double gamma_lifted = 0.0;
    double rank_ratio = 0.0;
    std::vector<InnerRecord> trace;
    std::string message;
};

/// Homogenizing entry used for the lift [phi; k]: the RMS amplitude of phi
/// (1 for phi = 0), which balances the last entry against the others.
double lift_scale(const CVec& phi);

/// phi from a lifted matrix of [phi; k]: principal component rescaled so
/// that the last entry is exactly k; amplitudes above a_max by at most 1e-6
/// (relative) are clamped.
CVec extract_phi(const CMat& Phi_bar, double a_max, double k = 1.0);

/// Repairs small violations of an extracted phi: amplitudes are clipped to
/// a_max and, when the ARIS budget applies and is exceeded, phi is shrunk
/// uniformly (the reflect power grows monotonically with a common scale)
/// until the budget holds with a relative margin of 1e-9.
CVec restore_phi(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                 const CVec& phi, const ConstraintSet& set);

/// SROCR loop on P3 around the incumbent s.phi.
P3Result solve_p3(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                  double gamma_ref, const ConstraintSet& set, const P3Options& opts = {});

} // namespace arisrsma

#endif // ARISRSMA_ARIS_HPP
