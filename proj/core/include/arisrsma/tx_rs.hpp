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
/// \file tx_rs.hpp
///
/// Transmit beamforming and rate splitting for fixed receive filters and
/// ARIS coefficients, plus the sequential rank-one constraint relaxation
/// (SROCR) utilities shared with the ARIS block.
///
/// The lifted program works in normalized units: F_i = P_bs * Fh_i, the
/// sensing objective is Gamma = Gamma_ref * Gh, and user powers are measured
/// relative to each user's noise floor eps3_u (so rho, xi are natural logs of
/// noise-normalized powers).
///
#ifndef ARISRSMA_TX_RS_HPP
#define ARISRSMA_TX_RS_HPP

#include <string>
#include <vector>

#include "arisrsma/conic.hpp"
#include "arisrsma/model.hpp"
#include "arisrsma/scenario.hpp"

namespace arisrsma
{

/// e^{x0} (x - x0 + 1): the tangent of exp at x0, a global lower bound.
double exp_tangent(double x0, double x);

/// min(1, lambda_max(X) / tr(X) + delta). Requires tr(X) > 0.
double srocr_update(const CMat& X, double delta);

struct RankOneExtraction
{
    CVec f;              ///< sqrt(lambda1) u1
    double ratio = 0.0;  ///< lambda1 / tr
    bool flagged = false;///< ratio below the rank-one threshold
};

/// Principal-component extraction; flagged when lambda1/tr < \p threshold.
RankOneExtraction extract_rank_one(const CMat& X, double threshold = 0.999);

/// One lifted PSD variable inside a ConicProblem. When the relaxation level
/// reaches 1 the cut tr((u u^H - I) X) >= 0 forces X = s u u^H; the variable
/// is then carried as the scalar s >= 0 along the fixed direction u.
struct LiftedVar
{
    int var = -1;
    bool rank_one = false;
    CVec dir;
    Index dim = 0;

    /// expr += tr(A X).
    void add_pairing(AffineExpr& expr, const CMat& A) const;
    void add_pairing(AffineExpr& expr, const HermitianCoef& A) const;
    /// expr += tr(X).
    void add_trace(AffineExpr& expr, double coef = 1.0) const;
    CMat value(const ConicSolution& sol) const;
};

/// Declares a lifted variable of dimension \p dim in \p p. With \p varpi in
/// (0, 1) the SROCR cut tr((u u^H - varpi I) X) >= 0 is added; with
/// varpi >= 1 the rank-one parametrization along \p u is used.
LiftedVar add_lifted(ConicProblem& p, const std::string& name, Index dim, double varpi,
                     const CVec& u);

struct SrocrState
{
    std::vector<double> varpi;         ///< relaxation level per lifted variable
    std::vector<double> delta;         ///< adaptive step per lifted variable
    std::vector<CMat> prev_solution;   ///< last accepted lifted matrices (physical units)
    std::vector<double> prev_xi_p;     ///< private expansion points (normalized)
    std::vector<double> prev_xi_c;     ///< common expansion points (normalized)
};

struct SrocrOptions
{
    int max_iter = 30;
    double delta0 = 0.1;
    int max_halvings = 6;
    double rank_threshold = 0.999;
    double rel_tol = 1e-4;
    /// Finish with a relaxation level of 1 on every lifted variable.
    bool rank_one_polish = true;
    SolverOptions solver;
};

struct InnerRecord
{
    int iteration = 0;
    double varpi_min = 0.0;
    double delta = 0.0;
    SolveStatus status = SolveStatus::numerical_failure;
    double objective = 0.0;  ///< lifted objective (linear Gamma)
    double seconds = 0.0;
};

enum class BlockStatus
{
    ok,
    infeasible,
    degraded
};

const char* to_string(BlockStatus s);

/// Index map of a built P2 program.
struct P2Layout
{
    std::vector<LiftedVar> lifted;  ///< lifted index i <-> column i of F
    int gamma = -1;
    std::vector<int> c, rho_p, xi_p, rho_c, xi_c;
    double gamma_scale = 1.0;
};

struct P2Program
{
    ConicProblem problem;
    P2Layout layout;
};

/// Lifted P2 for fixed phi and w. \p F_cols is the column count of F (U+1,
/// or 1 for a sensing-only design); the common column is dropped when
/// set.common is false. The expansion points and relaxation levels come
/// from \p srocr; its prev_solution supplies the cut directions.
P2Program build_p2(const SystemConfig& cfg, const ChannelSet& ch, const CascadeMatrices& cm,
                   const DesignState& s, double gamma_ref, const SrocrState& srocr,
                   const ConstraintSet& set);

struct P2Result
{
    BlockStatus status = BlockStatus::degraded;
    CMat F;
    RVec c;
    double gamma_lifted = 0.0;       ///< objective of the last accepted lifted solve
    std::vector<double> rank_ratios; ///< of the last accepted lifted solution
    std::vector<InnerRecord> trace;
    std::string message;
};

/// SROCR loop on P2 starting from the incumbent \p s (F, c, w, phi).
P2Result solve_p2(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s,
                  double gamma_ref, const ConstraintSet& set, const SrocrOptions& opts = {});

} // namespace arisrsma

#endif // ARISRSMA_TX_RS_HPP
