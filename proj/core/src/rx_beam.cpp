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

#include "arisrsma/rx_beam.hpp"

#include <algorithm>
#include <limits>
#include <stdexcept>

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

namespace arisrsma
{

QuotientSolution optimal_receive_beamformer(const CMat& A1, const CMat& A2)
{
    if (A1.rows() != A1.cols() || A2.rows() != A2.cols() || A1.rows() != A2.rows() ||
        A1.rows() == 0)
        throw std::invalid_argument("optimal_receive_beamformer: dimension mismatch");

    // Whitening: A2 = L L^H, B = L^{-1} A1 L^{-H}, w = L^{-H} v.
    Eigen::LLT<CMat> llt(A2);
    const double scale = std::max(A2.cwiseAbs().maxCoeff(), std::numeric_limits<double>::min());
    if (llt.info() != Eigen::Success ||
        llt.matrixLLT().diagonal().real().minCoeff() <= 1e-14 * std::sqrt(scale))
        throw std::invalid_argument("optimal_receive_beamformer: A2 is not positive definite");

    const auto L = llt.matrixL();
    CMat B = L.solve(A1);
    B = L.solve(CMat(B.adjoint()));
    B = (0.5 * (B + B.adjoint())).eval();
    Eigen::SelfAdjointEigenSolver<CMat> es(B);
    const Index n = B.rows();

    QuotientSolution out;
    out.gamma = std::max(0.0, es.eigenvalues()(n - 1));
    out.w = L.adjoint().solve(es.eigenvectors().col(n - 1));
    out.w.normalize();
    return out;
}

ReceiveDesign p1_solve(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s)
{
    const CascadeMatrices cm = build_cascade_matrices(cfg, ch, s.phi);
    const Index Q = static_cast<Index>(ch.G.size());
    ReceiveDesign rd;
    rd.min_gamma = std::numeric_limits<double>::infinity();
    for (Index q = 0; q < Q; ++q) {
        const auto qi = static_cast<std::size_t>(q);
        const CMat T1 = cm.H_bq[qi] * s.F;
        const CMat T2 = cm.H_bq_tilde[qi] * s.F;
        const CMat A1 = T1 * T1.adjoint();
        const CMat A2 = T2 * T2.adjoint() + cm.C;
        QuotientSolution qs = optimal_receive_beamformer(A1, A2);
        rd.w.push_back(std::move(qs.w));
        rd.gamma.push_back(qs.gamma);
        rd.min_gamma = std::min(rd.min_gamma, qs.gamma);
    }
    return rd;
}

} // namespace arisrsma
