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
/// \file rx_beam.hpp
///
/// Receive filtering at the BS: per-target generalized Rayleigh quotients.
///
#ifndef ARISRSMA_RX_BEAM_HPP
#define ARISRSMA_RX_BEAM_HPP

#include <vector>

#include "arisrsma/model.hpp"
#include "arisrsma/scenario.hpp"

namespace arisrsma
{

struct QuotientSolution
{
    CVec w;             ///< unit norm
    double gamma = 0.0; ///< max_w w^H A1 w / w^H A2 w
};

/// Maximizes w^H A1 w / w^H A2 w for Hermitian PSD A1 and Hermitian PD A2.
/// Throws std::invalid_argument when A2 is not numerically positive definite.
QuotientSolution optimal_receive_beamformer(const CMat& A1, const CMat& A2);

struct ReceiveDesign
{
    std::vector<CVec> w;
    std::vector<double> gamma;  ///< per-target echo SINR
    double min_gamma = 0.0;
};

/// Optimal receive filters for fixed F and phi.
ReceiveDesign p1_solve(const SystemConfig& cfg, const ChannelSet& ch, const DesignState& s);

} // namespace arisrsma

#endif // ARISRSMA_RX_BEAM_HPP
