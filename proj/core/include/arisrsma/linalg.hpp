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

#ifndef ARISRSMA_LINALG_HPP
#define ARISRSMA_LINALG_HPP

#include <cstdint>
#include <functional>

#include "arisrsma/types.hpp"

namespace arisrsma
{

struct EigenPair
{
    double value = 0.0;
    CVec vector;
};

/// Largest eigenpair of a Hermitian matrix (only the lower triangle is read).
EigenPair hermitian_max_eig(const CMat& A);

/// Smallest eigenvalue of a Hermitian matrix.
double hermitian_min_eigenvalue(const CMat& A);

using LinearOperator = std::function<CVec(const CVec&)>;

struct LanczosResult
{
    double ritz = 0.0;      ///< largest Ritz value
    double residual = 0.0;  ///< |A v - ritz v| for the Ritz vector
    /// ritz + residual: an upper bound on lambda_max when the Ritz value
    /// approximates the top of the spectrum.
    double upper_bound = 0.0;
    int iterations = 0;
};

/// Lanczos with full reorthogonalization for the largest eigenvalue of a
/// Hermitian operator of dimension n. Deterministic for a fixed seed.
LanczosResult lanczos_max_eigenvalue(const LinearOperator& op, Index n, int max_iter = 80,
                                     double tol = 1e-10, std::uint64_t seed = 7);

} // namespace arisrsma

#endif // ARISRSMA_LINALG_HPP
