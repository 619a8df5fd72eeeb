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

#include "arisrsma/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include <Eigen/Eigenvalues>

namespace arisrsma
{

EigenPair hermitian_max_eig(const CMat& A)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(A);
    const Index n = A.rows();
    return {es.eigenvalues()(n - 1), es.eigenvectors().col(n - 1)};
}

double hermitian_min_eigenvalue(const CMat& A)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(A, Eigen::EigenvaluesOnly);
    return es.eigenvalues()(0);
}

LanczosResult lanczos_max_eigenvalue(const LinearOperator& op, Index n, int max_iter, double tol,
                                     std::uint64_t seed)
{
    LanczosResult res;
    const int m = static_cast<int>(std::min<Index>(max_iter, n));

    std::mt19937_64 rng(seed);
    std::normal_distribution<double> nd(0.0, 1.0);
    CVec v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = cd(nd(rng), nd(rng));
    v.normalize();

    CMat V(n, m);
    RVec alpha = RVec::Zero(m);
    RVec beta = RVec::Zero(m);
    int k = 0;
    double ritz_prev = -std::numeric_limits<double>::infinity();
    CVec best_vec;

    for (; k < m; ++k) {
        V.col(k) = v;
        CVec w = op(v);
        alpha(k) = v.dot(w).real();
        // Full reorthogonalization (twice is enough).
        for (int pass = 0; pass < 2; ++pass)
            w -= V.leftCols(k + 1) * (V.leftCols(k + 1).adjoint() * w);
        beta(k) = w.norm();

        Eigen::SelfAdjointEigenSolver<RMat> es;
        RMat T = RMat::Zero(k + 1, k + 1);
        T.diagonal() = alpha.head(k + 1);
        for (int i = 0; i < k; ++i)
            T(i + 1, i) = T(i, i + 1) = beta(i);
        es.compute(T);
        const double ritz = es.eigenvalues()(k);
        // Residual of the Ritz pair: |beta_k * last component of the eigvec|.
        const double resid = std::abs(beta(k) * es.eigenvectors()(k, k));
        res.ritz = ritz;
        res.residual = resid;
        res.iterations = k + 1;
        best_vec = V.leftCols(k + 1) * es.eigenvectors().col(k).cast<cd>();

        const double scale = std::max(1e-300, std::abs(ritz));
        if (resid <= tol * scale || beta(k) <= 1e-14 * scale)
            break;
        if (k > 4 && std::abs(ritz - ritz_prev) <= 1e-15 * scale && resid <= 1e-6 * scale)
            break;
        ritz_prev = ritz;
        v = w / beta(k);
    }

    // Recompute the residual explicitly; it guards against loss of
    // orthogonality in the recurrence.
    if (best_vec.size() == n) {
        const CVec r = op(best_vec) - res.ritz * best_vec;
        res.residual = std::max(res.residual, r.norm());
    }
    res.upper_bound = res.ritz + res.residual;
    return res;
}

} // namespace arisrsma
