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
/// \file conic.hpp
///
/// A small semidefinite-program layer: Hermitian PSD matrix variables,
/// bounded scalar variables, affine (in)equalities in trace pairings, and
/// exponential constraints exp(u) <= v with u, v affine. Problems are solved
/// by a primal path-following barrier method (phase I + phase II).
///
/// Pairings are tr(A X) with A Hermitian; for Hermitian A and X this is real.
///
#ifndef ARISRSMA_CONIC_HPP
#define ARISRSMA_CONIC_HPP

#include <filesystem>
#include <iosfwd>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "arisrsma/types.hpp"

namespace arisrsma
{

/// Hermitian coefficient matrix, stored densely or as upper-triangular
/// triplets (entry (i, j), i <= j, implies (j, i) = conj).
class HermitianCoef
{
public:
    struct Entry
    {
        Index i;
        Index j;
        cd value;
    };

    HermitianCoef() = default;
    /// Dense coefficient. Throws std::invalid_argument if A is not Hermitian.
    static HermitianCoef dense(CMat A);
    /// Sparse coefficient of dimension n.
    static HermitianCoef sparse(Index n, std::vector<Entry> entries);
    /// e_i e_i^T scaled by v.
    static HermitianCoef diagonal_entry(Index n, Index i, double v = 1.0);
    static HermitianCoef identity(Index n, double v = 1.0);

    Index dim() const { return n_; }
    bool is_dense() const { return dense_; }

    /// tr(A X) for Hermitian X.
    double pair(const CMat& X) const;
    /// X A X.
    CMat sandwich(const CMat& X) const;
    /// L^H A L.
    CMat congruence(const CMat& L) const;
    double trace() const;
    CMat to_dense() const;

    void scale(double s);
    /// this += other (dimensions must agree).
    void add(const HermitianCoef& other);

    const CMat& dense_matrix() const { return A_; }
    const std::vector<Entry>& entries() const { return entries_; }

private:
    Index n_ = 0;
    bool dense_ = false;
    CMat A_;
    std::vector<Entry> entries_;
};

/// sum_k tr(A_k X_k) + sum_j a_j s_j + constant.
struct AffineExpr
{
    std::vector<std::pair<int, HermitianCoef>> mats;
    std::vector<std::pair<int, double>> scalars;
    double constant = 0.0;

    AffineExpr& add(int matrix_var, HermitianCoef A);
    AffineExpr& add(int matrix_var, const CMat& A) { return add(matrix_var, HermitianCoef::dense(A)); }
    AffineExpr& add_scalar(int scalar_var, double coef);
    AffineExpr& add_constant(double c);
    AffineExpr& scale(double s);
};

enum class Sense
{
    ge,  ///< expr >= rhs
    le,  ///< expr <= rhs
    eq   ///< expr == rhs
};

/// Immutable once handed to solve().
class ConicProblem
{
public:
    struct MatrixVar
    {
        std::string name;
        Index dim;
    };
    struct ScalarVar
    {
        std::string name;
        double lower;
        double upper;
    };
    struct Constraint
    {
        AffineExpr expr;
        Sense sense;
        double rhs;
        std::string label;
    };
    struct ExpConstraint
    {
        AffineExpr u;
        AffineExpr v;
        std::string label;
    };

    int add_matrix_var(std::string name, Index dim);
    int add_scalar_var(std::string name, double lower = -std::numeric_limits<double>::infinity(),
                       double upper = std::numeric_limits<double>::infinity());

    /// The objective is maximized.
    void set_objective(AffineExpr objective) { objective_ = std::move(objective); }
    void add_constraint(AffineExpr expr, Sense sense, double rhs, std::string label = {});
    /// exp(u) <= v.
    void add_exp_constraint(AffineExpr u, AffineExpr v, std::string label = {});

    const std::vector<MatrixVar>& matrix_vars() const { return matrix_vars_; }
    const std::vector<ScalarVar>& scalar_vars() const { return scalar_vars_; }
    const AffineExpr& objective() const { return objective_; }
    const std::vector<Constraint>& constraints() const { return constraints_; }
    const std::vector<ExpConstraint>& exp_constraints() const { return exp_constraints_; }

    /// Throws std::invalid_argument when a term references an unknown
    /// variable or has a mismatched dimension.
    void validate() const;

    /// Sparse triplet dump (see README for the format).
    void dump(std::ostream& os) const;
    void dump(const std::filesystem::path& path) const;

private:
    void check_expr(const AffineExpr& e, const std::string& where) const;

    std::vector<MatrixVar> matrix_vars_;
    std::vector<ScalarVar> scalar_vars_;
    AffineExpr objective_;
    std::vector<Constraint> constraints_;
    std::vector<ExpConstraint> exp_constraints_;
};

enum class SolveStatus
{
    optimal,
    infeasible,
    numerical_failure
};

const char* to_string(SolveStatus s);

struct SolverOptions
{
    double tol = 1e-8;        ///< relative duality-gap bound at termination
    int max_newton = 600;     ///< Newton steps over both phases
    double mu = 20.0;         ///< barrier parameter growth
    /// A path that stalls (or runs out of steps) with a relative gap below
    /// this bound is still reported optimal, with message "reduced accuracy";
    /// the iterate is strictly feasible either way.
    double stall_gap = 1e-3;
    bool verbose = false;
};

struct ConicSolution
{
    SolveStatus status = SolveStatus::numerical_failure;
    std::vector<CMat> X;     ///< matrix variables
    RVec s;                  ///< scalar variables
    double objective = 0.0;
    double gap = 0.0;        ///< barrier duality-gap bound at exit
    int iterations = 0;      ///< Newton steps taken
    std::string message;

    bool ok() const { return status == SolveStatus::optimal; }
};

ConicSolution solve(const ConicProblem& p, const SolverOptions& opts = {});

/// Real symmetric embedding [[Re H, -Im H], [Im H, Re H]].
RMat embed_hermitian(const CMat& H);
/// Inverse of embed_hermitian.
CMat extract_hermitian(const RMat& E);

struct PrincipalComponent
{
    double lambda1 = 0.0;
    CVec u1;  ///< unit norm; first non-negligible entry real positive
};

PrincipalComponent principal_component(const CMat& X);

} // namespace arisrsma

#endif // ARISRSMA_CONIC_HPP
