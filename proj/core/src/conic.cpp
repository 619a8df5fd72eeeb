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

#include "arisrsma/conic.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <stdexcept>

#include <Eigen/Eigenvalues>

namespace arisrsma
{

// ---------------------------------------------------------------------------
// HermitianCoef

HermitianCoef HermitianCoef::dense(CMat A)
{
    if (A.rows() != A.cols())
        throw std::invalid_argument("HermitianCoef: matrix is not square");
    const double scale = std::max(1.0, A.cwiseAbs().maxCoeff());
    if ((A - A.adjoint()).cwiseAbs().maxCoeff() > 1e-10 * scale)
        throw std::invalid_argument("HermitianCoef: matrix is not Hermitian");
    HermitianCoef h;
    h.n_ = A.rows();
    h.dense_ = true;
    h.A_ = std::move(A);
    symmetrize(h.A_);
    return h;
}

HermitianCoef HermitianCoef::sparse(Index n, std::vector<Entry> entries)
{
    HermitianCoef h;
    h.n_ = n;
    for (auto& e : entries) {
        if (e.i > e.j)
            e = {e.j, e.i, std::conj(e.value)};
        if (e.i < 0 || e.j >= n)
            throw std::invalid_argument("HermitianCoef: sparse entry out of range");
        if (e.i == e.j)
            e.value = e.value.real();
    }
    h.entries_ = std::move(entries);
    return h;
}

HermitianCoef HermitianCoef::diagonal_entry(Index n, Index i, double v)
{
    return sparse(n, {{i, i, v}});
}

HermitianCoef HermitianCoef::identity(Index n, double v)
{
    std::vector<Entry> e;
    e.reserve(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i)
        e.push_back({i, i, v});
    return sparse(n, std::move(e));
}

double HermitianCoef::pair(const CMat& X) const
{
    if (dense_)
        return (A_.array() * X.array().conjugate()).sum().real();
    double acc = 0.0;
    for (const auto& e : entries_) {
        if (e.i == e.j)
            acc += e.value.real() * X(e.i, e.i).real();
        else
            acc += 2.0 * (e.value * X(e.j, e.i)).real();
    }
    return acc;
}

CMat HermitianCoef::sandwich(const CMat& X) const
{
    if (dense_) {
        CMat out = X * A_ * X;
        symmetrize(out);
        return out;
    }
    CMat out = CMat::Zero(n_, n_);
    for (const auto& e : entries_) {
        if (e.i == e.j) {
            out.noalias() += e.value.real() * X.col(e.i) * X.col(e.i).adjoint();
        } else {
            const CMat t = e.value * X.col(e.i) * X.col(e.j).adjoint();
            out += t + t.adjoint();
        }
    }
    return out;
}

CMat HermitianCoef::congruence(const CMat& L) const
{
    if (dense_) {
        CMat out = L.adjoint() * A_ * L;
        symmetrize(out);
        return out;
    }
    CMat out = CMat::Zero(L.cols(), L.cols());
    for (const auto& e : entries_) {
        if (e.i == e.j) {
            out.noalias() += e.value.real() * L.row(e.i).adjoint() * L.row(e.i);
        } else {
            const CMat t = e.value * L.row(e.i).adjoint() * L.row(e.j);
            out += t + t.adjoint();
        }
    }
    return out;
}

double HermitianCoef::trace() const
{
    if (dense_)
        return A_.trace().real();
    double t = 0.0;
    for (const auto& e : entries_)
        if (e.i == e.j)
            t += e.value.real();
    return t;
}

CMat HermitianCoef::to_dense() const
{
    if (dense_)
        return A_;
    CMat out = CMat::Zero(n_, n_);
    for (const auto& e : entries_) {
        out(e.i, e.j) += e.value;
        if (e.i != e.j)
            out(e.j, e.i) += std::conj(e.value);
    }
    return out;
}

void HermitianCoef::scale(double s)
{
    if (dense_)
        A_ *= s;
    for (auto& e : entries_)
        e.value *= s;
}

void HermitianCoef::add(const HermitianCoef& other)
{
    if (n_ == 0 && !dense_ && entries_.empty()) {
        *this = other;
        return;
    }
    if (other.n_ != n_)
        throw std::invalid_argument("HermitianCoef: dimension mismatch");
    if (!dense_ && !other.dense_) {
        entries_.insert(entries_.end(), other.entries_.begin(), other.entries_.end());
        return;
    }
    CMat sum = to_dense() + other.to_dense();
    dense_ = true;
    entries_.clear();
    A_ = std::move(sum);
}

// ---------------------------------------------------------------------------
// AffineExpr

AffineExpr& AffineExpr::add(int matrix_var, HermitianCoef A)
{
    for (auto& [v, coef] : mats) {
        if (v == matrix_var) {
            coef.add(A);
            return *this;
        }
    }
    mats.emplace_back(matrix_var, std::move(A));
    return *this;
}

AffineExpr& AffineExpr::add_scalar(int scalar_var, double coef)
{
    for (auto& [v, a] : scalars) {
        if (v == scalar_var) {
            a += coef;
            return *this;
        }
    }
    scalars.emplace_back(scalar_var, coef);
    return *this;
}

AffineExpr& AffineExpr::add_constant(double c)
{
    constant += c;
    return *this;
}

AffineExpr& AffineExpr::scale(double s)
{
    for (auto& [v, coef] : mats)
        coef.scale(s);
    for (auto& [v, a] : scalars)
        a *= s;
    constant *= s;
    return *this;
}

// ---------------------------------------------------------------------------
// ConicProblem

int ConicProblem::add_matrix_var(std::string name, Index dim)
{
    if (dim < 1)
        throw std::invalid_argument("matrix variable dimension must be >= 1");
    matrix_vars_.push_back({std::move(name), dim});
    return static_cast<int>(matrix_vars_.size()) - 1;
}

int ConicProblem::add_scalar_var(std::string name, double lower, double upper)
{
    if (lower > upper)
        throw std::invalid_argument("scalar variable with lower > upper");
    scalar_vars_.push_back({std::move(name), lower, upper});
    return static_cast<int>(scalar_vars_.size()) - 1;
}

void ConicProblem::add_constraint(AffineExpr expr, Sense sense, double rhs, std::string label)
{
    constraints_.push_back({std::move(expr), sense, rhs, std::move(label)});
}

void ConicProblem::add_exp_constraint(AffineExpr u, AffineExpr v, std::string label)
{
    exp_constraints_.push_back({std::move(u), std::move(v), std::move(label)});
}

void ConicProblem::check_expr(const AffineExpr& e, const std::string& where) const
{
    for (const auto& [v, coef] : e.mats) {
        if (v < 0 || v >= static_cast<int>(matrix_vars_.size()))
            throw std::invalid_argument(where + ": unknown matrix variable");
        if (coef.dim() != matrix_vars_[static_cast<std::size_t>(v)].dim)
            throw std::invalid_argument(where + ": coefficient dimension mismatch for " +
                                        matrix_vars_[static_cast<std::size_t>(v)].name);
    }
    for (const auto& [v, a] : e.scalars) {
        if (v < 0 || v >= static_cast<int>(scalar_vars_.size()))
            throw std::invalid_argument(where + ": unknown scalar variable");
        if (!std::isfinite(a))
            throw std::invalid_argument(where + ": non-finite coefficient");
    }
    if (!std::isfinite(e.constant))
        throw std::invalid_argument(where + ": non-finite constant");
}

void ConicProblem::validate() const
{
    check_expr(objective_, "objective");
    for (const auto& c : constraints_) {
        check_expr(c.expr, "constraint '" + c.label + "'");
        if (!std::isfinite(c.rhs))
            throw std::invalid_argument("constraint '" + c.label + "': non-finite rhs");
    }
    for (const auto& c : exp_constraints_) {
        check_expr(c.u, "exp constraint '" + c.label + "'");
        check_expr(c.v, "exp constraint '" + c.label + "'");
    }
}

namespace
{

void dump_expr(std::ostream& os, const AffineExpr& e)
{
    for (const auto& [v, coef] : e.mats) {
        const CMat A = coef.to_dense();
        for (Index j = 0; j < A.cols(); ++j)
            for (Index i = 0; i <= j; ++i)
                if (A(i, j) != cd(0.0, 0.0))
                    os << "  M " << v << ' ' << i << ' ' << j << ' ' << A(i, j).real() << ' '
                       << A(i, j).imag() << '\n';
    }
    for (const auto& [v, a] : e.scalars)
        os << "  S " << v << ' ' << a << '\n';
    if (e.constant != 0.0)
        os << "  C " << e.constant << '\n';
}

const char* sense_name(Sense s)
{
    switch (s) {
    case Sense::ge: return "GE";
    case Sense::le: return "LE";
    case Sense::eq: return "EQ";
    }
    return "?";
}

} // namespace

void ConicProblem::dump(std::ostream& os) const
{
    os << std::setprecision(17);
    os << "# arisrsma conic problem v1\n";
    for (std::size_t k = 0; k < matrix_vars_.size(); ++k)
        os << "MATVAR " << k << ' ' << matrix_vars_[k].name << ' ' << matrix_vars_[k].dim << '\n';
    for (std::size_t k = 0; k < scalar_vars_.size(); ++k)
        os << "SCALAR " << k << ' ' << scalar_vars_[k].name << ' ' << scalar_vars_[k].lower << ' '
           << scalar_vars_[k].upper << '\n';
    os << "OBJECTIVE MAX\n";
    dump_expr(os, objective_);
    for (std::size_t k = 0; k < constraints_.size(); ++k) {
        const auto& c = constraints_[k];
        os << "ROW " << k << ' ' << sense_name(c.sense) << ' ' << c.rhs << ' '
           << (c.label.empty() ? "-" : c.label) << '\n';
        dump_expr(os, c.expr);
    }
    for (std::size_t k = 0; k < exp_constraints_.size(); ++k) {
        const auto& c = exp_constraints_[k];
        os << "EXP " << k << ' ' << (c.label.empty() ? "-" : c.label) << "\nU\n";
        dump_expr(os, c.u);
        os << "V\n";
        dump_expr(os, c.v);
    }
}

void ConicProblem::dump(const std::filesystem::path& path) const
{
    std::ofstream os(path);
    if (!os)
        throw std::runtime_error("cannot write " + path.string());
    dump(os);
}

const char* to_string(SolveStatus s)
{
    switch (s) {
    case SolveStatus::optimal: return "optimal";
    case SolveStatus::infeasible: return "infeasible";
    case SolveStatus::numerical_failure: return "numerical_failure";
    }
    return "unknown";
}

// ---------------------------------------------------------------------------

RMat embed_hermitian(const CMat& H)
{
    if (H.rows() != H.cols())
        throw std::invalid_argument("embed_hermitian: matrix is not square");
    const double scale = std::max(1.0, H.cwiseAbs().maxCoeff());
    if ((H - H.adjoint()).cwiseAbs().maxCoeff() > 1e-12 * scale)
        throw std::invalid_argument("embed_hermitian: matrix is not Hermitian");
    const Index n = H.rows();
    RMat E(2 * n, 2 * n);
    E.topLeftCorner(n, n) = H.real();
    E.topRightCorner(n, n) = -H.imag();
    E.bottomLeftCorner(n, n) = H.imag();
    E.bottomRightCorner(n, n) = H.real();
    return E;
}

CMat extract_hermitian(const RMat& E)
{
    if (E.rows() != E.cols() || E.rows() % 2 != 0)
        throw std::invalid_argument("extract_hermitian: expected an even square matrix");
    const Index n = E.rows() / 2;
    CMat H(n, n);
    H.real() = 0.5 * (E.topLeftCorner(n, n) + E.bottomRightCorner(n, n));
    H.imag() = 0.5 * (E.bottomLeftCorner(n, n) - E.topRightCorner(n, n));
    return H;
}

PrincipalComponent principal_component(const CMat& X)
{
    Eigen::SelfAdjointEigenSolver<CMat> es(X);
    const Index n = X.rows();
    PrincipalComponent pc;
    pc.lambda1 = es.eigenvalues()(n - 1);
    pc.u1 = es.eigenvectors().col(n - 1);
    // Fix the global phase on the first entry that is not negligible.
    const double tiny = 1e-12 * pc.u1.cwiseAbs().maxCoeff();
    for (Index i = 0; i < n; ++i) {
        if (std::abs(pc.u1(i)) > tiny) {
            pc.u1 *= std::conj(pc.u1(i)) / std::abs(pc.u1(i));
            pc.u1(i) = std::abs(pc.u1(i));
            break;
        }
    }
    return pc;
}

} // namespace arisrsma
