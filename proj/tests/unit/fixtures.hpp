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
/// \file fixtures.hpp
///
/// Small configurations, random instances and direct (loop-based)
/// evaluations of the signal model shared by the unit and acceptance tests.
///
#ifndef ARISRSMA_TESTS_FIXTURES_HPP
#define ARISRSMA_TESTS_FIXTURES_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <random>
#include <vector>

#include "arisrsma/driver.hpp"
#include "arisrsma/model.hpp"
#include "arisrsma/scenario.hpp"

namespace arisrsma::testing
{

/// M = 4, L = 8, U = 2, Q = 2 with a uniform rate threshold.
inline SystemConfig reduced_config(double R_th = 1.0)
{
    SystemConfig cfg;
    cfg.M = 4;
    cfg.L = 8;
    resize_users(cfg, 2);
    resize_targets(cfg, 2, default_target_angle_pool());
    cfg.R_min.assign(2, R_th);
    return cfg;
}

inline CVec random_cvec(std::mt19937_64& rng, Index n, double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    CVec v(n);
    for (Index i = 0; i < n; ++i)
        v(i) = cd(nd(rng), nd(rng));
    return v;
}

inline CMat random_cmat(std::mt19937_64& rng, Index r, Index c, double scale = 1.0)
{
    std::normal_distribution<double> nd(0.0, scale);
    CMat m(r, c);
    for (Index j = 0; j < c; ++j)
        for (Index i = 0; i < r; ++i)
            m(i, j) = cd(nd(rng), nd(rng));
    return m;
}

/// Random phases with amplitudes uniform in [0, a_max].
inline CVec random_phi(std::mt19937_64& rng, Index L, double a_max)
{
    std::uniform_real_distribution<double> amp(0.0, a_max);
    std::uniform_real_distribution<double> ang(-kPi, kPi);
    CVec phi(L);
    for (Index l = 0; l < L; ++l)
        phi(l) = std::polar(amp(rng), ang(rng));
    return phi;
}

/// Channels of a reduced scenario plus a random design on them.
struct Instance
{
    SystemConfig cfg;
    ChannelSet ch;
    DesignState s;
};

/// Small random instance: M <= 4, L <= 4, U <= 2, Q <= 2.
inline Instance random_instance(std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> small(1, 4);
    std::uniform_int_distribution<int> two(1, 2);
    Instance in;
    in.cfg.M = small(rng);
    in.cfg.L = small(rng);
    resize_users(in.cfg, two(rng));
    resize_targets(in.cfg, two(rng), default_target_angle_pool());
    in.ch = sample_channels(in.cfg, seed);
    in.s = make_state(in.cfg.M, in.cfg.L, in.cfg.U, in.cfg.Q);
    in.s.F = random_cmat(rng, in.cfg.M, in.cfg.U + 1, 0.5);
    in.s.phi = random_phi(rng, in.cfg.L, in.cfg.a_max);
    for (auto& w : in.s.w)
        w = random_cvec(rng, in.cfg.M);
    return in;
}

/// Echo SINR numerator and denominator assembled term by term from the
/// signal model.
struct EchoTerms
{
    double num = 0.0;
    double den = 0.0;
};

inline EchoTerms echo_terms_direct(const SystemConfig& cfg, const ChannelSet& ch,
                                   const DesignState& s, Index q)
{
    const Index L = ch.H_br.rows();
    const CMat Phi = s.phi.asDiagonal();
    const CMat& w = s.w[static_cast<std::size_t>(q)];
    const CMat H = ch.H_br;
    CMat Gall = CMat::Zero(L, L);
    for (const auto& g : ch.G)
        Gall += g;
    double num = 0.0, den = 0.0;
    for (Index j = 0; j < static_cast<Index>(ch.G.size()); ++j) {
        const CMat path = H.adjoint() * Phi.adjoint() * ch.G[static_cast<std::size_t>(j)] * Phi * H;
        for (Index k = 0; k < s.F.cols(); ++k) {
            const double p = std::norm((w.adjoint() * path * s.F.col(k)).value());
            (j == q ? num : den) += p;
        }
    }
    const CMat z1 = w.adjoint() * H.adjoint() * Phi.adjoint() * Gall * Phi;
    const CMat z2 = w.adjoint() * H.adjoint() * Phi.adjoint();
    den += cfg.sigma_z2 * (z1.squaredNorm() + z2.squaredNorm()) + cfg.sigma_r2 * w.squaredNorm();
    return {num, den};
}

inline double echo_sinr_direct(const SystemConfig& cfg, const ChannelSet& ch,
                               const DesignState& s, Index q)
{
    const EchoTerms t = echo_terms_direct(cfg, ch, s, q);
    return t.num / t.den;
}

inline double aris_power_direct(const SystemConfig& cfg, const ChannelSet& ch,
                                const DesignState& s)
{
    const Index L = ch.H_br.rows();
    const CMat Phi = s.phi.asDiagonal();
    CMat G = CMat::Zero(L, L);
    for (const auto& g : ch.G)
        G += g;
    return (Phi * ch.H_br * s.F).squaredNorm() +
           (Phi.adjoint() * G * Phi * ch.H_br * s.F).squaredNorm() +
           cfg.sigma_z2 * (Phi.adjoint() * G * Phi).squaredNorm() +
           2.0 * cfg.sigma_z2 * Phi.adjoint().squaredNorm();
}

inline UserSinr user_sinrs_direct(const SystemConfig& cfg, const ChannelSet& ch,
                                  const DesignState& s, Index u)
{
    const auto ui = static_cast<std::size_t>(u);
    const CVec h = ch.h_bu[ui] + ch.H_br.adjoint() * s.phi.conjugate().asDiagonal() * ch.h_ru[ui];
    const Index U = s.F.cols() - 1;
    double priv_sum = 0.0;
    for (Index k = 0; k < U; ++k)
        priv_sum += std::norm(h.dot(s.F.col(k)));
    const double own = std::norm(h.dot(s.F.col(u)));
    const double noise =
        cfg.sigma_z2 * (s.phi.conjugate().asDiagonal() * ch.h_ru[ui]).squaredNorm() + cfg.sigma_u2;
    UserSinr g;
    g.priv = own / (priv_sum - own + noise);
    g.common = std::norm(h.dot(s.F.col(U))) / (priv_sum + noise);
    return g;
}

inline double rel_err(double a, double b)
{
    return std::abs(a - b) / std::max(std::abs(b), 1e-300);
}

} // namespace arisrsma::testing

#endif // ARISRSMA_TESTS_FIXTURES_HPP
