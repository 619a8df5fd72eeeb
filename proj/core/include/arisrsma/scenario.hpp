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
/// \file scenario.hpp
///
/// System parameters, deployment geometry and random channel realizations.
///
/// Array conventions used throughout the library:
///  - the BS carries an M-element half-wavelength ULA along the y-axis with
///    broadside +x; departure angles are measured from +x;
///  - the ARIS is an L-element half-wavelength ULA along the x-axis facing
///    -y; angles (including target angles) are measured from -y toward +x.
///
#ifndef ARISRSMA_SCENARIO_HPP
#define ARISRSMA_SCENARIO_HPP

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "arisrsma/types.hpp"

namespace arisrsma
{

/// Raised for invalid configurations and degenerate geometry.
class ConfigError : public std::invalid_argument
{
public:
    using std::invalid_argument::invalid_argument;
};

struct Point2
{
    double x = 0.0;
    double y = 0.0;
};

inline double distance(const Point2& a, const Point2& b)
{
    return std::hypot(a.x - b.x, a.y - b.y);
}

struct PathlossExponents
{
    double bs_ris = 2.2;    ///< BS - ARIS
    double bs_user = 3.5;   ///< BS - user
    double ris_user = 2.3;  ///< ARIS - user
    double ris_target = 2.2;
};

struct Geometry
{
    Point2 bs{0.0, 0.0};
    Point2 aris{2.0, 5.0};
    Point2 user_center{20.0, 0.0};
    double user_radius = 3.0;
    /// Distance of each target from the ARIS, meters (one per target).
    std::vector<double> target_distance{10.0, 10.0};
    /// Absolute target positions. Empty by default; when set (one per target)
    /// they override target_angles and target_distance, so that targets stay
    /// put when the ARIS moves.
    std::vector<Point2> target_position;
};

struct SystemConfig
{
    Index M = 16;  ///< BS transmit/receive antennas
    Index L = 32;  ///< ARIS elements
    Index U = 4;   ///< users
    Index Q = 2;   ///< targets

    double P_bs_max = 10.0;   ///< W (40 dBm)
    double P_ris_max = 0.1;   ///< W (20 dBm)
    double a_max = 5.0;

    double sigma_u2 = 1e-11;  ///< user AWGN, W (-80 dBm)
    double sigma_z2 = 1e-11;  ///< ARIS dynamic noise, W
    double sigma_r2 = 1e-11;  ///< BS receiver AWGN, W

    /// Per-user rate threshold, bits/s/Hz (length U).
    std::vector<double> R_min{5.0, 5.0, 5.0, 5.0};
    /// Target directions seen from the ARIS, radians (length Q).
    std::vector<double> target_angles{0.0, kPi / 4.0};

    PathlossExponents pathloss;
    Geometry geometry;
    /// Radar cross section per target, m^2 (length Q).
    std::vector<double> rcs{1.0, 1.0};

    double C0 = 1e-3;  ///< path loss at the reference distance (-30 dB)
    double d0 = 1.0;   ///< reference distance, m
    double rician_kappa = 10.0;

    std::uint64_t seed = 1;
    double bcd_tol = 1e-3;
    int max_outer = 50;
    int max_srocr = 30;
};

/// Throws ConfigError when an invariant of SystemConfig is violated.
void validate(const SystemConfig& cfg);

/// Resize per-user / per-target vectors after U or Q changed. Rates take the
/// first entry, angles come from \p angle_pool, RCS and distances repeat the
/// first entry.
void resize_users(SystemConfig& cfg, Index U);
void resize_targets(SystemConfig& cfg, Index Q, const std::vector<double>& angle_pool);

/// Direction (seen from the ARIS) and distance of every target.
struct TargetPlacement
{
    std::vector<double> angle;
    std::vector<double> distance;
};

/// Placement from geometry.target_position when set, otherwise from
/// target_angles and geometry.target_distance.
TargetPlacement target_placement(const SystemConfig& cfg);

/// Pins the targets at the absolute positions implied by the current
/// placement (a target at angle t and distance d sits at
/// aris + d (sin t, -cos t)).
void anchor_targets(SystemConfig& cfg);

/// Default target angle pool used when the target count is swept, radians.
std::vector<double> default_target_angle_pool();

struct ChannelSet
{
    CMat H_br;              ///< L x M, BS -> ARIS
    std::vector<CVec> h_bu; ///< M, BS -> user u
    std::vector<CVec> h_ru; ///< L, ARIS -> user u
    std::vector<CMat> G;    ///< L x L target response per target
    std::vector<cd> beta;   ///< complex gain per target
    std::vector<double> target_angles;
    std::vector<Point2> user_positions;
    CMat H_br_los;          ///< LoS component (path loss applied)
};

/// Element l (0-based) equals exp(i l pi sin(angle)).
CVec steering_vector(double angle, Index L);

/// beta * a(angle) a(angle)^H.
CMat target_response(double angle, cd beta, Index L);

/// Large-scale gain C0 (d/d0)^-alpha.
double pathloss(const SystemConfig& cfg, double d, double alpha);

/// Draws one channel realization. Deterministic in (cfg, seed).
ChannelSet sample_channels(const SystemConfig& cfg, std::uint64_t seed);

/// Angle of point p as seen from the BS array (from +x).
double bs_angle(const Geometry& g, const Point2& p);
/// Angle of point p as seen from the ARIS array (from -y toward +x).
double aris_angle(const Geometry& g, const Point2& p);

} // namespace arisrsma

#endif // ARISRSMA_SCENARIO_HPP
