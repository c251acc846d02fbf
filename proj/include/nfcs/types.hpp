// nfcs - near-field wideband channel estimation for XL-RIS mmWave arrays
// Copyright (C) 2026 the nfcs contributors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

#pragma once

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace nfcs
{

using cxd = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RMat = Eigen::MatrixXd;
using RVec = Eigen::VectorXd;

constexpr double speed_of_light = 299792458.0; // m/s, exact by definition
constexpr double pi = 3.141592653589793238462643383279502884;

// Uniform planar array in the y-z plane. Element indices run symmetrically
// about the panel center, so for even counts they are half-integers
// (..., -1.5, -0.5, 0.5, 1.5, ...). Storage order of response vectors is
// y-major: flat index i = iy * n_z + iz.
struct UpaShape
{
    int n_y = 1;
    int n_z = 1;
    double spacing = 0.0; // element pitch in meters

    int size() const { return n_y * n_z; }
    double index_y(int iy) const { return double(iy) - 0.5 * double(n_y - 1); }
    double index_z(int iz) const { return double(iz) - 0.5 * double(n_z - 1); }
};

inline UpaShape upa_half_wavelength(int n_y, int n_z, double f_c)
{
    if (n_y < 1 || n_z < 1)
        throw std::invalid_argument("upa_half_wavelength: array dimensions must be positive");
    if (!(f_c > 0.0) || !std::isfinite(f_c))
        throw std::invalid_argument("upa_half_wavelength: carrier frequency must be positive");
    return UpaShape{n_y, n_z, 0.5 * speed_of_light / f_c};
}

// Source location in the array's spherical frame. theta is the elevation
// angle measured from the z-axis, phi the azimuth in the x-y plane, r the
// range in meters. The pair of "virtual" angles below is what all phase
// expressions depend on: the elevation one couples the z-axis of the panel,
// the azimuth composite couples the y-axis.
struct SphericalPoint
{
    double theta = 0.0; // rad
    double phi = 0.0;   // rad
    double r = 0.0;     // m

    double virt_elev() const { return std::cos(theta); }
    double virt_azim() const { return std::sin(theta) * std::sin(phi); }
};

// Recover (theta, phi) from virtual angles. The azimuth is folded into
// [-pi/2, pi/2], which covers the half-space in front of the panel.
inline SphericalPoint point_from_virtual(double virt_elev, double virt_azim, double r)
{
    double ve = std::clamp(virt_elev, -1.0, 1.0);
    double theta = std::acos(ve);
    double sin_theta = std::sqrt(std::max(0.0, 1.0 - ve * ve));
    double phi = 0.0;
    if (sin_theta > 0.0)
        phi = std::asin(std::clamp(virt_azim / sin_theta, -1.0, 1.0));
    return SphericalPoint{theta, phi, r};
}

// Uniformly spaced OFDM carrier frequencies centered on f_c. With 1-based
// subcarrier numbering the k-th frequency is f_c + (f_s/K)(k - 1 - (K-1)/2);
// this class uses 0-based k. For odd K the middle subcarrier equals f_c
// exactly; for even K no subcarrier does, and reference quantities are
// evaluated at f_c itself.
struct CarrierGrid
{
    double f_c = 0.0; // center frequency, Hz
    double f_s = 0.0; // sampling bandwidth, Hz
    int n_subcarriers = 1;

    double freq(int k) const
    {
        if (k < 0 || k >= n_subcarriers)
            throw std::invalid_argument("CarrierGrid::freq: subcarrier index out of range");
        return f_c + (f_s / n_subcarriers) * (double(k) - 0.5 * double(n_subcarriers - 1));
    }

    void validate() const
    {
        if (!(f_c > 0.0) || !std::isfinite(f_c))
            throw std::invalid_argument("CarrierGrid: center frequency must be positive");
        if (!(f_s >= 0.0) || !std::isfinite(f_s))
            throw std::invalid_argument("CarrierGrid: bandwidth must be nonnegative");
        if (n_subcarriers < 1)
            throw std::invalid_argument("CarrierGrid: need at least one subcarrier");
        if (f_s >= 2.0 * f_c)
            throw std::invalid_argument("CarrierGrid: bandwidth exceeds carrier");
    }
};

namespace detail
{

inline void require_finite(double v, const char *what)
{
    if (!std::isfinite(v))
        throw std::invalid_argument(std::string(what) + ": non-finite input");
}

inline void require_shape(const UpaShape &shape)
{
    if (shape.n_y < 1 || shape.n_z < 1)
        throw std::invalid_argument("UpaShape: array dimensions must be positive");
    if (!(shape.spacing > 0.0) || !std::isfinite(shape.spacing))
        throw std::invalid_argument("UpaShape: element spacing must be positive");
}

} // namespace detail

} // namespace nfcs
