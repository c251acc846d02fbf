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

// Wideband beam-squint analytics for spherical-wavefront UPAs.
//
// A panel phase-matched to a focus point at the center frequency responds to
// a query point at subcarrier frequency f with the pattern gain evaluated
// here. Because the frequency scales the whole phase profile, the effective
// focus wanders with f: linearly in the virtual angles and, through the
// quadratic phase term, in inverse range. trajectory_point solves for that
// wandering focus per subcarrier.

#pragma once

#include "nfcs/array.hpp"
#include "nfcs/fresnel.hpp"

namespace nfcs
{

// Pattern gain of a panel focused on `focus` at the center frequency,
// probed at `query` on subcarrier k. Direct summation over all elements of
// the second-order phase profiles, normalized so the matched case gives 1.
inline double pattern_gain(const UpaShape &shape, const CarrierGrid &grid, int k,
                           const SphericalPoint &focus, const SphericalPoint &query)
{
    grid.validate();
    const CVec b_focus = fresnel_spherical_response(shape, grid.f_c, focus);
    const CVec b_query = fresnel_spherical_response(shape, grid.freq(k), query);
    return std::abs(b_query.dot(b_focus));
}

// Per-axis curvature mismatch between a query at frequency f and the focus
// at the center frequency. `va` stands for the virtual angle coupling the
// axis in question (azimuth composite for y, elevation cosine for z).
inline double curvature_mismatch(double spacing, double f, double va_query, double inv_r_query,
                                 double f_c, double va_focus, double inv_r_focus)
{
    const double a_query = f * (1.0 - va_query * va_query) * inv_r_query;
    const double a_focus = f_c * (1.0 - va_focus * va_focus) * inv_r_focus;
    return spacing * spacing / speed_of_light * (a_query - a_focus);
}

// Separable approximation of the pattern gain: product of the two per-axis
// quadratic-phase gains.
inline double pattern_gain_separable(const UpaShape &shape, double zeta_y, double zeta_z)
{
    return squint_gain(zeta_y, shape.n_y) * squint_gain(zeta_z, shape.n_z);
}

namespace detail
{

// Golden-section maximization of fn over [lo, hi] to absolute tolerance tol.
template <typename F>
double golden_max(F &&fn, double lo, double hi, double tol)
{
    static const double gr = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - gr * (b - a);
    double x2 = a + gr * (b - a);
    double f1 = fn(x1);
    double f2 = fn(x2);
    double f_min = std::min(f1, f2);
    double f_max = std::max(f1, f2);
    while (b - a > tol)
    {
        if (f1 < f2)
        {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + gr * (b - a);
            f2 = fn(x2);
        }
        else
        {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - gr * (b - a);
            f1 = fn(x1);
        }
        f_min = std::min(f_min, std::min(f1, f2));
        f_max = std::max(f_max, std::max(f1, f2));
    }
    if (!(f_max - f_min > 1e-15) && !(f_max > 0.999))
        throw std::runtime_error("golden_max: objective is flat over the bracket");
    return 0.5 * (a + b);
}

} // namespace detail

// Location of the wandering focus on subcarrier k for a panel matched to
// `desired` at the center frequency. The virtual angles follow the exact
// linear scaling (f_c/f_k), clipped to the visible region; the range is
// found by maximizing the separable pattern gain over inverse range.
// r_min bounds the search from below (ranges closer than r_min are not
// considered physical for the deployment).
inline SphericalPoint trajectory_point(const UpaShape &shape, const CarrierGrid &grid, int k,
                                       const SphericalPoint &desired, double r_min)
{
    detail::require_shape(shape);
    grid.validate();
    if (!(desired.r > 0.0) || !std::isfinite(desired.r))
        throw std::invalid_argument("trajectory_point: desired range must be positive");
    if (!(r_min > 0.0) || !std::isfinite(r_min))
        throw std::invalid_argument("trajectory_point: r_min must be positive");

    const double f_k = grid.freq(k);
    if (f_k == grid.f_c)
        return desired;

    const double ratio = grid.f_c / f_k;
    const double ve_d = desired.virt_elev();
    const double va_d = desired.virt_azim();
    const double ve_k = std::clamp(ratio * ve_d, -1.0, 1.0);
    const double va_k = std::clamp(ratio * va_d, -1.0, 1.0);
    const double inv_r_d = 1.0 / desired.r;

    auto gain_at = [&](double inv_r) {
        const double zeta_y = curvature_mismatch(shape.spacing, f_k, va_k, inv_r, grid.f_c, va_d, inv_r_d);
        const double zeta_z = curvature_mismatch(shape.spacing, f_k, ve_k, inv_r, grid.f_c, ve_d, inv_r_d);
        return pattern_gain_separable(shape, zeta_y, zeta_z);
    };

    const double lo = 1.0 / (10.0 * desired.r * (f_k / grid.f_c + 1.0));
    const double hi = std::min(1.0 / r_min, 10.0 / desired.r);
    if (!(hi > lo))
        throw std::invalid_argument("trajectory_point: empty search bracket; r_min too large");
    const double inv_r = detail::golden_max(gain_at, lo, hi, 1e-6);
    return point_from_virtual(ve_k, va_k, 1.0 / inv_r);
}

inline std::vector<SphericalPoint> beam_trajectory(const UpaShape &shape, const CarrierGrid &grid,
                                                   const SphericalPoint &desired, double r_min)
{
    std::vector<SphericalPoint> out;
    out.reserve(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
        out.push_back(trajectory_point(shape, grid, k, desired, r_min));
    return out;
}

} // namespace nfcs
