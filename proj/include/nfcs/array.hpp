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

// Array response vectors for a UPA in the y-z plane, all normalized to unit
// L2 norm. The phase of element (m_y, m_z) is -2*pi*delta with
// delta = (f/c) * (r_elem - r), i.e. the excess propagation from a source at
// range r. Three levels of fidelity:
//
//   exact_spherical_response   true Euclidean element distances
//   fresnel_spherical_response second-order (Fresnel) expansion of the same
//   planar_response            far-field limit, linear phase only
//
// The planar variant follows the sign of the r -> inf limit of the exact
// response, so the three families are mutually consistent.

#pragma once

#include "nfcs/types.hpp"

namespace nfcs
{

namespace detail
{

// Fresnel phase coefficient, shared by the response builder and the
// dictionary: delta = (f/c) * (-d*(m_y*va + m_z*ve) + inv_r * curvature(m)).
inline double fresnel_curvature(double d, double m_y, double m_z, double ve, double va)
{
    return d * d * (0.5 * m_z * m_z * (1.0 - ve * ve) + 0.5 * m_y * m_y * (1.0 - va * va) -
                    m_y * m_z * ve * va);
}

inline void require_response_args(const UpaShape &shape, double f)
{
    require_shape(shape);
    if (!(f > 0.0) || !std::isfinite(f))
        throw std::invalid_argument("array response: frequency must be positive");
}

} // namespace detail

// Far-field steering vector at virtual angles (ve, va). Declared here,
// defined after the Fresnel builder whose inv_r = 0 arithmetic it shares
// bit for bit.
inline CVec planar_response(const UpaShape &shape, double f, double virt_elev, double virt_azim);

// Exact spherical-wavefront response. The element excess distance is
// computed as (r_elem^2 - r^2) / (r_elem + r) to stay accurate when r is
// many orders of magnitude larger than the aperture.
inline CVec exact_spherical_response(const UpaShape &shape, double f, const SphericalPoint &p)
{
    detail::require_response_args(shape, f);
    detail::require_finite(p.theta, "exact_spherical_response");
    detail::require_finite(p.phi, "exact_spherical_response");
    if (!(p.r > 0.0) || !std::isfinite(p.r))
        throw std::invalid_argument("exact_spherical_response: range must be positive");

    const int n = shape.size();
    const double scale = 1.0 / std::sqrt(double(n));
    const double ve = p.virt_elev();
    const double va = p.virt_azim();
    const double d = shape.spacing;
    const double w = 2.0 * pi * f / speed_of_light;
    CVec v(n);
    for (int iy = 0; iy < shape.n_y; iy++)
    {
        const double m_y = shape.index_y(iy);
        for (int iz = 0; iz < shape.n_z; iz++)
        {
            const double m_z = shape.index_z(iz);
            const double s = m_y * va + m_z * ve;
            const double q = d * d * (m_y * m_y + m_z * m_z);
            // r_elem^2 = r^2 - 2 r d s + d^2 (m_y^2 + m_z^2)
            const double num = q - 2.0 * p.r * d * s;
            const double r_elem = std::sqrt(p.r * p.r + num);
            const double excess = num / (r_elem + p.r);
            v(iy * shape.n_z + iz) = scale * std::polar(1.0, -w * excess);
        }
    }
    return v;
}

// Fresnel response parameterized directly by virtual angles and inverse
// range. inv_r = 0 encodes the far-field column and reproduces
// planar_response exactly.
inline CVec fresnel_response_virtual(const UpaShape &shape, double f, double virt_elev,
                                     double virt_azim, double inv_r)
{
    detail::require_response_args(shape, f);
    detail::require_finite(virt_elev, "fresnel_response_virtual");
    detail::require_finite(virt_azim, "fresnel_response_virtual");
    if (!(inv_r >= 0.0) || !std::isfinite(inv_r))
        throw std::invalid_argument("fresnel_response_virtual: inverse range must be >= 0");

    const int n = shape.size();
    const double scale = 1.0 / std::sqrt(double(n));
    const double d = shape.spacing;
    const double w = 2.0 * pi * f / speed_of_light;
    CVec v(n);
    for (int iy = 0; iy < shape.n_y; iy++)
    {
        const double m_y = shape.index_y(iy);
        for (int iz = 0; iz < shape.n_z; iz++)
        {
            const double m_z = shape.index_z(iz);
            const double delta = -d * (m_y * virt_azim + m_z * virt_elev) +
                                 inv_r * detail::fresnel_curvature(d, m_y, m_z, virt_elev, virt_azim);
            v(iy * shape.n_z + iz) = scale * std::polar(1.0, -w * delta);
        }
    }
    return v;
}

inline CVec fresnel_spherical_response(const UpaShape &shape, double f, const SphericalPoint &p)
{
    if (!(p.r > 0.0) || !std::isfinite(p.r))
        throw std::invalid_argument("fresnel_spherical_response: range must be positive");
    return fresnel_response_virtual(shape, f, p.virt_elev(), p.virt_azim(), 1.0 / p.r);
}

inline CVec planar_response(const UpaShape &shape, double f, double virt_elev, double virt_azim)
{
    return fresnel_response_virtual(shape, f, virt_elev, virt_azim, 0.0);
}

} // namespace nfcs
