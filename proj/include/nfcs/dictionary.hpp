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

// Sparse recovery dictionaries.
//
// The user-side dictionary samples the two virtual angles on a uniform DFT
// grid. The RIS-side dictionary additionally samples inverse range: per
// angular direction, rings start at 1/r_min and step down by the direction's
// own step e(mu, angles), chosen so two adjacent rings correlate to exactly
// the target coherence mu; one far-field atom (1/r = 0) closes the list.
// Labels are defined at the center frequency and shared by every
// subcarrier; the per-subcarrier atoms are the second-order spherical
// responses evaluated at that subcarrier's frequency, which is what makes
// the support common across the band despite beam squint.

#pragma once

#include <limits>

#include "nfcs/array.hpp"
#include "nfcs/fresnel.hpp"

namespace nfcs
{

struct AtomLabel
{
    double virt_elev = 0.0;
    double virt_azim = 0.0;
    double inv_r = 0.0; // 1/m, 0 encodes the far-field atom
    int i_z = 0;        // elevation grid index
    int i_y = 0;        // azimuth grid index
    int i_r = 0;        // position in the per-direction ring list, far field last
};

// Atom matrix for an arbitrary label list at one frequency (labels with
// inv_r = 0 come out as planar columns).
inline CMat atoms_at(const UpaShape &shape, double f, const std::vector<AtomLabel> &labels)
{
    CMat m(shape.size(), labels.size());
    for (std::size_t g = 0; g < labels.size(); g++)
        m.col(g) = fresnel_response_virtual(shape, f, labels[g].virt_elev, labels[g].virt_azim,
                                            labels[g].inv_r);
    return m;
}

namespace detail
{

// Uniform virtual-angle grid with G points and spacing 2/G. The sample that
// would land on +1 is wrapped to -1 so labels stay canonical in [-1, 1).
inline std::vector<double> angle_grid(int g)
{
    if (g < 1)
        throw std::invalid_argument("angle_grid: grid size must be positive");
    std::vector<double> v(g);
    for (int i = 1; i <= g; i++)
        v[i - 1] = (i == g) ? -1.0 : -1.0 + 2.0 * double(i) / double(g);
    return v;
}

} // namespace detail

// Inverse-range step between adjacent dictionary rings of one angular
// direction: the smallest e > 0 at which the two-axis quadratic-phase gain
// product
//
//   g(d^2 f_c / c (1 - va^2) e; n_y) * g(d^2 f_c / c (1 - ve^2) e; n_z)
//
// has decayed to the target coherence mu. Directions whose curvature
// vanishes on both axes cannot resolve range at all and return +inf.
inline double distance_ring_step(const UpaShape &shape, double f_c, double mu, double virt_elev,
                                 double virt_azim)
{
    detail::require_shape(shape);
    if (!(f_c > 0.0) || !std::isfinite(f_c))
        throw std::invalid_argument("distance_ring_step: carrier frequency must be positive");
    if (!(mu > 0.0) || !(mu < 1.0))
        throw std::invalid_argument("distance_ring_step: coherence target must lie in (0, 1)");
    detail::require_finite(virt_elev, "distance_ring_step");
    detail::require_finite(virt_azim, "distance_ring_step");

    const double base = shape.spacing * shape.spacing * f_c / speed_of_light;
    const double coef_y = base * (1.0 - virt_azim * virt_azim);
    const double coef_z = base * (1.0 - virt_elev * virt_elev);

    auto gain = [&](double step) {
        return squint_gain(coef_y * step, shape.n_y) * squint_gain(coef_z * step, shape.n_z);
    };

    // Scale on which the faster axis sweeps through its main lobe.
    double unit = std::numeric_limits<double>::infinity();
    if (coef_y > 0.0 && shape.n_y > 1)
        unit = std::min(unit, 2.0 / (double(shape.n_y) * double(shape.n_y) * coef_y));
    if (coef_z > 0.0 && shape.n_z > 1)
        unit = std::min(unit, 2.0 / (double(shape.n_z) * double(shape.n_z) * coef_z));
    if (!std::isfinite(unit))
        return std::numeric_limits<double>::infinity();

    // March to the first step where the product falls below mu, then bisect.
    const double h = unit / 8.0;
    double lo = 0.0, hi = 0.0;
    for (int j = 1; j <= 4000; j++)
    {
        const double step = h * double(j);
        if (gain(step) < mu)
        {
            lo = step - h;
            hi = step;
            break;
        }
    }
    if (hi == 0.0)
    {
        // Very slow decay (one axis nearly degenerate): fall back to doubling.
        double step = 4000.0 * h;
        double prev = step;
        for (int j = 0; j < 600 && hi == 0.0; j++)
        {
            prev = step;
            step *= 2.0;
            if (gain(step) < mu)
            {
                lo = prev;
                hi = step;
            }
        }
        if (hi == 0.0)
            return std::numeric_limits<double>::infinity();
    }
    for (int it = 0; it < 200 && (hi - lo) > 1e-12 * hi; it++)
    {
        const double mid = 0.5 * (lo + hi);
        (gain(mid) < mu ? hi : lo) = mid;
    }
    return 0.5 * (lo + hi);
}

struct AngularDictionary
{
    UpaShape shape;
    CarrierGrid grid;
    std::vector<double> elev_grid, azim_grid;
    std::vector<AtomLabel> labels;
    std::vector<CMat> atoms; // per-k N_U x G, materialized

    int size() const { return int(labels.size()); }
};

inline AngularDictionary build_angular_dictionary(const UpaShape &shape, const CarrierGrid &grid,
                                                  int g_y, int g_z)
{
    detail::require_shape(shape);
    grid.validate();
    AngularDictionary d;
    d.shape = shape;
    d.grid = grid;
    d.elev_grid = detail::angle_grid(g_z);
    d.azim_grid = detail::angle_grid(g_y);
    d.labels.reserve(std::size_t(g_y) * g_z);
    for (int iz = 0; iz < g_z; iz++)
        for (int iy = 0; iy < g_y; iy++)
            d.labels.push_back(AtomLabel{d.elev_grid[iz], d.azim_grid[iy], 0.0, iz, iy, 0});
    d.atoms.resize(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
        d.atoms[k] = atoms_at(shape, grid.freq(k), d.labels);
    return d;
}

struct SphericalDictionary
{
    UpaShape shape;
    CarrierGrid grid;
    double ring_coherence = 0.0;
    double r_min = 0.0;
    std::vector<double> elev_grid, azim_grid;
    std::vector<AtomLabel> labels;

    int size() const { return int(labels.size()); }

    // Atom columns are built on demand; materializing all subcarriers of a
    // large dictionary at once is deliberately not supported.
    CMat atom_matrix(int k) const { return atoms_at(shape, grid.freq(k), labels); }

    CMat atom_block(int k, int first, int count) const
    {
        if (first < 0 || count < 0 || first + count > size())
            throw std::invalid_argument("SphericalDictionary::atom_block: range out of bounds");
        const std::vector<AtomLabel> slice(labels.begin() + first, labels.begin() + first + count);
        return atoms_at(shape, grid.freq(k), slice);
    }
};

inline SphericalDictionary build_spherical_dictionary(const UpaShape &shape, const CarrierGrid &grid,
                                                      int g_y, int g_z, double mu, double r_min)
{
    detail::require_shape(shape);
    grid.validate();
    if (!(r_min > 0.0) || !std::isfinite(r_min))
        throw std::invalid_argument("build_spherical_dictionary: r_min must be positive");

    SphericalDictionary d;
    d.shape = shape;
    d.grid = grid;
    d.ring_coherence = mu;
    d.r_min = r_min;
    d.elev_grid = detail::angle_grid(g_z);
    d.azim_grid = detail::angle_grid(g_y);

    for (int iz = 0; iz < g_z; iz++)
    {
        const double ve = d.elev_grid[iz];
        for (int iy = 0; iy < g_y; iy++)
        {
            const double va = d.azim_grid[iy];
            const double step = distance_ring_step(shape, grid.f_c, mu, ve, va);
            int i_r = 0;
            if (std::isfinite(step))
            {
                for (double inv_r = 1.0 / r_min; inv_r > 0.0; inv_r -= step)
                    d.labels.push_back(AtomLabel{ve, va, inv_r, iz, iy, i_r++});
            }
            d.labels.push_back(AtomLabel{ve, va, 0.0, iz, iy, i_r});
            if (d.labels.size() > std::size_t(1) << 24)
                throw std::runtime_error(
                    "build_spherical_dictionary: atom count exceeds 2^24; "
                    "lower the ring coherence target or the grid resolution");
        }
    }
    return d;
}

// Ring step at the angles of an existing label, used by support refinement.
inline double ring_step_at(const SphericalDictionary &d, const AtomLabel &label)
{
    return distance_ring_step(d.shape, d.grid.f_c, d.ring_coherence, label.virt_elev,
                              label.virt_azim);
}

} // namespace nfcs
