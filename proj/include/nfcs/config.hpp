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

#include <cstdint>

#include "nfcs/types.hpp"

namespace nfcs
{

constexpr const char *version_string = "0.1.0";

inline double dbm_to_watt(double dbm) { return std::pow(10.0, 0.1 * (dbm - 30.0)); }
inline double watt_to_dbm(double watt)
{
    if (!(watt > 0.0))
        throw std::invalid_argument("watt_to_dbm: power must be positive");
    return 10.0 * std::log10(watt) + 30.0;
}

// Log-distance pathloss PL = a1 + 10 a2 log10(d) + X, X ~ N(0, sigma_shadow^2), in dB.
struct PathlossParams
{
    double a1 = 0.0;
    double a2 = 0.0;
    double sigma_shadow = 0.0;
};

// Full scenario + solver configuration. Grid sizes left at 0 are derived
// from the panel dimensions by normalized(): the RIS azimuth grid matches
// its element count, every other angle grid oversamples its axis 8x.
struct SystemConfig
{
    // panels (y x z element counts); element pitch is half a wavelength at f_c
    int ris_n_y = 128, ris_n_z = 4;
    int user_n_y = 8, user_n_z = 4;
    int bs_n_y = 16, bs_n_z = 16;

    // OFDM carrier layout
    double f_c_hz = 28e9;
    double f_s_hz = 2e9;
    int n_subcarriers = 32;

    // training schedule
    int n_ris_patterns = 48;  // rows of the RIS probing matrix (Q)
    int n_pilot_symbols = 32; // uplink pilot vectors per pattern (N_X)
    double pilot_power_dbm = 30.0;
    double noise_power_dbm = -90.0;

    // propagation scene
    int n_paths = 3; // exactly one of them line-of-sight
    double user_range_min_m = 5.0;
    double user_range_max_m = 20.0;
    double bs_ris_range_m = 45.0;
    double bs_elev_deg = 100.0, bs_azim_deg = 20.0;   // RIS as seen from the BS panel
    double ris_elev_deg = 80.0, ris_azim_deg = -30.0; // BS as seen from the RIS panel
    PathlossParams los_pathloss{61.4, 2.0, 5.8};
    PathlossParams nlos_pathloss{72.0, 2.92, 8.7};

    // sparse dictionaries (0 = derive from panel size)
    int grid_ris_y = 0;
    int grid_ris_z = 0;
    int grid_user_y = 0;
    int grid_user_z = 0;
    double ring_coherence = 0.5; // target coherence between adjacent range rings
    double r_min_m = 5.0;        // closest range covered by the dictionary

    // support refinement stepsizes (virtual-angle units; the range step is
    // a fraction of the matched direction's ring step)
    double step_elev = 0.005, step_azim = 0.005;
    double step_user_elev = 0.005, step_user_azim = 0.005;
    double step_inv_r = 0.005;

    // Monte-Carlo harness
    int trials = 100;
    std::uint64_t seed = 1;

    UpaShape ris_shape() const { return upa_half_wavelength(ris_n_y, ris_n_z, f_c_hz); }
    UpaShape user_shape() const { return upa_half_wavelength(user_n_y, user_n_z, f_c_hz); }
    UpaShape bs_shape() const { return upa_half_wavelength(bs_n_y, bs_n_z, f_c_hz); }
    CarrierGrid carriers() const { return CarrierGrid{f_c_hz, f_s_hz, n_subcarriers}; }
    double pilot_power_w() const { return dbm_to_watt(pilot_power_dbm); }
    double noise_power_w() const { return dbm_to_watt(noise_power_dbm); }

    SystemConfig normalized() const
    {
        SystemConfig c = *this;
        if (c.grid_ris_y == 0)
            c.grid_ris_y = c.ris_n_y;
        if (c.grid_ris_z == 0)
            c.grid_ris_z = 8 * c.ris_n_z;
        if (c.grid_user_y == 0)
            c.grid_user_y = 8 * c.user_n_y;
        if (c.grid_user_z == 0)
            c.grid_user_z = 8 * c.user_n_z;
        c.validate();
        return c;
    }

    void validate() const
    {
        carriers().validate();
        if (ris_n_y < 1 || ris_n_z < 1 || user_n_y < 1 || user_n_z < 1 || bs_n_y < 1 || bs_n_z < 1)
            throw std::invalid_argument("SystemConfig: panel dimensions must be positive");
        if (n_ris_patterns < 1 || n_pilot_symbols < 1)
            throw std::invalid_argument("SystemConfig: training dimensions must be positive");
        if (n_paths < 0)
            throw std::invalid_argument("SystemConfig: path count must be nonnegative");
        if (!(user_range_min_m > 0.0) || !(user_range_max_m >= user_range_min_m))
            throw std::invalid_argument("SystemConfig: invalid user range interval");
        if (!(bs_ris_range_m > 0.0))
            throw std::invalid_argument("SystemConfig: BS-RIS range must be positive");
        if (grid_ris_y < 0 || grid_ris_z < 0 || grid_user_y < 0 || grid_user_z < 0)
            throw std::invalid_argument("SystemConfig: grid sizes must be nonnegative");
        if (!(ring_coherence > 0.0) || !(ring_coherence < 1.0))
            throw std::invalid_argument("SystemConfig: ring coherence must lie in (0, 1)");
        if (!(r_min_m > 0.0))
            throw std::invalid_argument("SystemConfig: r_min must be positive");
        if (!(step_elev > 0.0) || !(step_azim > 0.0) || !(step_user_elev > 0.0) ||
            !(step_user_azim > 0.0) || !(step_inv_r > 0.0))
            throw std::invalid_argument("SystemConfig: refinement stepsizes must be positive");
        if (trials < 1)
            throw std::invalid_argument("SystemConfig: trial count must be positive");
    }
};

// splitmix64-style mixer used to derive independent stream seeds from the
// master seed, trial index and sweep index.
inline std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b = 0, std::uint64_t c = 0)
{
    std::uint64_t z = a + 0x9e3779b97f4a7c15ull * (b + 1) + 0xbf58476d1ce4e5b9ull * (c + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

} // namespace nfcs
