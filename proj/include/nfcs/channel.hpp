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

// Wideband channel synthesis.
//
// The RIS-user link is a P-path model: per subcarrier
//
//   H_U[k] = sqrt(N_R N_U / P) sum_p beta_p e^{-j 2 pi tau_p f_k}
//            b_R(f_k, path p) a_U(f_k, path p)^H
//
// where b_R is the exact spherical-wavefront RIS response (users sit in the
// panel's radiating near field) and a_U the planar user response. The
// BS-RIS link is a fixed line-of-sight rank-1 channel. Channel matrices are
// synthesized from the exact element distances even though the dictionaries
// downstream use the second-order expansion, so the model mismatch between
// the two is part of every experiment.

#pragma once

#include <random>

#include "nfcs/array.hpp"
#include "nfcs/config.hpp"

namespace nfcs
{

struct ChannelPath
{
    cxd gain{0.0, 0.0};   // beta_p
    double delay_s = 0.0; // tau_p
    SphericalPoint ris_point;
    double user_virt_elev = 0.0;
    double user_virt_azim = 0.0;
    bool line_of_sight = false;
};

struct BsRisLink
{
    cxd gain{1.0, 0.0};   // alpha
    double delay_s = 0.0; // tau_0
    double bs_virt_elev = 0.0, bs_virt_azim = 0.0;
    double ris_virt_elev = 0.0, ris_virt_azim = 0.0;
};

inline std::vector<CMat> synthesize_ris_user_channel(const UpaShape &ris, const UpaShape &user,
                                                     const CarrierGrid &grid,
                                                     const std::vector<ChannelPath> &paths)
{
    detail::require_shape(ris);
    detail::require_shape(user);
    grid.validate();

    const double scale =
        paths.empty() ? 0.0 : std::sqrt(double(ris.size()) * double(user.size()) / double(paths.size()));
    std::vector<CMat> h(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const double f_k = grid.freq(k);
        CMat hk = CMat::Zero(ris.size(), user.size());
        for (const ChannelPath &p : paths)
        {
            const CVec b = exact_spherical_response(ris, f_k, p.ris_point);
            const CVec a = planar_response(user, f_k, p.user_virt_elev, p.user_virt_azim);
            const cxd w = p.gain * std::polar(1.0, -2.0 * pi * p.delay_s * f_k);
            hk.noalias() += (scale * w) * (b * a.adjoint());
        }
        h[k] = std::move(hk);
    }
    return h;
}

inline std::vector<CMat> synthesize_bs_ris_channel(const UpaShape &bs, const UpaShape &ris,
                                                   const CarrierGrid &grid, const BsRisLink &link)
{
    detail::require_shape(bs);
    detail::require_shape(ris);
    grid.validate();

    std::vector<CMat> h(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
    {
        const double f_k = grid.freq(k);
        const CVec a_bs = planar_response(bs, f_k, link.bs_virt_elev, link.bs_virt_azim);
        const CVec a_ris = planar_response(ris, f_k, link.ris_virt_elev, link.ris_virt_azim);
        const cxd w = link.gain * std::polar(1.0, -2.0 * pi * link.delay_s * f_k);
        h[k] = w * (a_bs * a_ris.adjoint());
    }
    return h;
}

struct ChannelRealization
{
    std::vector<ChannelPath> paths;
    BsRisLink link;
    std::vector<CMat> h_user; // per-k N_R x N_U
    std::vector<CMat> h_bs;   // per-k N_B x N_R

    double kappa() const
    {
        double s = 0.0;
        for (const ChannelPath &p : paths)
            s += std::norm(p.gain);
        return s;
    }
};

// One shadowed pathloss draw in dB at range r.
inline double sample_pathloss_db(const PathlossParams &pl, double range_m, std::mt19937_64 &rng)
{
    if (!(range_m > 0.0))
        throw std::invalid_argument("sample_pathloss_db: range must be positive");
    std::normal_distribution<double> shadow(0.0, pl.sigma_shadow);
    return pl.a1 + 10.0 * pl.a2 * std::log10(range_m) + shadow(rng);
}

// Draws the P scattering paths of the RIS-user link. Path 0 is the
// line-of-sight one. Departure (RIS side) and arrival (user side) angles
// are uniform over the half-space in front of each panel, ranges uniform in
// the configured interval, delays set by the range. The path gain is
// CN(0, v) with v combining the shadowed pathloss with a random reflection
// attenuation kappa1^1.8 * 10^(kappa2 / 10), kappa1 ~ U(0,1),
// kappa2 ~ N(0, 16) dB.
//
// Per path the generator consumes, in order: RIS elevation, RIS azimuth,
// range, user elevation, user azimuth, shadowing, kappa1, kappa2, and the
// two Gaussian components of the gain.
inline std::vector<ChannelPath> sample_paths(const SystemConfig &cfg, std::mt19937_64 &rng)
{
    cfg.validate();
    std::uniform_real_distribution<double> elev(0.0, pi);
    std::uniform_real_distribution<double> azim(-0.5 * pi, 0.5 * pi);
    std::uniform_real_distribution<double> range(cfg.user_range_min_m, cfg.user_range_max_m);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::normal_distribution<double> refl_db(0.0, 4.0);
    std::normal_distribution<double> gauss(0.0, 1.0);

    std::vector<ChannelPath> paths(cfg.n_paths);
    for (int p = 0; p < cfg.n_paths; p++)
    {
        ChannelPath path;
        path.line_of_sight = (p == 0);
        path.ris_point.theta = elev(rng);
        path.ris_point.phi = azim(rng);
        path.ris_point.r = range(rng);
        const SphericalPoint user_dir{elev(rng), azim(rng), 1.0};
        path.user_virt_elev = user_dir.virt_elev();
        path.user_virt_azim = user_dir.virt_azim();
        path.delay_s = path.ris_point.r / speed_of_light;

        const PathlossParams &pl = path.line_of_sight ? cfg.los_pathloss : cfg.nlos_pathloss;
        const double loss_db = sample_pathloss_db(pl, path.ris_point.r, rng);
        const double kappa1 = unit(rng);
        const double kappa2 = refl_db(rng);
        const double refl = std::pow(kappa1, 1.8) * std::pow(10.0, 0.1 * kappa2);
        const double variance = refl * std::pow(10.0, -0.1 * loss_db);
        const double g_re = gauss(rng);
        const double g_im = gauss(rng);
        path.gain = std::sqrt(0.5 * variance) * cxd(g_re, g_im);
        paths[p] = path;
    }
    return paths;
}

// Fixed LoS backhaul between the BS and the RIS. The link gain is a unit
// modulus rotation: the strong static link is assumed power-calibrated, so
// the training SNR is governed by the pilot power and the user-side path
// gains alone.
inline BsRisLink make_bs_ris_link(const SystemConfig &cfg, std::mt19937_64 &rng)
{
    cfg.validate();
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    BsRisLink link;
    link.gain = std::polar(1.0, phase(rng));
    link.delay_s = cfg.bs_ris_range_m / speed_of_light;
    const SphericalPoint at_bs{cfg.bs_elev_deg * pi / 180.0, cfg.bs_azim_deg * pi / 180.0, 1.0};
    const SphericalPoint at_ris{cfg.ris_elev_deg * pi / 180.0, cfg.ris_azim_deg * pi / 180.0, 1.0};
    link.bs_virt_elev = at_bs.virt_elev();
    link.bs_virt_azim = at_bs.virt_azim();
    link.ris_virt_elev = at_ris.virt_elev();
    link.ris_virt_azim = at_ris.virt_azim();
    return link;
}

inline ChannelRealization realize_channel(const SystemConfig &cfg, std::vector<ChannelPath> paths,
                                          const BsRisLink &link)
{
    ChannelRealization ch;
    ch.paths = std::move(paths);
    ch.link = link;
    ch.h_user = synthesize_ris_user_channel(cfg.ris_shape(), cfg.user_shape(), cfg.carriers(), ch.paths);
    ch.h_bs = synthesize_bs_ris_channel(cfg.bs_shape(), cfg.ris_shape(), cfg.carriers(), ch.link);
    return ch;
}

} // namespace nfcs
