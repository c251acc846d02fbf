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

// Uplink training simulation. The user sends pilot vectors through the RIS
// while the BS combines with a beam matched to the static backhaul; after
// collecting the Q RIS probing patterns the per-subcarrier measurement is
//
//   Y[k] = V~[k] H_U[k] F + N[k],   V~[k] = V diag(h_B[k]),
//   h_B[k] = w[k]^H H_B[k],
//
// with V the unit-modulus RIS patterns, F the frequency-flat pilots with
// per-column energy sigma_p^2, and N[k] the combined receiver noise, iid
// CN(0, sigma_n^2 ||w[k]||^2).

#pragma once

#include <random>

#include "nfcs/channel.hpp"

namespace nfcs
{

inline CMat random_unit_modulus(int rows, int cols, std::mt19937_64 &rng)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("random_unit_modulus: dimensions must be positive");
    std::uniform_real_distribution<double> phase(0.0, 2.0 * pi);
    CMat m(rows, cols);
    for (int j = 0; j < cols; j++)
        for (int i = 0; i < rows; i++)
            m(i, j) = std::polar(1.0, phase(rng));
    return m;
}

// Entrywise iid CN(0, variance).
inline CMat draw_complex_gaussian(int rows, int cols, double variance, std::mt19937_64 &rng)
{
    if (rows < 1 || cols < 1)
        throw std::invalid_argument("draw_complex_gaussian: dimensions must be positive");
    if (!(variance >= 0.0))
        throw std::invalid_argument("draw_complex_gaussian: variance must be nonnegative");
    std::normal_distribution<double> gauss(0.0, std::sqrt(0.5 * variance));
    CMat m(rows, cols);
    for (int j = 0; j < cols; j++)
        for (int i = 0; i < rows; i++)
        {
            const double re = gauss(rng);
            const double im = gauss(rng);
            m(i, j) = cxd(re, im);
        }
    return m;
}

struct TrainingSchedule
{
    CMat ris_patterns;          // Q x N_R, unit-modulus entries
    CMat pilots;                // N_U x N_X, frequency flat, ||column||^2 = sigma_p^2
    std::vector<CVec> combiner; // per-k BS combining vector, unit norm
    double sigma_p2 = 0.0;
    double sigma_n2 = 0.0;
};

// Random probing schedule: RIS patterns and pilots have iid uniform phases,
// the BS combiner is matched per subcarrier to the backhaul departure beam.
inline TrainingSchedule make_training_schedule(const SystemConfig &cfg, const BsRisLink &link,
                                               std::mt19937_64 &rng)
{
    cfg.validate();
    TrainingSchedule s;
    s.sigma_p2 = cfg.pilot_power_w();
    s.sigma_n2 = cfg.noise_power_w();
    s.ris_patterns = random_unit_modulus(cfg.n_ris_patterns, cfg.ris_n_y * cfg.ris_n_z, rng);
    s.pilots = std::sqrt(s.sigma_p2 / double(cfg.user_n_y * cfg.user_n_z)) *
               random_unit_modulus(cfg.user_n_y * cfg.user_n_z, cfg.n_pilot_symbols, rng);
    const CarrierGrid grid = cfg.carriers();
    const UpaShape bs = cfg.bs_shape();
    s.combiner.resize(grid.n_subcarriers);
    for (int k = 0; k < grid.n_subcarriers; k++)
        s.combiner[k] = planar_response(bs, grid.freq(k), link.bs_virt_elev, link.bs_virt_azim);
    return s;
}

// Effective BS-side row per subcarrier, h_B[k] = w[k]^H H_B[k], stored as a
// plain vector (entry i is the row's i-th element, no extra conjugation).
inline std::vector<CVec> effective_bs_rows(const TrainingSchedule &sched,
                                           const ChannelRealization &ch)
{
    if (sched.combiner.size() != ch.h_bs.size())
        throw std::invalid_argument("effective_bs_rows: combiner and channel disagree on K");
    std::vector<CVec> rows(ch.h_bs.size());
    for (std::size_t k = 0; k < ch.h_bs.size(); k++)
    {
        if (sched.combiner[k].size() != ch.h_bs[k].rows())
            throw std::invalid_argument("effective_bs_rows: combiner does not match BS panel");
        rows[k] = (sched.combiner[k].adjoint() * ch.h_bs[k]).transpose();
    }
    return rows;
}

// V~[k] = V diag(h_B[k]): row q is the q-th RIS pattern weighted entrywise
// by the effective BS-side row.
inline std::vector<CMat> effective_ris_matrices(const TrainingSchedule &sched,
                                                const ChannelRealization &ch)
{
    const std::vector<CVec> rows = effective_bs_rows(sched, ch);
    std::vector<CMat> v(rows.size());
    for (std::size_t k = 0; k < rows.size(); k++)
    {
        if (rows[k].size() != sched.ris_patterns.cols())
            throw std::invalid_argument("effective_ris_matrices: pattern width does not match RIS");
        v[k] = sched.ris_patterns * rows[k].asDiagonal();
    }
    return v;
}

struct MeasurementSet
{
    std::vector<CMat> y;     // per-k Q x N_X
    std::vector<CMat> v_eff; // per-k Q x N_R
    CMat pilots;             // N_U x N_X
    double sigma_n2 = 0.0;   // noise power after combining (unit-norm combiner)
    std::uint64_t noise_seed = 0;
};

inline MeasurementSet simulate_training(const ChannelRealization &ch, const TrainingSchedule &sched,
                                        std::uint64_t noise_seed)
{
    MeasurementSet m;
    m.v_eff = effective_ris_matrices(sched, ch);
    m.pilots = sched.pilots;
    m.sigma_n2 = sched.sigma_n2;
    m.noise_seed = noise_seed;
    m.y.resize(ch.h_user.size());
    std::mt19937_64 rng(noise_seed);
    for (std::size_t k = 0; k < ch.h_user.size(); k++)
    {
        if (ch.h_user[k].rows() != m.v_eff[k].cols() || ch.h_user[k].cols() != sched.pilots.rows())
            throw std::invalid_argument("simulate_training: channel does not match schedule");
        m.y[k] = m.v_eff[k] * ch.h_user[k] * sched.pilots;
        const double var = sched.sigma_n2 * sched.combiner[k].squaredNorm();
        if (var > 0.0)
            m.y[k] += draw_complex_gaussian(int(m.y[k].rows()), int(m.y[k].cols()), var, rng);
    }
    return m;
}

} // namespace nfcs
