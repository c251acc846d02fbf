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

#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>
#include <set>
#include <utility>
#include <vector>

#include "nfcs/recovery.hpp"

namespace
{

struct Planted
{
    nfcs::SystemConfig cfg;
    nfcs::SphericalDictionary rd;
    nfcs::AngularDictionary ud;
    nfcs::ChannelRealization ch;
    nfcs::MeasurementSet m;
    std::vector<int> ris_idx, user_idx;
};

// Synthesizes a channel that is exactly sparse in the dictionaries: every
// planted path is one RIS atom column times one user atom column with a
// per-subcarrier delay rotation. `tweak` runs after normalization so tests
// can resize the array, the probing, or the grids.
Planted make_planted(int k, const std::vector<std::pair<int, int>> &pairs, std::uint64_t seed,
                     const std::function<void(nfcs::SystemConfig &)> &tweak = {})
{
    Planted s;
    s.cfg.ris_n_y = 16;
    s.cfg.ris_n_z = 2;
    s.cfg.user_n_y = 4;
    s.cfg.user_n_z = 2;
    s.cfg.bs_n_y = 4;
    s.cfg.bs_n_z = 2;
    s.cfg.n_subcarriers = k;
    s.cfg.f_s_hz = 2e9;
    s.cfg.n_ris_patterns = 16;
    s.cfg.n_pilot_symbols = 12;
    s.cfg.n_paths = int(pairs.size());
    s.cfg.noise_power_dbm = -300.0;
    s.cfg = s.cfg.normalized();
    if (tweak)
        tweak(s.cfg);

    const nfcs::UpaShape ris = s.cfg.ris_shape();
    const nfcs::UpaShape user = s.cfg.user_shape();
    const nfcs::CarrierGrid grid = s.cfg.carriers();
    s.rd = nfcs::build_spherical_dictionary(ris, grid, s.cfg.grid_ris_y, s.cfg.grid_ris_z,
                                            s.cfg.ring_coherence, s.cfg.r_min_m);
    s.ud = nfcs::build_angular_dictionary(user, grid, s.cfg.grid_user_y, s.cfg.grid_user_z);

    const double scale = std::sqrt(double(ris.size()) * double(user.size()) / double(pairs.size()));
    std::vector<nfcs::CMat> h(k);
    for (int kk = 0; kk < k; kk++)
        h[kk] = nfcs::CMat::Zero(ris.size(), user.size());
    double delay = 20e-9;
    double amp = 1.0;
    for (const auto &[gr, gu] : pairs)
    {
        s.ris_idx.push_back(gr);
        s.user_idx.push_back(gu);
        for (int kk = 0; kk < k; kk++)
        {
            const nfcs::CVec b = nfcs::atoms_at(ris, grid.freq(kk), {s.rd.labels[gr]}).col(0);
            const nfcs::CVec a = nfcs::atoms_at(user, grid.freq(kk), {s.ud.labels[gu]}).col(0);
            const nfcs::cxd c = std::polar(amp * scale, -2.0 * nfcs::pi * delay * grid.freq(kk));
            h[kk] += c * (b * a.adjoint());
        }
        // Distinct delays and a decaying amplitude ladder keep the rank
        // factorization well separated.
        delay += 13e-9;
        amp *= 0.5;
    }

    std::mt19937_64 rng(seed);
    const nfcs::BsRisLink link = nfcs::make_bs_ris_link(s.cfg, rng);
    s.ch.paths.clear();
    s.ch.link = link;
    s.ch.h_user = std::move(h);
    s.ch.h_bs = nfcs::synthesize_bs_ris_channel(s.cfg.bs_shape(), ris, grid, link);
    const nfcs::TrainingSchedule sched = nfcs::make_training_schedule(s.cfg, link, rng);
    s.m = nfcs::simulate_training(s.ch, sched, seed + 1);
    return s;
}

// First dictionary column with a ring at the given direction indices.
int ring_atom(const nfcs::SphericalDictionary &d, int i_z, int i_y)
{
    for (int g = 0; g < d.size(); g++)
        if (d.labels[g].i_z == i_z && d.labels[g].i_y == i_y && d.labels[g].inv_r > 0.0)
            return g;
    throw std::runtime_error("no ring atom at that direction");
}

} // namespace

TEST_CASE("matcher scores: correlation is scale invariant, inner product is not")
{
    std::mt19937_64 rng(31);
    std::vector<nfcs::CMat> phi = {nfcs::CMat::Random(6, 5), nfcs::CMat::Random(6, 5)};
    std::vector<nfcs::CMat> t = {nfcs::CMat::Random(6, 2), nfcs::CMat::Random(6, 2)};

    const nfcs::RMat cc = nfcs::atom_match_scores(phi, t, nfcs::AtomMatcher::correlation);
    const nfcs::RMat in = nfcs::atom_match_scores(phi, t, nfcs::AtomMatcher::inner_product);
    REQUIRE(cc.rows() == 5);
    REQUIRE(cc.cols() == 2);

    std::vector<nfcs::CMat> t2 = t;
    const nfcs::cxd alpha{0.4, -1.1};
    for (auto &m : t2)
        m = (alpha * m).array() + nfcs::cxd{2.0, 1.0};
    const nfcs::RMat cc2 = nfcs::atom_match_scores(phi, t2, nfcs::AtomMatcher::correlation);
    CHECK((cc2 - cc).cwiseAbs().maxCoeff() < 1e-10);

    std::vector<nfcs::CMat> t3 = t;
    for (auto &m : t3)
        m *= 2.0;
    const nfcs::RMat in3 = nfcs::atom_match_scores(phi, t3, nfcs::AtomMatcher::inner_product);
    CHECK((in3 - 2.0 * in).cwiseAbs().maxCoeff() < 1e-10);

    // Constant probed columns contribute zero correlation rather than NaN.
    std::vector<nfcs::CMat> flat = phi;
    for (auto &m : flat)
        m.col(0).setConstant(nfcs::cxd{1.0, 0.0});
    const nfcs::RMat ccf = nfcs::atom_match_scores(flat, t, nfcs::AtomMatcher::correlation);
    CHECK(ccf.row(0).cwiseAbs().maxCoeff() == 0.0);
    CHECK(ccf.allFinite());
}

TEST_CASE("single planted path is recovered exactly by correlation matching")
{
    for (int k : {1, 4})
    {
        Planted probe = make_planted(k, {{0, 0}}, 41);
        const int gr = ring_atom(probe.rd, 3, 5);
        const Planted s = make_planted(k, {{gr, 13}}, 41);

        const nfcs::EstimationResult res =
            nfcs::mmpsr(s.m, s.rd, s.ud, 1, nfcs::AtomMatcher::correlation);
        INFO("k=" << k);
        REQUIRE(res.ris_coarse.size() == 1);
        CHECK(res.ris_coarse[0] == s.ris_idx[0]);
        CHECK(res.user_coarse[0] == s.user_idx[0]);
        // Refinement keeps the planted label: the coarse atom itself is
        // the best candidate in its own cell.
        CHECK(res.ris_support[0].virt_elev == s.rd.labels[s.ris_idx[0]].virt_elev);
        CHECK(res.ris_support[0].virt_azim == s.rd.labels[s.ris_idx[0]].virt_azim);
        CHECK_THAT(res.ris_support[0].inv_r,
                   Catch::Matchers::WithinAbs(s.rd.labels[s.ris_idx[0]].inv_r, 1e-12));
        CHECK(nfcs::nmse(s.ch.h_user, res.h_hat) < 1e-8);
        CHECK(!res.rank_deficient);
        CHECK(res.timing.match_s >= 0.0);
    }
}

TEST_CASE("inner-product matching stays within the planted neighborhood")
{
    // The plain inner-product matcher weighs atoms by their projected
    // norms, so with few probes it may trade the planted atom for a highly
    // coherent neighbor. That confusion is characteristic, not a defect;
    // the pick must still be close to the planted atom.
    const int k = 4;
    Planted probe = make_planted(k, {{0, 0}}, 41);
    const int gr = ring_atom(probe.rd, 3, 5);
    const Planted s = make_planted(k, {{gr, 13}}, 41);

    const nfcs::EstimationResult res =
        nfcs::mmpsr(s.m, s.rd, s.ud, 1, nfcs::AtomMatcher::inner_product);
    REQUIRE(res.ris_coarse.size() == 1);
    const nfcs::CMat atoms = s.rd.atom_matrix(0);
    const double coh =
        std::abs(atoms.col(res.ris_coarse[0]).dot(atoms.col(s.ris_idx[0])));
    CHECK(coh > 0.7);
    const nfcs::CMat uatoms = s.ud.atoms[0];
    const double ucoh =
        std::abs(uatoms.col(res.user_coarse[0]).dot(uatoms.col(s.user_idx[0])));
    CHECK(ucoh > 0.7);
    for (const auto &h : res.h_hat)
        CHECK(h.allFinite());
}

TEST_CASE("two separated planted paths are both recovered")
{
    // Per-subcarrier SVD factors mix the paths at a level set by the probing
    // count and pilot count, so the scenario uses enough of both and grids
    // whose neighbors are well separated.
    const int k = 4;
    const auto tweak = [](nfcs::SystemConfig &c) {
        c.ris_n_y = 32;
        c.grid_ris_y = 32;
        c.grid_ris_z = 4;
        c.grid_user_y = 8;
        c.grid_user_z = 4;
        c.n_ris_patterns = 48;
        c.n_pilot_symbols = 16;
    };
    Planted probe = make_planted(k, {{0, 2}}, 43, tweak);
    const int g1 = ring_atom(probe.rd, 1, 3);
    const int g2 = ring_atom(probe.rd, 3, 12);
    const int u1 = 5, u2 = 26;
    REQUIRE(std::abs(probe.ud.atoms[0].col(u1).dot(probe.ud.atoms[0].col(u2))) < 0.5);
    REQUIRE(std::abs(probe.rd.atom_matrix(0).col(g1).dot(probe.rd.atom_matrix(0).col(g2))) < 0.5);
    const Planted s = make_planted(k, {{g1, u1}, {g2, u2}}, 43, tweak);

    // With refinement off the rebuild runs on the exact planted labels.
    nfcs::RefineOptions off;
    off.enabled = false;
    const nfcs::EstimationResult coarse =
        nfcs::mmpsr(s.m, s.rd, s.ud, 2, nfcs::AtomMatcher::correlation, off);
    const std::set<std::pair<int, int>> got = {{coarse.ris_coarse[0], coarse.user_coarse[0]},
                                               {coarse.ris_coarse[1], coarse.user_coarse[1]}};
    const std::set<std::pair<int, int>> want = {{g1, u1}, {g2, u2}};
    CHECK(got == want);
    CHECK(nfcs::nmse(s.ch.h_user, coarse.h_hat) < 1e-8);

    // Refinement chases the slightly mixed per-path targets, so it may
    // wander within the cells; the rebuilt error stays small.
    const nfcs::EstimationResult res =
        nfcs::mmpsr(s.m, s.rd, s.ud, 2, nfcs::AtomMatcher::correlation);
    CHECK(nfcs::nmse(s.ch.h_user, res.h_hat) < 0.05);
}

TEST_CASE("colliding supports fall back to the next-best distinct atom")
{
    // Two paths sharing one user atom make the measurement rank one; the
    // matcher must still return distinct per-side supports.
    const int k = 4;
    Planted probe = make_planted(k, {{0, 2}}, 47);
    const int g1 = ring_atom(probe.rd, 2, 3);
    const int g2 = ring_atom(probe.rd, 6, 12);
    const Planted s = make_planted(k, {{g1, 9}, {g2, 9}}, 47);

    const nfcs::EstimationResult res = nfcs::mmpsr(s.m, s.rd, s.ud, 2, nfcs::AtomMatcher::correlation);
    CHECK(res.rank_deficient);
    CHECK(res.user_coarse[0] != res.user_coarse[1]);
    CHECK(res.ris_coarse[0] != res.ris_coarse[1]);
    for (const auto &h : res.h_hat)
        CHECK(h.allFinite());
}

TEST_CASE("explicit workspace reproduces the convenience overload")
{
    Planted probe = make_planted(2, {{0, 2}}, 53);
    const int gr = ring_atom(probe.rd, 4, 7);
    const Planted s = make_planted(2, {{gr, 17}}, 53);

    const nfcs::MmpsrWorkspace ws = nfcs::make_mmpsr_workspace(s.m, s.rd, s.ud);
    REQUIRE(ws.phi_ris.size() == s.m.y.size());
    CHECK(ws.phi_ris[0].rows() == s.m.y[0].rows());
    CHECK(ws.phi_ris[0].cols() == s.rd.size());
    CHECK(ws.phi_user[0].cols() == s.ud.size());

    const nfcs::RefineOptions opt;
    const nfcs::EstimationResult a = nfcs::mmpsr(s.m, s.rd, s.ud, 1, nfcs::AtomMatcher::correlation,
                                                 opt, ws);
    const nfcs::EstimationResult b = nfcs::mmpsr(s.m, s.rd, s.ud, 1, nfcs::AtomMatcher::correlation);
    CHECK(a.ris_coarse == b.ris_coarse);
    CHECK(a.user_coarse == b.user_coarse);
    for (std::size_t kk = 0; kk < a.h_hat.size(); kk++)
        CHECK((a.h_hat[kk] - b.h_hat[kk]).norm() == 0.0);
}

TEST_CASE("refinement can be disabled")
{
    Planted probe = make_planted(2, {{0, 2}}, 59);
    const int gr = ring_atom(probe.rd, 3, 1);
    const Planted s = make_planted(2, {{gr, 8}}, 59);

    nfcs::RefineOptions opt;
    opt.enabled = false;
    const nfcs::EstimationResult res = nfcs::mmpsr(s.m, s.rd, s.ud, 1,
                                                   nfcs::AtomMatcher::correlation, opt);
    CHECK(res.ris_coarse[0] == gr);
    CHECK(res.timing.refine_s == 0.0);
    CHECK(nfcs::nmse(s.ch.h_user, res.h_hat) < 1e-8);
}

TEST_CASE("rebuild from the true labels is a faithful regression")
{
    Planted probe = make_planted(3, {{0, 2}}, 61);
    const int gr = ring_atom(probe.rd, 5, 9);
    const Planted s = make_planted(3, {{gr, 21}}, 61);

    const std::vector<nfcs::CMat> h =
        nfcs::rebuild_from_labels(s.m, s.cfg.ris_shape(), s.cfg.user_shape(), s.cfg.carriers(),
                                  {s.rd.labels[gr]}, {s.ud.labels[21]});
    CHECK(nfcs::nmse(s.ch.h_user, h) < 1e-10);
}

TEST_CASE("greedy pursuit recovers planted atoms")
{
    const int k = 3;
    Planted probe = make_planted(k, {{0, 2}}, 67);
    const int g1 = ring_atom(probe.rd, 2, 3);
    const Planted s = make_planted(k, {{g1, 7}}, 67);

    const nfcs::EstimationResult res = nfcs::estimate_komp(s.m, s.rd, s.ud, 1);
    REQUIRE(res.ris_coarse.size() == 1);
    CHECK(res.ris_coarse[0] == g1);
    CHECK(res.user_coarse[0] == 7);
    CHECK(nfcs::nmse(s.ch.h_user, res.h_hat) < 1e-8);

    // The memory guard refuses oversized dictionary products.
    CHECK_THROWS_AS(nfcs::estimate_komp(s.m, s.rd, s.ud, 1, 10), std::runtime_error);
}

TEST_CASE("refinement axis spans the cell symmetrically")
{
    const std::vector<double> v = nfcs::detail::refine_axis(0.5, 0.1, 0.04, -1.0, 1.0);
    REQUIRE(v.size() == 5);
    CHECK_THAT(v[0], Catch::Matchers::WithinAbs(0.42, 1e-12));
    CHECK(v[2] == 0.5);
    CHECK_THAT(v[4], Catch::Matchers::WithinAbs(0.58, 1e-12));
    // Clipping against the domain keeps the center.
    const std::vector<double> c = nfcs::detail::refine_axis(0.98, 0.1, 0.04, -1.0, 1.0);
    CHECK(std::count(c.begin(), c.end(), 0.98) == 1);
    for (double x : c)
        CHECK(x <= 1.0);
    // Zero step collapses to the center alone.
    const std::vector<double> z = nfcs::detail::refine_axis(0.3, 0.0, 0.0, -1.0, 1.0);
    REQUIRE(z.size() == 1);
    CHECK(z[0] == 0.3);
}
