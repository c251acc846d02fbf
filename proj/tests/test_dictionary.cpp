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

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <map>
#include <vector>

#include "nfcs/dictionary.hpp"
#include "nfcs/io.hpp"

namespace
{

const double f_c = 28e9;

} // namespace

TEST_CASE("angle grid covers the half-open interval")
{
    const std::vector<double> g = nfcs::detail::angle_grid(4);
    REQUIRE(g.size() == 4);
    CHECK(g[0] == -0.5);
    CHECK(g[1] == 0.0);
    CHECK(g[2] == 0.5);
    CHECK(g[3] == -1.0);
    for (double v : nfcs::detail::angle_grid(7))
    {
        CHECK(v >= -1.0);
        CHECK(v < 1.0);
    }
}

TEST_CASE("ring step is the first coherence crossing")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(32, 4, f_c);
    const double mu = 0.5;
    for (double ve : {0.0, 0.4})
    {
        for (double va : {0.0, -0.6})
        {
            const double step = nfcs::distance_ring_step(s, f_c, mu, ve, va);
            REQUIRE(std::isfinite(step));
            const double base = s.spacing * s.spacing * f_c / nfcs::speed_of_light;
            auto gain = [&](double e) {
                return nfcs::squint_gain(base * (1.0 - va * va) * e, s.n_y) *
                       nfcs::squint_gain(base * (1.0 - ve * ve) * e, s.n_z);
            };
            // The returned step sits on the target level.
            CHECK_THAT(gain(step), Catch::Matchers::WithinAbs(mu, 1e-6));
            // No earlier crossing: a fine scan below the step stays above mu.
            for (int i = 1; i < 1000; i++)
                CHECK(gain(step * i / 1000.0) > mu);
        }
    }
}

TEST_CASE("ring step scales with panel size and obliquity")
{
    const nfcs::UpaShape big = nfcs::upa_half_wavelength(128, 4, f_c);
    const nfcs::UpaShape small = nfcs::upa_half_wavelength(64, 4, f_c);
    CHECK(nfcs::distance_ring_step(big, f_c, 0.5, 0.0, 0.0) <
          nfcs::distance_ring_step(small, f_c, 0.5, 0.0, 0.0));
    // Oblique azimuth weakens the dominant-axis curvature, widening rings.
    CHECK(nfcs::distance_ring_step(small, f_c, 0.5, 0.0, 0.9) >
          nfcs::distance_ring_step(small, f_c, 0.5, 0.0, 0.0));
    // A direction with no curvature on either axis cannot resolve range.
    const nfcs::UpaShape line = nfcs::upa_half_wavelength(16, 1, f_c);
    CHECK(!std::isfinite(nfcs::distance_ring_step(line, f_c, 0.5, 0.0, -1.0)));
}

TEST_CASE("angular dictionary enumerates the full grid")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(4, 2, f_c);
    const nfcs::CarrierGrid grid{f_c, 1e9, 3};
    const nfcs::AngularDictionary d = nfcs::build_angular_dictionary(s, grid, 8, 4);
    REQUIRE(d.size() == 32);
    REQUIRE(d.atoms.size() == 3);
    CHECK(d.atoms[0].rows() == s.size());
    CHECK(d.atoms[0].cols() == 32);
    for (int g = 0; g < d.size(); g++)
    {
        const nfcs::AtomLabel &l = d.labels[g];
        CHECK(l.inv_r == 0.0);
        CHECK(l.virt_elev == d.elev_grid[l.i_z]);
        CHECK(l.virt_azim == d.azim_grid[l.i_y]);
        CHECK_THAT(d.atoms[1].col(g).norm(), Catch::Matchers::WithinAbs(1.0, 1e-12));
    }
}

TEST_CASE("spherical dictionary ring structure")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(16, 2, f_c);
    const nfcs::CarrierGrid grid{f_c, 1e9, 2};
    const double mu = 0.5, r_min = 5.0;
    const nfcs::SphericalDictionary d = nfcs::build_spherical_dictionary(s, grid, 8, 4, mu, r_min);

    std::map<std::pair<int, int>, std::vector<nfcs::AtomLabel>> by_dir;
    for (const nfcs::AtomLabel &l : d.labels)
        by_dir[{l.i_z, l.i_y}].push_back(l);
    REQUIRE(by_dir.size() == 32);

    for (const auto &[dir, ls] : by_dir)
    {
        const double step =
            nfcs::distance_ring_step(s, f_c, mu, ls[0].virt_elev, ls[0].virt_azim);
        // Far-field atom closes every direction; i_r indexes in build order.
        CHECK(ls.back().inv_r == 0.0);
        for (std::size_t i = 0; i < ls.size(); i++)
            CHECK(ls[i].i_r == int(i));
        if (!std::isfinite(step))
        {
            CHECK(ls.size() == 1);
            continue;
        }
        // Rings march down from 1/r_min on a uniform lattice.
        CHECK_THAT(ls[0].inv_r, Catch::Matchers::WithinRel(1.0 / r_min, 1e-12));
        for (std::size_t i = 0; i + 2 < ls.size(); i++)
            CHECK_THAT(ls[i].inv_r - ls[i + 1].inv_r, Catch::Matchers::WithinRel(step, 1e-9));
        for (std::size_t i = 0; i + 1 < ls.size(); i++)
            CHECK(ls[i].inv_r > ls[i + 1].inv_r);
    }
}

TEST_CASE("consecutive rings meet the coherence target at the carrier")
{
    // The aperture and r_min are chosen so each direction carries several
    // rings; a 64-element axis at r_min = 5 would stop after one.
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(128, 4, f_c);
    const nfcs::CarrierGrid grid{f_c, 1e9, 1};
    const double mu = 0.5;
    const nfcs::SphericalDictionary d = nfcs::build_spherical_dictionary(s, grid, 8, 4, mu, 2.0);
    int checked = 0;
    for (std::size_t i = 0; i + 1 < d.labels.size(); i++)
    {
        const nfcs::AtomLabel &a = d.labels[i];
        const nfcs::AtomLabel &b = d.labels[i + 1];
        if (a.i_z != b.i_z || a.i_y != b.i_y || b.inv_r == 0.0)
            continue;
        const nfcs::CVec va = nfcs::fresnel_response_virtual(s, f_c, a.virt_elev, a.virt_azim, a.inv_r);
        const nfcs::CVec vb = nfcs::fresnel_response_virtual(s, f_c, b.virt_elev, b.virt_azim, b.inv_r);
        const double coh = std::abs(va.dot(vb));
        INFO("direction z=" << a.i_z << " y=" << a.i_y << " ring " << a.i_r);
        CHECK_THAT(coh, Catch::Matchers::WithinAbs(mu, 0.05));
        checked++;
    }
    CHECK(checked > 10);
}

TEST_CASE("atom blocks slice the atom matrix")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(8, 2, f_c);
    const nfcs::CarrierGrid grid{f_c, 1e9, 2};
    const nfcs::SphericalDictionary d = nfcs::build_spherical_dictionary(s, grid, 4, 2, 0.5, 5.0);
    const nfcs::CMat full = d.atom_matrix(1);
    CHECK(full.cols() == d.size());
    const nfcs::CMat block = d.atom_block(1, 2, 3);
    CHECK((block - full.middleCols(2, 3)).norm() == 0.0);
    CHECK_THROWS_AS(d.atom_block(1, d.size() - 1, 2), std::invalid_argument);
}

TEST_CASE("dictionary labels survive a cache round trip")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(16, 2, f_c);
    const nfcs::CarrierGrid grid{f_c, 2e9, 3};
    const nfcs::SphericalDictionary d = nfcs::build_spherical_dictionary(s, grid, 8, 4, 0.4, 6.0);

    const std::string path = std::filesystem::temp_directory_path() / "nfcs_dict_test.json";
    nfcs::save_dictionary_labels(path, d, 8, 4);
    const nfcs::SphericalDictionary back = nfcs::load_dictionary_labels(path);
    std::remove(path.c_str());

    REQUIRE(back.size() == d.size());
    CHECK(back.shape.n_y == d.shape.n_y);
    CHECK(back.shape.spacing == d.shape.spacing);
    CHECK(back.ring_coherence == d.ring_coherence);
    CHECK(back.r_min == d.r_min);
    REQUIRE(back.elev_grid.size() == d.elev_grid.size());
    REQUIRE(back.azim_grid.size() == d.azim_grid.size());
    for (int g = 0; g < d.size(); g++)
    {
        CHECK(back.labels[g].virt_elev == d.labels[g].virt_elev);
        CHECK(back.labels[g].virt_azim == d.labels[g].virt_azim);
        CHECK(back.labels[g].inv_r == d.labels[g].inv_r);
        CHECK(back.labels[g].i_z == d.labels[g].i_z);
        CHECK(back.labels[g].i_y == d.labels[g].i_y);
        CHECK(back.labels[g].i_r == d.labels[g].i_r);
    }
}

TEST_CASE("cached build writes once and reloads identically")
{
    const nfcs::UpaShape s = nfcs::upa_half_wavelength(8, 2, f_c);
    const nfcs::CarrierGrid grid{f_c, 1e9, 2};
    const auto dir = std::filesystem::temp_directory_path() / "nfcs_cache_test";
    std::filesystem::remove_all(dir);

    const nfcs::SphericalDictionary fresh =
        nfcs::build_spherical_dictionary_cached(s, grid, 4, 2, 0.5, 5.0, dir.string());
    REQUIRE(std::filesystem::exists(dir));
    std::size_t files = 0;
    for (const auto &e : std::filesystem::directory_iterator(dir))
    {
        (void)e;
        files++;
    }
    CHECK(files == 1);

    const nfcs::SphericalDictionary cached =
        nfcs::build_spherical_dictionary_cached(s, grid, 4, 2, 0.5, 5.0, dir.string());
    REQUIRE(cached.size() == fresh.size());
    for (int g = 0; g < fresh.size(); g++)
        CHECK(cached.labels[g].inv_r == fresh.labels[g].inv_r);

    // A different geometry gets its own cache entry.
    nfcs::build_spherical_dictionary_cached(s, grid, 4, 4, 0.5, 5.0, dir.string());
    files = 0;
    for (const auto &e : std::filesystem::directory_iterator(dir))
    {
        (void)e;
        files++;
    }
    CHECK(files == 2);
    std::filesystem::remove_all(dir);
}
