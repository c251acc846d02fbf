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

// File formats. Everything textual: JSON for configs, dictionary label
// caches, measurement dumps and run manifests; CSV for benchmark results.
// Complex matrices are stored column major as [re, im] pairs. CSV numbers
// are printed with %.12g and LF line endings so repeated runs under the
// same seed are byte identical.

#pragma once

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "nfcs/channel.hpp"
#include "nfcs/config.hpp"
#include "nfcs/dictionary.hpp"
#include "nfcs/measurement.hpp"

namespace nfcs
{

using json = nlohmann::json;

inline json pathloss_to_json(const PathlossParams &p)
{
    return json{{"a1", p.a1}, {"a2", p.a2}, {"sigma_shadow", p.sigma_shadow}};
}

inline PathlossParams pathloss_from_json(const json &j)
{
    return PathlossParams{j.at("a1").get<double>(), j.at("a2").get<double>(),
                          j.at("sigma_shadow").get<double>()};
}

inline json config_to_json(const SystemConfig &c)
{
    json j;
    j["ris_n_y"] = c.ris_n_y;
    j["ris_n_z"] = c.ris_n_z;
    j["user_n_y"] = c.user_n_y;
    j["user_n_z"] = c.user_n_z;
    j["bs_n_y"] = c.bs_n_y;
    j["bs_n_z"] = c.bs_n_z;
    j["f_c_hz"] = c.f_c_hz;
    j["f_s_hz"] = c.f_s_hz;
    j["n_subcarriers"] = c.n_subcarriers;
    j["n_ris_patterns"] = c.n_ris_patterns;
    j["n_pilot_symbols"] = c.n_pilot_symbols;
    j["pilot_power_dbm"] = c.pilot_power_dbm;
    j["noise_power_dbm"] = c.noise_power_dbm;
    j["n_paths"] = c.n_paths;
    j["user_range_min_m"] = c.user_range_min_m;
    j["user_range_max_m"] = c.user_range_max_m;
    j["bs_ris_range_m"] = c.bs_ris_range_m;
    j["bs_elev_deg"] = c.bs_elev_deg;
    j["bs_azim_deg"] = c.bs_azim_deg;
    j["ris_elev_deg"] = c.ris_elev_deg;
    j["ris_azim_deg"] = c.ris_azim_deg;
    j["los_pathloss"] = pathloss_to_json(c.los_pathloss);
    j["nlos_pathloss"] = pathloss_to_json(c.nlos_pathloss);
    j["grid_ris_y"] = c.grid_ris_y;
    j["grid_ris_z"] = c.grid_ris_z;
    j["grid_user_y"] = c.grid_user_y;
    j["grid_user_z"] = c.grid_user_z;
    j["ring_coherence"] = c.ring_coherence;
    j["r_min_m"] = c.r_min_m;
    j["step_elev"] = c.step_elev;
    j["step_azim"] = c.step_azim;
    j["step_user_elev"] = c.step_user_elev;
    j["step_user_azim"] = c.step_user_azim;
    j["step_inv_r"] = c.step_inv_r;
    j["trials"] = c.trials;
    j["seed"] = c.seed;
    return j;
}

// Unknown keys are rejected so configuration typos fail loudly; missing
// keys fall back to the defaults.
inline SystemConfig config_from_json(const json &j)
{
    SystemConfig c;
    const json known = config_to_json(c);
    for (auto it = j.begin(); it != j.end(); ++it)
        if (!known.contains(it.key()))
            throw std::invalid_argument("config: unknown key '" + it.key() + "'");
    auto get_int = [&](const char *key, int &dst) {
        if (j.contains(key))
            dst = j.at(key).get<int>();
    };
    auto get_dbl = [&](const char *key, double &dst) {
        if (j.contains(key))
            dst = j.at(key).get<double>();
    };
    get_int("ris_n_y", c.ris_n_y);
    get_int("ris_n_z", c.ris_n_z);
    get_int("user_n_y", c.user_n_y);
    get_int("user_n_z", c.user_n_z);
    get_int("bs_n_y", c.bs_n_y);
    get_int("bs_n_z", c.bs_n_z);
    get_dbl("f_c_hz", c.f_c_hz);
    get_dbl("f_s_hz", c.f_s_hz);
    get_int("n_subcarriers", c.n_subcarriers);
    get_int("n_ris_patterns", c.n_ris_patterns);
    get_int("n_pilot_symbols", c.n_pilot_symbols);
    get_dbl("pilot_power_dbm", c.pilot_power_dbm);
    get_dbl("noise_power_dbm", c.noise_power_dbm);
    get_int("n_paths", c.n_paths);
    get_dbl("user_range_min_m", c.user_range_min_m);
    get_dbl("user_range_max_m", c.user_range_max_m);
    get_dbl("bs_ris_range_m", c.bs_ris_range_m);
    get_dbl("bs_elev_deg", c.bs_elev_deg);
    get_dbl("bs_azim_deg", c.bs_azim_deg);
    get_dbl("ris_elev_deg", c.ris_elev_deg);
    get_dbl("ris_azim_deg", c.ris_azim_deg);
    if (j.contains("los_pathloss"))
        c.los_pathloss = pathloss_from_json(j.at("los_pathloss"));
    if (j.contains("nlos_pathloss"))
        c.nlos_pathloss = pathloss_from_json(j.at("nlos_pathloss"));
    get_int("grid_ris_y", c.grid_ris_y);
    get_int("grid_ris_z", c.grid_ris_z);
    get_int("grid_user_y", c.grid_user_y);
    get_int("grid_user_z", c.grid_user_z);
    get_dbl("ring_coherence", c.ring_coherence);
    get_dbl("r_min_m", c.r_min_m);
    get_dbl("step_elev", c.step_elev);
    get_dbl("step_azim", c.step_azim);
    get_dbl("step_user_elev", c.step_user_elev);
    get_dbl("step_user_azim", c.step_user_azim);
    get_dbl("step_inv_r", c.step_inv_r);
    get_int("trials", c.trials);
    if (j.contains("seed"))
        c.seed = j.at("seed").get<std::uint64_t>();
    return c;
}

inline SystemConfig load_config_file(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("config: cannot open " + path);
    json j;
    in >> j;
    return config_from_json(j);
}

inline void save_config_file(const std::string &path, const SystemConfig &c)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("config: cannot write " + path);
    out << config_to_json(c).dump(2) << "\n";
}

inline json label_to_json(const AtomLabel &l)
{
    return json{l.virt_elev, l.virt_azim, l.inv_r, l.i_z, l.i_y, l.i_r};
}

inline AtomLabel label_from_json(const json &j)
{
    if (!j.is_array() || j.size() != 6)
        throw std::invalid_argument("label: expected [ve, va, inv_r, i_z, i_y, i_r]");
    return AtomLabel{j[0].get<double>(), j[1].get<double>(), j[2].get<double>(),
                     j[3].get<int>(),    j[4].get<int>(),    j[5].get<int>()};
}

inline json cmat_to_json(const CMat &m)
{
    json j;
    j["rows"] = m.rows();
    j["cols"] = m.cols();
    json v = json::array();
    for (Eigen::Index c = 0; c < m.cols(); c++)
        for (Eigen::Index r = 0; r < m.rows(); r++)
            v.push_back(json{m(r, c).real(), m(r, c).imag()});
    j["data"] = std::move(v);
    return j;
}

inline CMat cmat_from_json(const json &j)
{
    const Eigen::Index rows = j.at("rows").get<Eigen::Index>();
    const Eigen::Index cols = j.at("cols").get<Eigen::Index>();
    const json &v = j.at("data");
    if (Eigen::Index(v.size()) != rows * cols)
        throw std::invalid_argument("matrix: data length does not match shape");
    CMat m(rows, cols);
    Eigen::Index i = 0;
    for (Eigen::Index c = 0; c < cols; c++)
        for (Eigen::Index r = 0; r < rows; r++, i++)
            m(r, c) = cxd(v[i][0].get<double>(), v[i][1].get<double>());
    return m;
}

inline json measurement_to_json(const MeasurementSet &m)
{
    json j;
    j["sigma_n2"] = m.sigma_n2;
    j["noise_seed"] = m.noise_seed;
    j["pilots"] = cmat_to_json(m.pilots);
    json y = json::array(), v = json::array();
    for (const CMat &mk : m.y)
        y.push_back(cmat_to_json(mk));
    for (const CMat &vk : m.v_eff)
        v.push_back(cmat_to_json(vk));
    j["y"] = std::move(y);
    j["v_eff"] = std::move(v);
    return j;
}

inline MeasurementSet measurement_from_json(const json &j)
{
    MeasurementSet m;
    m.sigma_n2 = j.at("sigma_n2").get<double>();
    m.noise_seed = j.at("noise_seed").get<std::uint64_t>();
    m.pilots = cmat_from_json(j.at("pilots"));
    for (const json &mk : j.at("y"))
        m.y.push_back(cmat_from_json(mk));
    for (const json &vk : j.at("v_eff"))
        m.v_eff.push_back(cmat_from_json(vk));
    return m;
}

// Distance ring search is the only expensive part of dictionary
// construction, so the label list can be cached on disk. A cache entry is
// keyed by every parameter the labels depend on; loading rebuilds the
// dictionary object with lazily materialized atoms.

namespace detail
{

inline std::uint64_t fnv1a(const std::string &s)
{
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char c : s)
    {
        h ^= c;
        h *= 1099511628211ULL;
    }
    return h;
}

} // namespace detail

inline std::string spherical_cache_key(const UpaShape &shape, const CarrierGrid &grid, int g_y,
                                       int g_z, double mu, double r_min)
{
    char buf[256];
    std::snprintf(buf, sizeof(buf), "sph|%d|%d|%.17g|%.17g|%.17g|%d|%d|%d|%.17g|%.17g",
                  shape.n_y, shape.n_z, shape.spacing, grid.f_c, grid.f_s, grid.n_subcarriers,
                  g_y, g_z, mu, r_min);
    char hex[32];
    std::snprintf(hex, sizeof(hex), "%016llx", static_cast<unsigned long long>(detail::fnv1a(buf)));
    return std::string(hex);
}

// Cache directory from the NFCS_CACHE_DIR environment variable; empty
// string disables caching.
inline std::string dictionary_cache_dir()
{
    const char *env = std::getenv("NFCS_CACHE_DIR");
    return env ? std::string(env) : std::string();
}

inline void save_dictionary_labels(const std::string &path, const SphericalDictionary &d, int g_y,
                                   int g_z)
{
    json j;
    j["format"] = "nfcs-spherical-labels";
    j["version"] = version_string;
    j["n_y"] = d.shape.n_y;
    j["n_z"] = d.shape.n_z;
    j["spacing"] = d.shape.spacing;
    j["f_c_hz"] = d.grid.f_c;
    j["f_s_hz"] = d.grid.f_s;
    j["n_subcarriers"] = d.grid.n_subcarriers;
    j["grid_y"] = g_y;
    j["grid_z"] = g_z;
    j["ring_coherence"] = d.ring_coherence;
    j["r_min_m"] = d.r_min;
    json labels = json::array();
    for (const AtomLabel &l : d.labels)
        labels.push_back(label_to_json(l));
    j["labels"] = std::move(labels);
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("dictionary cache: cannot write " + path);
    out << j.dump() << "\n";
}

inline SphericalDictionary load_dictionary_labels(const std::string &path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("dictionary cache: cannot open " + path);
    json j;
    in >> j;
    if (j.at("format").get<std::string>() != "nfcs-spherical-labels")
        throw std::runtime_error("dictionary cache: wrong format tag in " + path);
    SphericalDictionary d;
    d.shape = UpaShape{j.at("n_y").get<int>(), j.at("n_z").get<int>(),
                       j.at("spacing").get<double>()};
    d.grid = CarrierGrid{j.at("f_c_hz").get<double>(), j.at("f_s_hz").get<double>(),
                         j.at("n_subcarriers").get<int>()};
    d.ring_coherence = j.at("ring_coherence").get<double>();
    d.r_min = j.at("r_min_m").get<double>();
    d.elev_grid = detail::angle_grid(j.at("grid_z").get<int>());
    d.azim_grid = detail::angle_grid(j.at("grid_y").get<int>());
    for (const json &l : j.at("labels"))
        d.labels.push_back(label_from_json(l));
    return d;
}

// Cache-aware dictionary construction: looks for a matching label file in
// `dir` (skipped when empty), falls back to a fresh build and stores it.
inline SphericalDictionary build_spherical_dictionary_cached(const UpaShape &shape,
                                                             const CarrierGrid &grid, int g_y,
                                                             int g_z, double mu, double r_min,
                                                             const std::string &dir)
{
    if (dir.empty())
        return build_spherical_dictionary(shape, grid, g_y, g_z, mu, r_min);
    std::filesystem::create_directories(dir);
    const std::string path = dir + "/" + spherical_cache_key(shape, grid, g_y, g_z, mu, r_min) +
                             ".json";
    {
        std::ifstream probe(path);
        if (probe)
            return load_dictionary_labels(path);
    }
    SphericalDictionary d = build_spherical_dictionary(shape, grid, g_y, g_z, mu, r_min);
    save_dictionary_labels(path, d, g_y, g_z);
    return d;
}

// Benchmark result table. Values print as %.12g with LF endings so byte
// comparison works across runs.
struct CsvTable
{
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;
};

inline void write_csv(std::ostream &out, const CsvTable &t)
{
    for (std::size_t i = 0; i < t.header.size(); i++)
        out << (i ? "," : "") << t.header[i];
    out << "\n";
    char buf[64];
    for (const auto &row : t.rows)
    {
        if (row.size() != t.header.size())
            throw std::invalid_argument("csv: row width does not match header");
        for (std::size_t i = 0; i < row.size(); i++)
        {
            std::snprintf(buf, sizeof(buf), "%.12g", row[i]);
            out << (i ? "," : "") << buf;
        }
        out << "\n";
    }
}

inline void write_csv_file(const std::string &path, const CsvTable &t)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("csv: cannot write " + path);
    write_csv(out, t);
}

namespace detail
{

// Best-effort source revision for manifests; empty when not in a checkout.
inline std::string git_revision()
{
    std::FILE *p = ::popen("git describe --always --dirty 2>/dev/null", "r");
    if (!p)
        return {};
    char buf[128];
    std::string out;
    while (std::fgets(buf, sizeof(buf), p))
        out += buf;
    ::pclose(p);
    while (!out.empty() && (out.back() == '\n' || out.back() == '\r'))
        out.pop_back();
    return out;
}

} // namespace detail

inline json run_manifest(const SystemConfig &cfg, const std::string &experiment)
{
    json j;
    j["tool"] = "nfcs";
    j["version"] = version_string;
    j["experiment"] = experiment;
    j["seed"] = cfg.seed;
    j["config"] = config_to_json(cfg);
    const std::string rev = detail::git_revision();
    if (!rev.empty())
        j["revision"] = rev;
    return j;
}

inline void write_manifest_file(const std::string &path, const json &manifest)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("manifest: cannot write " + path);
    out << manifest.dump(2) << "\n";
}

} // namespace nfcs
