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

// Command line front end. Subcommands:
//   dict build   construct the RIS-side spherical dictionary, save labels
//   trajectory   per-subcarrier beam drift of an uncompensated focus
//   run          a named Monte-Carlo experiment, CSV + manifest output
//   gain-curve   far-field mismatch gain over distance and RIS size
// A JSON config file provides the base parameters; individual flags
// override it. `--config` is picked up before flag parsing so that flags
// always win regardless of order.

#include <cstdlib>
#include <iostream>

#include <CLI11.hpp>

#include "nfcs/bench.hpp"

namespace
{

void add_config_flags(CLI::App &app, nfcs::SystemConfig &cfg)
{
    app.add_option("--ris-n-y", cfg.ris_n_y, "RIS elements along y");
    app.add_option("--ris-n-z", cfg.ris_n_z, "RIS elements along z");
    app.add_option("--user-n-y", cfg.user_n_y, "user elements along y");
    app.add_option("--user-n-z", cfg.user_n_z, "user elements along z");
    app.add_option("--bs-n-y", cfg.bs_n_y, "BS elements along y");
    app.add_option("--bs-n-z", cfg.bs_n_z, "BS elements along z");
    app.add_option("--f-c", cfg.f_c_hz, "carrier frequency [Hz]");
    app.add_option("--f-s", cfg.f_s_hz, "sampling bandwidth [Hz]");
    app.add_option("--subcarriers", cfg.n_subcarriers, "number of subcarriers");
    app.add_option("--patterns", cfg.n_ris_patterns, "RIS probing patterns (Q)");
    app.add_option("--pilot-symbols", cfg.n_pilot_symbols, "pilot vectors per pattern (N_X)");
    app.add_option("--pilot-power", cfg.pilot_power_dbm, "uplink pilot power [dBm]");
    app.add_option("--noise-power", cfg.noise_power_dbm, "noise power [dBm]");
    app.add_option("--paths", cfg.n_paths, "number of propagation paths");
    app.add_option("--range-min", cfg.user_range_min_m, "minimum user range [m]");
    app.add_option("--range-max", cfg.user_range_max_m, "maximum user range [m]");
    app.add_option("--bs-ris-range", cfg.bs_ris_range_m, "BS to RIS distance [m]");
    app.add_option("--bs-elev", cfg.bs_elev_deg, "RIS seen from BS, elevation [deg]");
    app.add_option("--bs-azim", cfg.bs_azim_deg, "RIS seen from BS, azimuth [deg]");
    app.add_option("--ris-elev", cfg.ris_elev_deg, "BS seen from RIS, elevation [deg]");
    app.add_option("--ris-azim", cfg.ris_azim_deg, "BS seen from RIS, azimuth [deg]");
    app.add_option("--los-a1", cfg.los_pathloss.a1, "LoS pathloss intercept [dB]");
    app.add_option("--los-a2", cfg.los_pathloss.a2, "LoS pathloss distance exponent");
    app.add_option("--los-shadow", cfg.los_pathloss.sigma_shadow, "LoS shadowing std [dB]");
    app.add_option("--nlos-a1", cfg.nlos_pathloss.a1, "NLoS pathloss intercept [dB]");
    app.add_option("--nlos-a2", cfg.nlos_pathloss.a2, "NLoS pathloss distance exponent");
    app.add_option("--nlos-shadow", cfg.nlos_pathloss.sigma_shadow, "NLoS shadowing std [dB]");
    app.add_option("--grid-ris-y", cfg.grid_ris_y, "RIS azimuth grid size (0 = derive)");
    app.add_option("--grid-ris-z", cfg.grid_ris_z, "RIS elevation grid size (0 = derive)");
    app.add_option("--grid-user-y", cfg.grid_user_y, "user azimuth grid size (0 = derive)");
    app.add_option("--grid-user-z", cfg.grid_user_z, "user elevation grid size (0 = derive)");
    app.add_option("--ring-coherence", cfg.ring_coherence, "target adjacent-ring coherence");
    app.add_option("--r-min", cfg.r_min_m, "closest dictionary range [m]");
    app.add_option("--step-elev", cfg.step_elev, "refinement step, RIS elevation");
    app.add_option("--step-azim", cfg.step_azim, "refinement step, RIS azimuth");
    app.add_option("--step-user-elev", cfg.step_user_elev, "refinement step, user elevation");
    app.add_option("--step-user-azim", cfg.step_user_azim, "refinement step, user azimuth");
    app.add_option("--step-inv-r", cfg.step_inv_r,
                   "refinement step, inverse range (fraction of the local ring step)");
    app.add_option("--trials", cfg.trials, "Monte-Carlo trials per sweep point");
    app.add_option("--seed", cfg.seed, "master seed");
}

void write_table(const std::string &path, const nfcs::CsvTable &t)
{
    if (path == "-")
        nfcs::write_csv(std::cout, t);
    else
        nfcs::write_csv_file(path, t);
}

} // namespace

int main(int argc, char **argv)
{
    nfcs::SystemConfig cfg;
    // Load --config before CLI11 binds defaults, so flags override the file.
    for (int i = 1; i + 1 < argc; i++)
        if (std::string(argv[i]) == "--config")
        {
            try
            {
                cfg = nfcs::load_config_file(argv[i + 1]);
            }
            catch (const std::exception &e)
            {
                std::cerr << "error: " << e.what() << "\n";
                return 1;
            }
        }

    CLI::App app{"near-field wideband channel estimation toolkit"};
    app.require_subcommand(1);
    std::string config_path;
    app.add_option("--config", config_path, "JSON config file (flags override it)");
    std::string cache_dir;
    app.add_option("--cache-dir", cache_dir,
                   "dictionary label cache directory (NFCS_CACHE_DIR)");
    add_config_flags(app, cfg);

    CLI::App *dict = app.add_subcommand("dict", "dictionary utilities");
    dict->fallthrough();
    CLI::App *dict_build = dict->add_subcommand("build", "build the RIS spherical dictionary");
    dict_build->fallthrough();
    std::string dict_out = "dictionary.json";
    dict_build->add_option("-o,--output", dict_out, "label file to write");

    CLI::App *traj = app.add_subcommand("trajectory", "per-subcarrier beam drift table");
    traj->fallthrough();
    double tr_theta = 45.0, tr_phi = 45.0, tr_range = 20.0;
    std::string traj_out = "-";
    traj->add_option("--theta", tr_theta, "desired elevation [deg]");
    traj->add_option("--phi", tr_phi, "desired azimuth [deg]");
    traj->add_option("--range", tr_range, "desired range [m]");
    traj->add_option("-o,--output", traj_out, "CSV file ('-' for stdout)");

    CLI::App *run = app.add_subcommand("run", "run a named experiment");
    run->fallthrough();
    std::string experiment;
    std::string out_dir = ".";
    std::vector<std::string> method_names;
    run->add_option("experiment", experiment,
                    "nmse-vs-patterns | nmse-vs-subcarriers | nmse-vs-power | angle-mse | "
                    "oracle-bound | complexity")
        ->required();
    run->add_option("--out-dir", out_dir, "directory for CSV and manifest output");
    run->add_option("--methods", method_names, "estimators to include")->delimiter(',');

    CLI::App *gain = app.add_subcommand("gain-curve", "far-field mismatch gain table");
    gain->fallthrough();
    std::vector<int> gain_sizes = {128, 256, 512};
    int gain_trials = 200;
    std::string gain_out = "-";
    gain->add_option("--sizes", gain_sizes, "RIS y sizes to evaluate")->delimiter(',');
    gain->add_option("--gain-trials", gain_trials, "path draws to average");
    gain->add_option("-o,--output", gain_out, "CSV file ('-' for stdout)");

    CLI11_PARSE(app, argc, argv);

    try
    {
        if (!cache_dir.empty())
            ::setenv("NFCS_CACHE_DIR", cache_dir.c_str(), 1);
        cfg = cfg.normalized();
        cfg.validate();

        if (dict_build->parsed())
        {
            const nfcs::SphericalDictionary d = nfcs::build_spherical_dictionary(
                cfg.ris_shape(), cfg.carriers(), cfg.grid_ris_y, cfg.grid_ris_z,
                cfg.ring_coherence, cfg.r_min_m);
            nfcs::save_dictionary_labels(dict_out, d, cfg.grid_ris_y, cfg.grid_ris_z);
            std::cout << "atoms: " << d.size() << "\n"
                      << "directions: " << std::size_t(cfg.grid_ris_y) * cfg.grid_ris_z << "\n"
                      << "written: " << dict_out << "\n";
        }
        else if (traj->parsed())
        {
            write_table(traj_out, nfcs::trajectory_table(cfg, tr_theta, tr_phi, tr_range));
        }
        else if (run->parsed())
        {
            std::vector<nfcs::Method> methods;
            for (const std::string &n : method_names)
                methods.push_back(nfcs::method_from_name(n));
            const nfcs::BenchResult r = nfcs::run_experiment(cfg, experiment, methods);
            nfcs::write_bench_result(out_dir, r);
            std::cout << "wrote " << out_dir << "/" << r.experiment
                      << "_{trials,summary}.csv and manifest\n";
        }
        else if (gain->parsed())
        {
            write_table(gain_out, nfcs::gain_curve_table(cfg, gain_sizes,
                                                         nfcs::detail::log_spaced(5, 100, 9),
                                                         gain_trials));
        }
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
