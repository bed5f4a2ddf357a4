// SPDX-License-Identifier: Apache-2.0
//
// ncmac: capacity bounds for noncoherent block-fading multiple-access channels
// Copyright (C) 2026 The ncmac authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// Command-line front end: bound sweeps over SNR with CSV / JSON / SVG output.
// Exit codes: 0 success, 2 some points failed, 1 configuration error.

#include "ncmac/sweep.hpp"

#include "CLI11.hpp"

#include <iostream>

int main(int argc, char **argv)
{
    using namespace ncmac;
    CLI::App app{"Finite-SNR sum-rate bounds for noncoherent Rayleigh block-fading multiple-access channels", "ncmac"};

    std::string config, snr, bounds, antennas, units, out_csv, out_json, out_svg, cache_dir;
    std::optional<int> tau, users, rx, threads;
    std::optional<uint64_t> seed;
    std::optional<long long> samples_outer, samples_inner;
    bool timing = false, quiet = false;

    app.add_option("--config", config, "JSON file with flat keys mirroring the flags");
    app.add_option("--snr-db", snr, "SNR points in dB: comma list or start:step:stop");
    app.add_option("--tau", tau, "coherence interval");
    app.add_option("--users", users, "number of users");
    app.add_option("--antennas", antennas, "antennas per user: one value for all users or a comma list");
    app.add_option("--rx", rx, "receive antennas");
    app.add_option("--bounds", bounds, "comma list of ub_general, ub_square, ub_csi, lb_ustm, lb_gauss, lb_2user");
    app.add_option("--seed", seed, "master seed");
    app.add_option("--units", units, "nats or bits");
    app.add_option("--out-csv", out_csv, "CSV output path");
    app.add_option("--out-json", out_json, "JSON output path");
    app.add_option("--out-svg", out_svg, "SVG plot path");
    app.add_option("--cache-dir", cache_dir, "directory for the Monte Carlo constant cache");
    app.add_option("--samples-outer", samples_outer, "outer Monte Carlo samples");
    app.add_option("--samples-inner", samples_inner, "inner Monte Carlo samples");
    app.add_option("--threads", threads, "worker threads (0: all cores)");
    app.add_flag("--timing", timing, "write measured runtimes instead of 0");
    app.add_flag("-q,--quiet", quiet, "no progress table on stdout");

    try
    {
        app.parse(argc, argv);
    }
    catch (const CLI::ParseError &e)
    {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    SweepSpec spec;
    std::vector<SweepRecord> results;
    try
    {
        if (!config.empty())
            spec = load_config(config, spec);
        if (users)
        {
            if (*users < 1)
                throw ConfigError("--users must be >= 1");
            spec.cfg.per_user_antennas.assign(size_t(*users), 1);
        }
        if (!antennas.empty())
        {
            auto a = parse_int_list(antennas, "--antennas");
            if (a.size() == 1)
                spec.cfg.per_user_antennas.assign(spec.cfg.per_user_antennas.size(), a[0]);
            else if (users && int(a.size()) != *users)
                throw ConfigError("--antennas list length differs from --users");
            else
                spec.cfg.per_user_antennas = a;
        }
        if (tau)
            spec.cfg.tau = *tau;
        if (rx)
            spec.cfg.rx = *rx;
        if (!snr.empty())
            spec.snr_db = parse_snr_list(snr);
        if (app.count("--bounds"))
            spec.bounds = parse_bound_list(bounds);
        if (seed)
            spec.seed = *seed;
        if (!units.empty())
            spec.units = units_from_string(units);
        if (threads)
            spec.threads = *threads;
        if (timing)
            spec.timing = true;
        if (samples_outer)
            spec.budgets.samples_outer = *samples_outer;
        if (samples_inner)
            spec.budgets.samples_inner = *samples_inner;
        for (auto [src, dst] : {std::pair{&out_csv, &spec.out_csv}, {&out_json, &spec.out_json}, {&out_svg, &spec.out_svg},
                                {&cache_dir, &spec.cache_dir}})
            if (!src->empty())
                *dst = *src;
        spec.validate();
        results = run_sweep(spec);
    }
    catch (const ConfigError &e)
    {
        std::cerr << "ncmac: configuration error: " << e.what() << "\n";
        return 1;
    }
    catch (const std::exception &e)
    {
        std::cerr << "ncmac: " << e.what() << "\n";
        return 1;
    }

    int failed = 0;
    for (const auto &r : results)
        if (!r.ok)
        {
            ++failed;
            std::cerr << "ncmac: " << to_string(r.est.kind) << " at " << r.snr_db << " dB failed: " << r.error << "\n";
        }

    try
    {
        if (!spec.out_csv.empty())
            emit_csv(results, spec.out_csv, spec.timing);
        if (!spec.out_json.empty())
            emit_json(results, spec.out_json, spec.timing);
        if (!spec.out_svg.empty() && failed < int(results.size()))
            emit_plot(results, spec.out_svg);
    }
    catch (const std::exception &e)
    {
        std::cerr << "ncmac: " << e.what() << "\n";
        return 1;
    }
    if (!quiet)
        std::cout << format_csv(results, spec.timing);
    return failed ? 2 : 0;
}
