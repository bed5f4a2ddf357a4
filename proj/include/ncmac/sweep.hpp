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

#pragma once

#include "capacity_lb.hpp"
#include "capacity_ub.hpp"
#include "parallel.hpp"
#include "randmat.hpp"

#include "json.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace ncmac
{
    enum class Units
    {
        nats,
        bits
    };

    inline std::string to_string(Units u) { return u == Units::bits ? "bits" : "nats"; }

    inline Units units_from_string(const std::string &s)
    {
        if (s == "nats")
            return Units::nats;
        if (s == "bits")
            return Units::bits;
        throw ConfigError("units must be 'nats' or 'bits', got '" + s + "'");
    }

    struct SweepBudgets
    {
        long long samples_outer = 20000;   // lower-bound outer draws; general upper bound final batch
        long long samples_inner = 1000;    // lower-bound inner pool; general upper bound search batch
        int quad_points = 16;
        long long csi_samples = 200000;
        long long constants_samples = 1000000;
        double saddle_tol = 1e-4;
    };

    struct SweepSpec
    {
        ChannelConfig cfg = ChannelConfig::single_antenna(4, 4, 10);
        std::vector<double> snr_db = {0, 10, 20, 30};
        std::vector<BoundKind> bounds = {BoundKind::ub_square, BoundKind::lb_ustm};
        SweepBudgets budgets;
        uint64_t seed = 1;
        Units units = Units::nats;
        int threads = 0;
        bool timing = false;
        std::string out_csv, out_json, out_svg, cache_dir;

        void validate() const
        {
            cfg.validate();
            if (snr_db.empty())
                throw ConfigError("snr_db: at least one value required");
            for (size_t i = 1; i < snr_db.size(); ++i)
                if (!(snr_db[i] > snr_db[i - 1]))
                    throw ConfigError("snr_db: values must be strictly increasing");
            for (double s : snr_db)
                if (!std::isfinite(s))
                    throw ConfigError("snr_db: values must be finite");
            if (bounds.empty())
                throw ConfigError("bounds: at least one bound kind required");
            for (size_t i = 0; i < bounds.size(); ++i)
                for (size_t j = 0; j < i; ++j)
                    if (bounds[i] == bounds[j])
                        throw ConfigError("bounds: '" + to_string(bounds[i]) + "' listed twice");
            for (BoundKind k : bounds)
            {
                if (k == BoundKind::ub_square && cfg.n() != cfg.rx)
                    throw ConfigError("ub_square requires total transmit antennas equal to rx");
                if (k == BoundKind::lb_2user && (cfg.users() != 2 || !cfg.single_antenna_users() || cfg.rx < 2))
                    throw ConfigError("lb_2user requires two single-antenna users and rx >= 2");
            }
            const auto &b = budgets;
            if (b.samples_outer < 2 || b.samples_inner < 1 || b.csi_samples < 2 || b.constants_samples < 2 ||
                b.quad_points < 2 || !(b.saddle_tol > 0.0))
                throw ConfigError("budgets: sample counts too small or tolerance not positive");
            if (threads < 0)
                throw ConfigError("threads must be >= 0");
        }
    };

    struct SweepRecord
    {
        BoundEstimate est; // value and std_error in the requested units
        double snr_db = 0.0;
        Units units = Units::nats;
        bool ok = true;
        std::string error;
    };

    // ------------------------------------------------------------------------------------------
    // config

    inline std::vector<double> parse_snr_list(const std::string &s)
    {
        std::vector<double> out;
        auto num = [&](const std::string &t)
        {
            size_t pos = 0;
            double v = 0.0;
            try
            {
                v = std::stod(t, &pos);
            }
            catch (const std::exception &)
            {
                throw ConfigError("snr_db: cannot parse '" + t + "'");
            }
            if (pos != t.size())
                throw ConfigError("snr_db: cannot parse '" + t + "'");
            return v;
        };
        if (s.find(':') != std::string::npos)
        {
            std::vector<std::string> parts;
            std::stringstream ss(s);
            for (std::string t; std::getline(ss, t, ':');)
                parts.push_back(t);
            if (parts.size() != 3)
                throw ConfigError("snr_db range must be start:step:stop");
            const double a = num(parts[0]), h = num(parts[1]), b = num(parts[2]);
            if (!(h > 0.0) || b < a)
                throw ConfigError("snr_db range needs a positive step and stop >= start");
            const long long cnt = std::llround(std::floor((b - a) / h + 1e-9));
            for (long long i = 0; i <= cnt; ++i)
                out.push_back(a + double(i) * h);
            return out;
        }
        std::stringstream ss(s);
        for (std::string t; std::getline(ss, t, ',');)
            out.push_back(num(t));
        return out;
    }

    inline std::vector<BoundKind> parse_bound_list(const std::string &s)
    {
        std::vector<BoundKind> out;
        std::stringstream ss(s);
        for (std::string t; std::getline(ss, t, ',');)
            if (!t.empty())
                out.push_back(bound_kind_from_string(t));
        return out;
    }

    inline std::vector<int> parse_int_list(const std::string &s, const std::string &what)
    {
        std::vector<int> out;
        std::stringstream ss(s);
        for (std::string t; std::getline(ss, t, ',');)
        {
            try
            {
                size_t pos = 0;
                out.push_back(std::stoi(t, &pos));
                if (pos != t.size())
                    throw ConfigError("");
            }
            catch (const std::exception &)
            {
                throw ConfigError(what + ": cannot parse '" + t + "'");
            }
        }
        return out;
    }

    // flat keys: tau, users, antennas, rx, snr_db, bounds, seed, units, threads, timing, out_csv, out_json,
    // out_svg, cache_dir, samples_outer, samples_inner, quad_points, csi_samples, constants_samples, saddle_tol
    inline void apply_config_json(SweepSpec &spec, const nlohmann::json &j)
    {
        if (!j.is_object())
            throw ConfigError("config: top level must be an object");
        static const std::vector<std::string> known = {
            "tau",     "users",    "antennas",  "rx",          "snr_db",        "bounds",        "seed",
            "units",   "threads",  "timing",    "out_csv",     "out_json",      "out_svg",       "cache_dir",
            "samples_outer", "samples_inner", "quad_points", "csi_samples", "constants_samples", "saddle_tol"};
        for (auto &[k, v] : j.items())
            if (std::find(known.begin(), known.end(), k) == known.end())
                throw ConfigError("config: unknown key '" + k + "'");
        try
        {
            int users = spec.cfg.users();
            if (j.contains("users"))
                users = j["users"].get<int>();
            if (j.contains("antennas"))
            {
                const auto &a = j["antennas"];
                spec.cfg.per_user_antennas = a.is_array() ? a.get<std::vector<int>>() : std::vector<int>(size_t(std::max(users, 0)), a.get<int>());
            }
            else if (j.contains("users"))
                spec.cfg.per_user_antennas.assign(size_t(std::max(users, 0)), 1);
            if (j.contains("users") && int(spec.cfg.per_user_antennas.size()) != users)
                throw ConfigError("config: antennas list length differs from users");
            if (j.contains("tau"))
                spec.cfg.tau = j["tau"].get<int>();
            if (j.contains("rx"))
                spec.cfg.rx = j["rx"].get<int>();
            if (j.contains("snr_db"))
                spec.snr_db = j["snr_db"].is_string() ? parse_snr_list(j["snr_db"].get<std::string>())
                                                      : j["snr_db"].get<std::vector<double>>();
            if (j.contains("bounds"))
            {
                spec.bounds.clear();
                if (j["bounds"].is_string())
                    spec.bounds = parse_bound_list(j["bounds"].get<std::string>());
                else
                    for (const auto &s : j["bounds"])
                        spec.bounds.push_back(bound_kind_from_string(s.get<std::string>()));
            }
            if (j.contains("seed"))
                spec.seed = j["seed"].get<uint64_t>();
            if (j.contains("units"))
                spec.units = units_from_string(j["units"].get<std::string>());
            if (j.contains("threads"))
                spec.threads = j["threads"].get<int>();
            if (j.contains("timing"))
                spec.timing = j["timing"].get<bool>();
            for (auto [key, dst] : {std::pair{"out_csv", &spec.out_csv}, {"out_json", &spec.out_json},
                                    {"out_svg", &spec.out_svg}, {"cache_dir", &spec.cache_dir}})
                if (j.contains(key))
                    *dst = j[key].get<std::string>();
            auto &b = spec.budgets;
            for (auto [key, dst] : {std::pair{"samples_outer", &b.samples_outer}, {"samples_inner", &b.samples_inner},
                                    {"csi_samples", &b.csi_samples}, {"constants_samples", &b.constants_samples}})
                if (j.contains(key))
                    *dst = j[key].get<long long>();
            if (j.contains("quad_points"))
                b.quad_points = j["quad_points"].get<int>();
            if (j.contains("saddle_tol"))
                b.saddle_tol = j["saddle_tol"].get<double>();
        }
        catch (const nlohmann::json::exception &ex)
        {
            throw ConfigError(std::string("config: ") + ex.what());
        }
    }

    inline SweepSpec load_config(const std::filesystem::path &path, SweepSpec spec = {})
    {
        std::ifstream in(path);
        if (!in)
            throw ConfigError("cannot open config file " + path.string());
        nlohmann::json j;
        try
        {
            in >> j;
        }
        catch (const std::exception &ex)
        {
            throw ConfigError("config file " + path.string() + ": " + ex.what());
        }
        apply_config_json(spec, j);
        return spec;
    }

    // ------------------------------------------------------------------------------------------
    // sweep

    namespace detail
    {
        inline BoundEstimate compute_point(const SweepSpec &spec, BoundKind kind, double rho, int workers,
                                           ConstantCache *cache)
        {
            const auto &b = spec.budgets;
            LbSampleBudget lb;
            lb.outer_samples = b.samples_outer;
            lb.inner_samples = b.samples_inner;
            lb.quad_points = b.quad_points;
            lb.seed = spec.seed;
            lb.workers = workers;
            SaddleConfig sc;
            sc.tol = b.saddle_tol;
            sc.inner_mc_samples = b.samples_inner;
            sc.final_mc_samples = b.samples_outer;
            sc.seed = spec.seed;
            sc.workers = workers;
            sc.constants_mc = {b.constants_samples, spec.seed, workers};
            sc.cache = cache;
            switch (kind)
            {
            case BoundKind::ub_general: return saddle_solve(spec.cfg, rho, SaddleMode::general, sc);
            case BoundKind::ub_square: return saddle_solve(spec.cfg, rho, SaddleMode::square, sc);
            case BoundKind::ub_csi: return perfect_csi_ub(spec.cfg, rho, {b.csi_samples, spec.seed, workers});
            case BoundKind::lb_ustm: return ustm_lb(spec.cfg, rho, lb);
            case BoundKind::lb_gauss: return gaussian_lb(spec.cfg, rho, lb);
            case BoundKind::lb_2user: return two_user_lb(spec.cfg, rho, lb);
            }
            throw ConfigError("unknown bound kind");
        }

        inline bool record_less(const SweepRecord &a, const SweepRecord &b)
        {
            if (a.est.kind != b.est.kind)
                return int(a.est.kind) < int(b.est.kind);
            return a.snr_db < b.snr_db;
        }
    }

    inline void sort_records(std::vector<SweepRecord> &r) { std::stable_sort(r.begin(), r.end(), detail::record_less); }

    inline std::vector<SweepRecord> run_sweep(const SweepSpec &spec)
    {
        spec.validate();
        std::unique_ptr<ConstantCache> cache;
        if (!spec.cache_dir.empty())
            cache = std::make_unique<ConstantCache>(std::filesystem::path(spec.cache_dir) / "constants.json");
        else
            cache = std::make_unique<ConstantCache>();

        std::vector<SweepRecord> out;
        for (BoundKind k : spec.bounds)
            for (double s : spec.snr_db)
            {
                SweepRecord r;
                r.est.kind = k;
                r.snr_db = s;
                r.units = spec.units;
                out.push_back(r);
            }

        // points in parallel when there are enough of them, otherwise parallelism inside each estimator
        const int threads = spec.threads > 0 ? spec.threads : default_workers();
        const bool outer = threads > 1 && out.size() >= size_t(threads);
        const int inner = outer ? 1 : threads;
        parallel_for(
            out.size(), outer ? threads : 1,
            [&](size_t i)
            {
                auto &r = out[i];
                const auto t0 = std::chrono::steady_clock::now();
                try
                {
                    r.est = detail::compute_point(spec, r.est.kind, db_to_linear(r.snr_db), inner, cache.get());
                }
                catch (const ConfigError &)
                {
                    throw;
                }
                catch (const std::exception &ex)
                {
                    const BoundKind k = r.est.kind;
                    r.est = {};
                    r.est.kind = k;
                    r.est.value = r.est.std_error = std::numeric_limits<double>::quiet_NaN();
                    r.ok = false;
                    r.error = ex.what();
                }
                r.est.cfg = spec.cfg;
                r.est.rho = db_to_linear(r.snr_db);
                r.est.seed = spec.seed;
                r.est.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
                if (spec.units == Units::bits)
                {
                    r.est.value /= std::numbers::ln2;
                    r.est.std_error /= std::numbers::ln2;
                }
            },
            1);
        sort_records(out);
        return out;
    }

    // ------------------------------------------------------------------------------------------
    // output

    inline std::string fmt12(double x)
    {
        if (std::isnan(x))
            return "nan";
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.12g", x);
        return buf;
    }

    inline const char *csv_header()
    {
        return "snr_db,bound_kind,value,std_error,units,tau,users,antennas,rx,seed,n_samples,runtime_s";
    }

    // runtime_s is written as 0 unless timing is requested, so that the file is reproducible
    inline std::string format_csv(std::vector<SweepRecord> results, bool timing = false)
    {
        if (results.empty())
            throw ConfigError("emit_csv: no results");
        sort_records(results);
        std::ostringstream o;
        o << csv_header() << "\n";
        for (const auto &r : results)
        {
            const auto &e = r.est;
            o << fmt12(r.snr_db) << "," << to_string(e.kind) << "," << fmt12(e.value) << "," << fmt12(e.std_error) << ","
              << to_string(r.units) << "," << e.cfg.tau << "," << e.cfg.users() << "," << e.cfg.antennas_string() << ","
              << e.cfg.rx << "," << e.seed << "," << e.n_samples << "," << (timing ? fmt12(e.runtime_seconds) : "0")
              << "\n";
        }
        return o.str();
    }

    inline void write_text(const std::filesystem::path &path, const std::string &text)
    {
        if (path.has_parent_path())
        {
            std::error_code ec;
            std::filesystem::create_directories(path.parent_path(), ec);
        }
        std::ofstream out(path, std::ios::binary);
        if (!out)
            throw std::runtime_error("cannot open " + path.string() + " for writing");
        out << text;
        if (!out)
            throw std::runtime_error("write failed for " + path.string());
    }

    inline void emit_csv(const std::vector<SweepRecord> &results, const std::filesystem::path &path, bool timing = false)
    {
        write_text(path, format_csv(results, timing));
    }

    struct CsvRow
    {
        double snr_db = 0.0;
        BoundKind kind = BoundKind::ub_square;
        double value = 0.0, std_error = 0.0;
        Units units = Units::nats;
        int tau = 0, users = 0;
        std::vector<int> antennas;
        int rx = 0;
        uint64_t seed = 0;
        long long n_samples = 0;
        double runtime_s = 0.0;
    };

    inline std::vector<CsvRow> parse_csv(const std::string &text)
    {
        std::istringstream in(text);
        std::string line;
        if (!std::getline(in, line) || line != csv_header())
            throw ConfigError("csv: unexpected header");
        std::vector<CsvRow> rows;
        while (std::getline(in, line))
        {
            if (line.empty())
                continue;
            std::vector<std::string> f;
            std::stringstream ss(line);
            for (std::string t; std::getline(ss, t, ',');)
                f.push_back(t);
            if (f.size() != 12)
                throw ConfigError("csv: expected 12 fields in '" + line + "'");
            try
            {
                CsvRow r;
                r.snr_db = std::stod(f[0]);
                r.kind = bound_kind_from_string(f[1]);
                r.value = std::stod(f[2]);
                r.std_error = std::stod(f[3]);
                r.units = units_from_string(f[4]);
                r.tau = std::stoi(f[5]);
                r.users = std::stoi(f[6]);
                std::replace(f[7].begin(), f[7].end(), ';', ',');
                r.antennas = parse_int_list(f[7], "antennas");
                r.rx = std::stoi(f[8]);
                r.seed = std::stoull(f[9]);
                r.n_samples = std::stoll(f[10]);
                r.runtime_s = std::stod(f[11]);
                rows.push_back(r);
            }
            catch (const ConfigError &)
            {
                throw;
            }
            catch (const std::exception &)
            {
                throw ConfigError("csv: cannot parse '" + line + "'");
            }
        }
        return rows;
    }

    inline nlohmann::json to_json(const std::vector<SweepRecord> &results, bool timing = false)
    {
        auto num = [](double x) { return std::isfinite(x) ? nlohmann::json(x) : nlohmann::json(nullptr); };
        nlohmann::json arr = nlohmann::json::array();
        auto sorted = results;
        sort_records(sorted);
        for (const auto &r : sorted)
        {
            const auto &e = r.est;
            nlohmann::json j = {{"snr_db", r.snr_db},
                                {"rho", e.rho},
                                {"bound_kind", to_string(e.kind)},
                                {"value", num(e.value)},
                                {"std_error", num(e.std_error)},
                                {"units", to_string(r.units)},
                                {"per_channel_use", e.per_channel_use},
                                {"tau", e.cfg.tau},
                                {"users", e.cfg.users()},
                                {"antennas", e.cfg.per_user_antennas},
                                {"rx", e.cfg.rx},
                                {"seed", e.seed},
                                {"n_samples", e.n_samples},
                                {"runtime_s", timing ? e.runtime_seconds : 0.0},
                                {"note", e.note},
                                {"ok", r.ok}};
            if (!r.ok)
                j["error"] = r.error;
            arr.push_back(j);
        }
        return arr;
    }

    inline void emit_json(const std::vector<SweepRecord> &results, const std::filesystem::path &path, bool timing = false)
    {
        write_text(path, to_json(results, timing).dump(2) + "\n");
    }

    // ------------------------------------------------------------------------------------------
    // plot

    struct PlotStyle
    {
        double width = 720, height = 480;
        double margin_left = 70, margin_right = 150, margin_top = 30, margin_bottom = 55;
        std::string title;
    };

    struct PlotRange
    {
        double x0, x1, y0, y1;
    };

    inline PlotRange plot_range(const std::vector<SweepRecord> &results)
    {
        double x0 = INFINITY, x1 = -INFINITY, y0 = INFINITY, y1 = -INFINITY;
        for (const auto &r : results)
        {
            if (!r.ok || !std::isfinite(r.est.value))
                continue;
            const double s = std::isfinite(r.est.std_error) ? r.est.std_error : 0.0;
            x0 = std::min(x0, r.snr_db);
            x1 = std::max(x1, r.snr_db);
            y0 = std::min(y0, r.est.value - s);
            y1 = std::max(y1, r.est.value + s);
        }
        if (!std::isfinite(x0))
            throw ConfigError("emit_plot: no finite values to plot");
        auto pad = [](double &a, double &b)
        {
            double w = b - a;
            if (w <= 0.0)
                w = std::max(1.0, std::fabs(a));
            a -= 0.05 * w;
            b += 0.05 * w;
        };
        pad(x0, x1);
        pad(y0, y1);
        return {x0, x1, y0, y1};
    }

    inline std::vector<double> nice_ticks(double a, double b, int target = 6)
    {
        const double raw = (b - a) / target;
        const double p = std::pow(10.0, std::floor(std::log10(raw)));
        double step = p;
        for (double f : {1.0, 2.0, 2.5, 5.0, 10.0})
            if (f * p >= raw)
            {
                step = f * p;
                break;
            }
        std::vector<double> t;
        for (double v = std::ceil(a / step) * step; v <= b + 1e-9 * step; v += step)
            t.push_back(std::fabs(v) < 1e-12 * step ? 0.0 : v);
        return t;
    }

    inline std::string format_svg(const std::vector<SweepRecord> &results, const PlotStyle &st = {})
    {
        if (results.empty())
            throw ConfigError("emit_plot: no results");
        const PlotRange pr = plot_range(results);
        const double pw = st.width - st.margin_left - st.margin_right, ph = st.height - st.margin_top - st.margin_bottom;
        auto X = [&](double x) { return st.margin_left + (x - pr.x0) / (pr.x1 - pr.x0) * pw; };
        auto Y = [&](double y) { return st.margin_top + (pr.y1 - y) / (pr.y1 - pr.y0) * ph; };
        auto f = [](double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.2f", v);
            return std::string(buf);
        };
        auto lbl = [](double v)
        {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%g", v);
            return std::string(buf);
        };
        static const char *colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b"};

        std::map<BoundKind, std::vector<const SweepRecord *>> curves;
        for (const auto &r : results)
            if (r.ok && std::isfinite(r.est.value))
                curves[r.est.kind].push_back(&r);
        const std::string units = to_string(results.front().units);

        std::ostringstream o;
        o << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
          << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << f(st.width) << "\" height=\"" << f(st.height)
          << "\" viewBox=\"0 0 " << f(st.width) << " " << f(st.height) << "\" font-family=\"sans-serif\" font-size=\"12\">\n"
          << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
        if (!st.title.empty())
            o << "<text x=\"" << f(st.margin_left + pw / 2) << "\" y=\"18\" text-anchor=\"middle\">" << st.title << "</text>\n";
        o << "<g stroke=\"black\" fill=\"none\">\n<rect x=\"" << f(st.margin_left) << "\" y=\"" << f(st.margin_top)
          << "\" width=\"" << f(pw) << "\" height=\"" << f(ph) << "\"/>\n</g>\n";
        o << "<g class=\"xticks\" text-anchor=\"middle\">\n";
        for (double t : nice_ticks(pr.x0, pr.x1))
            o << "<line x1=\"" << f(X(t)) << "\" y1=\"" << f(st.margin_top + ph) << "\" x2=\"" << f(X(t)) << "\" y2=\""
              << f(st.margin_top + ph + 5) << "\" stroke=\"black\"/><text x=\"" << f(X(t)) << "\" y=\""
              << f(st.margin_top + ph + 18) << "\">" << lbl(t) << "</text>\n";
        o << "</g>\n<g class=\"yticks\" text-anchor=\"end\">\n";
        for (double t : nice_ticks(pr.y0, pr.y1))
            o << "<line x1=\"" << f(st.margin_left - 5) << "\" y1=\"" << f(Y(t)) << "\" x2=\"" << f(st.margin_left)
              << "\" y2=\"" << f(Y(t)) << "\" stroke=\"black\"/><text x=\"" << f(st.margin_left - 8) << "\" y=\""
              << f(Y(t) + 4) << "\">" << lbl(t) << "</text>\n";
        o << "</g>\n";
        o << "<text x=\"" << f(st.margin_left + pw / 2) << "\" y=\"" << f(st.height - 12)
          << "\" text-anchor=\"middle\">SNR [dB]</text>\n";
        o << "<text transform=\"translate(18," << f(st.margin_top + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">Sum rate ["
          << units << " per channel use]</text>\n";

        int ci = 0;
        for (const auto &[kind, pts] : curves)
        {
            const char *c = colors[ci % 6];
            o << "<polyline class=\"" << to_string(kind) << "\" fill=\"none\" stroke=\"" << c << "\" stroke-width=\"1.5\" points=\"";
            for (size_t i = 0; i < pts.size(); ++i)
                o << (i ? " " : "") << f(X(pts[i]->snr_db)) << "," << f(Y(pts[i]->est.value));
            o << "\"/>\n";
            for (const auto *p : pts)
            {
                const double v = p->est.value, s = p->est.std_error;
                o << "<circle cx=\"" << f(X(p->snr_db)) << "\" cy=\"" << f(Y(v)) << "\" r=\"2.5\" fill=\"" << c << "\"/>\n";
                if (std::isfinite(s) && s > 0.005 * std::fabs(v))
                    o << "<line class=\"errorbar\" x1=\"" << f(X(p->snr_db)) << "\" y1=\"" << f(Y(v - s)) << "\" x2=\""
                      << f(X(p->snr_db)) << "\" y2=\"" << f(Y(v + s)) << "\" stroke=\"" << c << "\"/>\n";
            }
            const double ly = st.margin_top + 12 + 18 * ci, lx = st.margin_left + pw + 12;
            o << "<g class=\"legend\"><line x1=\"" << f(lx) << "\" y1=\"" << f(ly) << "\" x2=\"" << f(lx + 24) << "\" y2=\""
              << f(ly) << "\" stroke=\"" << c << "\" stroke-width=\"1.5\"/><text x=\"" << f(lx + 30) << "\" y=\"" << f(ly + 4)
              << "\">" << to_string(kind) << "</text></g>\n";
            ++ci;
        }
        o << "</svg>\n";
        return o.str();
    }

    inline void emit_plot(const std::vector<SweepRecord> &results, const std::filesystem::path &path, const PlotStyle &st = {})
    {
        write_text(path, format_svg(results, st));
    }
}
