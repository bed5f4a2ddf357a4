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

#include "detkit.hpp"
#include "parallel.hpp"
#include "rng.hpp"
#include "types.hpp"

#include <Eigen/Dense>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <string>

#include "json.hpp"

namespace ncmac
{
    using CMatrix = Eigen::MatrixXcd;

    inline CMatrix sample_cgauss(int rows, int cols, RngStream &stream)
    {
        CMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j)
                m(i, j) = stream.cgauss();
        return m;
    }

    // Rows orthonormalized by Gram-Schmidt with one re-orthogonalization pass; the implied
    // triangular factor has positive real diagonal, which makes the map from Gaussians unique
    inline CMatrix sample_stiefel(int n, int tau, RngStream &stream)
    {
        if (n > tau)
            throw DimensionError("sample_stiefel: requires n <= tau");
        CMatrix v = sample_cgauss(n, tau, stream);
        for (int i = 0; i < n; ++i)
        {
            for (int pass = 0; pass < 2; ++pass)
                for (int j = 0; j < i; ++j)
                {
                    const std::complex<double> c = v.row(j).dot(v.row(i));
                    v.row(i) -= c * v.row(j);
                }
            v.row(i) /= v.row(i).norm();
        }
        return v;
    }

    inline CMatrix sample_mac_ustm_input(const ChannelConfig &cfg, double rho, RngStream &stream)
    {
        const int n = cfg.n();
        CMatrix x(n, cfg.tau);
        const double scale = std::sqrt(cfg.tau * rho / n);
        int row = 0;
        for (int a : cfg.per_user_antennas)
        {
            x.middleRows(row, a) = scale * sample_stiefel(a, cfg.tau, stream);
            row += a;
        }
        return x;
    }

    inline CMatrix sample_gaussian_input(const ChannelConfig &cfg, double rho, RngStream &stream)
    {
        return std::sqrt(rho / cfg.n()) * sample_cgauss(cfg.n(), cfg.tau, stream);
    }

    // Singular values of an n x tau input (n <= tau), sorted decreasing
    inline std::vector<double> singular_values(const CMatrix &x)
    {
        Eigen::SelfAdjointEigenSolver<CMatrix> es(x * x.adjoint(), Eigen::EigenvaluesOnly);
        std::vector<double> d(size_t(x.rows()));
        for (int i = 0; i < x.rows(); ++i)
            d[i] = std::sqrt(std::max(0.0, es.eigenvalues()(x.rows() - 1 - i)));
        return d;
    }

    inline OrderedSpectrum sample_gaussian_input_spectrum(const ChannelConfig &cfg, double rho, RngStream &stream)
    {
        return OrderedSpectrum(singular_values(sample_gaussian_input(cfg, rho, stream)));
    }

    // Mean and standard error of sample(i, stream) over n indexed streams. Partial sums are formed
    // over fixed blocks and merged in index order, so the result does not depend on the worker count.
    template <class Fn>
    McEstimate mc_estimate(long long n, uint64_t seed, uint64_t base, int workers, Fn &&sample)
    {
        if (n < 2)
            throw EstimatorError("Monte Carlo estimate needs at least 2 samples");
        constexpr long long B = 1024;
        const long long nb = (n + B - 1) / B;
        std::vector<double> bmean(nb), bm2(nb);
        std::vector<long long> bcount(nb);
        parallel_for(
            size_t(nb), workers,
            [&](size_t b)
            {
                double mean = 0.0, m2 = 0.0;
                long long c = 0;
                for (long long i = (long long)b * B; i < std::min(n, ((long long)b + 1) * B); ++i)
                {
                    RngStream s(seed, base ^ uint64_t(i));
                    const double v = sample(i, s);
                    ++c;
                    const double d = v - mean;
                    mean += d / c;
                    m2 += d * (v - mean);
                }
                bmean[b] = mean, bm2[b] = m2, bcount[b] = c;
            },
            1);
        double mean = 0.0, m2 = 0.0;
        long long c = 0;
        for (long long b = 0; b < nb; ++b)
        {
            const long long c2 = c + bcount[b];
            const double d = bmean[b] - mean;
            mean += d * double(bcount[b]) / double(c2);
            m2 += bm2[b] + d * d * double(c) * double(bcount[b]) / double(c2);
            c = c2;
        }
        return {mean, std::sqrt(m2 / double(n - 1) / double(n)), n};
    }

    // ------------------------------------------------------------------------------------------
    // Persistent cache of the Monte Carlo constants

    struct CacheEntry
    {
        McEstimate estimate;
        uint64_t master_seed = 0;
    };

    class ConstantCache
    {
      public:
        ConstantCache() = default;
        explicit ConstantCache(std::filesystem::path path) : path_(std::move(path)) { load(); }

        const std::filesystem::path &path() const { return path_; }

        std::optional<CacheEntry> get(const std::string &key) const
        {
            std::lock_guard<std::mutex> lock(mtx_);
            auto it = entries_.find(key);
            if (it == entries_.end())
                return std::nullopt;
            return it->second;
        }

        void put(const std::string &key, const CacheEntry &e)
        {
            std::lock_guard<std::mutex> lock(mtx_);
            entries_[key] = e;
            if (!path_.empty())
                save_locked();
        }

        std::map<std::string, CacheEntry> entries() const
        {
            std::lock_guard<std::mutex> lock(mtx_);
            return entries_;
        }

        void load()
        {
            std::lock_guard<std::mutex> lock(mtx_);
            entries_.clear();
            if (path_.empty() || !std::filesystem::exists(path_))
                return;
            std::ifstream in(path_);
            nlohmann::json j;
            try
            {
                in >> j;
            }
            catch (const std::exception &ex)
            {
                throw ConfigError("cache file " + path_.string() + ": " + ex.what());
            }
            for (auto &[k, v] : j.items())
                entries_[k] = {{v.at("mean").get<double>(), v.at("std_error").get<double>(), v.at("n_samples").get<long long>()},
                               v.at("master_seed").get<uint64_t>()};
        }

      private:
        void save_locked() const
        {
            nlohmann::json j = nlohmann::json::object();
            for (const auto &[k, e] : entries_)
                j[k] = {{"mean", e.estimate.mean},
                        {"std_error", e.estimate.std_error},
                        {"n_samples", e.estimate.n_samples},
                        {"master_seed", e.master_seed}};
            if (path_.has_parent_path())
                std::filesystem::create_directories(path_.parent_path());
            auto tmp = path_;
            tmp += ".tmp";
            {
                std::ofstream out(tmp);
                if (!out)
                    throw std::runtime_error("cannot write cache file " + tmp.string());
                out << j.dump(2) << "\n";
            }
            std::filesystem::rename(tmp, path_);
        }

        std::filesystem::path path_;
        std::map<std::string, CacheEntry> entries_;
        mutable std::mutex mtx_;
    };

    inline std::string format_key_real(double x)
    {
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", x);
        return buf;
    }

    namespace detail
    {
        template <class Fn>
        McEstimate cached(ConstantCache *cache, const std::string &key, const McConfig &mc, Fn &&compute)
        {
            if (cache)
                if (auto e = cache->get(key); e && e->master_seed == mc.master_seed && e->estimate.n_samples == mc.n_samples)
                    return e->estimate;
            McEstimate est = compute();
            if (cache)
                cache->put(key, {est, mc.master_seed});
            return est;
        }
    }

    // E[lambda_max(H H^H)], H r x cols standard complex Gaussian
    inline McEstimate estimate_zeta(int r, int cols, const McConfig &mc, ConstantCache *cache = nullptr)
    {
        if (r < 1 || cols < 0)
            throw DomainError("estimate_zeta: requires r >= 1 and cols >= 0");
        if (cols == 0)
            return {0.0, 0.0, mc.n_samples};
        const std::string key = "zeta:" + std::to_string(r) + ":" + std::to_string(cols);
        return detail::cached(cache, key, mc,
                              [&]
                              {
                                  const uint64_t base = stream_base({tag("zeta"), uint64_t(r), uint64_t(cols)});
                                  return mc_estimate(mc.n_samples, mc.master_seed, base, mc.workers,
                                                     [&](long long, RngStream &s)
                                                     {
                                                         CMatrix h = sample_cgauss(r, cols, s);
                                                         CMatrix g = r <= cols ? CMatrix(h * h.adjoint()) : CMatrix(h.adjoint() * h);
                                                         Eigen::SelfAdjointEigenSolver<CMatrix> es(g, Eigen::EigenvaluesOnly);
                                                         return es.eigenvalues().maxCoeff();
                                                     });
                              });
    }

    // P[sigma_min(A) > sigma_max(B)], A r x n with CN(0, tau rho / n) entries, B (r - l) x (tau - l) standard
    inline McEstimate estimate_order_constant(const ChannelConfig &cfg, double rho, const McConfig &mc,
                                              ConstantCache *cache = nullptr)
    {
        if (!(rho > 0.0))
            throw DomainError("estimate_order_constant: rho must be positive");
        const int r = cfg.rx, n = cfg.n(), l = cfg.ell(), tau = cfg.tau;
        if (r == l)
            return {1.0, 0.0, mc.n_samples};
        const std::string key = "oconst:" + std::to_string(r) + ":" + std::to_string(n) + ":" + std::to_string(tau) + ":" +
                                format_key_real(rho);
        return detail::cached(
            cache, key, mc,
            [&]
            {
                const uint64_t base = stream_base({tag("oconst"), uint64_t(r), uint64_t(n), uint64_t(tau), double_bits(rho)});
                const double sa = std::sqrt(tau * rho / n);
                return mc_estimate(mc.n_samples, mc.master_seed, base, mc.workers,
                                   [&](long long, RngStream &s)
                                   {
                                       CMatrix a = sa * sample_cgauss(r, n, s);
                                       CMatrix b = sample_cgauss(r - l, tau - l, s);
                                       Eigen::SelfAdjointEigenSolver<CMatrix> ea(a.adjoint() * a, Eigen::EigenvaluesOnly);
                                       CMatrix gb = (r - l) <= (tau - l) ? CMatrix(b * b.adjoint()) : CMatrix(b.adjoint() * b);
                                       Eigen::SelfAdjointEigenSolver<CMatrix> eb(gb, Eigen::EigenvaluesOnly);
                                       return ea.eigenvalues().minCoeff() > eb.eigenvalues().maxCoeff() ? 1.0 : 0.0;
                                   });
            });
    }
}
