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

#include "error.hpp"

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <string>
#include <vector>

namespace ncmac
{
    struct ChannelConfig
    {
        int tau = 1;                         // coherence interval
        std::vector<int> per_user_antennas;  // n_i, one entry per user
        int rx = 1;                          // receive antennas r

        static ChannelConfig single_antenna(int users, int rx, int tau)
        {
            return {tau, std::vector<int>(size_t(users), 1), rx};
        }

        int users() const { return int(per_user_antennas.size()); }
        int n() const { return std::accumulate(per_user_antennas.begin(), per_user_antennas.end(), 0); }
        int ell() const { return std::min(n(), rx); }
        int p() const { return std::max(n(), rx); }
        bool single_antenna_users() const
        {
            return std::all_of(per_user_antennas.begin(), per_user_antennas.end(), [](int a) { return a == 1; });
        }

        void validate() const
        {
            if (per_user_antennas.empty())
                throw ConfigError("channel: at least one user required");
            for (int a : per_user_antennas)
                if (a < 1)
                    throw ConfigError("channel: antenna counts must be >= 1");
            if (rx < 1)
                throw ConfigError("channel: receive antennas must be >= 1");
            if (tau < p())
                throw ConfigError("channel: coherence interval must be >= max(n, r)");
        }

        std::string antennas_string() const
        {
            std::string s;
            for (size_t i = 0; i < per_user_antennas.size(); ++i)
                s += (i ? ";" : "") + std::to_string(per_user_antennas[i]);
            return s;
        }

        bool operator==(const ChannelConfig &) const = default;
    };

    enum class BoundKind
    {
        ub_general,
        ub_square,
        ub_csi,
        lb_ustm,
        lb_gauss,
        lb_2user
    };

    inline const std::vector<BoundKind> &all_bound_kinds()
    {
        static const std::vector<BoundKind> k = {BoundKind::ub_general, BoundKind::ub_square, BoundKind::ub_csi,
                                                 BoundKind::lb_ustm,    BoundKind::lb_gauss,  BoundKind::lb_2user};
        return k;
    }

    inline std::string to_string(BoundKind k)
    {
        switch (k)
        {
        case BoundKind::ub_general: return "ub_general";
        case BoundKind::ub_square: return "ub_square";
        case BoundKind::ub_csi: return "ub_csi";
        case BoundKind::lb_ustm: return "lb_ustm";
        case BoundKind::lb_gauss: return "lb_gauss";
        case BoundKind::lb_2user: return "lb_2user";
        }
        return "?";
    }

    inline BoundKind bound_kind_from_string(const std::string &s)
    {
        for (auto k : all_bound_kinds())
            if (to_string(k) == s)
                return k;
        throw ConfigError("unknown bound kind '" + s + "'");
    }

    struct McEstimate
    {
        double mean = 0.0;
        double std_error = 0.0;
        long long n_samples = 0;
    };

    struct McConfig
    {
        long long n_samples = 1000000;
        uint64_t master_seed = 1;
        int workers = 0; // 0: hardware concurrency
    };

    struct BoundEstimate
    {
        double value = 0.0;      // nats per channel use
        double std_error = 0.0;
        BoundKind kind = BoundKind::ub_square;
        ChannelConfig cfg;
        double rho = 0.0;
        uint64_t seed = 0;
        long long n_samples = 0;
        double runtime_seconds = 0.0;
        bool per_channel_use = true; // value divided by tau
        std::string note;
    };

    inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
}
