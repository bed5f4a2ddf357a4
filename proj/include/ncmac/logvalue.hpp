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

#include <cmath>
#include <limits>
#include <vector>

namespace ncmac
{
    // sign * exp(log_magnitude); sign == 0 encodes an exact zero
    struct LogValue
    {
        double log_magnitude = -std::numeric_limits<double>::infinity();
        int sign = 0;

        static LogValue zero() { return {}; }
        static LogValue from_log(double log_mag, int sgn = 1) { return sgn == 0 ? LogValue{} : LogValue{log_mag, sgn}; }
        static LogValue from_double(double v)
        {
            if (v == 0.0)
                return {};
            return {std::log(std::fabs(v)), v > 0.0 ? 1 : -1};
        }

        double to_double() const { return sign == 0 ? 0.0 : sign * std::exp(log_magnitude); }
        bool is_zero() const { return sign == 0; }

        LogValue operator*(const LogValue &o) const
        {
            if (sign == 0 || o.sign == 0)
                return {};
            return {log_magnitude + o.log_magnitude, sign * o.sign};
        }
        LogValue operator/(const LogValue &o) const
        {
            if (o.sign == 0)
                return {std::numeric_limits<double>::infinity(), sign == 0 ? 1 : sign};
            if (sign == 0)
                return {};
            return {log_magnitude - o.log_magnitude, sign * o.sign};
        }
        LogValue pow(double k) const
        {
            if (sign == 0)
                return k == 0.0 ? LogValue{0.0, 1} : LogValue{};
            return {k * log_magnitude, sign < 0 && std::fmod(std::fabs(k), 2.0) == 1.0 ? -1 : 1};
        }
    };

    // Signed log-sum-exp of a sequence of LogValues
    inline LogValue log_sum_exp(const std::vector<LogValue> &v)
    {
        double mx = -std::numeric_limits<double>::infinity();
        for (const auto &x : v)
            if (x.sign != 0 && x.log_magnitude > mx)
                mx = x.log_magnitude;
        if (!std::isfinite(mx))
            return {};
        double acc = 0.0;
        for (const auto &x : v)
            if (x.sign != 0)
                acc += x.sign * std::exp(x.log_magnitude - mx);
        return LogValue::from_double(acc) * LogValue::from_log(mx);
    }

    inline LogValue operator+(const LogValue &a, const LogValue &b) { return log_sum_exp({a, b}); }
    inline LogValue operator-(const LogValue &a, const LogValue &b) { return log_sum_exp({a, {b.log_magnitude, -b.sign}}); }

    // Log of the mean of exp(x_i) for plain log-magnitudes
    inline double log_mean_exp(const std::vector<double> &x)
    {
        double mx = -std::numeric_limits<double>::infinity();
        for (double v : x)
            mx = v > mx ? v : mx;
        if (!std::isfinite(mx))
            return mx;
        double acc = 0.0;
        for (double v : x)
            acc += std::exp(v - mx);
        return mx + std::log(acc / double(x.size()));
    }
}
