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
#include "logvalue.hpp"

#include <cmath>
#include <functional>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <vector>

namespace ncmac
{
    struct GaussRule
    {
        std::vector<double> x, w; // on [-1, 1]
    };

    // Legendre nodes by Newton iteration on P_n
    inline const GaussRule &gauss_legendre(int n)
    {
        static std::mutex mtx;
        static std::map<int, std::unique_ptr<GaussRule>> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto &slot = cache[n];
        if (slot)
            return *slot;
        auto rule = std::make_unique<GaussRule>();
        rule->x.resize(n);
        rule->w.resize(n);
        for (int i = 0; i < (n + 1) / 2; ++i)
        {
            double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5)), pp = 0.0;
            for (int it = 0; it < 100; ++it)
            {
                double p1 = 1.0, p2 = 0.0;
                for (int j = 1; j <= n; ++j)
                {
                    double p3 = p2;
                    p2 = p1;
                    p1 = ((2.0 * j - 1.0) * z * p2 - (j - 1.0) * p3) / j;
                }
                pp = n * (z * p1 - p2) / (z * z - 1.0);
                double z1 = z;
                z = z1 - p1 / pp;
                if (std::fabs(z - z1) < 1e-16)
                    break;
            }
            rule->x[i] = -z;
            rule->x[n - 1 - i] = z;
            rule->w[i] = rule->w[n - 1 - i] = 2.0 / ((1.0 - z * z) * pp * pp);
        }
        slot = std::move(rule);
        return *slot;
    }

    struct QuadOptions
    {
        int base_points = 16;
        double rel_tol = 1e-10;
        double abs_tol = 1e-14;
        int max_depth = 30;
    };

    namespace detail
    {
        inline double gl_panel(const std::function<double(double)> &f, double a, double b, const GaussRule &r)
        {
            const double h = 0.5 * (b - a), c = 0.5 * (a + b);
            double s = 0.0;
            for (size_t i = 0; i < r.x.size(); ++i)
                s += r.w[i] * f(c + h * r.x[i]);
            return s * h;
        }

        inline double adapt(const std::function<double(double)> &f, double a, double b, double whole,
                            double tol, int depth, const QuadOptions &o, const GaussRule &r)
        {
            const double m = 0.5 * (a + b);
            const double left = gl_panel(f, a, m, r), right = gl_panel(f, m, b, r);
            if (std::fabs(left + right - whole) <= tol)
                return left + right;
            if (depth >= o.max_depth)
                throw QuadratureError("adaptive quadrature did not converge on [" + std::to_string(a) + ", " +
                                      std::to_string(b) + "]");
            return adapt(f, a, m, left, tol, depth + 1, o, r) + adapt(f, m, b, right, tol, depth + 1, o, r);
        }

        inline LogValue gl_panel_log(const std::function<double(double)> &logf, double a, double b, const GaussRule &r)
        {
            const double h = 0.5 * (b - a), c = 0.5 * (a + b);
            std::vector<LogValue> t(r.x.size());
            for (size_t i = 0; i < r.x.size(); ++i)
                t[i] = LogValue::from_log(std::log(r.w[i] * h) + logf(c + h * r.x[i]));
            return log_sum_exp(t);
        }

        inline LogValue adapt_log(const std::function<double(double)> &logf, double a, double b, LogValue whole,
                                  double log_scale, int depth, const QuadOptions &o, const GaussRule &r)
        {
            const double m = 0.5 * (a + b);
            const LogValue left = gl_panel_log(logf, a, m, r), right = gl_panel_log(logf, m, b, r);
            const LogValue both = left + right;
            const LogValue diff = both - whole;
            if (diff.is_zero() || diff.log_magnitude - log_scale <= std::log(o.rel_tol))
                return both;
            if (depth >= o.max_depth)
                throw QuadratureError("adaptive log-domain quadrature did not converge");
            return adapt_log(logf, a, m, left, log_scale, depth + 1, o, r) +
                   adapt_log(logf, m, b, right, log_scale, depth + 1, o, r);
        }
    }

    inline double integrate(const std::function<double(double)> &f, double a, double b, const QuadOptions &o = {})
    {
        if (a == b)
            return 0.0;
        const auto &r = gauss_legendre(o.base_points);
        const double whole = detail::gl_panel(f, a, b, r);
        const double coarse = detail::gl_panel(f, a, 0.5 * (a + b), r) + detail::gl_panel(f, 0.5 * (a + b), b, r);
        const double tol = std::max(o.abs_tol, o.rel_tol * std::fabs(coarse));
        return detail::adapt(f, a, b, whole, tol, 0, o, r);
    }

    // Integral of exp(logf) over [a, b], returned in log form
    inline LogValue integrate_log(const std::function<double(double)> &logf, double a, double b, const QuadOptions &o = {})
    {
        const auto &r = gauss_legendre(o.base_points);
        const LogValue whole = detail::gl_panel_log(logf, a, b, r);
        if (whole.is_zero())
            return whole;
        return detail::adapt_log(logf, a, b, whole, whole.log_magnitude, 0, o, r);
    }
}
