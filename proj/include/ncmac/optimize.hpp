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

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <numeric>
#include <vector>

namespace ncmac
{
    struct NelderMeadOptions
    {
        double initial_step = 0.5;
        double ftol = 1e-11;  // relative spread of simplex values
        double xtol = 1e-8;   // simplex diameter
        int max_evals = 4000;
    };

    struct NelderMeadResult
    {
        std::vector<double> x;
        double f = -std::numeric_limits<double>::infinity();
        int evals = 0;
        bool converged = false;
    };

    // Maximizes f; infeasible points should return -inf
    inline NelderMeadResult nelder_mead_max(const std::function<double(const std::vector<double> &)> &f,
                                            std::vector<double> x0, const NelderMeadOptions &o = {})
    {
        const int n = int(x0.size());
        // adaptive coefficients for higher dimensions
        const double alpha = 1.0, beta = 1.0 + 2.0 / n, gamma = 0.75 - 0.5 / n, delta = 1.0 - 1.0 / n;
        std::vector<std::vector<double>> s(n + 1, x0);
        std::vector<double> fv(n + 1);
        int evals = 0;
        auto eval = [&](const std::vector<double> &x)
        {
            ++evals;
            const double v = f(x);
            return std::isnan(v) ? -std::numeric_limits<double>::infinity() : v;
        };
        for (int i = 0; i < n; ++i)
            s[i + 1][i] += o.initial_step;
        for (int i = 0; i <= n; ++i)
            fv[i] = eval(s[i]);

        std::vector<int> idx(n + 1);
        bool converged = false;
        while (evals < o.max_evals)
        {
            std::iota(idx.begin(), idx.end(), 0);
            std::sort(idx.begin(), idx.end(), [&](int a, int b) { return fv[a] > fv[b]; });
            const int best = idx[0], worst = idx[n], second = idx[n - 1];
            double diam = 0.0;
            for (int i = 1; i <= n; ++i)
                for (int k = 0; k < n; ++k)
                    diam = std::max(diam, std::fabs(s[idx[i]][k] - s[best][k]));
            if (std::isfinite(fv[worst]) && std::fabs(fv[best] - fv[worst]) <= o.ftol * (1.0 + std::fabs(fv[best])) &&
                diam <= o.xtol * 1e3)
            {
                converged = true;
                break;
            }
            if (diam <= o.xtol)
            {
                converged = true;
                break;
            }
            std::vector<double> c(n, 0.0);
            for (int i = 0; i <= n; ++i)
                if (i != worst)
                    for (int k = 0; k < n; ++k)
                        c[k] += s[i][k] / n;
            auto along = [&](double t)
            {
                std::vector<double> x(n);
                for (int k = 0; k < n; ++k)
                    x[k] = c[k] + t * (s[worst][k] - c[k]);
                return x;
            };
            auto xr = along(-alpha);
            const double fr = eval(xr);
            if (fr > fv[best])
            {
                auto xe = along(-alpha * beta);
                const double fe = eval(xe);
                if (fe > fr)
                    s[worst] = xe, fv[worst] = fe;
                else
                    s[worst] = xr, fv[worst] = fr;
                continue;
            }
            if (fr > fv[second])
            {
                s[worst] = xr, fv[worst] = fr;
                continue;
            }
            const bool outside = fr > fv[worst];
            auto xc = along(outside ? -alpha * gamma : gamma);
            const double fc = eval(xc);
            if (fc > (outside ? fr : fv[worst]))
            {
                s[worst] = xc, fv[worst] = fc;
                continue;
            }
            for (int i = 0; i <= n; ++i)
                if (i != best)
                {
                    for (int k = 0; k < n; ++k)
                        s[i][k] = s[best][k] + delta * (s[i][k] - s[best][k]);
                    fv[i] = eval(s[i]);
                }
        }
        const int b = int(std::max_element(fv.begin(), fv.end()) - fv.begin());
        return {s[b], fv[b], evals, converged};
    }

    struct GoldenResult
    {
        double x = 0.0, f = 0.0;
        int iterations = 0;
    };

    // Minimizes a unimodal f on [a, b]; stop(lo, hi, fbest) ends the search early
    inline GoldenResult golden_section_min(const std::function<double(double)> &f, double a, double b, int max_iter,
                                           const std::function<bool(double, double, double, double)> &stop)
    {
        const double g = (std::sqrt(5.0) - 1.0) / 2.0;
        double x1 = b - g * (b - a), x2 = a + g * (b - a);
        double f1 = f(x1), f2 = f(x2);
        int it = 0;
        for (; it < max_iter; ++it)
        {
            if (stop(a, b, f1, f2))
                break;
            if (f1 <= f2)
            {
                b = x2, x2 = x1, f2 = f1;
                x1 = b - g * (b - a);
                f1 = f(x1);
            }
            else
            {
                a = x1, x1 = x2, f1 = f2;
                x2 = a + g * (b - a);
                f2 = f(x2);
            }
        }
        return f1 <= f2 ? GoldenResult{x1, f1, it} : GoldenResult{x2, f2, it};
    }
}
