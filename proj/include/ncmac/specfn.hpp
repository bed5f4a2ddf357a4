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

#include <boost/math/special_functions/digamma.hpp>
#include <cmath>
#include <string>

namespace ncmac
{
    inline double log_gamma(double x)
    {
        if (!(x > 0.0))
            throw DomainError("log_gamma: argument must be positive, got " + std::to_string(x));
        return std::lgamma(x);
    }

    inline double digamma(double x)
    {
        if (!(x > 0.0))
            throw DomainError("digamma: argument must be positive, got " + std::to_string(x));
        return boost::math::digamma(x);
    }

    inline double log_beta(double a, double b)
    {
        if (!(a > 0.0) || !(b > 0.0))
            throw DomainError("log_beta: arguments must be positive");
        return std::lgamma(a) + std::lgamma(b) - std::lgamma(a + b);
    }

    // ln of gamma~(n) = Gamma(1) Gamma(2) ... Gamma(n)
    inline double log_gamma_product(int n)
    {
        if (n < 0)
            throw DomainError("log_gamma_product: n must be nonnegative");
        double s = 0.0;
        for (int i = 2; i <= n; ++i)
            s += std::lgamma(double(i));
        return s;
    }

    // Gamma~(x, n) = e^x - sum_{k<n} x^k / k!
    inline LogValue upper_exp_tail(double x, int n)
    {
        if (!(x >= 0.0) || n < 0)
            throw DomainError("upper_exp_tail: requires x >= 0 and n >= 0");
        if (n == 0)
            return LogValue::from_log(x);
        if (x == 0.0)
            return LogValue::zero();

        const double lx = std::log(x);
        if (double(n) > x)
        {
            // x^n/n! * (1 + x/(n+1) + x^2/((n+1)(n+2)) + ...)
            double s = 1.0, t = 1.0;
            for (int j = 1; j < 100000; ++j)
            {
                t *= x / double(n + j);
                s += t;
                if (t < s * 1e-17)
                    break;
            }
            return LogValue::from_log(n * lx - std::lgamma(n + 1.0) + std::log(s));
        }

        // e^x (1 - P) with P the Poisson(x) mass below n; P stays below ~0.6 here
        double p = 0.0;
        if (x < 700.0)
        {
            double t = 1.0, s = 1.0;
            for (int k = 1; k < n; ++k)
            {
                t *= x / double(k);
                s += t;
            }
            p = s * std::exp(-x);
        }
        else
        {
            for (int k = 0; k < n; ++k)
                p += std::exp(k * lx - x - std::lgamma(k + 1.0));
        }
        return LogValue::from_log(x + std::log1p(-p));
    }

    // Same quantity for an extended-precision type with unbounded exponent range
    template <class Real>
    Real upper_exp_tail_t(const Real &x, int n)
    {
        using std::exp;
        if (x < 0 || n < 0)
            throw DomainError("upper_exp_tail: requires x >= 0 and n >= 0");
        if (n == 0)
            return exp(x);
        if (x == 0)
            return Real(0);
        if (Real(n) > x)
        {
            Real head = 1;
            for (int k = 1; k <= n; ++k)
                head *= x / k;
            Real s = 1, t = 1;
            const Real eps = std::numeric_limits<Real>::epsilon();
            for (int j = 1; j < 100000; ++j)
            {
                t *= x / (n + j);
                s += t;
                if (t < s * eps)
                    break;
            }
            return head * s;
        }
        Real t = 1, s = 1;
        for (int k = 1; k < n; ++k)
        {
            t *= x / k;
            s += t;
        }
        return exp(x) - s;
    }
}
