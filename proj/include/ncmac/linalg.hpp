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

#include "logvalue.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ncmac
{
    // Dense row-major matrix of LogValues
    struct LogMatrix
    {
        int rows = 0, cols = 0;
        std::vector<LogValue> data;

        LogMatrix() = default;
        LogMatrix(int r, int c) : rows(r), cols(c), data(size_t(r) * size_t(c)) {}
        LogValue &operator()(int i, int j) { return data[size_t(i) * cols + j]; }
        const LogValue &operator()(int i, int j) const { return data[size_t(i) * cols + j]; }
    };

    struct LogDet
    {
        LogValue value;
        double digits_lost = 0.0; // log10 of Hadamard bound over |det| after scaling
        bool ill_conditioned() const { return digits_lost > 8.0; }
    };

    // Determinant of a matrix given as plain doubles (already scaled), partial pivoting
    // Returns sign and log|det|; a is destroyed
    inline std::pair<int, double> lu_logdet_inplace(double *a, int n)
    {
        int sign = 1;
        double logabs = 0.0;
        for (int c = 0; c < n; ++c)
        {
            int piv = c;
            double best = std::fabs(a[c * n + c]);
            for (int r = c + 1; r < n; ++r)
            {
                double v = std::fabs(a[r * n + c]);
                if (v > best)
                    best = v, piv = r;
            }
            if (best == 0.0)
                return {0, -std::numeric_limits<double>::infinity()};
            if (piv != c)
            {
                for (int k = 0; k < n; ++k)
                    std::swap(a[c * n + k], a[piv * n + k]);
                sign = -sign;
            }
            const double p = a[c * n + c];
            if (p < 0.0)
                sign = -sign;
            logabs += std::log(std::fabs(p));
            for (int r = c + 1; r < n; ++r)
            {
                const double f = a[r * n + c] / p;
                if (f == 0.0)
                    continue;
                for (int k = c + 1; k < n; ++k)
                    a[r * n + k] -= f * a[c * n + k];
            }
        }
        return {sign, logabs};
    }

    // Row/column scalings from an optimal assignment on log-magnitudes (Hungarian method).
    // w holds log|m_ij| (row-major, -inf for zeros). On return w_ij + u_i + v_j <= 0 with
    // equality on the assignment; returns false if every assignment hits a zero entry.
    inline bool assignment_scaling(const double *w, int n, double *u_out, double *v_out)
    {
        constexpr int NMAX = 64;
        if (n > NMAX)
            throw std::invalid_argument("assignment_scaling: dimension too large");
        double hi = -std::numeric_limits<double>::infinity(), lo = std::numeric_limits<double>::infinity();
        for (int k = 0; k < n * n; ++k)
            if (std::isfinite(w[k]))
                hi = std::max(hi, w[k]), lo = std::min(lo, w[k]);
        if (!std::isfinite(hi))
            return false;
        const double zero_cost = (hi - lo) * 4.0 + 1e6 - lo;
        auto cost = [&](int i, int j) { return std::isfinite(w[i * n + j]) ? -w[i * n + j] : zero_cost; };
        const double INF = std::numeric_limits<double>::infinity();
        double u[NMAX + 1] = {}, v[NMAX + 1] = {}, minv[NMAX + 1];
        int p[NMAX + 1] = {}, way[NMAX + 1] = {};
        bool used[NMAX + 1];
        for (int i = 1; i <= n; ++i)
        {
            p[0] = i;
            int j0 = 0;
            std::fill(minv, minv + n + 1, INF);
            std::fill(used, used + n + 1, false);
            do
            {
                used[j0] = true;
                const int i0 = p[j0];
                double delta = INF;
                int j1 = 0;
                for (int j = 1; j <= n; ++j)
                    if (!used[j])
                    {
                        const double cur = cost(i0 - 1, j - 1) - u[i0] - v[j];
                        if (cur < minv[j])
                            minv[j] = cur, way[j] = j0;
                        if (minv[j] < delta)
                            delta = minv[j], j1 = j;
                    }
                for (int j = 0; j <= n; ++j)
                    if (used[j])
                        u[p[j]] += delta, v[j] -= delta;
                    else
                        minv[j] -= delta;
                j0 = j1;
            } while (p[j0] != 0);
            do
            {
                const int j1 = way[j0];
                p[j0] = p[j1];
                j0 = j1;
            } while (j0);
        }
        for (int j = 1; j <= n; ++j)
            if (!std::isfinite(w[(p[j] - 1) * n + (j - 1)]))
                return false;
        for (int i = 0; i < n; ++i)
            u_out[i] = u[i + 1], v_out[i] = v[i + 1];
        return true;
    }

    // Determinant from log-magnitudes and signs (signs may be null for all-positive input).
    // Returns {value, digits lost relative to the Hadamard bound of the scaled matrix}.
    inline LogDet logdet_from_logs(const double *w, const int *signs, int n)
    {
        if (n == 0)
            return {LogValue::from_log(0.0), 0.0};
        std::vector<double> u(n), v(n), a(size_t(n) * n);
        if (!assignment_scaling(w, n, u.data(), v.data()))
            return {LogValue::zero(), std::numeric_limits<double>::infinity()};
        double hadamard = 0.0;
        for (int i = 0; i < n; ++i)
        {
            double norm2 = 0.0;
            for (int j = 0; j < n; ++j)
            {
                const int k = i * n + j;
                const int sg = signs ? signs[k] : 1;
                const double x = (sg == 0 || !std::isfinite(w[k])) ? 0.0 : sg * std::exp(std::min(0.0, w[k] + u[i] + v[j]));
                a[k] = x;
                norm2 += x * x;
            }
            hadamard += 0.5 * std::log(norm2);
        }
        auto [sgn, la] = lu_logdet_inplace(a.data(), n);
        if (sgn == 0)
            return {LogValue::zero(), std::numeric_limits<double>::infinity()};
        double shift = 0.0;
        for (int i = 0; i < n; ++i)
            shift -= u[i] + v[i];
        return {LogValue::from_log(la + shift, sgn), (hadamard - la) / std::log(10.0)};
    }

    // Elimination on a scaled copy so entries spanning hundreds of orders of magnitude stay finite
    inline LogDet signed_logdet(const LogMatrix &m)
    {
        const int n = m.rows;
        if (m.cols != n)
            throw std::invalid_argument("signed_logdet: matrix must be square");
        std::vector<double> w(size_t(n) * n);
        std::vector<int> sg(size_t(n) * n);
        for (size_t k = 0; k < w.size(); ++k)
        {
            sg[k] = m.data[k].sign;
            w[k] = sg[k] == 0 ? -std::numeric_limits<double>::infinity() : m.data[k].log_magnitude;
        }
        return logdet_from_logs(w.data(), sg.data(), n);
    }

    inline LogDet signed_logdet(const Eigen::MatrixXd &m)
    {
        LogMatrix lm(int(m.rows()), int(m.cols()));
        for (int i = 0; i < lm.rows; ++i)
            for (int j = 0; j < lm.cols; ++j)
                lm(i, j) = LogValue::from_double(m(i, j));
        return signed_logdet(lm);
    }

    // Plain Gaussian elimination for extended-precision scalar types
    template <class Real>
    Real lu_det(std::vector<Real> a, int n)
    {
        using std::abs;
        Real det = 1;
        for (int c = 0; c < n; ++c)
        {
            int piv = c;
            Real best = abs(a[c * n + c]);
            for (int r = c + 1; r < n; ++r)
                if (abs(a[r * n + c]) > best)
                    best = abs(a[r * n + c]), piv = r;
            if (best == 0)
                return Real(0);
            if (piv != c)
            {
                for (int k = 0; k < n; ++k)
                    std::swap(a[c * n + k], a[piv * n + k]);
                det = -det;
            }
            const Real p = a[c * n + c];
            det *= p;
            for (int r = c + 1; r < n; ++r)
            {
                const Real f = a[r * n + c] / p;
                for (int k = c + 1; k < n; ++k)
                    a[r * n + k] -= f * a[c * n + k];
            }
        }
        return det;
    }
}
