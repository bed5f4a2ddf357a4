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
#include "linalg.hpp"
#include "logvalue.hpp"
#include "multiprecision.hpp"
#include "quadrature.hpp"
#include "specfn.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <array>
#include <boost/math/constants/constants.hpp>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <memory>
#include <mutex>
#include <tuple>
#include <vector>

namespace ncmac
{
    // Strictly decreasing positive values
    class OrderedSpectrum
    {
      public:
        OrderedSpectrum() = default;
        explicit OrderedSpectrum(std::vector<double> v) : v_(std::move(v))
        {
            for (size_t i = 0; i < v_.size(); ++i)
            {
                if (!(v_[i] > 0.0) || !std::isfinite(v_[i]))
                    throw DomainError("OrderedSpectrum: entries must be positive and finite");
                if (i + 1 < v_.size())
                {
                    if (v_[i] - v_[i + 1] <= 4.0 * std::numeric_limits<double>::epsilon() * v_[i])
                        throw DegenerateSpectrumError("OrderedSpectrum: entries must be strictly decreasing");
                }
            }
        }
        static OrderedSpectrum from_unsorted(std::vector<double> v)
        {
            std::sort(v.begin(), v.end(), std::greater<double>());
            return OrderedSpectrum(std::move(v));
        }

        const std::vector<double> &values() const { return v_; }
        size_t size() const { return v_.size(); }
        double operator[](size_t i) const { return v_[i]; }

      private:
        std::vector<double> v_;
    };

    inline LogValue vandermonde(const OrderedSpectrum &a)
    {
        double s = 0.0;
        const auto &v = a.values();
        for (size_t i = 0; i < v.size(); ++i)
            for (size_t j = i + 1; j < v.size(); ++j)
                s += std::log(v[i] - v[j]);
        return LogValue::from_log(s);
    }

    inline LogValue kappa(const OrderedSpectrum &a, int k)
    {
        if (k < 0)
            throw DomainError("kappa: k must be nonnegative");
        double s = 0.0;
        for (double x : a.values())
            s += std::log(x);
        return vandermonde(a) * LogValue::from_log(k * s);
    }

    namespace detail
    {
        inline const std::array<double, 1025> &log_factorials()
        {
            static const std::array<double, 1025> t = []
            {
                std::array<double, 1025> r{};
                for (int i = 1; i < 1025; ++i)
                    r[i] = r[i - 1] + std::log(double(i));
                return r;
            }();
            return t;
        }
    }

    // ln Gamma~(x, n) for x > 0 with ln x supplied; hot path of the lower-bound estimators
    inline double log_upper_exp_tail(double x, double lx, int n)
    {
        if (n == 0)
            return x;
        const auto &lf = detail::log_factorials();
        if (double(n) > x)
        {
            double s = 1.0, t = 1.0;
            for (int j = 1; j < 100000; ++j)
            {
                t *= x / double(n + j);
                s += t;
                if (t < s * 1e-17)
                    break;
            }
            return n * lx - (n < 1025 ? lf[n] : std::lgamma(n + 1.0)) + std::log(s);
        }
        // bound on e^{-x} sum_{k<n} x^k/k!
        const double lbound = (n - 1) * lx - x - (n - 1 < 1025 ? lf[n - 1] : std::lgamma(double(n))) + std::log(double(n));
        if (lbound < -40.0)
            return x;
        if (x < 700.0)
        {
            double t = 1.0, s = 1.0;
            for (int k = 1; k < n; ++k)
            {
                t *= x / double(k);
                s += t;
            }
            return x + std::log1p(-s * std::exp(-x));
        }
        double p = 0.0;
        for (int k = 0; k < n; ++k)
            p += std::exp(k * lx - x - (k < 1025 ? lf[k] : std::lgamma(k + 1.0)));
        return x + std::log1p(-p);
    }

    // The p x p matrix M(A, B) with Gamma~ entries, in log form
    inline LogMatrix build_M(const OrderedSpectrum &a, const OrderedSpectrum &b, int tau)
    {
        const int r = int(a.size()), n = int(b.size()), p = std::max(r, n);
        if (tau < p)
            throw DimensionError("build_M: tau must be at least max(n, r)");
        LogMatrix m(p, p);
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
            {
                if (i < r && j < n)
                    m(i, j) = upper_exp_tail(a[i] * b[j], tau - p);
                else if (i >= r)
                    m(i, j) = LogValue::from_log((tau - i - 1) * std::log(b[j]));
                else
                    m(i, j) = LogValue::from_log((tau - j - 1) * std::log(a[i]));
            }
        return m;
    }

    // log det M(A, B) from raw arrays with precomputed logs; entries are positive by construction
    inline LogValue logdet_M(const double *a, const double *la, int r, const double *b, const double *lb, int n, int tau)
    {
        const int p = std::max(r, n);
        constexpr int PMAX = 16;
        if (p > PMAX)
        {
            LogMatrix m(p, p);
            for (int i = 0; i < p; ++i)
                for (int j = 0; j < p; ++j)
                {
                    double l = (i < r && j < n) ? log_upper_exp_tail(a[i] * b[j], la[i] + lb[j], tau - p)
                               : (i >= r)       ? (tau - i - 1) * lb[j]
                                                : (tau - j - 1) * la[i];
                    m(i, j) = LogValue::from_log(l);
                }
            return signed_logdet(m).value;
        }
        double L[PMAX * PMAX];
        for (int i = 0; i < p; ++i)
            for (int j = 0; j < p; ++j)
                L[i * p + j] = (i < r && j < n) ? log_upper_exp_tail(a[i] * b[j], la[i] + lb[j], tau - p)
                               : (i >= r)       ? (tau - i - 1) * lb[j]
                                                : (tau - j - 1) * la[i];
        return logdet_from_logs(L, nullptr, p).value;
    }

    // ---------------------------------------------------------------------------------------------
    // Closed form for E[ln det(X L X^H)], X s x t Gaussian, L = diag(l_1..l_s, 1..1)

    template <class Real>
    struct QuadLogdetTable
    {
        int s = 0, t = 0, q = 0;
        std::vector<Real> W0, W1; // S^{-1} T, q x s row-major; W1 holds the special column variant
        std::vector<Real> psi_top; // psi(s - k + 1), k = 1..s
    };

    namespace detail
    {
        template <class Real>
        Real psi_int(int n)
        {
            Real h = 0;
            for (int k = 1; k < n; ++k)
                h += Real(1) / k;
            return h - boost::math::constants::euler<Real>();
        }

        template <class Real>
        Real inv_beta_int(int a, int b)
        {
            // (a + b - 1)! / ((a - 1)! (b - 1)!)
            Real v = 1;
            for (int k = 1; k <= b - 1; ++k)
                v = v * (a - 1 + k) / k;
            return v * (a + b - 1);
        }

        template <class Real>
        std::shared_ptr<const QuadLogdetTable<Real>> make_quad_logdet_table(int s, int t)
        {
            auto tb = std::make_shared<QuadLogdetTable<Real>>();
            const int q = t - s;
            tb->s = s, tb->t = t, tb->q = q;
            std::vector<Real> S(size_t(q) * q, Real(0)), T0(size_t(q) * s), T1(size_t(q) * s);
            for (int i = 1; i <= q; ++i)
            {
                for (int j = 1; j <= i; ++j)
                {
                    Real sg = ((i - j) % 2) ? Real(-1) : Real(1);
                    S[(i - 1) * q + (j - 1)] = i < q ? sg * inv_beta_int<Real>(i - j + 1, q - i) : sg;
                }
                for (int j = 1; j <= s; ++j)
                {
                    if (i < q)
                    {
                        Real ib = inv_beta_int<Real>(s - j + 1, q - i);
                        T0[(i - 1) * s + (j - 1)] = ib;
                        T1[(i - 1) * s + (j - 1)] = psi_int<Real>(t - i - j + 1) * ib;
                    }
                    else
                    {
                        T0[(i - 1) * s + (j - 1)] = 1;
                        T1[(i - 1) * s + (j - 1)] = psi_int<Real>(s - j + 1);
                    }
                }
            }
            auto fsub = [&](const std::vector<Real> &T)
            {
                std::vector<Real> W(size_t(q) * s);
                for (int c = 0; c < s; ++c)
                    for (int i = 0; i < q; ++i)
                    {
                        Real acc = T[i * s + c];
                        for (int j = 0; j < i; ++j)
                            acc -= S[i * q + j] * W[j * s + c];
                        W[i * s + c] = acc / S[i * q + i];
                    }
                return W;
            };
            tb->W0 = fsub(T0);
            tb->W1 = fsub(T1);
            tb->psi_top.resize(s);
            for (int k = 1; k <= s; ++k)
                tb->psi_top[k - 1] = psi_int<Real>(s - k + 1);
            return tb;
        }
    }

    template <class Real>
    std::shared_ptr<const QuadLogdetTable<Real>> quad_logdet_table(int s, int t)
    {
        static std::mutex mtx;
        static std::map<std::pair<int, int>, std::shared_ptr<const QuadLogdetTable<Real>>> cache;
        std::lock_guard<std::mutex> lock(mtx);
        auto &slot = cache[{s, t}];
        if (!slot)
            slot = detail::make_quad_logdet_table<Real>(s, t);
        return slot;
    }

    namespace detail
    {
        // B0 = P0 - Q W0 and B1 = P1 - Q W1; R_k is B0 with column k taken from B1
        template <class Real>
        void quad_logdet_blocks(const std::vector<Real> &a, const QuadLogdetTable<Real> &tb, std::vector<Real> &B0,
                           std::vector<Real> &B1)
        {
            using std::log;
            const int s = tb.s, q = tb.q;
            B0.assign(size_t(s) * s, Real(0));
            B1.assign(size_t(s) * s, Real(0));
            std::vector<Real> Qrow(q);
            for (int i = 0; i < s; ++i)
            {
                const Real la = log(a[i]);
                // (-a)^{j-q}, j = 1..q
                Real ninv = Real(-1) / a[i];
                Qrow[q - 1] = 1;
                for (int j = q - 2; j >= 0; --j)
                    Qrow[j] = Qrow[j + 1] * ninv;
                Real pw = 1;
                std::vector<Real> powers(s + 1);
                for (int e = 0; e <= s; ++e)
                {
                    powers[e] = pw;
                    pw *= a[i];
                }
                for (int j = 0; j < s; ++j)
                {
                    Real p0 = powers[s - j];
                    Real p1 = p0 * (la + tb.psi_top[j]);
                    Real q0 = 0, q1 = 0;
                    for (int c = 0; c < q; ++c)
                    {
                        q0 += Qrow[c] * tb.W0[c * s + j];
                        q1 += Qrow[c] * tb.W1[c * s + j];
                    }
                    B0[i * s + j] = p0 - q0;
                    B1[i * s + j] = p1 - q1;
                }
            }
        }

        template <class Real>
        Real quad_logdet_closed(const std::vector<Real> &x, int t)
        {
            const int s = int(x.size()), q = t - s;
            auto tb = quad_logdet_table<Real>(s, t);
            std::vector<Real> a(s);
            for (int i = 0; i < s; ++i)
                a[i] = Real(1) + x[i];
            std::vector<Real> B0, B1;
            quad_logdet_blocks(a, *tb, B0, B1);
            Real sum = 0;
            std::vector<Real> Rk(size_t(s) * s);
            for (int k = 0; k < s; ++k)
            {
                Rk = B0;
                for (int i = 0; i < s; ++i)
                    Rk[i * s + k] = B1[i * s + k];
                sum += lu_det(Rk, s);
            }
            Real pref = 1;
            for (int i = 0; i < s; ++i)
            {
                for (int e = 0; e < q - 1; ++e)
                    pref *= a[i];
                for (int e = 0; e < q; ++e)
                    pref /= x[i];
                for (int j = i + 1; j < s; ++j)
                    pref /= (x[i] - x[j]);
            }
            return pref * sum;
        }

        // Decimal digits needed for the closed form at excesses x (strictly decreasing, > 0)
        inline double quad_logdet_digits(const std::vector<double> &x, int t)
        {
            const int s = int(x.size()), q = t - s;
            double L = 0.0;
            for (int i = 0; i < s; ++i)
            {
                L += q * std::log10((1.0 + x[i]) / x[i]);
                for (int j = i + 1; j < s; ++j)
                    L += std::log10((1.0 + x[i]) / (x[i] - x[j]));
            }
            return L + 25.0;
        }
    }

    // Closed form in terms of the excesses x_i = l_i - 1 (strictly decreasing, positive)
    inline double exp_logdet_gauss_quadratic_excess(const std::vector<double> &x, int m_ambient)
    {
        const int s = int(x.size());
        if (s == 0)
            throw DimensionError("exp_logdet_gauss_quadratic: empty spectrum");
        if (m_ambient <= s)
            throw DimensionError("exp_logdet_gauss_quadratic: ambient dimension must exceed spectrum length");
        for (int i = 0; i < s; ++i)
        {
            if (!(x[i] > 0.0))
                throw DomainError("exp_logdet_gauss_quadratic: eigenvalues must exceed 1");
            if (i + 1 < s && !(x[i] > x[i + 1]))
                throw DegenerateSpectrumError("exp_logdet_gauss_quadratic: eigenvalues must be distinct and ordered");
        }
        return with_precision(detail::quad_logdet_digits(x, m_ambient),
                              [&]<class R>()
                              {
                                  std::vector<R> xr(x.begin(), x.end());
                                  return static_cast<double>(detail::quad_logdet_closed<R>(xr, m_ambient));
                              });
    }

    inline double exp_logdet_gauss_quadratic(const OrderedSpectrum &l0, int m_ambient)
    {
        std::vector<double> x;
        for (double l : l0.values())
        {
            if (!(l > 1.0))
                throw DomainError("exp_logdet_gauss_quadratic: eigenvalues must exceed 1");
            x.push_back(l - 1.0);
        }
        return exp_logdet_gauss_quadratic_excess(x, m_ambient);
    }

    // R_k (1-based k) evaluated in extended precision and rounded
    inline Eigen::MatrixXd build_Rk(const OrderedSpectrum &a, int k, int tau_total)
    {
        const int s = int(a.size());
        if (tau_total <= s)
            throw DimensionError("build_Rk: ambient dimension must exceed spectrum length");
        if (k < 1 || k > s)
            throw DimensionError("build_Rk: k out of range");
        for (double v : a.values())
            if (!(v > 1.0))
                throw DomainError("build_Rk: entries must exceed 1");
        auto tb = quad_logdet_table<mp100>(s, tau_total);
        std::vector<mp100> am(a.values().begin(), a.values().end()), B0, B1;
        detail::quad_logdet_blocks(am, *tb, B0, B1);
        Eigen::MatrixXd R(s, s);
        for (int i = 0; i < s; ++i)
            for (int j = 0; j < s; ++j)
                R(i, j) = static_cast<double>(j == k - 1 ? B1[i * s + j] : B0[i * s + j]);
        return R;
    }

    struct PerturbedValue
    {
        double value = 0.0;
        double error_estimate = 0.0;
    };

    // E ln det(X L X^H) for excesses x_i >= 0 with repeats or zeros, by separation and Richardson extrapolation
    inline PerturbedValue perturbed_exp_logdet_excess(std::vector<double> x, int m_ambient, double eps = 1e-5)
    {
        std::sort(x.begin(), x.end(), std::greater<double>());
        for (double v : x)
            if (!(v >= 0.0))
                throw DomainError("perturbed_exp_logdet: entries must be >= 1");
        const int s = int(x.size());
        if (m_ambient <= s)
            throw DimensionError("perturbed_exp_logdet: ambient dimension must exceed spectrum length");

        bool repeats = x.back() <= 0.0;
        for (int i = 0; i + 1 < s; ++i)
            repeats = repeats || x[i] - x[i + 1] <= 1e-9 * x[i];
        if (!repeats)
            return {exp_logdet_gauss_quadratic_excess(x, m_ambient), 0.0};

        // clusters of entries closer than the perturbation scale
        std::vector<std::pair<int, int>> clusters;
        for (int i = 0; i < s;)
        {
            int j = i + 1;
            while (j < s && x[j - 1] - x[j] <= 2.0 * eps * s * x[j - 1])
                ++j;
            clusters.push_back({i, j});
            i = j;
        }
        double smallest = 1.0;
        for (double v : x)
            if (v > 0.0)
                smallest = std::min(smallest, v);
        auto shifted = [&](double e)
        {
            std::vector<double> y(x);
            for (auto [i0, i1] : clusters)
            {
                const int k = i1 - i0;
                if (x[i1 - 1] <= 0.0)
                {
                    for (int j = 0; j < k; ++j)
                        y[i0 + j] = x[i0 + j] + smallest * e * (k - j);
                    continue;
                }
                if (k == 1)
                    continue;
                const double c = x[i0];
                for (int j = 0; j < k; ++j)
                    y[i0 + j] = x[i0 + j] + c * e * (0.5 * (k - 1) - j);
            }
            return y;
        };
        const double f1 = exp_logdet_gauss_quadratic_excess(shifted(eps), m_ambient);
        const double f2 = exp_logdet_gauss_quadratic_excess(shifted(0.5 * eps), m_ambient);
        return {2.0 * f2 - f1, std::fabs(f2 - f1)};
    }

    // Same for eigenvalues l_i >= 1
    inline PerturbedValue perturbed_exp_logdet(std::vector<double> l, int m_ambient, double eps = 1e-5)
    {
        for (double &v : l)
        {
            if (!(v >= 1.0))
                throw DomainError("perturbed_exp_logdet: entries must be >= 1");
            v -= 1.0;
        }
        return perturbed_exp_logdet_excess(std::move(l), m_ambient, eps);
    }

    // ---------------------------------------------------------------------------------------------
    // Integral identity over the ordered region

    using RealFn = std::function<double(double)>;

    struct AndreiefResult
    {
        double lhs = 0.0, rhs = 0.0;
    };

    inline AndreiefResult andreief_check(const std::vector<RealFn> &f, const std::vector<RealFn> &g,
                                         const Eigen::MatrixXd &constants, double a, double b, int quad_points)
    {
        const int m = int(f.size()), n = int(g.size());
        if (n < 1 || m < n || n > 3)
            throw DimensionError("andreief_check: need 1 <= n <= 3 and m >= n");
        if (m > n && (constants.rows() != m || constants.cols() != m - n))
            throw DimensionError("andreief_check: constants must be m x (m - n)");
        QuadOptions qo;
        qo.base_points = quad_points;
        qo.rel_tol = 1e-12;
        qo.abs_tol = 1e-15;

        Eigen::MatrixXd E(m, m);
        for (int i = 0; i < m; ++i)
        {
            for (int j = 0; j < n; ++j)
                E(i, j) = integrate([&](double x) { return f[i](x) * g[j](x); }, a, b, qo);
            for (int j = n; j < m; ++j)
                E(i, j) = constants(i, j - n);
        }

        auto integrand = [&](const std::vector<double> &xs)
        {
            Eigen::MatrixXd A(m, m), B(n, n);
            for (int i = 0; i < m; ++i)
            {
                for (int j = 0; j < n; ++j)
                    A(i, j) = f[i](xs[j]);
                for (int j = n; j < m; ++j)
                    A(i, j) = constants(i, j - n);
            }
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    B(i, j) = g[i](xs[j]);
            return A.determinant() * B.determinant();
        };
        std::vector<double> xs(n);
        std::function<double(int, double)> level = [&](int d, double upper) -> double
        {
            return integrate(
                [&, d](double x)
                {
                    xs[d] = x;
                    return d + 1 == n ? integrand(xs) : level(d + 1, x);
                },
                a, upper, qo);
        };
        return {level(0, b), E.determinant()};
    }

    // ---------------------------------------------------------------------------------------------
    // Confluent limit of det C / Delta(A)

    namespace detail
    {
        // Fornberg weights for the k-th derivative at 0 on the given offsets
        inline std::vector<double> fd_weights(const std::vector<double> &z, int k)
        {
            const int n = int(z.size());
            std::vector<std::vector<double>> c(n, std::vector<double>(k + 1, 0.0));
            double c1 = 1.0, c4 = z[0];
            c[0][0] = 1.0;
            for (int i = 1; i < n; ++i)
            {
                int mn = std::min(i, k);
                double c2 = 1.0, c5 = c4;
                c4 = z[i];
                for (int j = 0; j < i; ++j)
                {
                    double c3 = z[i] - z[j];
                    c2 *= c3;
                    if (j == i - 1)
                    {
                        for (int s = mn; s >= 1; --s)
                            c[i][s] = c1 * (s * c[i - 1][s - 1] - c5 * c[i - 1][s]) / c2;
                        c[i][0] = -c1 * c5 * c[i - 1][0] / c2;
                    }
                    for (int s = mn; s >= 1; --s)
                        c[j][s] = (c4 * c[j][s] - s * c[j][s - 1]) / c3;
                    c[j][0] = c4 * c[j][0] / c3;
                }
                c1 = c2;
            }
            std::vector<double> w(n);
            for (int i = 0; i < n; ++i)
                w[i] = c[i][k];
            return w;
        }

        inline double central_derivative(const RealFn &f, double x0, int k, double h)
        {
            if (k == 0)
                return f(x0);
            const int half = (k + 1) / 2 + 1;
            std::vector<double> z;
            for (int i = -half; i <= half; ++i)
                z.push_back(i * h);
            auto w = fd_weights(z, k);
            double s = 0.0;
            for (size_t i = 0; i < z.size(); ++i)
                s += w[i] * f(x0 + z[i]);
            return s;
        }
    }

    struct LimitResult
    {
        double value = 0.0;
        bool derivative_warning = false;
    };

    // derivs(i, k, x) may supply exact k-th derivatives of f_i; otherwise central differences are used
    inline LimitResult det_ratio_limit(const std::vector<RealFn> &f, const OrderedSpectrum &a_head, double a0,
                                       int m_total,
                                       const std::function<double(int, int, double)> &derivs = nullptr)
    {
        const int m = m_total, n = int(a_head.size());
        if (int(f.size()) != m || n >= m)
            throw DimensionError("det_ratio_limit: need m functions and n < m");
        bool warn = false;
        Eigen::MatrixXd E(m, m);
        for (int i = 0; i < m; ++i)
        {
            for (int j = 0; j < n; ++j)
                E(i, j) = f[i](a_head[j]);
            for (int j = n; j < m; ++j)
            {
                const int k = m - 1 - j;
                if (derivs)
                {
                    E(i, j) = derivs(i, k, a0);
                    continue;
                }
                const double h = 4.0 * std::pow(std::numeric_limits<double>::epsilon(), 1.0 / (k + 4)) *
                                 std::max(1.0, std::fabs(a0));
                const double d1 = detail::central_derivative(f[i], a0, k, h);
                const double d2 = detail::central_derivative(f[i], a0, k, 0.5 * h);
                const double rich = (16.0 * d2 - d1) / 15.0;
                if (k > 0 && std::fabs(d1 - d2) > 1e-6 * std::max(std::fabs(rich), 1e-300))
                    warn = true;
                E(i, j) = rich;
            }
        }
        std::vector<double> shifted;
        for (double v : a_head.values())
            shifted.push_back(v - a0);
        // kappa(A0 - a0 I, m - n) with a sign when A0 - a0 I has negative entries
        double lk = 0.0;
        int sk = 1;
        for (int i = 0; i < n; ++i)
        {
            for (int j = i + 1; j < n; ++j)
                lk += std::log(shifted[i] - shifted[j]);
            lk += (m - n) * std::log(std::fabs(shifted[i]));
            if (shifted[i] < 0.0 && (m - n) % 2 == 1)
                sk = -sk;
        }
        const double denom = sk * std::exp(lk + log_gamma_product(m - n));
        return {E.determinant() / denom, warn};
    }
}
