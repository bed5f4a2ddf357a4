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
#include "multiprecision.hpp"
#include "quadrature.hpp"
#include "randmat.hpp"
#include "types.hpp"

#include <chrono>

namespace ncmac
{
    using DiagSpectrum = OrderedSpectrum;

    struct LbSampleBudget
    {
        long long outer_samples = 20000; // draws of Y
        long long inner_samples = 1000;  // shared pool of D draws
        int quad_points = 16;            // base Gauss-Legendre nodes for the two-user integral
        uint64_t seed = 1;
        int workers = 0;
        bool per_channel_use = true;     // divide by tau
        int jackknife_groups = 10;       // pool groups for bias correction and pool variance; 0 disables
        double perturbation = 1e-5;      // relative separation of repeated singular values
    };

    // density of alpha = |<v1, v2>| for two independent unit rows in C^tau
    inline double alpha_density(double x, int tau)
    {
        if (x < 0.0 || x > 1.0)
            return 0.0;
        return (tau - 1) * 2.0 * x * std::pow(1.0 - x * x, tau - 2);
    }

    namespace detail
    {
        enum class LbInput
        {
            ustm,
            gaussian
        };

        inline double log_kappa_raw(const std::vector<double> &v, int k)
        {
            double s = 0.0;
            for (size_t i = 0; i < v.size(); ++i)
            {
                s += k * std::log(v[i]);
                for (size_t j = i + 1; j < v.size(); ++j)
                    s += std::log(v[i] - v[j]);
            }
            return s;
        }

        inline std::vector<double> eig_desc(const CMatrix &h)
        {
            Eigen::SelfAdjointEigenSolver<CMatrix> es(h, Eigen::EigenvaluesOnly);
            const int n = int(h.rows());
            std::vector<double> v(n);
            for (int i = 0; i < n; ++i)
                v[i] = std::max(0.0, es.eigenvalues()(n - 1 - i));
            return v;
        }

        // Part of the information density that does not involve the expectation over D:
        // ln(gt(tau - l) / gt(tau)) + tr(Y X^H (I + X X^H)^{-1} X Y^H) - r ln det(I + X X^H) + ln kappa(Y Y^H, tau - r)
        struct OuterDraw
        {
            double base = 0.0;
            std::vector<double> a; // eigenvalues of Y Y^H, decreasing
        };

        inline OuterDraw outer_draw(const ChannelConfig &cfg, double rho, LbInput input, RngStream &s)
        {
            const int r = cfg.rx, n = cfg.n(), tau = cfg.tau;
            CMatrix X = input == LbInput::ustm ? sample_mac_ustm_input(cfg, rho, s) : sample_gaussian_input(cfg, rho, s);
            CMatrix S = sample_cgauss(r, n, s);
            CMatrix W = sample_cgauss(r, tau, s);
            CMatrix Y = S * X + W;
            CMatrix G = X * X.adjoint();
            G.diagonal().array() += 1.0;
            Eigen::LLT<CMatrix> llt(G);
            double ld = 0.0;
            for (int i = 0; i < n; ++i)
                ld += 2.0 * std::log(llt.matrixL()(i, i).real());
            CMatrix B = X * Y.adjoint();
            const double tr = (B.adjoint() * llt.solve(B)).trace().real();
            OuterDraw o;
            o.a = eig_desc(Y * Y.adjoint());
            o.base = log_gamma_product(tau - cfg.ell()) - log_gamma_product(tau) + tr - r * ld + log_kappa_raw(o.a, tau - r);
            return o;
        }

        // One inner-pool member: E = d^2 / (1 + d^2) and its constant c = -r ln det(I + D^2) - ln kappa(E, tau - n).
        // Repeated entries carry two separated copies for Richardson extrapolation.
        struct PoolEntry
        {
            std::vector<double> e, le;      // exact or first separated copy
            std::vector<double> e2, le2;    // second separated copy (half the separation)
            double c = 0.0, c2 = 0.0;
            bool perturbed = false;
            bool high_precision = false;
            int digits = 0;
        };

        inline PoolEntry make_pool_entry(const std::vector<double> &d, int r, int tau, double eps)
        {
            const int n = int(d.size());
            PoolEntry p;
            std::vector<double> e(n);
            double ldi = 0.0;
            for (int i = 0; i < n; ++i)
            {
                const double d2 = d[i] * d[i];
                e[i] = d2 / (1.0 + d2);
                ldi += std::log1p(d2);
            }
            // clusters of (numerically) repeated values
            std::vector<std::pair<int, int>> cl;
            double loss = 0.0;
            for (int i = 0; i < n;)
            {
                int j = i + 1;
                while (j < n && e[j - 1] - e[j] <= 1e-9 * e[j - 1])
                    ++j;
                cl.push_back({i, j});
                const int k = j - i;
                loss += 0.5 * k * (k - 1) * std::log10(1.0 / eps);
                i = j;
            }
            auto finish = [&](std::vector<double> v, std::vector<double> &out, std::vector<double> &lout, double &c)
            {
                out = v;
                lout.resize(n);
                for (int i = 0; i < n; ++i)
                    lout[i] = std::log(v[i]);
                c = -r * ldi - log_kappa_raw(v, tau - n);
            };
            if (int(cl.size()) == n)
            {
                finish(e, p.e, p.le, p.c);
                return p;
            }
            p.perturbed = true;
            p.high_precision = loss > 8.0;
            p.digits = int(std::ceil(loss)) + 30;
            auto shifted = [&](double h)
            {
                std::vector<double> v(e);
                for (auto [i0, i1] : cl)
                {
                    const int k = i1 - i0;
                    for (int j = 0; j < k; ++j)
                        v[i0 + j] = e[i0] * (1.0 + h * (0.5 * (k - 1) - j));
                }
                return v;
            };
            finish(shifted(eps), p.e, p.le, p.c);
            finish(shifted(0.5 * eps), p.e2, p.le2, p.c2);
            return p;
        }

        // ln [det M(a, e) / kappa(e, tau - n)] in extended precision
        inline double log_ratio_mp(const std::vector<double> &a, const std::vector<double> &e, int tau, int digits)
        {
            return with_precision(
                digits,
                [&]<class R>()
                {
                    using std::log;
                    const int r = int(a.size()), n = int(e.size()), p = std::max(r, n);
                    std::vector<R> M(size_t(p * p));
                    for (int i = 0; i < p; ++i)
                        for (int j = 0; j < p; ++j)
                        {
                            if (i < r && j < n)
                                M[i * p + j] = upper_exp_tail_t<R>(R(a[i]) * R(e[j]), tau - p);
                            else if (i >= r)
                                M[i * p + j] = pow(R(e[j]), tau - i - 1);
                            else
                                M[i * p + j] = pow(R(a[i]), tau - j - 1);
                        }
                    R det = lu_det<R>(M, p);
                    R kap = 1;
                    for (int i = 0; i < n; ++i)
                    {
                        kap *= pow(R(e[i]), tau - n);
                        for (int j = i + 1; j < n; ++j)
                            kap *= R(e[i]) - R(e[j]);
                    }
                    if (!(det > 0) || !(kap > 0))
                        return std::numeric_limits<double>::quiet_NaN();
                    return static_cast<double>(log(det) - log(kap));
                });
        }

        struct PoolEval
        {
            LogValue v1, v2; // summand at the two separations (v2 unused when exact)
        };

        inline PoolEval eval_pool_entry(const PoolEntry &p, const std::vector<double> &a, const std::vector<double> &la,
                                        int tau)
        {
            const int r = int(a.size()), n = int(p.e.size());
            PoolEval out;
            if (p.high_precision)
            {
                // c carries -ln kappa(e); the mp path returns ln det M - ln kappa directly
                const double k1 = p.c + log_kappa_raw(p.e, tau - n), k2 = p.c2 + log_kappa_raw(p.e2, tau - n);
                const double l1 = log_ratio_mp(a, p.e, tau, p.digits), l2 = log_ratio_mp(a, p.e2, tau, p.digits);
                out.v1 = std::isnan(l1) ? LogValue{0.0, -1} : LogValue::from_log(l1 + k1);
                out.v2 = std::isnan(l2) ? LogValue{0.0, -1} : LogValue::from_log(l2 + k2);
                return out;
            }
            LogValue m1 = logdet_M(a.data(), la.data(), r, p.e.data(), p.le.data(), n, tau);
            out.v1 = {m1.log_magnitude + p.c, m1.sign};
            if (p.perturbed)
            {
                LogValue m2 = logdet_M(a.data(), la.data(), r, p.e2.data(), p.le2.data(), n, tau);
                out.v2 = {m2.log_magnitude + p.c2, m2.sign};
            }
            return out;
        }

        inline double signed_sum_log(const double *lm, const int *sg, size_t n, int &sign)
        {
            double mx = -std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < n; ++i)
                mx = std::max(mx, lm[i]);
            if (!std::isfinite(mx))
            {
                sign = 0;
                return -std::numeric_limits<double>::infinity();
            }
            double s = 0.0;
            for (size_t i = 0; i < n; ++i)
                s += sg[i] * std::exp(lm[i] - mx);
            sign = s > 0.0 ? 1 : (s < 0.0 ? -1 : 0);
            return mx + std::log(std::fabs(s));
        }

        struct PoolResult
        {
            double value = 0.0, std_error = 0.0, perturbation_error = 0.0;
            bool positive = true;
        };

        // Outer average of base - ln E_D[...] with the E_D average over a shared pool.
        // Pool groups give a jackknife bias correction for the log of the average and its variance.
        inline PoolResult pool_estimate(const ChannelConfig &cfg, double rho, LbInput input, const LbSampleBudget &b,
                                        long long inner, uint64_t outer_base, uint64_t pool_base)
        {
            const int r = cfg.rx, n = cfg.n(), tau = cfg.tau;
            // pool of D draws
            std::vector<PoolEntry> pool(static_cast<size_t>(inner));
            parallel_for(
                size_t(inner), b.workers,
                [&](size_t j)
                {
                    RngStream s(b.seed, pool_base ^ uint64_t(j));
                    CMatrix X = input == LbInput::ustm ? sample_mac_ustm_input(cfg, rho, s) : sample_gaussian_input(cfg, rho, s);
                    pool[j] = make_pool_entry(singular_values(X), r, tau, b.perturbation);
                },
                16);
            // a pool of identical spectra (e.g. one user holding every antenna) collapses to one entry
            bool identical = true;
            for (size_t j = 1; j < pool.size() && identical; ++j)
                for (int i = 0; i < n; ++i)
                    identical = identical && std::fabs(pool[j].e[i] - pool[0].e[i]) <= 1e-12 * pool[0].e[i];
            if (identical)
                pool.resize(1);
            const size_t N = pool.size();
            int G = (b.jackknife_groups >= 2 && N >= size_t(2 * b.jackknife_groups)) ? b.jackknife_groups : 1;
            std::vector<size_t> gstart(G + 1);
            for (int g = 0; g <= G; ++g)
                gstart[g] = N * g / G;
            const bool perturbed = std::any_of(pool.begin(), pool.end(), [](const PoolEntry &p) { return p.perturbed; });

            const long long M = b.outer_samples;
            std::vector<double> base(M), pert(M, 0.0);
            std::vector<double> glog(size_t(M) * G); // per outer sample, log of each group's sum
            std::atomic<bool> bad{false};
            parallel_for(
                size_t(M), b.workers,
                [&](size_t i)
                {
                    RngStream s(b.seed, outer_base ^ uint64_t(i));
                    OuterDraw o = outer_draw(cfg, rho, input, s);
                    std::vector<double> la(r);
                    for (int k = 0; k < r; ++k)
                        la[k] = std::log(o.a[k]);
                    std::vector<double> l1(N), l2(N);
                    std::vector<int> s1(N), s2(N);
                    for (size_t j = 0; j < N; ++j)
                    {
                        auto v = eval_pool_entry(pool[j], o.a, la, tau);
                        l1[j] = v.v1.log_magnitude, s1[j] = v.v1.sign;
                        l2[j] = v.v2.log_magnitude, s2[j] = pool[j].perturbed ? v.v2.sign : 0;
                        if (!pool[j].perturbed)
                            l2[j] = l1[j], s2[j] = s1[j];
                    }
                    base[i] = o.base;
                    for (int g = 0; g < G; ++g)
                    {
                        const size_t j0 = gstart[g], cnt = gstart[g + 1] - gstart[g];
                        int sg1 = 0, sg2 = 0;
                        const double a1 = signed_sum_log(&l1[j0], &s1[j0], cnt, sg1);
                        if (!perturbed)
                        {
                            if (sg1 <= 0)
                                bad = true;
                            glog[i * G + g] = a1;
                            continue;
                        }
                        const double a2 = signed_sum_log(&l2[j0], &s2[j0], cnt, sg2);
                        // Richardson: 2 S(eps / 2) - S(eps)
                        const double w = 2.0 - double(sg1 * sg2) * std::exp(a1 - a2);
                        if (sg1 <= 0 || sg2 <= 0 || !(w > 0.0))
                        {
                            bad = true;
                            continue;
                        }
                        glog[i * G + g] = a2 + std::log(w);
                    }
                    if (perturbed)
                    {
                        // separation effect on the log of the pool average
                        int sa = 0, sb = 0;
                        const double x1 = signed_sum_log(l1.data(), s1.data(), N, sa);
                        const double x2 = signed_sum_log(l2.data(), s2.data(), N, sb);
                        pert[i] = std::fabs(x2 - x1);
                    }
                },
                8);
            PoolResult res;
            if (bad)
            {
                res.positive = false;
                return res;
            }
            const double lnN = std::log(double(N));
            // full-pool and leave-one-group-out values per outer sample
            std::vector<double> full(M), jack(M);
            std::vector<double> loo_mean(G, 0.0);
            std::vector<double> tmp(G);
            for (long long i = 0; i < M; ++i)
            {
                const double *gl = &glog[i * G];
                const double mx = *std::max_element(gl, gl + G);
                double tot = 0.0;
                for (int g = 0; g < G; ++g)
                    tmp[g] = std::exp(gl[g] - mx), tot += tmp[g];
                full[i] = base[i] - (mx + std::log(tot) - lnN);
                if (G == 1)
                {
                    jack[i] = full[i];
                    continue;
                }
                double lsum = 0.0;
                for (int g = 0; g < G; ++g)
                {
                    const double rest = tot - tmp[g];
                    const double lo = base[i] - (mx + std::log(rest) - std::log(double(N - (gstart[g + 1] - gstart[g]))));
                    loo_mean[g] += lo;
                    lsum += lo;
                }
                jack[i] = G * full[i] - (G - 1) * lsum / G;
            }
            auto mean_se = [&](const std::vector<double> &v)
            {
                double m = 0.0;
                for (double x : v)
                    m += x;
                m /= double(v.size());
                double q = 0.0;
                for (double x : v)
                    q += (x - m) * (x - m);
                return std::pair{m, std::sqrt(q / double(v.size() - 1) / double(v.size()))};
            };
            auto [mj, sej] = mean_se(jack);
            double var = sej * sej;
            if (G > 1)
            {
                // pool-induced variance from the spread of leave-one-group-out estimates
                double lm = 0.0;
                for (auto &x : loo_mean)
                    x /= double(M), lm += x;
                lm /= G;
                double q = 0.0;
                for (double x : loo_mean)
                    q += (x - lm) * (x - lm);
                var += (G - 1.0) / G * q;
            }
            res.value = mj;
            if (perturbed)
            {
                double pe = 0.0;
                for (double x : pert)
                    pe += x;
                res.perturbation_error = pe / double(M);
                var += res.perturbation_error * res.perturbation_error;
            }
            res.std_error = std::sqrt(var);
            return res;
        }

        inline uint64_t cfg_tag(const ChannelConfig &cfg, double rho)
        {
            uint64_t h = stream_base({uint64_t(cfg.tau), uint64_t(cfg.rx), double_bits(rho)});
            for (int a : cfg.per_user_antennas)
                h = splitmix64(h ^ uint64_t(a));
            return h;
        }

        inline BoundEstimate lb_pool_bound(const ChannelConfig &cfg, double rho, const LbSampleBudget &b, LbInput input,
                                           BoundKind kind)
        {
            cfg.validate();
            if (!(rho > 0.0))
                throw DomainError("lower bound: rho must be positive");
            if (b.outer_samples < 2 || b.inner_samples < 1)
                throw DomainError("lower bound: sample budgets must be positive");
            const auto t0 = std::chrono::steady_clock::now();
            const uint64_t h = cfg_tag(cfg, rho);
            const uint64_t outer = stream_base({tag(input == LbInput::ustm ? "lb_outer_ustm" : "lb_outer_gauss"), h});
            const uint64_t pool = stream_base({tag(input == LbInput::ustm ? "lb_pool_ustm" : "lb_pool_gauss"), h});
            long long inner = b.inner_samples;
            PoolResult pr = pool_estimate(cfg, rho, input, b, inner, outer, pool);
            if (!pr.positive)
            {
                inner *= 4;
                pr = pool_estimate(cfg, rho, input, b, inner, outer, pool);
                if (!pr.positive)
                    throw EstimatorError("lower bound: inner average is not positive (insufficient inner samples)");
            }
            BoundEstimate be;
            const double scale = b.per_channel_use ? 1.0 / cfg.tau : 1.0;
            be.value = pr.value * scale;
            be.std_error = pr.std_error * scale;
            be.kind = kind;
            be.cfg = cfg;
            be.rho = rho;
            be.seed = b.seed;
            be.n_samples = b.outer_samples;
            be.per_channel_use = b.per_channel_use;
            if (inner != b.inner_samples)
                be.note = "inner samples raised to " + std::to_string(inner);
            if (pr.perturbation_error > 0.0)
            {
                if (pr.perturbation_error * scale > 10.0 * be.std_error)
                    throw EstimatorError("lower bound: perturbation instability (separation effect exceeds 10x std_error)");
                be.note += (be.note.empty() ? "" : "; ") + std::string("separation error ") +
                           std::to_string(pr.perturbation_error * scale);
            }
            be.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
            return be;
        }
    }

    inline BoundEstimate ustm_lb_multiantenna(const ChannelConfig &cfg, double rho, const LbSampleBudget &b)
    {
        return detail::lb_pool_bound(cfg, rho, b, detail::LbInput::ustm, BoundKind::lb_ustm);
    }

    inline BoundEstimate ustm_lb(const ChannelConfig &cfg, double rho, const LbSampleBudget &b)
    {
        if (!cfg.single_antenna_users())
            return ustm_lb_multiantenna(cfg, rho, b);
        return detail::lb_pool_bound(cfg, rho, b, detail::LbInput::ustm, BoundKind::lb_ustm);
    }

    inline BoundEstimate gaussian_lb(const ChannelConfig &cfg, double rho, const LbSampleBudget &b)
    {
        return detail::lb_pool_bound(cfg, rho, b, detail::LbInput::gaussian, BoundKind::lb_gauss);
    }

    inline double two_user_mu(int tau, double rho) { return 1.0 + 2.0 / (tau * rho); }

    // ln of the inner expectation for two single-antenna users, by quadrature over alpha
    inline double two_user_log_inner(const std::vector<double> &a, int tau, double rho, int quad_points)
    {
        const int r = int(a.size());
        const double beta = tau * rho / 2.0, mu = two_user_mu(tau, rho);
        std::vector<double> la(r);
        for (int i = 0; i < r; ++i)
            la[i] = std::log(a[i]);
        auto logf = [&](double al)
        {
            if (al <= 0.0 || al >= 1.0)
                return -std::numeric_limits<double>::infinity();
            const double e[2] = {(1.0 + al) / (mu + al), (1.0 - al) / (mu - al)};
            const double le[2] = {std::log1p(al) - std::log(mu + al), std::log1p(-al) - std::log(mu - al)};
            const LogValue m = logdet_M(a.data(), la.data(), r, e, le, 2, tau);
            if (m.sign <= 0)
                return -std::numeric_limits<double>::infinity();
            return m.log_magnitude + (tau - r - 1) * (std::log(mu - al) + std::log(mu + al));
        };
        QuadOptions o;
        o.base_points = quad_points;
        o.rel_tol = 1e-9;
        o.abs_tol = 0.0;
        const LogValue I = integrate_log(logf, 0.0, 1.0, o);
        if (I.sign <= 0)
            throw QuadratureError("two-user integral is not positive");
        return std::log(double(tau - 1)) + (1.0 - 2.0 * r) * std::log(beta) + I.log_magnitude;
    }

    // r (tau - 1) int_0^1 ln(mu^2 - u) (1 - u)^(tau - 2) du + 2 r ln beta = r E ln det(I + D^2) for two users
    inline double two_user_mean_logdet(int r, int tau, double rho)
    {
        const double beta = tau * rho / 2.0, mu = two_user_mu(tau, rho);
        QuadOptions o;
        o.rel_tol = 1e-12;
        const double v = integrate([&](double u) { return std::log(mu * mu - u) * std::pow(1.0 - u, tau - 2); }, 0.0, 1.0, o);
        return r * ((tau - 1) * v + 2.0 * std::log(beta));
    }

    inline BoundEstimate two_user_lb(const ChannelConfig &cfg, double rho, const LbSampleBudget &b)
    {
        cfg.validate();
        if (cfg.users() != 2 || !cfg.single_antenna_users())
            throw DimensionError("two_user_lb: requires two single-antenna users");
        if (cfg.rx < 2)
            throw DimensionError("two_user_lb: requires at least two receive antennas");
        if (!(rho > 0.0))
            throw DomainError("two_user_lb: rho must be positive");
        const auto t0 = std::chrono::steady_clock::now();
        const uint64_t outer = stream_base({tag("lb_outer_ustm"), detail::cfg_tag(cfg, rho)});
        auto est = mc_estimate(b.outer_samples, b.seed, outer, b.workers,
                               [&](long long, RngStream &s)
                               {
                                   auto o = detail::outer_draw(cfg, rho, detail::LbInput::ustm, s);
                                   return o.base - two_user_log_inner(o.a, cfg.tau, rho, b.quad_points);
                               });
        BoundEstimate be;
        const double scale = b.per_channel_use ? 1.0 / cfg.tau : 1.0;
        be.value = est.mean * scale;
        be.std_error = est.std_error * scale;
        be.kind = BoundKind::lb_2user;
        be.cfg = cfg;
        be.rho = rho;
        be.seed = b.seed;
        be.n_samples = est.n_samples;
        be.per_channel_use = b.per_channel_use;
        be.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return be;
    }
}
