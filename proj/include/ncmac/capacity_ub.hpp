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
#include "optimize.hpp"
#include "randmat.hpp"
#include "specfn.hpp"
#include "types.hpp"

#include <chrono>
#include <functional>
#include <memory>
#include <optional>
#include <sstream>

namespace ncmac
{
    enum class SaddleMode
    {
        general,
        square
    };

    struct SaddleConfig
    {
        double tol = 1e-4;                // nats per channel use
        int max_outer_iters = 60;
        int n_starts = 3;
        double min_rel_gap = 1e-7;        // between consecutive d_i
        double d2_lo = 1e-8, d2_hi = 1e6; // limits on d_i^2 relative to tau rho / n
        int max_inner_evals = 3000;
        long long inner_mc_samples = 2000;  // general mode, common random numbers
        long long final_mc_samples = 20000; // general mode, fresh batch for the reported value
        uint64_t seed = 1;
        int workers = 0;
        McConfig constants_mc{1000000, 1, 0}; // zeta and order constant
        ConstantCache *cache = nullptr;
    };

    struct SaddleTracePoint
    {
        double lambda = 0.0, phi = 0.0, sum_d2 = 0.0;
        std::vector<double> d;
    };

    struct SaddleResult
    {
        BoundEstimate bound;
        double lambda = 0.0;
        double phi = 0.0;
        std::vector<double> d; // maximizing spectrum at lambda
        std::vector<SaddleTracePoint> trace;
        bool boundary_hit = false;
        bool grid_fallback = false;
        bool lambda_at_lower_limit = false;
    };

    struct NonconvergenceError : std::runtime_error
    {
        SaddleResult best;
        NonconvergenceError(const std::string &what, SaddleResult b) : std::runtime_error(what), best(std::move(b)) {}
    };

    // ------------------------------------------------------------------------------------------

    inline double u_general(const ChannelConfig &cfg, double rho, const McEstimate &zeta, const McEstimate &oconst)
    {
        if (!(rho > 0.0))
            throw DomainError("u_general: rho must be positive");
        const int r = cfg.rx, n = cfg.n(), l = cfg.ell(), p = cfg.p();
        const double tau = cfg.tau;
        if (r > l && !(zeta.mean > 0.0))
            throw DomainError("u_general: zeta must be positive when r > min(n, r)");
        if (!(oconst.mean > 0.0) || oconst.mean > 1.0)
            throw DomainError("u_general: order constant must lie in (0, 1]");
        double u = -r + (r * n / tau) * std::log(tau * rho / n);
        u += (log_gamma_product(r - l) + log_gamma_product(cfg.tau - l) + log_gamma_product(n) -
              log_gamma_product(cfg.tau) - log_gamma_product(p - l)) /
             tau;
        u += std::log(oconst.mean) / tau + n * r / (tau * rho) + (r - l) * (tau - l) / tau;
        if (r > l)
            u -= (tau - n) * (r - l) / tau * std::log(zeta.mean);
        return u;
    }

    inline double u_star(const ChannelConfig &cfg, double rho)
    {
        if (!(rho > 0.0))
            throw DomainError("u_star: rho must be positive");
        const int m = cfg.n();
        if (cfg.rx != m)
            throw DimensionError("u_star: requires n = r");
        const double tau = cfg.tau;
        return -m + (double(m) * m / tau) * std::log(tau * rho / m) + double(m) * m / (tau * rho) +
               (log_gamma_product(m) + log_gamma_product(cfg.tau - m) - log_gamma_product(cfg.tau)) / tau;
    }

    namespace detail
    {
        inline double sum_sq(const std::vector<double> &d)
        {
            double s = 0.0;
            for (double v : d)
                s += v * v;
            return s;
        }

        inline double min_rel_gap(const std::vector<double> &d)
        {
            double g = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i + 1 < d.size(); ++i)
                g = std::min(g, (d[i] - d[i + 1]) / d[i]);
            return g;
        }

        // E ln det(X (I + D^2) X^H) for X m x tau Gaussian, with repeated or vanishing d handled
        inline double square_logdet_term(const std::vector<double> &d, int tau, double min_gap)
        {
            const int m = int(d.size());
            bool all_zero = true;
            for (double v : d)
                all_zero = all_zero && v == 0.0;
            if (all_zero)
            {
                double s = 0.0;
                for (int i = 1; i <= m; ++i)
                    s += digamma(double(tau - i + 1));
                return s;
            }
            std::vector<double> x(m);
            for (int i = 0; i < m; ++i)
                x[i] = d[i] * d[i];
            if (min_rel_gap(d) >= 0.5 * min_gap && d.back() > 0.0)
                return exp_logdet_gauss_quadratic_excess(x, tau);
            return perturbed_exp_logdet_excess(x, tau).value;
        }
    }

    // Square-case objective; d sorted decreasing
    inline double g_star(const std::vector<double> &d, double lambda, const ChannelConfig &cfg, double rho,
                         double min_gap = 1e-7)
    {
        const int m = cfg.n();
        if (cfg.rx != m || int(d.size()) != m)
            throw DimensionError("g_star: requires n = r = len(d)");
        for (size_t i = 0; i < d.size(); ++i)
        {
            if (!(d[i] >= 0.0))
                throw DomainError("g_star: entries must be nonnegative");
            if (i + 1 < d.size() && d[i] < d[i + 1])
                throw DegenerateSpectrumError("g_star: entries must be sorted decreasing");
        }
        const double tau = cfg.tau, s2 = detail::sum_sq(d);
        double ld = 0.0;
        for (double v : d)
            ld += std::log1p(v * v);
        double g = double(m) * m * s2 / (tau * rho) - m * ld + lambda * (tau * rho - s2);
        if (cfg.tau > m)
            g += (tau - m) * detail::square_logdet_term(d, cfg.tau, min_gap);
        return g;
    }

    // Fixed batch of G draws for the general objective (common random numbers)
    class GeneralObjective
    {
      public:
        GeneralObjective(const ChannelConfig &cfg, double rho, double zeta, long long samples, uint64_t seed,
                         uint64_t stream_tag, int workers)
            : cfg_(cfg), rho_(rho), zeta_(zeta), workers_(workers)
        {
            const int r = cfg.rx, n = cfg.n();
            const uint64_t base = stream_base({tag("ub_general_G"), stream_tag, uint64_t(r), uint64_t(n)});
            gram_.resize(size_t(samples));
            for (long long i = 0; i < samples; ++i)
            {
                RngStream s(seed, base ^ uint64_t(i));
                CMatrix G = sample_cgauss(r, n, s);
                gram_[i] = n <= r ? CMatrix(G.adjoint() * G) : G;
            }
        }

        // mean and standard error of the per-sample log det, plus mean of tr((...)^{-1}) for zeta sensitivity
        std::tuple<double, double, double> expect_logdet(const std::vector<double> &d) const
        {
            const int r = cfg_.rx, n = cfg_.n();
            const size_t N = gram_.size();
            std::vector<double> v(N), tr(N);
            Eigen::VectorXd a(n);
            for (int i = 0; i < n; ++i)
                a(i) = std::sqrt(1.0 + d[i] * d[i]);
            parallel_for(
                N, workers_,
                [&](size_t k)
                {
                    if (n <= r)
                    {
                        CMatrix M = a.asDiagonal() * gram_[k] * a.asDiagonal();
                        M.diagonal().array() += zeta_;
                        Eigen::LLT<CMatrix> llt(M);
                        const auto &L = llt.matrixL();
                        double s = 0.0;
                        for (int i = 0; i < n; ++i)
                            s += 2.0 * std::log(L(i, i).real());
                        v[k] = s + (r - n) * std::log(zeta_);
                        tr[k] = llt.solve(CMatrix::Identity(n, n)).trace().real() + (r - n) / zeta_;
                    }
                    else
                    {
                        CMatrix GA = gram_[k] * a.asDiagonal();
                        CMatrix M = GA * GA.adjoint();
                        M.diagonal().array() += zeta_;
                        Eigen::LLT<CMatrix> llt(M);
                        const auto &L = llt.matrixL();
                        double s = 0.0;
                        for (int i = 0; i < r; ++i)
                            s += 2.0 * std::log(L(i, i).real());
                        v[k] = s;
                        tr[k] = llt.solve(CMatrix::Identity(r, r)).trace().real();
                    }
                },
                256);
            double mean = 0.0, t = 0.0;
            for (size_t k = 0; k < N; ++k)
                mean += v[k], t += tr[k];
            mean /= double(N);
            double var = 0.0;
            for (size_t k = 0; k < N; ++k)
                var += (v[k] - mean) * (v[k] - mean);
            return {mean, std::sqrt(var / double(N - 1) / double(N)), t / double(N)};
        }

        double operator()(const std::vector<double> &d, double lambda) const
        {
            const double tau = cfg_.tau, s2 = detail::sum_sq(d);
            const int n = cfg_.n(), r = cfg_.rx;
            double ld = 0.0;
            for (double v : d)
                ld += std::log1p(v * v);
            double g = double(n) * r * s2 / (tau * rho_) - r * ld + lambda * (tau * rho_ - s2);
            if (cfg_.tau > n)
                g += (tau - n) * std::get<0>(expect_logdet(d));
            return g;
        }

      private:
        ChannelConfig cfg_;
        double rho_, zeta_;
        int workers_;
        std::vector<CMatrix> gram_;
    };

    inline McEstimate g_general(const std::vector<double> &d, double lambda, const ChannelConfig &cfg, double rho,
                                const McEstimate &zeta, const McConfig &mc)
    {
        if (int(d.size()) != cfg.n())
            throw DimensionError("g_general: spectrum length must equal n");
        if (lambda < 0.0)
            throw DomainError("g_general: lambda must be nonnegative");
        GeneralObjective obj(cfg, rho, zeta.mean, mc.n_samples, mc.master_seed, 0, mc.workers);
        const double tau = cfg.tau, s2 = detail::sum_sq(d);
        double ld = 0.0;
        for (double v : d)
            ld += std::log1p(v * v);
        double g = double(cfg.n()) * cfg.rx * s2 / (tau * rho) - cfg.rx * ld + lambda * (tau * rho - s2);
        double se = 0.0;
        if (cfg.tau > cfg.n())
        {
            auto [m, s, t] = obj.expect_logdet(d);
            g += (tau - cfg.n()) * m;
            se = (tau - cfg.n()) * s;
        }
        return {g, se, mc.n_samples};
    }

    // ------------------------------------------------------------------------------------------

    namespace detail
    {
        inline double softplus(double z) { return z > 30.0 ? z : std::log1p(std::exp(z)); }
        inline double inv_softplus(double y) { return y > 30.0 ? y : std::log(std::expm1(y)); }

        struct InnerSup
        {
            double value = -std::numeric_limits<double>::infinity();
            std::vector<double> d;
            bool boundary = false;
        };

        class SaddleSolver
        {
          public:
            using Objective = std::function<double(const std::vector<double> &, double)>;

            SaddleSolver(const ChannelConfig &cfg, double rho, const SaddleConfig &sc, Objective g, double g_at_zero_base)
                : cfg_(cfg), rho_(rho), sc_(sc), g_(std::move(g)), g0_(g_at_zero_base)
            {
                m_ = cfg.n();
                scale_ = cfg.tau * rho / m_;
                gmin_ = std::log1p(sc.min_rel_gap);
                c_lo_ = 0.5 * std::log(sc.d2_lo * scale_);
                c_hi_ = 0.5 * std::log(sc.d2_hi * scale_);
            }

            std::vector<double> decode(const std::vector<double> &th) const
            {
                std::vector<double> ld(m_);
                ld[m_ - 1] = th[0];
                for (int i = 1; i < m_; ++i)
                    ld[m_ - 1 - i] = ld[m_ - i] + gmin_ + softplus(th[i]);
                std::vector<double> d(m_);
                for (int i = 0; i < m_; ++i)
                    d[i] = std::exp(ld[i]);
                return d;
            }

            std::vector<double> encode(const std::vector<double> &d) const
            {
                std::vector<double> th(m_);
                th[0] = std::log(d[m_ - 1]);
                for (int i = 1; i < m_; ++i)
                    th[i] = inv_softplus(std::max(1e-12, std::log(d[m_ - 1 - i] / d[m_ - i]) - gmin_));
                return th;
            }

            double objective(const std::vector<double> &th, double lambda) const
            {
                if (th[0] < c_lo_)
                    return -std::numeric_limits<double>::infinity();
                auto d = decode(th);
                if (std::log(d[0]) > c_hi_)
                    return -std::numeric_limits<double>::infinity();
                return g_(d, lambda);
            }

            InnerSup sup(double lambda, const std::vector<double> *warm)
            {
                std::vector<std::vector<double>> starts;
                {
                    // scaled identity with small jitter
                    std::vector<double> th(m_, inv_softplus(0.025));
                    th[0] = 0.5 * std::log(scale_);
                    starts.push_back(th);
                }
                if (sc_.n_starts >= 2)
                {
                    // coarse grid over overall scale and spread
                    double best = -std::numeric_limits<double>::infinity();
                    std::vector<double> arg;
                    for (double s : {1e-4, 1e-3, 1e-2, 0.1, 0.3, 1.0, 3.0, 10.0, 100.0})
                        for (double gap : {0.01, 0.3, 1.0})
                        {
                            std::vector<double> th(m_, inv_softplus(gap));
                            th[0] = 0.5 * std::log(s * scale_);
                            if (th[0] < c_lo_)
                                continue;
                            const double v = objective(th, lambda);
                            if (v > best)
                                best = v, arg = th;
                        }
                    if (!arg.empty())
                        starts.push_back(arg);
                }
                if (sc_.n_starts >= 3)
                {
                    if (warm)
                        starts.push_back(encode(*warm));
                    else
                    {
                        std::vector<double> th(m_, inv_softplus(0.2));
                        th[0] = 0.5 * std::log(0.1 * scale_);
                        starts.push_back(th);
                    }
                }
                InnerSup out;
                NelderMeadOptions o;
                o.max_evals = sc_.max_inner_evals;
                o.initial_step = 0.5;
                o.ftol = 1e-10;
                o.xtol = 1e-6;
                auto f = [&](const std::vector<double> &th) { return objective(th, lambda); };
                std::vector<double> best_x;
                for (auto &st : starts)
                {
                    auto r = nelder_mead_max(f, st, o);
                    if (r.f > out.value)
                        out.value = r.f, best_x = r.x;
                }
                if (!best_x.empty())
                {
                    // restart from the best optimum to escape a collapsed simplex
                    o.initial_step = 0.1;
                    auto r = nelder_mead_max(f, best_x, o);
                    if (r.f > out.value)
                        out.value = r.f, best_x = r.x;
                    out.d = decode(best_x);
                }
                if (std::isfinite(g0_))
                {
                    const double z = g0_ + lambda * cfg_.tau * rho_;
                    if (z > out.value)
                    {
                        out.value = z;
                        out.d.assign(m_, 0.0);
                    }
                }
                if (!out.d.empty() && out.d.back() > 0.0)
                {
                    const double lo = std::log(out.d.back()), hi = std::log(out.d.front());
                    out.boundary = lo < c_lo_ + 1e-3 || hi > c_hi_ - 1e-3;
                }
                return out;
            }

            SaddleResult solve()
            {
                const double tau = cfg_.tau, tr = tau * rho_;
                const double lam_lo = double(cfg_.n()) * cfg_.rx / tr * (1.0 + 1e-9);
                SaddleResult res;
                std::vector<double> warm;
                bool boundary = false;
                auto eval = [&](double lambda)
                {
                    auto s = sup(lambda, warm.empty() ? nullptr : &warm);
                    if (s.d.empty())
                        throw NonconvergenceError("saddle: inner supremum not found", res);
                    if (s.d.back() > 0.0)
                        warm = s.d;
                    const double s2 = sum_sq(s.d);
                    res.trace.push_back({lambda, s.value, s2, s.d});
                    return std::make_pair(s.value, tr - s2);
                };

                // a nonnegative subgradient at the left end means the minimum sits there
                double lo = lam_lo, hi;
                if (eval(lam_lo).second >= 0.0)
                    hi = lam_lo;
                else
                {
                    // bracket the minimizer using the envelope slope tau rho - sum d^2
                    double delta = double(m_) / rho_;
                    int k = 0;
                    for (;; ++k)
                    {
                        if (eval(lam_lo + delta).second >= 0.0)
                            break;
                        lo = lam_lo + delta;
                        delta *= 2.0;
                        if (k > 60)
                            throw NonconvergenceError("saddle: could not bracket lambda from above", res);
                    }
                    hi = lam_lo + delta;
                    if (k == 0)
                        for (int j = 0; j < 50; ++j)
                        {
                            delta *= 0.5;
                            if (eval(lam_lo + delta).second < 0.0)
                            {
                                lo = lam_lo + delta;
                                break;
                            }
                            hi = lam_lo + delta;
                        }
                }

                auto phi = [&](double lambda) { return eval(lambda).first; };
                // stop once the tangent lines certify the best value to within tol
                auto stop = [&](double, double, double, double)
                {
                    double best = std::numeric_limits<double>::infinity();
                    for (const auto &t : res.trace)
                        best = std::min(best, t.phi);
                    double lb = std::numeric_limits<double>::infinity();
                    for (const auto &a : res.trace)
                        for (const auto &b : res.trace)
                        {
                            const double sa = tr - a.sum_d2, sb = tr - b.sum_d2;
                            if (!(sa < 0.0 && sb >= 0.0))
                                continue;
                            const double x = (b.phi - a.phi + sa * a.lambda - sb * b.lambda) / (sa - sb);
                            double v = -std::numeric_limits<double>::infinity();
                            for (const auto &c : res.trace)
                                v = std::max(v, c.phi + (tr - c.sum_d2) * (x - c.lambda));
                            lb = std::min(lb, v);
                        }
                    return (best - lb) / tau < 0.1 * sc_.tol;
                };
                if (hi > lo && !stop(lo, hi, 0.0, 0.0))
                    golden_section_min(phi, lo, hi, sc_.max_outer_iters, stop);

                // convexity check along the trace; fall back to a lambda grid if violated
                auto sorted = res.trace;
                std::sort(sorted.begin(), sorted.end(), [](auto &a, auto &b) { return a.lambda < b.lambda; });
                bool convex = true;
                for (size_t i = 1; i + 1 < sorted.size() && hi > lo; ++i)
                {
                    const auto &a = sorted[i - 1], &b = sorted[i], &c = sorted[i + 1];
                    if (c.lambda - a.lambda <= 0.0)
                        continue;
                    const double t = (b.lambda - a.lambda) / (c.lambda - a.lambda);
                    if (b.phi > (1 - t) * a.phi + t * c.phi + 10.0 * sc_.tol * tau)
                        convex = false;
                }
                if (!convex)
                {
                    res.grid_fallback = true;
                    for (int i = 0; i <= 40; ++i)
                        phi(lo + (hi - lo) * i / 40.0);
                }

                const SaddleTracePoint *best = nullptr;
                for (const auto &t : res.trace)
                    if (!best || t.phi < best->phi)
                        best = &t;
                res.lambda = best->lambda;
                res.phi = best->phi;
                res.d = best->d;
                res.lambda_at_lower_limit = lo == lam_lo;
                for (const auto &t : res.trace)
                    if (!t.d.empty() && t.d.back() > 0.0 && t.lambda == best->lambda)
                    {
                        const double l0 = std::log(t.d.back()), l1 = std::log(t.d.front());
                        boundary = l0 < c_lo_ + 1e-3 || l1 > c_hi_ - 1e-3;
                    }
                res.boundary_hit = boundary;
                return res;
            }

          private:
            ChannelConfig cfg_;
            double rho_;
            SaddleConfig sc_;
            Objective g_;
            double g0_;
            int m_ = 1;
            double scale_ = 1.0, gmin_ = 0.0, c_lo_ = 0.0, c_hi_ = 0.0;
        };
    }

    inline SaddleResult saddle_solve_detailed(const ChannelConfig &cfg, double rho, SaddleMode mode, const SaddleConfig &sc)
    {
        cfg.validate();
        if (!(rho > 0.0))
            throw DomainError("saddle_solve: rho must be positive");
        const auto t0 = std::chrono::steady_clock::now();
        const double tau = cfg.tau;
        SaddleResult res;
        if (mode == SaddleMode::square)
        {
            if (cfg.n() != cfg.rx)
                throw DimensionError("saddle_solve: square mode requires n = r");
            const int m = cfg.n();
            double g0 = 0.0;
            for (int i = 1; i <= m; ++i)
                g0 += digamma(double(cfg.tau - i + 1));
            g0 *= (tau - m);
            detail::SaddleSolver solver(
                cfg, rho, sc, [&](const std::vector<double> &d, double lambda) { return g_star(d, lambda, cfg, rho, sc.min_rel_gap); },
                g0);
            res = solver.solve();
            res.bound.value = u_star(cfg, rho) + res.phi / tau;
            res.bound.std_error = 0.0;
            res.bound.kind = BoundKind::ub_square;
            res.bound.n_samples = 0;
        }
        else
        {
            McConfig cmc = sc.constants_mc;
            const McEstimate zeta = estimate_zeta(cfg.rx, cfg.tau - cfg.n(), cmc, sc.cache);
            const McEstimate oconst = estimate_order_constant(cfg, rho, cmc, sc.cache);
            const uint64_t rtag = double_bits(rho);
            GeneralObjective obj(cfg, rho, zeta.mean, sc.inner_mc_samples, sc.seed, rtag, sc.workers);
            detail::SaddleSolver solver(
                cfg, rho, sc, [&](const std::vector<double> &d, double lambda) { return obj(d, lambda); },
                std::numeric_limits<double>::quiet_NaN());
            res = solver.solve();

            // reported value from a fresh batch at the saddle point
            GeneralObjective fresh(cfg, rho, zeta.mean, sc.final_mc_samples, sc.seed, rtag ^ tag("final"), sc.workers);
            const double s2 = detail::sum_sq(res.d);
            double ld = 0.0;
            for (double v : res.d)
                ld += std::log1p(v * v);
            const int n = cfg.n(), r = cfg.rx, l = cfg.ell();
            double g = double(n) * r * s2 / (tau * rho) - r * ld + res.lambda * (tau * rho - s2);
            double var = 0.0;
            if (cfg.tau > n)
            {
                auto [mean, se, trinv] = fresh.expect_logdet(res.d);
                g += (tau - n) * mean;
                var += std::pow((tau - n) * se / tau, 2);
                // first-order propagation of the zeta estimate through g and u
                double dz = (tau - n) * trinv / tau;
                if (r > l)
                    dz -= (tau - n) * (r - l) / (tau * zeta.mean);
                var += std::pow(dz * zeta.std_error, 2);
            }
            if (oconst.mean < 1.0)
                var += std::pow(oconst.std_error / (oconst.mean * tau), 2);
            res.bound.value = u_general(cfg, rho, zeta, oconst) + g / tau;
            res.bound.std_error = std::sqrt(var);
            res.bound.kind = BoundKind::ub_general;
            res.bound.n_samples = sc.final_mc_samples;
            std::ostringstream note;
            note << "zeta=" << zeta.mean << "+-" << zeta.std_error << " a=" << oconst.mean << "+-" << oconst.std_error;
            res.bound.note = note.str();
        }
        res.bound.cfg = cfg;
        res.bound.rho = rho;
        res.bound.seed = sc.seed;
        if (res.boundary_hit)
            res.bound.note += (res.bound.note.empty() ? "" : "; ") + std::string("boundary hit");
        if (res.grid_fallback)
            res.bound.note += (res.bound.note.empty() ? "" : "; ") + std::string("lambda grid fallback");
        res.bound.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return res;
    }

    inline BoundEstimate saddle_solve(const ChannelConfig &cfg, double rho, SaddleMode mode, const SaddleConfig &sc)
    {
        return saddle_solve_detailed(cfg, rho, mode, sc).bound;
    }

    // E ln det(I + (rho / n) S S^H), S r x n Gaussian
    inline BoundEstimate perfect_csi_ub(const ChannelConfig &cfg, double rho, const McConfig &mc)
    {
        cfg.validate();
        if (!(rho > 0.0))
            throw DomainError("perfect_csi_ub: rho must be positive");
        const auto t0 = std::chrono::steady_clock::now();
        const int r = cfg.rx, n = cfg.n();
        const uint64_t base = stream_base({tag("ub_csi"), uint64_t(r), uint64_t(n), double_bits(rho)});
        auto est = mc_estimate(mc.n_samples, mc.master_seed, base, mc.workers,
                               [&](long long, RngStream &s)
                               {
                                   CMatrix S = sample_cgauss(r, n, s);
                                   CMatrix M = n <= r ? CMatrix(S.adjoint() * S) : CMatrix(S * S.adjoint());
                                   M *= rho / n;
                                   M.diagonal().array() += 1.0;
                                   Eigen::LLT<CMatrix> llt(M);
                                   double v = 0.0;
                                   for (int i = 0; i < M.rows(); ++i)
                                       v += 2.0 * std::log(llt.matrixL()(i, i).real());
                                   return v;
                               });
        BoundEstimate b;
        b.value = est.mean;
        b.std_error = est.std_error;
        b.kind = BoundKind::ub_csi;
        b.cfg = cfg;
        b.rho = rho;
        b.seed = mc.master_seed;
        b.n_samples = est.n_samples;
        b.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        return b;
    }
}
