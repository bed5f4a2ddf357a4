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

#include <catch2/catch_amalgamated.hpp>
#include "ncmac/capacity_ub.hpp"
#include "oracles.hpp"

#include <algorithm>
#include <random>

using namespace ncmac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

namespace
{
    McConfig quick_mc(long long n) { return {n, 7, 0}; }
}

TEST_CASE("u_general term sums")
{
    const McEstimate one{1.0, 0.0, 1};
    CHECK_THAT(u_general(ChannelConfig::single_antenna(1, 1, 2), 10.0, {0.0, 0.0, 1}, one),
               WithinAbs(0.547866136776995499, 1e-14));
    CHECK_THAT(u_general({3, {1}, 2}, 10.0, {2.5, 0.0, 1}, {0.8, 0.0, 1}), WithinAbs(0.0845075225672818703, 1e-14));
    for (auto [m, tau] : {std::pair{1, 2}, {2, 5}, {4, 10}, {3, 3}})
    {
        const auto cfg = ChannelConfig::single_antenna(m, m, tau);
        for (double rho : {0.1, 1.0, 10.0, 1000.0})
            CHECK_THAT(u_general(cfg, rho, {3.7, 0.1, 1}, one), WithinAbs(u_star(cfg, rho), 1e-12));
    }
    CHECK_THROWS_AS(u_general(ChannelConfig::single_antenna(1, 1, 2), 0.0, {}, one), DomainError);
    CHECK_THROWS_AS(u_general({3, {1}, 2}, 1.0, {0.0, 0.0, 1}, one), DomainError);
}

TEST_CASE("u_general slope in ln rho")
{
    const ChannelConfig cfg{6, {1, 1}, 3};
    const double z = 4.0;
    for (double rho : {1e2, 1e4})
    {
        const double h = 1e-3;
        const double s = (u_general(cfg, rho * std::exp(h), {z, 0, 1}, {0.5, 0, 1}) -
                          u_general(cfg, rho * std::exp(-h), {z, 0, 1}, {0.5, 0, 1})) / (2 * h);
        CHECK_THAT(s, WithinAbs(3.0 * 2.0 / 6.0, 2.0 / rho));
    }
}

TEST_CASE("g_star against Monte Carlo")
{
    struct Case
    {
        int m, tau;
        std::vector<double> d;
        double lambda;
    };
    for (const auto &c : {Case{1, 4, {2.0}, 0.0}, Case{2, 6, {3.0, 1.0}, 0.3}})
    {
        const double rho = 10.0, tau = c.tau;
        const auto cfg = ChannelConfig::single_antenna(c.m, c.m, c.tau);
        std::vector<double> l;
        double s2 = 0.0, ld = 0.0;
        for (double v : c.d)
            l.push_back(1.0 + v * v), s2 += v * v, ld += std::log1p(v * v);
        auto [mean, se] = oracle::mc_logdet(l, c.tau, 1000000, 4242 + c.m);
        const double analytic = c.m * c.m * s2 / (tau * rho) - c.m * ld + c.lambda * (tau * rho - s2);
        const double ref = analytic + (tau - c.m) * mean;
        CHECK(std::fabs(g_star(c.d, c.lambda, cfg, rho) - ref) <= 4.0 * (tau - c.m) * se);
    }
}

TEST_CASE("g_star properties")
{
    const auto cfg = ChannelConfig::single_antenna(3, 3, 8);
    const double rho = 5.0, tr = 8 * rho;
    // lambda term vanishes on the power constraint
    std::vector<double> d = {std::sqrt(0.6 * tr), std::sqrt(0.3 * tr), std::sqrt(0.1 * tr)};
    CHECK_THAT(g_star(d, 0.2, cfg, rho), WithinAbs(g_star(d, 7.0, cfg, rho), 1e-9));

    // function of the spectrum only
    std::mt19937_64 gen(3);
    std::uniform_real_distribution<double> u(0.1, 4.0);
    for (int rep = 0; rep < 5; ++rep)
    {
        std::vector<double> v = {u(gen), u(gen), u(gen)};
        std::sort(v.begin(), v.end(), std::greater<double>());
        const double ref = g_star(v, 0.4, cfg, rho);
        auto w = v;
        std::shuffle(w.begin(), w.end(), gen);
        std::sort(w.begin(), w.end(), std::greater<double>());
        CHECK(g_star(w, 0.4, cfg, rho) == ref);
    }

    // repeated entries route through the perturbed path and stay continuous
    const double a = g_star({2.0, 2.0, 1.0}, 0.4, cfg, rho);
    const double b = g_star({2.0 * (1 + 1e-4), 2.0 * (1 - 1e-4), 1.0}, 0.4, cfg, rho);
    CHECK_THAT(a, WithinAbs(b, 1e-6));
    // D = 0 limit
    const double z = g_star({0.0, 0.0, 0.0}, 0.4, cfg, rho);
    CHECK_THAT(g_star({1e-4, 0.9e-4, 0.8e-4}, 0.4, cfg, rho), WithinAbs(z, 1e-6));

    CHECK_THROWS_AS(g_star({1.0, 2.0, 0.5}, 0.0, cfg, rho), DegenerateSpectrumError);
    CHECK_THROWS_AS(g_star({1.0}, 0.0, cfg, rho), DimensionError);
}

TEST_CASE("saddle solve matches the exhaustive grid")
{
    for (auto [tau, rho] : {std::pair{2, 1.0}, {4, 10.0}})
    {
        const auto cfg = ChannelConfig::single_antenna(1, 1, tau);
        auto res = saddle_solve_detailed(cfg, rho, SaddleMode::square, {});
        const double grid = oracle::saddle_grid(tau, rho);
        INFO("tau=" << tau << " rho=" << rho << " lambda*=" << res.lambda);
        CHECK_THAT(res.bound.value, WithinAbs(grid, 1e-3));
        CHECK(res.lambda >= 1.0 / (tau * rho));
        for (const auto &t : res.trace)
            CHECK(t.lambda > 1.0 / (tau * rho));
    }
}

TEST_CASE("saddle trace envelope and convexity")
{
    const auto cfg = ChannelConfig::single_antenna(2, 2, 6);
    const double rho = 20.0, tr = 6 * rho;
    auto res = saddle_solve_detailed(cfg, rho, SaddleMode::square, {});
    REQUIRE(res.trace.size() >= 5);
    CHECK_FALSE(res.grid_fallback);
    // phi(lambda_j) >= g(D_i, lambda_j) for every pair of trace points
    for (const auto &a : res.trace)
        for (const auto &b : res.trace)
        {
            const double lin = a.phi + (b.lambda - a.lambda) * (tr - a.sum_d2);
            CHECK(b.phi >= lin - 1e-6 * (1.0 + std::fabs(b.phi)));
        }
    // saddle lies above the perfect-CSI-free trivial limit of zero
    CHECK(res.bound.value > 0.0);
}

TEST_CASE("ub_square high-SNR slope, two users")
{
    const auto cfg = ChannelConfig::single_antenna(2, 2, 6);
    const double u20 = saddle_solve(cfg, db_to_linear(20), SaddleMode::square, {}).value;
    const double u40 = saddle_solve(cfg, db_to_linear(40), SaddleMode::square, {}).value;
    const double slope = (u40 - u20) / std::log(100.0);
    CHECK_THAT(slope, WithinRel(2.0 * (1.0 - 2.0 / 6.0), 0.1));
}

TEST_CASE("perfect CSI bound")
{
    auto b = perfect_csi_ub(ChannelConfig::single_antenna(1, 1, 2), 1.0, quick_mc(200000));
    CHECK(std::fabs(b.value - 0.596347362323194) <= 4.0 * b.std_error);
    CHECK(b.kind == BoundKind::ub_csi);
    auto s = perfect_csi_ub(ChannelConfig::single_antenna(2, 2, 2), 1e-4, quick_mc(200000));
    CHECK(std::fabs(s.value - 2e-4) <= 4.0 * s.std_error + 2e-8);
    double prev = -1.0;
    for (double db : {-10.0, 0.0, 10.0, 20.0, 30.0})
    {
        const double v = perfect_csi_ub(ChannelConfig::single_antenna(3, 2, 4), db_to_linear(db), quick_mc(20000)).value;
        CHECK(v > prev);
        prev = v;
    }
}

TEST_CASE("g_general")
{
    const ChannelConfig cfg{5, {1, 1}, 3};
    const double rho = 10.0, tr = 5 * rho;
    const McEstimate zeta{2.0, 0.0, 1};
    std::vector<double> d = {std::sqrt(0.7 * tr), std::sqrt(0.3 * tr)};
    auto a = g_general(d, 0.1, cfg, rho, zeta, quick_mc(5000));
    auto b = g_general(d, 3.0, cfg, rho, zeta, quick_mc(5000));
    CHECK_THAT(a.mean, WithinAbs(b.mean, 1e-9));
    CHECK(a.std_error > 0.0);

    // D -> 0 against a direct estimate of E ln det(G G^H + zeta I)
    {
        std::mt19937_64 gen(99);
        std::normal_distribution<double> nd(0.0, std::sqrt(0.5));
        const int N = 200000;
        double s = 0.0, s2 = 0.0;
        for (int it = 0; it < N; ++it)
        {
            Eigen::MatrixXcd G(3, 2);
            for (int i = 0; i < 3; ++i)
                for (int j = 0; j < 2; ++j)
                    G(i, j) = {nd(gen), nd(gen)};
            Eigen::MatrixXcd W = G * G.adjoint() + zeta.mean * Eigen::MatrixXcd::Identity(3, 3);
            const double v = std::log(W.determinant().real());
            s += v, s2 += v * v;
        }
        const double mean = s / N, se = std::sqrt((s2 / N - mean * mean) / (N - 1));
        const double lam = 0.2;
        auto g0 = g_general({1e-9, 0.9e-9}, lam, cfg, rho, zeta, quick_mc(200000));
        const double ref = 3.0 * mean + lam * tr;
        CHECK(std::fabs(g0.mean - ref) <= 4.0 * std::hypot(g0.std_error, 3.0 * se));
    }

    // n = r with vanishing zeta: E ln det(G A G^H) = ln det A + sum of digammas (complex Wishart)
    {
        const ChannelConfig sq{4, {1, 1}, 2};
        std::vector<double> dd = {2.0, 0.5};
        auto g = g_general(dd, 0.0, sq, 1.0, {1e-9, 0.0, 1}, quick_mc(400000));
        const double ld = std::log1p(4.0) + std::log1p(0.25);
        const double e = ld + digamma(2.0) + digamma(1.0);
        const double ref = 4.0 * 4.25 / 4.0 - 2.0 * ld + 2.0 * e;
        CHECK(std::fabs(g.mean - ref) <= 4.0 * g.std_error + 1e-6);
    }
}

TEST_CASE("saddle solve general mode")
{
    SaddleConfig sc;
    sc.constants_mc = {100000, 1, 0};
    sc.inner_mc_samples = 1000;
    sc.final_mc_samples = 20000;
    const ChannelConfig cfg{6, {1, 1}, 3};
    auto r1 = saddle_solve_detailed(cfg, 10.0, SaddleMode::general, sc);
    CHECK(std::isfinite(r1.bound.value));
    CHECK(r1.bound.std_error > 0.0);
    CHECK(r1.bound.kind == BoundKind::ub_general);
    // must dominate the coherent bound's noncoherent counterpart trivially above zero
    CHECK(r1.bound.value > 0.0);
    auto r2 = saddle_solve_detailed(cfg, 10.0, SaddleMode::general, sc);
    CHECK(r1.bound.value == r2.bound.value);
    CHECK_THROWS_AS(saddle_solve(cfg, 10.0, SaddleMode::square, sc), DimensionError);
}
