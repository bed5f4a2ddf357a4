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

#include "ncmac/randmat.hpp"

#include <cmath>
#include <filesystem>

using namespace ncmac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Covered tests:
// - Philox known-answer vector and stream independence
// - complex Gaussian moments and determinism
// - Stiefel orthonormality, isotropy, right-unitary invariance
// - MAC-USTM input power and structure
// - Gaussian input spectrum moments
// - zeta and order-constant estimates, worker-count independence
// - cache round trip and monotonicity

TEST_CASE("Philox known answer")
{
    auto z = philox4x32({0, 0, 0, 0}, {0, 0});
    CHECK(z[0] == 0x6627e8d5u);
    CHECK(z[1] == 0xe169c58du);
    CHECK(z[2] == 0xbc57ac4cu);
    CHECK(z[3] == 0x9b00dbd8u);
    auto f = philox4x32({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
    CHECK(f[0] == 0x408f276du);
    CHECK(f[1] == 0x41c83b0eu);
    CHECK(f[2] == 0xa20bc7c6u);
    CHECK(f[3] == 0x6d5451fdu);
}

TEST_CASE("complex Gaussian samples")
{
    RngStream s(42, 7);
    const int N = 100000;
    std::complex<double> mean = 0.0;
    double p = 0.0, re2 = 0.0;
    for (int i = 0; i < N; ++i)
    {
        auto z = s.cgauss();
        mean += z;
        p += std::norm(z);
        re2 += z.real() * z.real();
    }
    mean /= double(N);
    CHECK(std::abs(mean) <= 4.0 / std::sqrt(double(N)));
    CHECK_THAT(p / N, WithinAbs(1.0, 4.0 / std::sqrt(double(N))));
    CHECK_THAT(re2 / N, WithinAbs(0.5, 4.0 * std::sqrt(0.5) / std::sqrt(double(N))));

    RngStream a(9, 3), b(9, 3), c(9, 4);
    CMatrix ma = sample_cgauss(3, 5, a), mb = sample_cgauss(3, 5, b), mc = sample_cgauss(3, 5, c);
    CHECK(ma == mb);
    CHECK(ma != mc);
}

TEST_CASE("Stiefel samples")
{
    RngStream s(1, 1);
    for (int rep = 0; rep < 50; ++rep)
    {
        const int n = 1 + rep % 4, tau = n + rep % 5;
        CMatrix v = sample_stiefel(n, tau, s);
        CHECK((v * v.adjoint() - CMatrix::Identity(n, n)).cwiseAbs().maxCoeff() <= 1e-10);
    }

    const int N = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < N; ++i)
    {
        RngStream t(5, uint64_t(i));
        const double x = std::norm(sample_stiefel(1, 2, t)(0, 0));
        acc += x, acc2 += x * x;
    }
    const double m = acc / N, se = std::sqrt((acc2 / N - m * m) / N);
    CHECK(std::fabs(m - 0.5) <= 4.0 * se);

    RngStream u(8, 2);
    CMatrix v = sample_stiefel(3, 6, u);
    Eigen::HouseholderQR<CMatrix> qr(sample_cgauss(6, 6, u));
    CMatrix U = qr.householderQ();
    auto sv1 = singular_values(v), sv2 = singular_values(CMatrix(v * U));
    for (size_t i = 0; i < sv1.size(); ++i)
        CHECK_THAT(sv1[i], WithinAbs(sv2[i], 1e-10));
    CHECK_THROWS_AS(sample_stiefel(4, 3, u), DimensionError);
}

TEST_CASE("MAC-USTM input")
{
    RngStream s(3, 3);
    auto cfg = ChannelConfig{10, {1, 2, 1}, 4};
    for (int rep = 0; rep < 20; ++rep)
    {
        CMatrix x = sample_mac_ustm_input(cfg, 7.5, s);
        CHECK_THAT((x * x.adjoint()).trace().real(), WithinRel(10 * 7.5, 1e-9));
    }
    auto coop = ChannelConfig{6, {3}, 3};
    CMatrix x = sample_mac_ustm_input(coop, 2.0, s);
    CHECK((x * x.adjoint() - (6 * 2.0 / 3) * CMatrix::Identity(3, 3)).cwiseAbs().maxCoeff() <= 1e-12);

    // two single-antenna users: eigenvalues (tau rho / 2)(1 +- alpha), alpha = |v1 v2^H|
    auto two = ChannelConfig::single_antenna(2, 2, 5);
    for (int rep = 0; rep < 10; ++rep)
    {
        RngStream a(17, uint64_t(rep)), b(17, uint64_t(rep));
        CMatrix xx = sample_mac_ustm_input(two, 3.0, a);
        CMatrix v1 = sample_stiefel(1, 5, b), v2 = sample_stiefel(1, 5, b);
        const double alpha = std::abs((v1 * v2.adjoint())(0, 0));
        auto d = singular_values(xx);
        CHECK_THAT(d[0] * d[0], WithinRel(7.5 * (1 + alpha), 1e-10));
        CHECK_THAT(d[1] * d[1], WithinRel(7.5 * (1 - alpha), 1e-9));
    }
}

TEST_CASE("Gaussian input spectrum")
{
    auto cfg = ChannelConfig::single_antenna(3, 3, 5);
    const double rho = 2.0;
    const int N = 100000;
    double acc = 0.0, acc2 = 0.0;
    for (int i = 0; i < N; ++i)
    {
        RngStream s(11, uint64_t(i));
        auto d = sample_gaussian_input_spectrum(cfg, rho, s);
        double t = 0.0;
        for (double v : d.values())
            t += v * v;
        acc += t, acc2 += t * t;
        for (size_t k = 1; k < d.size(); ++k)
            REQUIRE(d[k - 1] > d[k]);
    }
    const double m = acc / N, se = std::sqrt((acc2 / N - m * m) / N);
    CHECK(std::fabs(m - cfg.tau * rho) <= 4.0 * se);

    auto one = ChannelConfig::single_antenna(1, 1, 4);
    acc = acc2 = 0.0;
    for (int i = 0; i < N; ++i)
    {
        RngStream s(12, uint64_t(i));
        const double t = std::pow(sample_gaussian_input_spectrum(one, 3.0, s)[0], 2) / 3.0;
        acc += t, acc2 += t * t;
    }
    const double m1 = acc / N, se1 = std::sqrt((acc2 / N - m1 * m1) / N);
    CHECK(std::fabs(m1 - 4.0) <= 4.0 * se1);
}

TEST_CASE("zeta estimates")
{
    McConfig mc{200000, 99, 0};
    auto z11 = estimate_zeta(1, 1, mc);
    CHECK(std::fabs(z11.mean - 1.0) <= 4.0 * z11.std_error);
    auto z12 = estimate_zeta(1, 2, mc);
    CHECK(std::fabs(z12.mean - 2.0) <= 4.0 * z12.std_error);
    auto z23 = estimate_zeta(2, 3, mc);
    // independent reference: 4.8725 +- 0.0015 (2e6 samples, separate generator)
    CHECK(std::fabs(z23.mean - 4.8725) <= 4.0 * std::hypot(z23.std_error, 0.0015));
    CHECK(z23.std_error > 0.0);
    CHECK(estimate_zeta(3, 0, mc).mean == 0.0);

    McConfig one_worker = mc, many = mc;
    one_worker.workers = 1;
    many.workers = 8;
    auto a = estimate_zeta(2, 3, one_worker), b = estimate_zeta(2, 3, many);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
}

TEST_CASE("order constant estimates")
{
    McConfig mc{200000, 5, 0};
    CHECK(estimate_order_constant(ChannelConfig::single_antenna(2, 2, 4), 10.0, mc).mean == 1.0);
    auto a = estimate_order_constant(ChannelConfig::single_antenna(1, 2, 4), 10.0, mc);
    CHECK(a.mean > 0.0);
    CHECK(a.mean < 1.0);
    CHECK(a.std_error > 0.0);
    auto hi = estimate_order_constant(ChannelConfig::single_antenna(1, 2, 4), 1e6, mc);
    CHECK(hi.mean >= 0.999);
}

TEST_CASE("constant cache")
{
    auto dir = std::filesystem::temp_directory_path() / "ncmac_cache_test";
    std::filesystem::remove_all(dir);
    auto path = dir / "constants.json";
    McConfig mc{20000, 3, 0};
    McEstimate z;
    {
        ConstantCache cache(path);
        z = estimate_zeta(2, 4, mc, &cache);
        estimate_order_constant(ChannelConfig::single_antenna(1, 3, 5), 4.0, mc, &cache);
        for (int r = 1; r <= 3; ++r)
            for (int c = 1; c <= 4; ++c)
                estimate_zeta(r, c, mc, &cache);
    }
    ConstantCache again(path);
    auto e = again.get("zeta:2:4");
    REQUIRE(e.has_value());
    CHECK(e->estimate.mean == z.mean);
    CHECK(e->estimate.std_error == z.std_error);
    CHECK(e->estimate.n_samples == z.n_samples);
    CHECK(e->master_seed == 3);
    CHECK(again.get("oconst:3:1:5:4").has_value());
    auto z2 = estimate_zeta(2, 4, mc, &again);
    CHECK(z2.mean == z.mean);

    for (int r = 1; r <= 3; ++r)
        for (int c = 1; c <= 4; ++c)
        {
            auto cur = again.get("zeta:" + std::to_string(r) + ":" + std::to_string(c))->estimate;
            if (c < 4)
            {
                auto right = again.get("zeta:" + std::to_string(r) + ":" + std::to_string(c + 1))->estimate;
                CHECK(right.mean + 3 * std::hypot(right.std_error, cur.std_error) >= cur.mean);
            }
            if (r < 3)
            {
                auto down = again.get("zeta:" + std::to_string(r + 1) + ":" + std::to_string(c))->estimate;
                CHECK(down.mean + 3 * std::hypot(down.std_error, cur.std_error) >= cur.mean);
            }
        }
    std::filesystem::remove_all(dir);
}
