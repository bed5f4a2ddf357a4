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

#include "ncmac/quadrature.hpp"
#include "ncmac/specfn.hpp"

#include <cmath>

using namespace ncmac;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

// Covered tests:
// - log_gamma, digamma, log_beta reference values and domain errors
// - log_gamma_product values and increments
// - upper_exp_tail reference values, telescoping, positivity
// - Beta integral by quadrature

TEST_CASE("log_gamma values")
{
    CHECK(log_gamma(1.0) == 0.0);
    CHECK(log_gamma(2.0) == 0.0);
    CHECK_THAT(log_gamma(5.0), WithinRel(std::log(24.0), 1e-14));
    CHECK_THAT(log_gamma(0.5), WithinRel(0.5 * std::log(M_PI), 1e-14));
    CHECK_THROWS_AS(log_gamma(0.0), DomainError);
    CHECK_THROWS_AS(log_gamma(-1.5), DomainError);
}

TEST_CASE("digamma values")
{
    const double euler = 0.57721566490153286061;
    CHECK_THAT(digamma(1.0), WithinAbs(-euler, 1e-14));
    CHECK_THAT(digamma(2.0), WithinAbs(1.0 - euler, 1e-14));
    CHECK_THAT(digamma(10.0), WithinAbs(2.2517525890667211076, 1e-13));
    CHECK_THAT(digamma(0.5), WithinAbs(-1.9635100260214234794, 1e-13));
    for (double x : {0.3, 1.7, 4.2, 33.0})
        CHECK_THAT(digamma(x + 1.0) - digamma(x), WithinAbs(1.0 / x, 1e-12));
    CHECK_THROWS_AS(digamma(0.0), DomainError);
}

TEST_CASE("log_beta values")
{
    CHECK_THAT(log_beta(1, 1), WithinAbs(0.0, 1e-15));
    CHECK_THAT(log_beta(2, 1), WithinRel(std::log(0.5), 1e-14));
    CHECK_THAT(log_beta(3, 4), WithinRel(std::log(1.0 / 60.0), 1e-14));
    CHECK_THROWS_AS(log_beta(0.0, 1.0), DomainError);
    for (double a : {1.0, 2.0, 5.0})
        for (double b : {1.0, 2.0, 5.0})
        {
            double q = integrate([&](double t) { return std::pow(t, a - 1) * std::pow(1 - t, b - 1); }, 0.0, 1.0);
            CHECK_THAT(std::exp(log_beta(a, b)), WithinRel(q, 1e-8));
        }
}

TEST_CASE("log_gamma_product")
{
    CHECK(log_gamma_product(0) == 0.0);
    CHECK(log_gamma_product(1) == 0.0);
    CHECK_THAT(log_gamma_product(3), WithinRel(std::log(2.0), 1e-14));
    CHECK_THAT(log_gamma_product(4), WithinRel(std::log(12.0), 1e-14));
    for (int n = 1; n <= 100; ++n)
        CHECK_THAT(log_gamma_product(n + 1) - log_gamma_product(n), WithinRel(std::lgamma(n + 1.0), 1e-12));
    CHECK_THROWS_AS(log_gamma_product(-1), DomainError);
}

TEST_CASE("upper_exp_tail reference values")
{
    auto v = upper_exp_tail(5.0, 0);
    CHECK(v.sign == 1);
    CHECK_THAT(v.log_magnitude, WithinRel(5.0, 1e-15));
    CHECK(upper_exp_tail(0.0, 3).is_zero());
    CHECK_THAT(upper_exp_tail(1.0, 2).to_double(), WithinRel(std::exp(1.0) - 2.0, 1e-13));

    // log values from a 40-digit oracle
    struct Case { double x; int n; double log_value; };
    const Case cases[] = {
        {1, 2, -0.33089326820405453357},   {0.1, 5, -16.283650781624363954}, {10, 3, 9.9972267624134269818},
        {10, 30, -5.19783233962596554},     {100, 50, 99.99999998821549921},  {100, 150, 86.817998324285289553},
        {600, 7, 600.0},                    {0.5, 40, -138.03426046931916749}, {50, 50, 49.343779201612431321},
    };
    for (const auto &c : cases)
    {
        auto g = upper_exp_tail(c.x, c.n);
        CHECK(g.sign == 1);
        // relative accuracy of the value is absolute accuracy of its log
        CHECK_THAT(g.log_magnitude, WithinAbs(c.log_value, 1e-10));
    }
    CHECK_THROWS_AS(upper_exp_tail(-1.0, 2), DomainError);
    CHECK_THROWS_AS(upper_exp_tail(1.0, -2), DomainError);
}

TEST_CASE("upper_exp_tail telescoping and positivity")
{
    for (double x : {0.1, 1.0, 10.0, 100.0})
        for (int n = 0; n <= 50; ++n)
        {
            auto a = upper_exp_tail(x, n);
            auto b = upper_exp_tail(x, n + 1);
            auto term = LogValue::from_log(n * std::log(x) - std::lgamma(n + 1.0));
            auto rhs = b + term;
            CHECK(a.sign == 1);
            CHECK_THAT(a.log_magnitude, WithinAbs(rhs.log_magnitude, 1e-9));
        }
}

TEST_CASE("upper_exp_tail extended precision agrees")
{
    for (double x : {0.3, 2.0, 17.0, 250.0})
        for (int n : {0, 1, 4, 20, 120})
        {
            auto d = upper_exp_tail(x, n);
            double lv = std::log(static_cast<double>(upper_exp_tail_t<long double>(x, n)));
            CHECK_THAT(d.log_magnitude, WithinAbs(lv, 1e-10));
        }
}
