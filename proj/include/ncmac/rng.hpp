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

#include <array>
#include <cmath>
#include <complex>
#include <cstring>
#include <cstdint>
#include <initializer_list>
#include <numbers>

namespace ncmac
{
    // Counter-based Philox4x32-10
    inline std::array<uint32_t, 4> philox4x32(std::array<uint32_t, 4> ctr, std::array<uint32_t, 2> key)
    {
        constexpr uint32_t M0 = 0xD2511F53u, M1 = 0xCD9E8D57u, W0 = 0x9E3779B9u, W1 = 0xBB67AE85u;
        for (int r = 0; r < 10; ++r)
        {
            if (r > 0)
                key[0] += W0, key[1] += W1;
            const uint64_t p0 = uint64_t(M0) * ctr[0], p1 = uint64_t(M1) * ctr[2];
            ctr = {uint32_t(p1 >> 32) ^ ctr[1] ^ key[0], uint32_t(p1), uint32_t(p0 >> 32) ^ ctr[3] ^ key[1], uint32_t(p0)};
        }
        return ctr;
    }

    inline uint64_t splitmix64(uint64_t x)
    {
        x += 0x9E3779B97F4A7C15ull;
        x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
        x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
        return x ^ (x >> 31);
    }

    // Hash of tags into a stream base; sample i then uses base ^ i
    inline uint64_t stream_base(std::initializer_list<uint64_t> parts)
    {
        uint64_t h = 0x6A09E667F3BCC909ull;
        for (uint64_t p : parts)
            h = splitmix64(h ^ splitmix64(p));
        return h;
    }

    inline uint64_t tag(const char *s)
    {
        uint64_t h = 1469598103934665603ull;
        for (; *s; ++s)
            h = (h ^ uint8_t(*s)) * 1099511628211ull;
        return h;
    }

    inline uint64_t double_bits(double x)
    {
        uint64_t u;
        static_assert(sizeof(u) == sizeof(x));
        std::memcpy(&u, &x, sizeof(u));
        return u;
    }

    // Sequence is a pure function of (master_seed, stream_id)
    class RngStream
    {
      public:
        using result_type = uint64_t;

        RngStream(uint64_t master_seed, uint64_t stream_id) : seed_(master_seed), stream_(stream_id) {}

        uint64_t master_seed() const { return seed_; }
        uint64_t stream_id() const { return stream_; }

        uint32_t next_u32()
        {
            if (pos_ == 4)
            {
                buf_ = philox4x32({uint32_t(counter_), uint32_t(counter_ >> 32), uint32_t(stream_), uint32_t(stream_ >> 32)},
                                  {uint32_t(seed_), uint32_t(seed_ >> 32)});
                ++counter_;
                pos_ = 0;
            }
            return buf_[pos_++];
        }
        uint64_t next_u64()
        {
            const uint64_t hi = next_u32();
            return (hi << 32) | next_u32();
        }
        uint64_t operator()() { return next_u64(); }
        static constexpr uint64_t min() { return 0; }
        static constexpr uint64_t max() { return ~uint64_t(0); }

        // uniform on (0, 1]
        double uniform() { return double((next_u64() >> 11) + 1) * 0x1.0p-53; }

        // circularly symmetric CN(0, 1)
        std::complex<double> cgauss()
        {
            const double r = std::sqrt(-std::log(uniform()));
            const double t = 2.0 * std::numbers::pi * uniform();
            return {r * std::cos(t), r * std::sin(t)};
        }

        double normal()
        {
            const double r = std::sqrt(-2.0 * std::log(uniform()));
            return r * std::cos(2.0 * std::numbers::pi * uniform());
        }

      private:
        uint64_t seed_, stream_;
        uint64_t counter_ = 0;
        std::array<uint32_t, 4> buf_{};
        int pos_ = 4;
    };
}
