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
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

namespace ncmac
{
    inline int default_workers()
    {
        const unsigned h = std::thread::hardware_concurrency();
        return h == 0 ? 1 : int(h);
    }

    // Runs fn(i) for i in [0, n); work is claimed in blocks, so results must be written by index
    template <class Fn>
    void parallel_for(size_t n, int workers, Fn &&fn, size_t block = 64)
    {
        if (workers <= 0)
            workers = default_workers();
        workers = int(std::min<size_t>(size_t(workers), (n + block - 1) / block));
        if (workers <= 1)
        {
            for (size_t i = 0; i < n; ++i)
                fn(i);
            return;
        }
        std::atomic<size_t> next{0};
        std::exception_ptr err;
        std::mutex err_mtx;
        auto body = [&]
        {
            for (;;)
            {
                const size_t b = next.fetch_add(block);
                if (b >= n)
                    return;
                try
                {
                    for (size_t i = b; i < std::min(n, b + block); ++i)
                        fn(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(err_mtx);
                    if (!err)
                        err = std::current_exception();
                    next = n;
                    return;
                }
            }
        };
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w)
            pool.emplace_back(body);
        for (auto &t : pool)
            t.join();
        if (err)
            std::rethrow_exception(err);
    }
}
