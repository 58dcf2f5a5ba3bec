// SPDX-License-Identifier: Apache-2.0
//
// nearfield-bd: near-field array gain and beam depth analysis
// Copyright (C) 2026 The nearfield-bd Authors
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

#ifndef NFBD_PARALLEL_HPP
#define NFBD_PARALLEL_HPP

#include "error.hpp"

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

namespace nfbd
{
    /// Number of worker threads; 0 means "use the hardware concurrency".
    inline unsigned resolve_threads(unsigned requested)
    {
        if (requested > 0)
            return requested;
        return std::max(1u, std::thread::hardware_concurrency());
    }

    /// Calls body(i) for i in [0, count) on up to `threads` workers. Indices are handed out
    /// dynamically; callers write results into per-index slots, so output order is fixed.
    /// The first exception thrown by any body is rethrown after all workers have joined.
    template <typename Body>
    void parallel_for(std::size_t count, unsigned threads, Body &&body)
    {
        const unsigned workers = static_cast<unsigned>(std::min<std::size_t>(resolve_threads(threads), count));
        if (workers <= 1)
        {
            for (std::size_t i = 0; i < count; ++i)
                body(i);
            return;
        }

        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        auto run = [&]
        {
            for (std::size_t i = next++; i < count; i = next++)
            {
                try
                {
                    body(i);
                }
                catch (...)
                {
                    std::lock_guard<std::mutex> lock(failure_mutex);
                    if (!failure)
                        failure = std::current_exception();
                }
            }
        };
        std::vector<std::thread> pool;
        pool.reserve(workers - 1);
        for (unsigned t = 1; t < workers; ++t)
            pool.emplace_back(run);
        run();
        for (auto &th : pool)
            th.join();
        if (failure)
            std::rethrow_exception(failure);
    }
    /// Like parallel_for, but every failing index is recorded and reported together as a sweep_error.
    template <typename Body>
    void parallel_sweep(std::size_t count, unsigned threads, Body &&body)
    {
        std::vector<std::string> errors(count);
        parallel_for(count, threads,
                     [&](std::size_t i)
                     {
                         try
                         {
                             body(i);
                         }
                         catch (const std::exception &e)
                         {
                             errors[i] = e.what();
                             if (errors[i].empty())
                                 errors[i] = "unknown failure";
                         }
                     });
        std::vector<std::pair<std::size_t, std::string>> failures;
        for (std::size_t i = 0; i < count; ++i)
            if (!errors[i].empty())
                failures.emplace_back(i, std::move(errors[i]));
        if (!failures.empty())
            throw sweep_error(std::move(failures));
    }
} // namespace nfbd

#endif
