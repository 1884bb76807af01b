// Copyright 2026-present the lire project
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <algorithm>
#include <cstddef>
#include <thread>
#include <vector>

namespace lire {

inline int resolve_threads(int threads) {
    if (threads > 0) return threads;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : static_cast<int>(hw);
}

// Runs fn(begin, end) over disjoint slices of [0, n). Callers must only
// write to disjoint output slots, which keeps results independent of the
// thread count.
template <typename Fn>
void parallel_for(size_t n, int threads, Fn&& fn) {
    threads = resolve_threads(threads);
    if (threads <= 1 || n < 2) {
        fn(size_t{0}, n);
        return;
    }
    const size_t n_workers = std::min(static_cast<size_t>(threads), n);
    const size_t chunk = (n + n_workers - 1) / n_workers;
    std::vector<std::thread> pool;
    pool.reserve(n_workers);
    for (size_t w = 0; w < n_workers; ++w) {
        const size_t begin = w * chunk;
        const size_t end = std::min(begin + chunk, n);
        if (begin >= end) break;
        pool.emplace_back([&fn, begin, end] { fn(begin, end); });
    }
    for (auto& t : pool) t.join();
}

}  // namespace lire
