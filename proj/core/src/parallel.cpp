// Copyright 2026 The VeilForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "veilforge/parallel.hpp"

#include <algorithm>
#include <thread>
#include <vector>

namespace veilforge {

void parallel_for_workers(int n, int threads, const std::function<void(int, int)>& fn) {
    if (n <= 0) return;
    const int t = std::clamp(threads, 1, n);
    if (t == 1) {
        for (int i = 0; i < n; ++i) fn(0, i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(t);
    // Static contiguous partition: worker w gets [w*n/t, (w+1)*n/t).
    for (int w = 0; w < t; ++w) {
        const int begin = static_cast<int>(static_cast<long long>(w) * n / t);
        const int end = static_cast<int>(static_cast<long long>(w + 1) * n / t);
        pool.emplace_back([&fn, w, begin, end] {
            for (int i = begin; i < end; ++i) fn(w, i);
        });
    }
    for (auto& th : pool) th.join();
}

void parallel_for(int n, int threads, const std::function<void(int)>& fn) {
    parallel_for_workers(n, threads, [&fn](int, int i) { fn(i); });
}

int default_threads() {
    const unsigned hw = std::thread::hardware_concurrency();
    return static_cast<int>(std::clamp(hw, 1u, 8u));
}

} // namespace veilforge
