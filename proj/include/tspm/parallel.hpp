/*
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <exception>
#include <mutex>
#include <span>
#include <thread>
#include <vector>

namespace tspm::parallel {

/// 0 means "auto": one worker per hardware thread.
inline unsigned resolveWorkers(unsigned requested) {
    if (requested > 0) return requested;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw == 0 ? 1 : hw;
}

/// Runs fn(workerIndex) on `workers` threads and rethrows the first exception.
template <typename Fn>
void runWorkers(unsigned workers, Fn &&fn) {
    if (workers <= 1) {
        fn(0u);
        return;
    }
    std::exception_ptr failure;
    std::mutex failureMutex;
    std::vector<std::jthread> threads;
    threads.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            try {
                fn(w);
            } catch (...) {
                std::lock_guard lock(failureMutex);
                if (!failure) failure = std::current_exception();
            }
        });
    }
    threads.clear();
    if (failure) std::rethrow_exception(failure);
}

/// Dynamic scheduling over task indices [0, count); each index is handled exactly once.
template <typename Fn>
void forEachTask(std::size_t count, unsigned workers, Fn &&fn) {
    workers = static_cast<unsigned>(std::min<std::size_t>(std::max(1u, workers), std::max<std::size_t>(count, 1)));
    std::atomic<std::size_t> next{0};
    runWorkers(workers, [&](unsigned) {
        for (std::size_t i = next.fetch_add(1, std::memory_order_relaxed); i < count;
             i = next.fetch_add(1, std::memory_order_relaxed)) {
            fn(i);
        }
    });
}

/// Sorts `data` with `workers` threads: per-slice std::sort, then pairwise merge rounds.
/// The result equals std::sort whenever `less` is a strict total order on the elements.
template <typename T, typename Less>
void sort(std::vector<T> &data, Less less, unsigned workers, std::size_t minSlice = std::size_t{1} << 16) {
    const std::size_t n = data.size();
    std::size_t slices = std::min<std::size_t>(workers, n / std::max<std::size_t>(minSlice, 1));
    if (slices <= 1) {
        std::sort(data.begin(), data.end(), less);
        return;
    }

    std::vector<std::size_t> bounds(slices + 1);
    for (std::size_t i = 0; i <= slices; ++i) bounds[i] = n * i / slices;

    forEachTask(slices, workers, [&](std::size_t i) {
        std::sort(data.begin() + bounds[i], data.begin() + bounds[i + 1], less);
    });

    std::vector<T> buffer(n);
    std::vector<T> *src = &data;
    std::vector<T> *dst = &buffer;
    while (bounds.size() > 2) {
        const std::size_t runs = bounds.size() - 1;
        const std::size_t pairs = runs / 2;
        forEachTask((runs + 1) / 2, workers, [&](std::size_t p) {
            const std::size_t lo = bounds[2 * p];
            if (p < pairs) {
                std::merge(src->begin() + lo, src->begin() + bounds[2 * p + 1], src->begin() + bounds[2 * p + 1],
                           src->begin() + bounds[2 * p + 2], dst->begin() + lo, less);
            } else {
                std::copy(src->begin() + lo, src->begin() + bounds[2 * p + 1], dst->begin() + lo);
            }
        });
        std::vector<std::size_t> next;
        for (std::size_t i = 0; i < bounds.size(); i += 2) next.push_back(bounds[i]);
        if (next.back() != n) next.push_back(n);
        bounds = std::move(next);
        std::swap(src, dst);
    }
    if (src != &data) data.swap(buffer);
}

}  // namespace tspm::parallel
