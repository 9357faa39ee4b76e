#ifndef ALPHAFAIR_SRC_PARALLEL_HPP_
#define ALPHAFAIR_SRC_PARALLEL_HPP_

#include <algorithm>
#include <cstddef>
#include <exception>
#include <thread>
#include <vector>

namespace alphafair::detail {

// Runs fn(i) for i in [0, n) over contiguous chunks. fn must only write
// state owned by index i, so the result does not depend on the worker count.
template <typename Fn>
void parallel_for(std::size_t n, int workers, Fn&& fn) {
    const std::size_t w = std::min<std::size_t>(static_cast<std::size_t>(std::max(workers, 1)), n);
    if (w <= 1) {
        for (std::size_t i = 0; i < n; ++i) fn(i);
        return;
    }
    std::vector<std::exception_ptr> errors(w);
    {
        std::vector<std::jthread> threads;
        threads.reserve(w);
        for (std::size_t t = 0; t < w; ++t) {
            threads.emplace_back([&, t] {
                const std::size_t begin = n * t / w;
                const std::size_t end = n * (t + 1) / w;
                try {
                    for (std::size_t i = begin; i < end; ++i) fn(i);
                } catch (...) {
                    errors[t] = std::current_exception();
                }
            });
        }
    }
    for (auto& e : errors) {
        if (e) std::rethrow_exception(e);
    }
}

}  // namespace alphafair::detail

#endif  // ALPHAFAIR_SRC_PARALLEL_HPP_
