#pragma once

#include <cstddef>
#include <thread>
#include <vector>

namespace rcp {

// Static-chunked parallel loop over replica indices.  Each body call owns
// replica i exclusively; callers aggregate per-index results afterwards in
// index order, so output never depends on scheduling.
template <class Body>
void parallel_replicas(std::size_t n, const Body& body) {
    unsigned hw = std::thread::hardware_concurrency();
    if (hw == 0) hw = 1;
    const std::size_t workers = std::min<std::size_t>(hw, n == 0 ? 1 : n);
    if (workers <= 1) {
        for (std::size_t i = 0; i < n; ++i) body(i);
        return;
    }
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        threads.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers) body(i);
        });
    }
    for (auto& t : threads) t.join();
}

}  // namespace rcp
