#pragma once

#include <cstdint>
#include <random>

namespace rcp {

// splitmix64 finalizer; good avalanche, cheap.
inline std::uint64_t mix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

enum class StreamKind : std::uint64_t {
    Death = 1,
    Arrow = 2,
    Replica = 3,
    Scratch = 4,
};

// Every random stream in the project is seeded from (master seed, replica,
// kind, coordinates).  Identical keys give identical streams regardless of
// query order; distinct keys are independent for all practical purposes.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t replica,
                                 StreamKind kind, std::int64_t a = 0,
                                 std::int64_t b = 0) {
    std::uint64_t h = mix64(master);
    h = mix64(h ^ replica);
    h = mix64(h ^ static_cast<std::uint64_t>(kind));
    h = mix64(h ^ static_cast<std::uint64_t>(a));
    h = mix64(h ^ static_cast<std::uint64_t>(b));
    return h;
}

using Rng = std::mt19937_64;

inline Rng make_stream(std::uint64_t master, std::uint64_t replica,
                       StreamKind kind, std::int64_t a = 0,
                       std::int64_t b = 0) {
    return Rng(derive_seed(master, replica, kind, a, b));
}

// Uniform in (0,1); never returns 0 or 1 so log/pow inversions are safe.
inline double uniform01(Rng& rng) {
    const double u = (static_cast<double>(rng() >> 11) + 0.5) * 0x1.0p-53;
    return u;
}

}  // namespace rcp
