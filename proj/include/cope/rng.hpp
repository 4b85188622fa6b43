#pragma once

#include <cstdint>

namespace cope {

// Draw purposes. Keeping them distinct decorrelates streams that share
// the same (seed, trial, agent) coordinates.
enum class Purpose : std::uint64_t {
    World = 1,
    Type = 2,
    Noise = 3,
    TieBreak = 4,
    Oracle = 5,
    Trial = 6,
};

std::uint64_t splitmix64(std::uint64_t x);

// Counter-based key. Every draw is a pure function of its key, so trials
// can run in any order and on any thread.
struct RngKey {
    std::uint64_t seed = 0;
    std::uint64_t trial = 0;
    std::uint64_t agent = 0;
    Purpose purpose = Purpose::World;

    std::uint64_t hash(std::uint64_t counter = 0) const;
};

// Uniform on the open interval (0, 1).
double uniform01(const RngKey& key, std::uint64_t counter = 0);

// Standard normal by Box-Muller from counters 2k and 2k+1.
double standard_normal(const RngKey& key, std::uint64_t k = 0);

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b = 0);

}  // namespace cope
