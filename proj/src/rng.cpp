#include "cope/rng.hpp"

#include <cmath>
#include <numbers>

namespace cope {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

std::uint64_t RngKey::hash(std::uint64_t counter) const {
    std::uint64_t h = splitmix64(seed);
    h = splitmix64(h ^ trial);
    h = splitmix64(h ^ (agent * 0xd1b54a32d192ed03ULL));
    h = splitmix64(h ^ static_cast<std::uint64_t>(purpose));
    return splitmix64(h ^ (counter * 0x8cb92ba72f3d8dd7ULL));
}

double uniform01(const RngKey& key, std::uint64_t counter) {
    // 53 random bits, shifted by half an ulp so 0 and 1 are never hit.
    const std::uint64_t bits = key.hash(counter) >> 11;
    return (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
}

double standard_normal(const RngKey& key, std::uint64_t k) {
    const double u1 = uniform01(key, 2 * k);
    const double u2 = uniform01(key, 2 * k + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a, std::uint64_t b) {
    return splitmix64(splitmix64(splitmix64(master) ^ a) ^ (b + 0x632be59bd9b4e019ULL));
}

}  // namespace cope
