#include "ellipsoid_lab/seeding.hpp"

namespace ellipsoid_lab {

std::uint64_t splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9E3779B97F4A7C15ULL;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
}

std::uint64_t mix64(std::initializer_list<std::uint64_t> words) {
    std::uint64_t h = 0;
    std::uint64_t k = 0;
    for (std::uint64_t w : words) {
        h = (k == 0) ? splitmix64(w) : splitmix64(h ^ splitmix64(w + k));
        ++k;
    }
    return h;
}

}  // namespace ellipsoid_lab
