#include "ellipsoid_lab/experiment.hpp"
#include "ellipsoid_lab/seeding.hpp"

#include <gtest/gtest.h>

#include <cstdint>
#include <set>

using namespace ellipsoid_lab;

namespace {

std::uint64_t reference_splitmix64(std::uint64_t x) {
    std::uint64_t z = x + 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace

TEST(Seeding, SplitmixMatchesPublishedFirstOutput) {
    // First output of the reference splitmix64 generator seeded with 0.
    EXPECT_EQ(splitmix64(0), 0xE220A8397B1DCDAFULL);
}

TEST(Seeding, SplitmixMatchesReference) {
    for (std::uint64_t x : {0ULL, 1ULL, 42ULL, 0xFFFFFFFFFFFFFFFFULL, 0x123456789ABCDEFULL}) {
        EXPECT_EQ(splitmix64(x), reference_splitmix64(x));
    }
}

TEST(Seeding, Mix64MatchesDocumentedRecurrence) {
    const std::uint64_t w[] = {42, 50, 62, 7};
    std::uint64_t h = reference_splitmix64(w[0]);
    for (std::uint64_t k = 1; k < 4; ++k) h = reference_splitmix64(h ^ reference_splitmix64(w[k] + k));
    EXPECT_EQ(mix64({42, 50, 62, 7}), h);
}

TEST(Seeding, GoldenValues) {
    EXPECT_EQ(mix64({0}), 16294208416658607535ULL);
    EXPECT_EQ(mix64({1, 2}), 10026334527595613153ULL);
    EXPECT_EQ(mix64({42, 50, 62, 7}), 12007133909073381874ULL);
    EXPECT_EQ(derived_seed(42, 50, 62, 7), 12007133909073381874ULL);
}

TEST(Seeding, OrderSensitiveAndCollisionFree) {
    EXPECT_NE(mix64({1, 2}), mix64({2, 1}));
    EXPECT_NE(mix64({0, 0}), mix64({0}));
    std::set<std::uint64_t> seen;
    for (std::uint64_t d = 2; d < 12; ++d)
        for (std::uint64_t m = 1; m < 12; ++m)
            for (std::uint64_t t = 0; t < 12; ++t) seen.insert(derived_seed(9, d, m, t));
    EXPECT_EQ(seen.size(), 10u * 11u * 12u);
}
