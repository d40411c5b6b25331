#include <catch2/catch_amalgamated.hpp>

#include "wks/rng.hpp"

#include <cmath>
#include <set>
#include <vector>

using namespace wks;

TEST_CASE("identical seeds give identical streams", "[rng]") {
    PathRng a = PathRng::from_seed(123);
    PathRng b = PathRng::from_seed(123);
    for (int i = 0; i < 1000; ++i) CHECK(a.next() == b.next());

    PathRng c = PathRng::from_seed(124);
    PathRng d = PathRng::from_seed(123);
    int diff = 0;
    for (int i = 0; i < 64; ++i) diff += (c.next() != d.next());
    CHECK(diff > 60);
}

TEST_CASE("child streams depend only on the path, not on draws", "[rng]") {
    PathRng fresh = PathRng::from_seed(55);
    PathRng drained = PathRng::from_seed(55);
    for (int i = 0; i < 17; ++i) drained.next();

    PathRng c1 = fresh.child(3);
    PathRng c2 = drained.child(3);
    CHECK(c1.key() == c2.key());
    for (int i = 0; i < 100; ++i) CHECK(c1.next() == c2.next());

    // siblings and grandchildren are distinct streams
    std::set<std::uint64_t> keys;
    PathRng root = PathRng::from_seed(55);
    for (std::uint64_t i = 0; i < 32; ++i) {
        keys.insert(root.child(i).key());
        keys.insert(root.child(i).child(0).key());
    }
    keys.insert(root.key());
    CHECK(keys.size() == 65);
}

TEST_CASE("uniform_below stays in range and is roughly flat", "[rng]") {
    PathRng rng = PathRng::from_seed(991);
    const std::uint64_t n = 7;
    const int draws = 70000;
    std::vector<int> buckets(n, 0);
    for (int i = 0; i < draws; ++i) {
        std::uint64_t v = rng.uniform_below(n);
        REQUIRE(v < n);
        ++buckets[static_cast<std::size_t>(v)];
    }
    // each bucket within 6 sigma of draws/n
    const double mean = static_cast<double>(draws) / static_cast<double>(n);
    const double sigma = std::sqrt(mean * (1.0 - 1.0 / static_cast<double>(n)));
    for (int count : buckets) CHECK(std::abs(count - mean) < 6.0 * sigma);

    CHECK(rng.uniform_below(1) == 0);
    CHECK_THROWS_AS(rng.uniform_below(0), std::domain_error);
}

TEST_CASE("uniform01 lands in the half-open unit interval", "[rng]") {
    PathRng rng = PathRng::from_seed(17);
    double sum = 0.0;
    for (int i = 0; i < 40000; ++i) {
        double u = rng.uniform01();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    CHECK(std::abs(sum / 40000.0 - 0.5) < 0.01);
}
