#pragma once

// Counter-based pseudo-random generator keyed by (seed, path). Every node of
// a recursion tree derives its own key from the parent key and its child
// index, so the random choices inside one subtree do not depend on the order
// in which sibling subtrees are generated. The stream itself is the
// SplitMix64 sequence of the key.

#include <cstdint>
#include <stdexcept>

namespace wks {

class PathRng {
public:
    static PathRng from_seed(std::uint64_t seed) {
        return PathRng(mix64(seed ^ kSeedSalt));
    }

    // Derives the key for child `index`; independent of this stream's counter.
    PathRng child(std::uint64_t index) const {
        return PathRng(mix64(key_ ^ mix64(index ^ kChildSalt)));
    }

    std::uint64_t key() const { return key_; }

    std::uint64_t next() {
        return mix64(key_ + (++counter_) * kGolden);
    }

    // Unbiased sample from [0, n) by rejection.
    std::uint64_t uniform_below(std::uint64_t n) {
        if (n == 0) throw std::domain_error("uniform_below: empty range");
        const std::uint64_t min = (0 - n) % n;  // 2^64 mod n
        std::uint64_t r;
        do {
            r = next();
        } while (r < min);
        return r % n;
    }

    // Uniform double in [0, 1) with 53 random bits.
    double uniform01() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

private:
    explicit PathRng(std::uint64_t key) : key_(key) {}

    static std::uint64_t mix64(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ull;
    static constexpr std::uint64_t kSeedSalt = 0x5eed5a17c0ffee00ull;
    static constexpr std::uint64_t kChildSalt = 0xc41d5a17ab5eed00ull;

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace wks
