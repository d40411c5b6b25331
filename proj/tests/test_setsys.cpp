#include <catch2/catch_amalgamated.hpp>

#include "wks/setsys.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

using namespace wks;

namespace {

std::vector<PointId> iota_points(std::int64_t n) {
    std::vector<PointId> p(static_cast<std::size_t>(n));
    std::iota(p.begin(), p.end(), 0);
    return p;
}

// True iff some family avoids p entirely.
bool has_avoiding_family(const SetSystem& sys, PointId p) {
    for (const auto& fam : sys.families) {
        if (std::find(fam.begin(), fam.end(), p) == fam.end()) return true;
    }
    return false;
}

// True iff every family contains p or q.
bool is_witness(const SetSystem& sys, PointId p, PointId q) {
    for (const auto& fam : sys.families) {
        bool has_p = std::find(fam.begin(), fam.end(), p) != fam.end();
        bool has_q = std::find(fam.begin(), fam.end(), q) != fam.end();
        if (!has_p && !has_q) return false;
    }
    return true;
}

}  // namespace

TEST_CASE("ground-set sizes follow the split recurrence", "[setsys]") {
    const std::int64_t expected[] = {1, 2, 4, 9, 30, 256, 16641, 69247362, 1198799355237124LL};
    for (int l = 0; l <= 8; ++l) CHECK(n_seq(l) == expected[l]);

    // recurrence self-consistency: n_l = (ceil(prev/2)+1)*(floor(prev/2)+1)
    for (int l = 1; l <= 8; ++l) {
        std::int64_t prev = n_seq(l - 1);
        std::int64_t up = (prev + 1) / 2 + 1;
        std::int64_t down = prev / 2 + 1;
        CHECK(n_seq(l) == up * down);
    }

    CHECK_THROWS_AS(n_seq(-1), std::domain_error);
    // the next term exceeds the signed 64-bit range
    CHECK_THROWS_AS(n_seq(9), std::range_error);
}

TEST_CASE("family counts and sizes", "[setsys]") {
    const std::int64_t counts[] = {2, 2, 3, 6, 16};
    const std::int64_t sizes[] = {1, 2, 4, 9, 30};
    for (int l = 1; l <= 5; ++l) {
        CHECK(family_count(l) == counts[l - 1]);
        CHECK(family_size(l) == sizes[l - 1]);
    }
    CHECK_THROWS_AS(family_count(0), std::domain_error);
    CHECK_THROWS_AS(family_size(0), std::domain_error);
}

TEST_CASE("harmonic numbers, exact and floating", "[setsys]") {
    CHECK(harmonic_exact(1) == Rational(1));
    CHECK(harmonic_exact(2) == Rational(3, 2));
    CHECK(harmonic_exact(3) == Rational(11, 6));
    CHECK(harmonic_exact(5) == Rational(137, 60));
    CHECK_THROWS_AS(harmonic_exact(0), std::domain_error);

    CHECK(harmonic(1) == 1.0);
    CHECK(harmonic(2) == 1.5);
    CHECK(harmonic(5) == Catch::Approx(137.0 / 60.0).epsilon(1e-15));

    // ln n < H(n) <= ln n + 1 over the whole desk range
    for (std::int64_t n = 1; n <= 10000; ++n) {
        double h = harmonic(n);
        double ln = std::log(static_cast<double>(n));
        REQUIRE(h > ln);
        REQUIRE(h <= ln + 1.0 + 1e-12);
    }
}

TEST_CASE("two-point construction", "[setsys]") {
    SetSystem sys = build_set_system({0, 1}, 1);
    REQUIRE(sys.families.size() == 2);
    CHECK(sys.families[0] == std::vector<PointId>{1});
    CHECK(sys.families[1] == std::vector<PointId>{0});
    CHECK(verify_set_system(sys, 1).all_ok());
}

TEST_CASE("four-point construction matches the worked example", "[setsys]") {
    // points a,b,c,d as 0,1,2,3
    SetSystem sys = build_set_system({0, 1, 2, 3}, 2);
    REQUIRE(sys.families.size() == 2);
    CHECK(sys.families[0] == std::vector<PointId>{1, 2});  // {b,c}
    CHECK(sys.families[1] == std::vector<PointId>{0, 3});  // {a,d}
    CHECK(verify_set_system(sys, 2).all_ok());

    // worked witness pairs: c -> a, a -> b
    CHECK(property3_witness(sys, 2) == 0);
    CHECK(property3_witness(sys, 0) == 1);
}

TEST_CASE("nine-point construction has three families of four", "[setsys]") {
    SetSystem sys = build_set_system(iota_points(9), 3);
    REQUIRE(sys.families.size() == 3);
    for (const auto& fam : sys.families) CHECK(fam.size() == 4);
    CHECK(sys.families[0] == std::vector<PointId>{1, 2, 3, 4});
    CHECK(sys.families[1] == std::vector<PointId>{0, 2, 5, 6});
    CHECK(sys.families[2] == std::vector<PointId>{0, 1, 7, 8});
    CHECK(verify_set_system(sys, 3).all_ok());
}

TEST_CASE("construction works on arbitrary distinct labels", "[setsys]") {
    SetSystem sys = build_set_system({7, 3, 11, 5}, 2);
    CHECK(sys.families[0] == std::vector<PointId>{3, 11});
    CHECK(sys.families[1] == std::vector<PointId>{7, 5});
    CHECK(verify_set_system(sys, 2).all_ok());
}

TEST_CASE("construction rejects malformed input", "[setsys]") {
    CHECK_THROWS_AS(build_set_system({0, 1, 2}, 2), std::domain_error);     // wrong size
    CHECK_THROWS_AS(build_set_system({0, 1, 1, 2}, 2), std::domain_error);  // duplicate
    CHECK_THROWS_AS(build_set_system({0, 1}, 0), std::domain_error);        // level too small
}

TEST_CASE("verifier accepts levels one through five", "[setsys]") {
    for (int l = 1; l <= 5; ++l) {
        SetSystem sys = build_set_system(iota_points(n_seq(l)), l);
        SetSystemReport rep = verify_set_system(sys, l);
        INFO("level " << l);
        CHECK(rep.sizes_ok);
        CHECK(rep.avoidance_ok);
        CHECK(rep.witness_ok);
    }
}

TEST_CASE("verifier pinpoints a family that smothers a point", "[setsys]") {
    // replace {a,d} with {a,b}: now both families contain b, so b has no
    // avoiding family; sizes and witnesses still check out
    SetSystem sys = build_set_system({0, 1, 2, 3}, 2);
    sys.families[1] = {0, 1};
    sys.meta_m.clear();
    sys.meta_partition.clear();
    SetSystemReport rep = verify_set_system(sys, 2);
    CHECK(rep.sizes_ok);
    CHECK_FALSE(rep.avoidance_ok);
    REQUIRE(rep.avoidance_counterexample.has_value());
    CHECK(*rep.avoidance_counterexample == 1);
    CHECK_FALSE(has_avoiding_family(sys, 1));
    CHECK(rep.witness_ok);
    CHECK_FALSE(rep.all_ok());
}

TEST_CASE("verifier reports an empty family list honestly", "[setsys]") {
    // no families: the count check and the avoidance check fail, but the
    // witness property is vacuously true
    SetSystem sys;
    sys.ground = {0, 1, 2, 3};
    SetSystemReport rep = verify_set_system(sys, 2);
    CHECK_FALSE(rep.sizes_ok);
    CHECK_FALSE(rep.avoidance_ok);
    CHECK(rep.witness_ok);
}

TEST_CASE("verifier flags an oversized family", "[setsys]") {
    SetSystem sys = build_set_system({0, 1, 2, 3}, 2);
    sys.families[0] = {1, 2, 3};
    sys.meta_m.clear();
    sys.meta_partition.clear();
    CHECK_FALSE(verify_set_system(sys, 2).sizes_ok);
}

TEST_CASE("witness pairs hold exhaustively through level four", "[setsys]") {
    for (int l = 1; l <= 4; ++l) {
        SetSystem sys = build_set_system(iota_points(n_seq(l)), l);
        for (PointId p : sys.ground) {
            PointId q = property3_witness(sys, p);
            INFO("level " << l << " p=" << p << " q=" << q);
            REQUIRE(sys.ground.end() != std::find(sys.ground.begin(), sys.ground.end(), q));
            REQUIRE(is_witness(sys, p, q));
        }
    }
}

TEST_CASE("witness search works without construction metadata", "[setsys]") {
    SetSystem sys = build_set_system(iota_points(9), 3);
    sys.meta_m.clear();
    sys.meta_partition.clear();
    for (PointId p : sys.ground) {
        PointId q = property3_witness(sys, p);
        CHECK(is_witness(sys, p, q));
    }
}

TEST_CASE("witness search fails loudly when no witness exists", "[setsys]") {
    SetSystem sys;
    sys.ground = {0, 1, 2};
    sys.families = {{0}, {1}};
    // p=2 is in neither family, and no single q fixes both
    CHECK_THROWS_AS(property3_witness(sys, 2), std::runtime_error);
    CHECK_THROWS_AS(property3_witness(sys, 99), std::domain_error);
}
