#include <cmath>

#include "doctest.h"
#include "rng.hpp"

using namespace purelab;

TEST_CASE("identical seeds give identical streams") {
    Rng a(42), b(42);
    for (int i = 0; i < 100; ++i) CHECK(a.next_u64() == b.next_u64());
}

TEST_CASE("child derivation is stable and independent of parent draws") {
    const Rng parent(7);
    Rng c1 = parent.child(3, 9);
    Rng c2 = parent.child(3, 9);
    Rng other = parent.child(4, 9);
    CHECK(c1.next_u64() == c2.next_u64());
    CHECK(c1.next_u64() != other.next_u64());
}

TEST_CASE("gaussian moments are sane") {
    Rng rng(5);
    const int n = 200000;
    double s = 0.0, s2 = 0.0, s3 = 0.0, s4 = 0.0;
    for (int i = 0; i < n; ++i) {
        const double z = rng.next_gaussian();
        s += z;
        s2 += z * z;
        s3 += z * z * z;
        s4 += z * z * z * z;
    }
    CHECK(std::abs(s / n) < 0.01);
    CHECK(std::abs(s2 / n - 1.0) < 0.02);
    CHECK(std::abs(s3 / n) < 0.05);
    CHECK(std::abs(s4 / n - 3.0) < 0.1);
}

TEST_CASE("next_below is within range and roughly uniform") {
    Rng rng(9);
    int counts[7] = {0};
    for (int i = 0; i < 70000; ++i) {
        const auto v = rng.next_below(7);
        REQUIRE(v < 7);
        ++counts[v];
    }
    for (int c : counts) CHECK(std::abs(c - 10000) < 500);
}
