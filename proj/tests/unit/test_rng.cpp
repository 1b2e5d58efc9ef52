#include <doctest.h>

#include <cmath>
#include <vector>

#include "zipfirm/rng.hpp"

using zipfirm::CounterRng;
using zipfirm::philox4x32_10;

TEST_SUITE("rng") {

TEST_CASE("philox4x32-10 known-answer vectors") {
    using Block = std::array<std::uint32_t, 4>;
    CHECK(philox4x32_10({0, 0, 0, 0}, {0, 0}) == Block{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8});
    CHECK(philox4x32_10({0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff}, {0xffffffff, 0xffffffff}) ==
          Block{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd});
    CHECK(philox4x32_10({0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344}, {0xa4093822, 0x299f31d0}) ==
          Block{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1});
}

TEST_CASE("draw k is addressable from (seed, k)") {
    CounterRng a(42);
    std::vector<std::uint64_t> seq;
    for (int i = 0; i < 9; ++i) seq.push_back(a.next_u64());
    for (std::uint64_t k = 0; k < seq.size(); ++k) {
        CounterRng b(42, k);
        CHECK(b.next_u64() == seq[k]);
    }
    CHECK(a == CounterRng(42, 9));
    CHECK_FALSE(CounterRng(1) == CounterRng(2));
}

TEST_CASE("uniform and below stay in range") {
    CounterRng rng(7);
    double sum = 0.0;
    const int n = 200000;
    for (int i = 0; i < n; ++i) {
        const double u = rng.uniform();
        REQUIRE(u >= 0.0);
        REQUIRE(u < 1.0);
        sum += u;
    }
    // mean of n uniforms: sd = sqrt(1/12n)
    CHECK(std::abs(sum / n - 0.5) < 4.0 * std::sqrt(1.0 / (12.0 * n)));
    for (int i = 0; i < 1000; ++i) CHECK(rng.below(3) < 3);
    CHECK(rng.below(1) == 0);
}

}
